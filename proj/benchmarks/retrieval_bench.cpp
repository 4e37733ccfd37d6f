#include "lexirag/bm25.hpp"
#include "lexirag/dense.hpp"
#include "lexirag/fusion.hpp"
#include "lexirag/random.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace lexirag;

std::vector<RetrievalDocument> random_documents(std::size_t n, std::size_t vocab, Rng& rng) {
    std::vector<RetrievalDocument> docs;
    docs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        for (auto len = 20 + rng.below(60); len > 0; --len) text += "w" + std::to_string(rng.below(vocab)) + ' ';
        const auto id = "d" + std::to_string(i);
        docs.push_back({id, std::move(text), id});
    }
    return docs;
}

void BM_Bm25Search(benchmark::State& state) {
    Rng rng(1);
    const auto docs = random_documents(static_cast<std::size_t>(state.range(0)), 5000, rng);
    const auto index = InvertedIndex::build(docs);
    text::TokenizedQuery q;
    q.tokens = {"w1", "w20", "w300", "w4000"};
    q.boosts = {{"w300", 3}};
    for (auto _ : state) benchmark::DoNotOptimize(bm25_search(index, q, {}, 10));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bm25Search)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_Bm25Build(benchmark::State& state) {
    Rng rng(2);
    const auto docs = random_documents(static_cast<std::size_t>(state.range(0)), 5000, rng);
    for (auto _ : state) benchmark::DoNotOptimize(InvertedIndex::build(docs));
}
BENCHMARK(BM_Bm25Build)->Arg(10000);

void BM_KnnL2(benchmark::State& state) {
    Rng rng(3);
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::size_t dim = 768;
    std::vector<Vector> vs(n, Vector(dim));
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& x : vs[i]) x = static_cast<float>(rng.unit());
        ids.push_back("v" + std::to_string(i));
    }
    const VectorIndex index(vs, ids);
    Vector q(dim);
    for (auto& x : q) x = static_cast<float>(rng.unit());
    for (auto _ : state) benchmark::DoNotOptimize(knn_l2(index, q, 10));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KnnL2)->Arg(1000)->Arg(20000);

void BM_RrfFuse(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<RankedList> lists(2);
    for (std::size_t i = 0; i < n; ++i) {
        lists[0].items.push_back({"d" + std::to_string(i), static_cast<double>(n - i)});
        lists[1].items.push_back({"d" + std::to_string((i * 7) % (2 * n)), static_cast<double>(n - i)});
    }
    const FusionConfig config;
    for (auto _ : state) benchmark::DoNotOptimize(rrf_fuse(lists, config));
}
BENCHMARK(BM_RrfFuse)->Arg(10)->Arg(1000);

} // namespace
