#include "lexirag/error.hpp"
#include "lexirag/fusion.hpp"
#include "lexirag/random.hpp"

#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

namespace lexirag {
namespace {

RankedList list_of(std::vector<std::string> ids) {
    RankedList r;
    double s = static_cast<double>(ids.size());
    for (auto& id : ids) r.items.push_back({std::move(id), s--});
    return r;
}

LexicalEntry make_entry(const std::string& id, const std::string& word, const std::string& meaning) {
    LexicalEntry e;
    e.entry_id = id;
    e.root_id = "R1";
    e.root = "جذر";
    e.word = word;
    e.meaning = meaning;
    e.citation = "شاهد";
    return e;
}

Corpus small_corpus() {
    return Corpus({make_entry("a", "قلب", "العضو"), make_entry("b", "شجر", "نبات"), make_entry("c", "نهر", "ماء")},
                  {RootRecord{"R1", "جذر", std::nullopt, std::nullopt}});
}

class ConstantScorer final : public RerankScorer {
public:
    std::string name() const override { return "constant"; }
    std::vector<double> score(const std::string&, std::span<const std::string> passages) override {
        return std::vector<double>(passages.size(), 0.5);
    }
};

TEST(Rrf, WeightedFixtureRanking) {
    const std::vector<RankedList> lists = {list_of({"d1", "d2", "d3"}), list_of({"d3", "d1", "d2"})};
    const auto fused = rrf_fuse(lists, FusionConfig{});
    EXPECT_EQ(fused.ids(), (std::vector<std::string>{"d1", "d3", "d2"}));
    EXPECT_NEAR(fused[0].score, 0.55 / 61 + 0.45 / 62, 1e-15);
    EXPECT_NEAR(fused[1].score, 0.55 / 63 + 0.45 / 61, 1e-15);
    EXPECT_NEAR(fused[2].score, 0.55 / 62 + 0.45 / 63, 1e-15);
}

TEST(Rrf, AbsentListContributesNothing) {
    const std::vector<RankedList> lists = {list_of({"x"}), list_of({"y"})};
    const auto fused = rrf_fuse(lists, FusionConfig{});
    EXPECT_EQ(fused[0].doc_id, "x");
    EXPECT_DOUBLE_EQ(fused[0].score, 0.55 / 61);
}

TEST(Rrf, SingleListPreservesOrder) {
    Rng rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::string> ids;
        for (auto n = rng.below(30); n > 0; --n) ids.push_back("d" + std::to_string(ids.size()) + "_" + std::to_string(rng.below(1000)));
        const std::vector<RankedList> lists = {list_of(ids)};
        const FusionConfig cfg{{1.0}, static_cast<int>(1 + rng.below(100))};
        EXPECT_EQ(rrf_fuse(lists, cfg).ids(), ids);
    }
}

TEST(Rrf, ScoresPositiveAndBounded) {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<RankedList> lists(2);
        for (auto& l : lists) {
            std::vector<std::string> ids;
            for (int i = 0; i < 20; ++i) ids.push_back("d" + std::to_string(i));
            Rng(rng.next()).shuffle(std::span(ids));
            ids.resize(rng.below(20));
            l = list_of(ids);
        }
        const auto fused = rrf_fuse(lists, FusionConfig{});
        EXPECT_TRUE(is_well_formed(fused));
        for (const auto& d : fused.items) {
            EXPECT_GT(d.score, 0.0);
            EXPECT_LE(d.score, 1.0 / 61 + 1e-15);
        }
    }
}

TEST(Rrf, RejectsBadConfig) {
    const std::vector<RankedList> lists = {list_of({"a"}), list_of({"b"})};
    EXPECT_THROW(rrf_fuse(lists, FusionConfig{{0.5, 0.6}, 60}), Error);
    EXPECT_THROW(rrf_fuse(lists, FusionConfig{{1.0}, 60}), Error);
    EXPECT_THROW(rrf_fuse(lists, FusionConfig{{0.5, 0.5}, 0}), Error);
    EXPECT_THROW(rrf_fuse(lists, FusionConfig{{1.5, -0.5}, 60}), Error);
}

TEST(Rerank, OverlapDocumentFirst) {
    const auto corpus = small_corpus();
    OverlapScorer scorer;
    const auto r = rerank(scorer, "قلب العضو", list_of({"b", "a"}), corpus);
    EXPECT_EQ(r[0].doc_id, "a");
}

TEST(Rerank, ConstantScorerSortsById) {
    const auto corpus = small_corpus();
    ConstantScorer scorer;
    EXPECT_EQ(rerank(scorer, "x", list_of({"c", "a", "b"}), corpus).ids(), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_TRUE(rerank(scorer, "x", RankedList{}, corpus).empty());
}

TEST(Rerank, IsPermutation) {
    const auto corpus = testing::make_synthetic_corpus({.roots = 20, .entries_per_root = 2, .seed = 2});
    OverlapScorer scorer;
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> ids;
        for (const auto& d : corpus.documents()) {
            if (rng.below(3) == 0) ids.push_back(d.doc_id);
        }
        const auto in = list_of(ids);
        auto out = rerank(scorer, corpus.documents()[rng.below(corpus.size())].text, in, corpus).ids();
        std::sort(ids.begin(), ids.end());
        std::sort(out.begin(), out.end());
        EXPECT_EQ(out, ids);
    }
}

TEST(Rerank, OverlapScorerDeterministicAndBounded) {
    OverlapScorer s;
    const std::vector<std::string> passages = {"قلب العضو", "شجر", ""};
    const auto a = s.score("قلب نهر", passages);
    EXPECT_EQ(a, s.score("قلب نهر", passages));
    EXPECT_EQ(a, (std::vector<double>{0.5, 0.0, 0.0}));
}

std::vector<QAItem> three_questions() {
    std::vector<QAItem> items;
    for (const auto& [q, d] : std::vector<std::pair<std::string, std::string>>{{"q1", "a"}, {"q2", "b"}, {"q3", "c"}}) {
        QAItem it;
        it.id = q;
        it.question = q;
        it.gold_answer = "x";
        it.gold_doc_ids = {d};
        items.push_back(it);
    }
    return items;
}

TEST(RerankPairs, BalancedWithoutLeakage) {
    const auto corpus = small_corpus();
    const auto items = three_questions();
    const auto pairs = make_rerank_pairs(items, corpus, 3, 3, 1);
    ASSERT_EQ(pairs.size(), 6U);
    EXPECT_EQ(std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.label == 1; }), 3);
    for (const auto& p : pairs) {
        const bool gold = (p.query == "q1" && p.doc_id == "a") || (p.query == "q2" && p.doc_id == "b") ||
                          (p.query == "q3" && p.doc_id == "c");
        EXPECT_EQ(gold, p.label == 1);
    }
}

TEST(RerankPairs, DeterministicBytes) {
    const auto corpus = small_corpus();
    const auto items = three_questions();
    std::ostringstream a, b, c;
    const auto p1 = make_rerank_pairs(items, corpus, 3, 5, 9);
    const auto p2 = make_rerank_pairs(items, corpus, 3, 5, 9);
    write_rerank_pairs(a, p1);
    write_rerank_pairs(b, p2);
    EXPECT_EQ(a.str(), b.str());
    write_rerank_pairs(c, make_rerank_pairs(items, corpus, 3, 5, 10));
    EXPECT_NE(a.str(), c.str());
}

TEST(RerankPairs, TooManyPositives) {
    const auto corpus = small_corpus();
    const auto items = three_questions();
    try {
        make_rerank_pairs(items, corpus, 4, 1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
    }
}

TEST(RerankPairs, ProductionSplitShape) {
    std::vector<RerankPair> pairs(10000);
    const auto s = split_rerank_pairs(pairs, 0.7, 0.1);
    EXPECT_EQ(s.train.size(), 7000U);
    EXPECT_EQ(s.validation.size(), 1000U);
    EXPECT_EQ(s.test.size(), 2000U);
    EXPECT_THROW(split_rerank_pairs(pairs, 0.8, 0.3), Error);
}

TEST(RerankPairs, WriterFlattensTabs) {
    std::ostringstream out;
    const std::vector<RerankPair> pairs = {{"a\tb\nc", "d1", 1}};
    write_rerank_pairs(out, pairs);
    EXPECT_EQ(out.str(), "a b c\td1\t1\n");
}

} // namespace
} // namespace lexirag
