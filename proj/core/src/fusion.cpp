#include "lexirag/fusion.hpp"

#include "lexirag/arabic_text.hpp"
#include "lexirag/error.hpp"
#include "lexirag/random.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace lexirag {

void FusionConfig::validate() const {
    if (k_rrf <= 0) throw Error(ErrorKind::invalid_argument, "k_rrf must be > 0");
    if (weights.empty()) throw Error(ErrorKind::invalid_argument, "fusion needs at least one weight");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorKind::invalid_argument, "fusion weights must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorKind::invalid_argument, "fusion weights must sum to 1");
}

RankedList rrf_fuse(std::span<const RankedList> lists, const FusionConfig& config) {
    config.validate();
    if (lists.size() != config.weights.size()) {
        throw Error(ErrorKind::invalid_argument, "rrf_fuse: " + std::to_string(lists.size()) + " lists but " +
                                                     std::to_string(config.weights.size()) + " weights");
    }
    std::unordered_map<std::string, double> fused;
    for (std::size_t i = 0; i < lists.size(); ++i) {
        const auto& items = lists[i].items;
        for (std::size_t r = 0; r < items.size(); ++r) {
            const double rank = static_cast<double>(r + 1);
            fused[items[r].doc_id] += config.weights[i] / (static_cast<double>(config.k_rrf) + rank);
        }
    }
    RankedList out;
    out.items.reserve(fused.size());
    for (auto& [id, score] : fused) out.items.push_back(ScoredDoc{id, score});
    sort_ranked(out.items);
    return out;
}

std::vector<double> OverlapScorer::score(const std::string& query, std::span<const std::string> passages) {
    const auto q = text::tokenize(query);
    const std::set<std::string> q_terms(q.begin(), q.end());
    std::vector<double> scores;
    scores.reserve(passages.size());
    for (const auto& passage : passages) {
        if (q_terms.empty()) {
            scores.push_back(0.0);
            continue;
        }
        const auto p = text::tokenize(passage);
        const std::unordered_set<std::string> p_terms(p.begin(), p.end());
        std::size_t shared = 0;
        for (const auto& t : q_terms) shared += p_terms.contains(t) ? 1 : 0;
        scores.push_back(static_cast<double>(shared) / static_cast<double>(q_terms.size()));
    }
    return scores;
}

RankedList rerank(RerankScorer& scorer, const std::string& query, const RankedList& candidates, const Corpus& corpus) {
    RankedList out;
    if (candidates.empty()) return out;
    std::vector<std::string> passages;
    passages.reserve(candidates.size());
    for (const auto& c : candidates.items) passages.push_back(corpus.document(c.doc_id).text);
    const auto scores = scorer.score(query, passages);
    if (scores.size() != passages.size()) {
        throw Error(ErrorKind::contract_violation, scorer.name() + ": returned " + std::to_string(scores.size()) +
                                                       " scores for " + std::to_string(passages.size()) + " passages");
    }
    out.items.reserve(candidates.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out.items.push_back(ScoredDoc{candidates[i].doc_id, scores[i]});
    sort_ranked(out.items);
    return out;
}

std::vector<RerankPair> make_rerank_pairs(std::span<const QAItem> qa_items, const Corpus& corpus, std::size_t n_pos,
                                          std::size_t n_neg, std::uint64_t seed) {
    const auto& docs = corpus.documents();
    if (docs.size() < 2) {
        throw Error(ErrorKind::insufficient_data, "rerank pairs need more than one document, corpus has " +
                                                      std::to_string(docs.size()));
    }

    std::unordered_map<std::string, std::unordered_set<std::string>> gold;
    std::vector<std::string> questions;
    std::vector<std::pair<std::string, std::string>> gold_pairs;
    for (const auto& item : qa_items) {
        auto [it, fresh] = gold.try_emplace(item.question);
        if (fresh) questions.push_back(item.question);
        for (const auto& id : item.gold_doc_ids) {
            if (it->second.insert(id).second) gold_pairs.emplace_back(item.question, id);
        }
    }
    if (n_pos > gold_pairs.size()) {
        throw Error(ErrorKind::insufficient_data, "requested " + std::to_string(n_pos) + " positive pairs but only " +
                                                      std::to_string(gold_pairs.size()) + " gold pairs exist (short by " +
                                                      std::to_string(n_pos - gold_pairs.size()) + ")");
    }

    Rng rng(seed);
    std::vector<RerankPair> pairs;
    pairs.reserve(n_pos + n_neg);

    std::vector<std::size_t> order(gold_pairs.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < n_pos; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
        std::swap(order[i], order[j]);
        const auto& [q, d] = gold_pairs[order[i]];
        pairs.push_back(RerankPair{q, d, 1});
    }

    std::vector<const std::string*> negatable;
    for (const auto& q : questions) {
        if (gold.at(q).size() < docs.size()) negatable.push_back(&q);
    }
    if (n_neg > 0 && negatable.empty()) {
        throw Error(ErrorKind::insufficient_data, "no question has a non-gold document to pair with");
    }
    std::set<std::pair<std::string_view, std::string_view>> used;
    const std::size_t max_attempts = 64 * n_neg + 1024;
    std::size_t attempts = 0;
    std::size_t made = 0;
    while (made < n_neg) {
        if (++attempts > max_attempts) {
            throw Error(ErrorKind::insufficient_data, "could only form " + std::to_string(made) + " of " +
                                                          std::to_string(n_neg) + " distinct negative pairs (short by " +
                                                          std::to_string(n_neg - made) + ")");
        }
        const std::string& q = *negatable[rng.below(negatable.size())];
        const std::string& d = docs[rng.below(docs.size())].doc_id;
        if (gold.at(q).contains(d)) continue;
        if (!used.emplace(q, d).second) continue;
        pairs.push_back(RerankPair{q, d, 0});
        ++made;
    }

    rng.shuffle(std::span<RerankPair>(pairs));
    return pairs;
}

RerankSplit split_rerank_pairs(const std::vector<RerankPair>& pairs, double train_fraction, double validation_fraction) {
    if (train_fraction < 0 || validation_fraction < 0 || train_fraction + validation_fraction > 1.0 + 1e-12) {
        throw Error(ErrorKind::invalid_argument, "split fractions must be non-negative and sum to at most 1");
    }
    const auto n = pairs.size();
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n))));
    RerankSplit split;
    split.train.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.assign(pairs.begin() + static_cast<std::ptrdiff_t>(n_train),
                            pairs.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    split.test.assign(pairs.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), pairs.end());
    return split;
}

void write_rerank_pairs(std::ostream& out, std::span<const RerankPair> pairs) {
    for (const auto& p : pairs) {
        std::string q = p.query;
        for (auto& c : q) {
            if (c == '\t' || c == '\n' || c == '\r') c = ' ';
        }
        out << q << '\t' << p.doc_id << '\t' << p.label << '\n';
    }
}

} // namespace lexirag
