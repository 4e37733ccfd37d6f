#pragma once

#include "lexirag/corpus.hpp"
#include "lexirag/qa.hpp"
#include "lexirag/ranked_list.hpp"

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace lexirag {

struct FusionConfig {
    /// One non-negative weight per input list, summing to 1. BM25 first.
    std::vector<double> weights{0.55, 0.45};
    int k_rrf = 60;

    /// Throws Error(invalid_argument) when weights are negative, do not sum to
    /// 1 within 1e-9, or k_rrf <= 0.
    void validate() const;
};

/// Weighted reciprocal rank fusion:
///   fused(d) = sum_i w_i / (k_rrf + rank_i(d)),  rank 1-based, absent lists contribute 0.
/// Sorted by fused score descending, ties by doc_id.
RankedList rrf_fuse(std::span<const RankedList> lists, const FusionConfig& config);

/// Joint query/passage relevance scorer (cross-encoder contract).
/// Scores must be deterministic for fixed inputs within a session.
class RerankScorer {
public:
    virtual ~RerankScorer() = default;
    virtual std::string name() const = 0;
    /// One score per passage. Remote implementations throw Error(retriable) on transport failure.
    virtual std::vector<double> score(const std::string& query, std::span<const std::string> passages) = 0;
};

/// Fraction of distinct query tokens that occur in the passage. Local stand-in
/// for a cross-encoder; monotone in lexical overlap.
class OverlapScorer final : public RerankScorer {
public:
    std::string name() const override { return "overlap"; }
    std::vector<double> score(const std::string& query, std::span<const std::string> passages) override;
};

/// Rescores every candidate against its retrieval document text and re-sorts.
/// The output is a permutation of the input ids.
RankedList rerank(RerankScorer& scorer, const std::string& query, const RankedList& candidates, const Corpus& corpus);

struct RerankPair {
    std::string query;
    std::string doc_id;
    int label = 0;  // 1 relevant, 0 not

    friend bool operator==(const RerankPair&, const RerankPair&) = default;
};

/// Samples `n_pos` gold (question, document) pairs without replacement and
/// `n_neg` negatives pairing a uniformly drawn question with a uniformly drawn
/// document outside that question's gold set. Output is shuffled; the whole
/// sequence is a function of `seed`. Throws Error(insufficient_data).
std::vector<RerankPair> make_rerank_pairs(std::span<const QAItem> qa_items, const Corpus& corpus, std::size_t n_pos,
                                          std::size_t n_neg, std::uint64_t seed);

struct RerankSplit {
    std::vector<RerankPair> train;
    std::vector<RerankPair> validation;
    std::vector<RerankPair> test;
};

/// Consecutive split of an already shuffled pair list, e.g. 0.7/0.1 → 7,000/1,000/2,000 of 10,000.
RerankSplit split_rerank_pairs(const std::vector<RerankPair>& pairs, double train_fraction, double validation_fraction);

/// TSV: query<TAB>doc_id<TAB>label. Tabs and newlines inside queries become spaces.
void write_rerank_pairs(std::ostream& out, std::span<const RerankPair> pairs);

} // namespace lexirag
