#pragma once

#include "lexirag/labels.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lexirag::intent {

/// Sorted (feature index, value) pairs.
struct SparseVector {
    std::vector<std::uint32_t> indices;
    std::vector<float> values;

    std::size_t nnz() const noexcept { return indices.size(); }
    bool empty() const noexcept { return indices.empty(); }
    /// Value at `feature`, 0 if absent.
    float at(std::uint32_t feature) const noexcept;
    double norm() const noexcept;
};

/// Term vocabulary with smoothed idf: ln((1 + N) / (1 + df)) + 1.
class TfidfVocabulary {
public:
    struct Term {
        std::uint32_t index;
        std::uint32_t df;
        double idf;
        friend bool operator==(const Term&, const Term&) = default;
    };

    /// Tokenizes each query (diacritics stripped, stopwords kept; interrogatives
    /// carry intent signal). Terms found in fewer than `min_df` queries are
    /// dropped. Indices follow sorted term order. Throws on empty input.
    static TfidfVocabulary fit(std::span<const std::string> queries, std::size_t min_df = 1);

    std::size_t size() const noexcept { return terms_.size(); }
    std::size_t doc_count() const noexcept { return doc_count_; }
    const Term* find(const std::string& term) const;
    const std::map<std::string, Term>& terms() const noexcept { return terms_; }

    /// tf * idf per in-vocabulary token, L2-normalised; all-OOV input gives the zero vector.
    SparseVector vectorize(const std::string& query) const;

    void save(std::ostream& out) const;
    static TfidfVocabulary load(std::istream& in);

    friend bool operator==(const TfidfVocabulary&, const TfidfVocabulary&) = default;

private:
    std::map<std::string, Term> terms_;
    std::size_t doc_count_ = 0;
};

inline TfidfVocabulary fit_tfidf(std::span<const std::string> queries, std::size_t min_df = 1) {
    return TfidfVocabulary::fit(queries, min_df);
}

/// Row-major sparse feature matrix.
struct SparseMatrix {
    std::size_t n_features = 0;
    std::vector<SparseVector> rows;

    std::size_t n_rows() const noexcept { return rows.size(); }
    static SparseMatrix from_dense(const std::vector<std::vector<float>>& dense);
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when value <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<std::uint32_t> class_counts;  // leaves only

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    const TreeNode& leaf_for(const SparseVector& x) const;
    /// Class with the largest leaf count; lowest index on ties.
    std::uint32_t predict(const SparseVector& x) const;
    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestParams {
    std::size_t n_trees = 200;
    std::uint64_t seed = 0;
    /// Candidate features per split; 0 means floor(sqrt(n_features)).
    std::size_t max_features = 0;
    /// Worker threads for tree-level parallelism; 0 uses hardware concurrency.
    /// The model does not depend on this value.
    std::size_t threads = 1;
};

/// Bootstrap-aggregated CART trees (Gini impurity, unlimited depth, one
/// sample per leaf minimum). Classes are indices [0, n_classes).
class ForestModel {
public:
    ForestModel() = default;
    ForestModel(std::vector<DecisionTree> trees, std::size_t n_classes, std::uint64_t seed);

    std::size_t n_trees() const noexcept { return trees_.size(); }
    std::size_t n_classes() const noexcept { return n_classes_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

    /// Per-class tree vote counts.
    std::vector<std::uint32_t> votes(const SparseVector& x) const;

    struct Vote {
        std::uint32_t label;
        double share;  // fraction of trees voting `label`
    };
    /// Plurality class (lowest index on ties) and its vote share.
    Vote predict(const SparseVector& x) const;

    void save(std::ostream& out) const;
    static ForestModel load(std::istream& in);

    friend bool operator==(const ForestModel&, const ForestModel&) = default;

private:
    std::vector<DecisionTree> trees_;
    std::size_t n_classes_ = 0;
    std::uint64_t seed_ = 0;
};

/// Throws Error(invalid_argument) for size mismatches or fewer than two distinct classes.
ForestModel train_forest(const SparseMatrix& features, std::span<const std::uint32_t> labels, std::size_t n_classes,
                         const ForestParams& params);

struct LabeledQuery {
    std::string query;
    FineIntent label;
};

/// TSV `query<TAB>fine_label`. Throws Error(format) naming the bad line.
std::vector<LabeledQuery> read_labeled_tsv(std::istream& in);
void write_labeled_tsv(std::ostream& out, std::span<const LabeledQuery> rows);

struct Classification {
    RoutingIntent intent = RoutingIntent::other;
    std::optional<FineIntent> fine;  // plurality label, absent for empty queries
    double confidence = 0.0;
};

inline constexpr double kDefaultThreshold = 0.6;
inline constexpr std::size_t kDefaultMinDf = 2;

/// Vocabulary and forest persisted together in one versioned file.
class IntentModel {
public:
    IntentModel() = default;
    IntentModel(TfidfVocabulary vocab, ForestModel forest);

    /// Vocabulary terms must occur in at least `min_df` training queries, so
    /// one-off slot fillers (words, citations) do not become features.
    static IntentModel train(std::span<const LabeledQuery> data, const ForestParams& params,
                             std::size_t min_df = kDefaultMinDf);

    const TfidfVocabulary& vocabulary() const noexcept { return vocab_; }
    const ForestModel& forest() const noexcept { return forest_; }

    Classification classify(const std::string& query, double threshold = kDefaultThreshold) const;

    void save(std::ostream& out) const;
    static IntentModel load(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static IntentModel load(const std::filesystem::path& path);

    friend bool operator==(const IntentModel&, const IntentModel&) = default;

private:
    TfidfVocabulary vocab_;
    ForestModel forest_;
};

/// Below `threshold` vote share (or for all-OOV queries) the answer is Other;
/// otherwise the plurality fine label routed onto its routing intent.
Classification classify_intent(const ForestModel& model, const TfidfVocabulary& vocab, const std::string& query,
                               double threshold = kDefaultThreshold);

} // namespace lexirag::intent
