#pragma once

#include "lexirag/ranked_list.hpp"

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lexirag {

using Vector = std::vector<float>;

/// Maps texts into a shared embedding space. Implementations must return one
/// vector of exactly dimension() components per input text, and the same
/// vector for the same text within a session.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string name() const = 0;
    virtual std::size_t dimension() const = 0;

    /// Raw provider call; prefer embed_batch(), which validates the result.
    virtual std::vector<Vector> embed(std::span<const std::string> texts) = 0;
};

/// Embeds `texts` and checks the provider contract. Throws Error(invalid_argument)
/// for empty texts and Error(contract_violation) for count or dimension mismatches.
std::vector<Vector> embed_batch(EmbeddingProvider& provider, std::span<const std::string> texts);

/// Deterministic provider backed by registered text → vector pairs; unknown
/// texts raise Error(not_found). Lookups use the diacritics-free, whitespace
/// normalized form of the text.
class FileEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit FileEmbeddingProvider(std::size_t dimension, std::string name = "file");

    /// JSON Lines, one {"text": ..., "embedding": [...]} per line.
    static FileEmbeddingProvider load(const std::filesystem::path& path);
    static FileEmbeddingProvider parse(std::istream& in);
    void save(const std::filesystem::path& path) const;

    /// Throws Error(invalid_argument) on dimension mismatch.
    void add(const std::string& text, Vector v);
    std::size_t size() const noexcept { return table_.size(); }

    std::string name() const override { return name_; }
    std::size_t dimension() const override { return dimension_; }
    std::vector<Vector> embed(std::span<const std::string> texts) override;

private:
    std::size_t dimension_;
    std::string name_;
    std::map<std::string, Vector> table_;
};

/// Exact (flat) L2 index. Immutable after construction.
class VectorIndex {
public:
    VectorIndex() = default;

    /// Throws Error(invalid_argument) for length or dimension mismatches and duplicate ids.
    VectorIndex(std::span<const Vector> vectors, std::vector<std::string> ids);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    std::span<const float> vector(std::size_t i) const { return {data_.data() + i * dimension_, dimension_}; }

    /// Header (magic, version, dimension, count), id table, packed float32 vectors.
    void save(std::ostream& out) const;
    static VectorIndex load(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static VectorIndex load(const std::filesystem::path& path);

    friend bool operator==(const VectorIndex&, const VectorIndex&) = default;

private:
    std::size_t dimension_ = 0;
    std::vector<std::string> ids_;
    std::vector<float> data_;
};

inline VectorIndex build_vector_index(std::span<const Vector> vectors, std::vector<std::string> ids) {
    return VectorIndex(vectors, std::move(ids));
}

double squared_l2(std::span<const float> a, std::span<const float> b) noexcept;

/// min(k, size) nearest ids by ascending squared L2 distance; score is the
/// negated squared distance, ties by ascending doc_id.
RankedList knn_l2(const VectorIndex& index, std::span<const float> query, std::size_t k);

} // namespace lexirag
