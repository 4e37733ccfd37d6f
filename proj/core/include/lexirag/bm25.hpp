#pragma once

#include "lexirag/arabic_text.hpp"
#include "lexirag/corpus.hpp"
#include "lexirag/ranked_list.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexirag {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    /// Throws Error(invalid_argument) unless k1 > 0 and b in [0, 1].
    void validate() const;
};

struct Posting {
    std::uint32_t doc = 0;  // ordinal into InvertedIndex::doc_ids()
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

/// Term → postings over tokenized documents. Immutable after build.
class InvertedIndex {
public:
    InvertedIndex() = default;

    static InvertedIndex build(std::span<const RetrievalDocument> documents);

    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    double avg_doc_length() const noexcept { return avg_doc_length_; }
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    const std::vector<std::uint32_t>& doc_lengths() const noexcept { return doc_lengths_; }
    std::size_t term_count() const noexcept { return postings_.size(); }

    /// Empty span for unknown terms.
    std::span<const Posting> postings(const std::string& term) const;
    std::size_t document_frequency(const std::string& term) const { return postings(term).size(); }

    void save(std::ostream& out) const;
    static InvertedIndex load(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

    friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

private:
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
};

/// ln(1 + (N - df + 0.5) / (df + 0.5)); never negative.
double bm25_idf(std::size_t doc_count, std::size_t df) noexcept;

/// Okapi BM25 with per-term boosts as multiplicative factors. Returns the
/// top-k documents with positive score; ties by ascending doc_id. Repeated
/// query tokens count once.
RankedList bm25_search(const InvertedIndex& index, const text::TokenizedQuery& query, const Bm25Params& params,
                       std::size_t k);

} // namespace lexirag
