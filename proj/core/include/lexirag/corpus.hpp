#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lexirag {

/// Ordered key/value text block (etymology, inscriptions). Kept as free text;
/// no sub-schema is imposed.
using KeyedText = std::vector<std::pair<std::string, std::string>>;

/// One dictionary record: a lexical unit with its tagging, dating, citation
/// (shahid) and bibliographic documentation. Text is stored diacritized.
struct LexicalEntry {
    std::string entry_id;
    std::string root;
    std::string root_id;
    std::string lemma_id;
    std::string word;
    std::optional<std::string> compound_form;
    std::string morphology;
    std::string date_label;
    std::string citation;
    std::optional<std::string> author;
    std::optional<std::string> source_title;
    std::optional<std::string> surah;
    std::optional<std::string> ayah;
    std::optional<std::string> hadith_ref;
    std::optional<std::string> semantic_field;
    std::string meaning;

    bool is_quranic() const noexcept;
    bool is_hadith() const noexcept;

    friend bool operator==(const LexicalEntry&, const LexicalEntry&) = default;
};

struct RootRecord {
    std::string root_id;
    std::string root;
    std::optional<KeyedText> etymology;
    std::optional<KeyedText> inscriptions;

    friend bool operator==(const RootRecord&, const RootRecord&) = default;
};

/// The unit of indexing: diacritics-free text for one entry.
struct RetrievalDocument {
    std::string doc_id;
    std::string text;
    std::string entry_ref;
};

RetrievalDocument build_retrieval_document(const LexicalEntry& entry);

struct IngestStats {
    std::size_t entries_read = 0;
    std::size_t entries_kept = 0;
    std::size_t malformed = 0;         // not a JSON object / wrong value types
    std::size_t missing_required = 0;  // entry_id, word, citation, meaning or root_id absent/empty
    std::size_t duplicate_ids = 0;     // later record with an already-seen entry_id
    std::size_t unknown_root = 0;      // root_id not present in the roots file
    std::size_t roots_read = 0;
    std::size_t roots_kept = 0;
    std::size_t roots_dropped = 0;

    std::size_t dropped() const noexcept { return malformed + missing_required + duplicate_ids + unknown_root; }
};

/// Immutable after construction; safe for concurrent readers.
class Corpus {
public:
    Corpus() = default;
    /// Builds documents and lookups. Throws Error(invalid_argument) if the
    /// type invariants do not hold.
    Corpus(std::vector<LexicalEntry> entries, std::vector<RootRecord> roots);

    const std::vector<LexicalEntry>& entries() const noexcept { return entries_; }
    const std::vector<RootRecord>& roots() const noexcept { return roots_; }
    const std::vector<RetrievalDocument>& documents() const noexcept { return documents_; }
    std::size_t size() const noexcept { return entries_.size(); }

    /// Throws Error(not_found).
    const LexicalEntry& entry(const std::string& entry_id) const;
    const RetrievalDocument& document(const std::string& doc_id) const;
    const RootRecord& root(const std::string& root_id) const;

    const LexicalEntry* find_entry(const std::string& entry_id) const noexcept;
    const RootRecord* find_root(const std::string& root_id) const noexcept;

    /// Entry ids under a root, in corpus order.
    std::vector<std::string> entries_of_root(const std::string& root_id) const;

private:
    std::vector<LexicalEntry> entries_;
    std::vector<RootRecord> roots_;
    std::vector<RetrievalDocument> documents_;
    std::unordered_map<std::string, std::size_t> entry_pos_;
    std::unordered_map<std::string, std::size_t> root_pos_;
};

struct IngestResult {
    Corpus corpus;
    IngestStats stats;
};

/// Reads entry and root JSON Lines streams. Bad records are dropped and
/// counted; unreadable input (invalid UTF-8 or a stream failure) throws
/// Error(io) naming the line.
IngestResult ingest_entries(std::istream& entry_stream, std::istream& root_stream);
IngestResult ingest_files(const std::filesystem::path& entries, const std::filesystem::path& roots);

/// Entries cited from the Qur'an (surah and ayah) or Hadith, sorted by entry_id.
std::vector<LexicalEntry> filter_quran_hadith(const Corpus& corpus);

/// Throws Error(not_found) for ids absent from the corpus.
const LexicalEntry& lookup_entry(const Corpus& corpus, const std::string& doc_id);

// Corpus directory layout.
namespace corpus_files {
inline constexpr const char* entries = "entries.jsonl";
inline constexpr const char* roots = "roots.jsonl";
inline constexpr const char* manifest = "manifest.json";
inline constexpr const char* bm25_index = "bm25.idx";
inline constexpr const char* vectors = "vectors.bin";
inline constexpr const char* intent_model = "intent.model";
} // namespace corpus_files

void save_corpus(const Corpus& corpus, const IngestStats& stats, const std::filesystem::path& dir);
/// Throws Error(missing_artifact) if the directory lacks the corpus files.
Corpus load_corpus(const std::filesystem::path& dir);

std::string entry_to_json(const LexicalEntry& entry);
std::string root_to_json(const RootRecord& root);

} // namespace lexirag
