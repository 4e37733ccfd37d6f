#pragma once

#include "lexirag/corpus.hpp"
#include "lexirag/intent.hpp"
#include "lexirag/labels.hpp"
#include "lexirag/qa.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace lexirag::datagen {

/// Slot names a template may use.
const std::vector<std::string>& known_slots();

struct Template {
    FineIntent intent = FineIntent::other;
    std::string pattern;
    int variant_id = 0;

    /// Slot names in order of first appearance.
    std::vector<std::string> slots() const;
    friend bool operator==(const Template&, const Template&) = default;
};

using SlotValues = std::map<std::string, std::string>;

/// Substitutes every {slot}; nullopt when a slot has no value or an empty one.
std::optional<std::string> fill(const std::string& pattern, const SlotValues& values);

/// Variants separated by lines holding only `---`. Throws Error(format) for
/// unknown slots or unbalanced braces.
std::vector<Template> parse_templates(FineIntent intent, std::istream& in);

struct TemplateSet {
    std::map<FineIntent, std::vector<Template>> questions;
    std::map<FineIntent, std::vector<Template>> answers;

    /// Throws Error(format) unless every fine intent has at least two question
    /// variants and one answer template.
    void validate() const;

    /// Reads <dir>/questions/<fine>.txt and <dir>/answers/<fine>.txt.
    static TemplateSet load(const std::filesystem::path& dir);
    static const TemplateSet& builtin();
};

/// Gregorian year from a dating label such as "11هـ=632م" or "150ق.هـ=474م".
/// Years marked ق.م are negative.
std::optional<int> gregorian_year(const std::string& date_label);

struct QAStats {
    std::map<FineIntent, std::size_t> generated;
    std::map<FineIntent, std::size_t> skipped;  // (entry or root, intent) lacking a slot field
};

struct QAGeneration {
    std::vector<QAItem> items;
    QAStats stats;
};

/// One item per eligible (entry, intent) for entry-level intents and per
/// eligible (root, intent) for root-level intents, with a seeded variant
/// choice among the fully fillable templates. Deterministic under `seed`.
QAGeneration generate_qa(const Corpus& corpus, const TemplateSet& templates, std::uint64_t seed);

struct IntentDataset {
    std::vector<intent::LabeledQuery> train;
    std::vector<intent::LabeledQuery> test;
};

/// Exactly `per_class` distinct questions per fine intent, round(per_class * test_fraction)
/// of them held out. Throws Error(insufficient_data) naming the first short class.
IntentDataset generate_intent_dataset(std::span<const QAItem> items, std::size_t per_class, double test_fraction,
                                      std::uint64_t seed);

enum class EvalFilter { all, quran_hadith };

/// The six question types used for answer evaluation.
bool is_answer_eval_type(FineIntent fine) noexcept;

struct EvalSetOptions {
    EvalFilter filter = EvalFilter::all;
    std::uint64_t seed = 0;
    std::optional<std::size_t> limit;
    bool answer_types_only = false;
};

struct EvalSet {
    std::vector<QAItem> items;
    std::map<FineIntent, std::size_t> distribution;
    /// Set when `limit` exceeded what the filter left.
    bool truncated_request = false;
};

EvalSet build_eval_set(std::span<const QAItem> items, const Corpus& corpus, const EvalSetOptions& options);

/// TSV `query_id<TAB>doc_id`, one line per gold document.
void write_qrels(std::ostream& out, std::span<const QAItem> items);

} // namespace lexirag::datagen
