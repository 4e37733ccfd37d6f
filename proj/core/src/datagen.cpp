#include "lexirag/datagen.hpp"

#include "lexirag/arabic_text.hpp"
#include "lexirag/error.hpp"
#include "lexirag/random.hpp"
#include "lexirag/resources.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace lexirag::datagen {

namespace {

constexpr FineIntent kEntryLevel[] = {
    FineIntent::basic_meaning, FineIntent::contextual_meaning, FineIntent::author, FineIntent::date,
    FineIntent::source,        FineIntent::morphology,         FineIntent::other,
};

std::size_t fine_index(FineIntent fine) {
    return static_cast<std::size_t>(std::find(kFineIntents.begin(), kFineIntents.end(), fine) - kFineIntents.begin());
}

// Slot value plus the pieces the exact-match judge looks for.
struct Slot {
    std::string value;
    std::vector<std::string> parts;
};
using Slots = std::map<std::string, Slot>;

void put(Slots& slots, const std::string& name, const std::string& value) {
    if (!value.empty()) slots[name] = Slot{value, {value}};
}

void put(Slots& slots, const std::string& name, const std::optional<std::string>& value) {
    if (value) put(slots, name, *value);
}

void put_keyed(Slots& slots, const std::string& name, const std::optional<KeyedText>& block) {
    if (!block || block->empty()) return;
    Slot s;
    for (const auto& [key, value] : *block) {
        if (!s.value.empty()) s.value += "؛ ";
        s.value += value;
        s.parts.push_back(value);
    }
    slots[name] = std::move(s);
}

Slots entry_slots(const LexicalEntry& e, const RootRecord& r) {
    Slots s;
    put(s, "word", e.word);
    put(s, "citation", e.citation);
    put(s, "root", e.root);
    put(s, "meaning", e.meaning);
    put(s, "compound", e.compound_form);
    put(s, "date", e.date_label);
    put(s, "author", e.author);
    put(s, "source", e.source_title);
    put(s, "surah", e.surah);
    put(s, "ayah", e.ayah);
    put(s, "hadith", e.hadith_ref);
    put(s, "morphology", e.morphology);
    put(s, "semantic_field", e.semantic_field);
    put(s, "root_id", r.root_id);
    put(s, "lemma_id", e.lemma_id);
    put_keyed(s, "etymology", r.etymology);
    put_keyed(s, "inscriptions", r.inscriptions);
    return s;
}

SlotValues values_of(const Slots& slots) {
    SlotValues out;
    for (const auto& [name, slot] : slots) out.emplace(name, slot.value);
    return out;
}

std::string gold_key(const LexicalEntry& e) {
    return text::normalize(e.word) + '\x1f' + text::normalize(e.compound_form.value_or("")) + '\x1f' +
           text::normalize(e.meaning);
}

struct Emitter {
    const TemplateSet& templates;
    std::uint64_t seed;
    QAGeneration& out;

    void emit(FineIntent fine, const std::string& subject_id, const Slots& slots, std::vector<std::string> gold,
              std::uint64_t stream) {
        const SlotValues values = values_of(slots);
        auto fillable = [&](const std::vector<Template>& variants) {
            std::vector<std::pair<const Template*, std::string>> ok;
            for (const auto& t : variants) {
                if (auto s = fill(t.pattern, values)) ok.emplace_back(&t, std::move(*s));
            }
            return ok;
        };
        const auto qs = fillable(templates.questions.at(fine));
        const auto as = fillable(templates.answers.at(fine));
        if (qs.empty() || as.empty()) {
            ++out.stats.skipped[fine];
            return;
        }
        Rng rng(derive_seed(seed, stream));
        const auto& [qt, question] = qs[rng.below(qs.size())];
        const auto q_slots = qt->slots();
        // Answers restating the question's own subject come first.
        auto unshared = [&](const Template& t) {
            std::size_t n = 0;
            for (const auto& name : t.slots()) n += std::find(q_slots.begin(), q_slots.end(), name) == q_slots.end();
            return n;
        };
        std::size_t fewest = std::numeric_limits<std::size_t>::max();
        for (const auto& [t, _] : as) fewest = std::min(fewest, unshared(*t));
        std::vector<std::size_t> best;
        for (std::size_t i = 0; i < as.size(); ++i) {
            if (unshared(*as[i].first) == fewest) best.push_back(i);
        }
        const auto& [at, answer] = as[best[rng.below(best.size())]];

        QAItem item;
        item.id = subject_id + ":" + std::string(to_string(fine));
        item.question = question;
        item.gold_answer = answer;
        item.fine_intent = fine;
        item.gold_doc_ids = std::move(gold);
        for (const auto& name : at->slots()) {
            if (std::find(q_slots.begin(), q_slots.end(), name) != q_slots.end()) continue;
            for (const auto& part : slots.at(name).parts) {
                if (std::find(item.key_values.begin(), item.key_values.end(), part) == item.key_values.end()) {
                    item.key_values.push_back(part);
                }
            }
        }
        out.items.push_back(std::move(item));
        ++out.stats.generated[fine];
    }
};

std::string collapse_space(const std::string& in) {
    std::string out;
    bool pending = false;
    for (char c : in) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += c;
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open template file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

const std::vector<std::string>& known_slots() {
    static const std::vector<std::string> slots = {
        "word",   "citation", "root",  "meaning",    "compound",       "date",    "author",
        "source", "surah",    "ayah",  "hadith",     "morphology",     "semantic_field",
        "root_id", "lemma_id", "etymology", "inscriptions", "derivations",
    };
    return slots;
}

std::vector<std::string> Template::slots() const {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = pattern.find('{', pos)) != std::string::npos) {
        const auto end = pattern.find('}', pos);
        if (end == std::string::npos) break;
        auto name = pattern.substr(pos + 1, end - pos - 1);
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
        pos = end + 1;
    }
    return out;
}

std::optional<std::string> fill(const std::string& pattern, const SlotValues& values) {
    std::string out;
    out.reserve(pattern.size() * 2);
    std::size_t pos = 0;
    while (pos < pattern.size()) {
        const auto open = pattern.find('{', pos);
        if (open == std::string::npos) {
            out.append(pattern, pos, std::string::npos);
            break;
        }
        const auto close = pattern.find('}', open);
        if (close == std::string::npos) return std::nullopt;
        out.append(pattern, pos, open - pos);
        auto it = values.find(pattern.substr(open + 1, close - open - 1));
        if (it == values.end() || it->second.empty()) return std::nullopt;
        out += it->second;
        pos = close + 1;
    }
    return out;
}

std::vector<Template> parse_templates(FineIntent intent, std::istream& in) {
    std::vector<Template> out;
    std::string current;
    auto flush = [&] {
        auto pattern = collapse_space(current);
        current.clear();
        if (pattern.empty()) return;
        Template t{intent, pattern, static_cast<int>(out.size())};
        int depth = 0;
        for (char c : pattern) {
            depth += c == '{' ? 1 : c == '}' ? -1 : 0;
            if (depth < 0 || depth > 1) break;
        }
        if (depth != 0) {
            throw Error(ErrorKind::format, std::string(to_string(intent)) + " template " +
                                               std::to_string(t.variant_id) + " has unbalanced braces");
        }
        for (const auto& slot : t.slots()) {
            const auto& known = known_slots();
            if (std::find(known.begin(), known.end(), slot) == known.end()) {
                throw Error(ErrorKind::format, std::string(to_string(intent)) + " template " +
                                                   std::to_string(t.variant_id) + " uses unknown slot {" + slot + "}");
            }
        }
        out.push_back(std::move(t));
    };
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::normalize(line) == "---") {
            flush();
        } else {
            current += line;
            current += ' ';
        }
    }
    flush();
    return out;
}

void TemplateSet::validate() const {
    for (auto fine : kFineIntents) {
        auto q = questions.find(fine);
        if (q == questions.end() || q->second.size() < 2) {
            throw Error(ErrorKind::format,
                        "intent " + std::string(to_string(fine)) + " needs at least two question variants");
        }
        auto a = answers.find(fine);
        if (a == answers.end() || a->second.empty()) {
            throw Error(ErrorKind::format, "intent " + std::string(to_string(fine)) + " has no answer template");
        }
    }
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
    TemplateSet set;
    for (auto fine : kFineIntents) {
        const auto name = std::string(to_string(fine)) + ".txt";
        std::istringstream q(read_file(dir / "questions" / name));
        set.questions[fine] = parse_templates(fine, q);
        std::istringstream a(read_file(dir / "answers" / name));
        set.answers[fine] = parse_templates(fine, a);
    }
    set.validate();
    return set;
}

const TemplateSet& TemplateSet::builtin() {
    static const TemplateSet set = [] {
        TemplateSet s;
        for (auto fine : kFineIntents) {
            const auto name = std::string(to_string(fine)) + ".txt";
            std::istringstream q{std::string(resources::get("templates/questions/" + name))};
            s.questions[fine] = parse_templates(fine, q);
            std::istringstream a{std::string(resources::get("templates/answers/" + name))};
            s.answers[fine] = parse_templates(fine, a);
        }
        s.validate();
        return s;
    }();
    return set;
}

std::optional<int> gregorian_year(const std::string& date_label) {
    const auto eq = date_label.find('=');
    const std::string part = eq == std::string::npos ? date_label : date_label.substr(eq + 1);
    std::size_t i = 0;
    while (i < part.size() && part[i] == ' ') ++i;
    std::size_t j = i;
    while (j < part.size() && part[j] >= '0' && part[j] <= '9') ++j;
    if (j == i || j - i > 6) return std::nullopt;
    int year = std::stoi(part.substr(i, j - i));
    if (part.find("ق.م", j) != std::string::npos) year = -year;
    return year;
}

QAGeneration generate_qa(const Corpus& corpus, const TemplateSet& templates, std::uint64_t seed) {
    templates.validate();
    QAGeneration out;
    Emitter emitter{templates, seed, out};
    const auto& entries = corpus.entries();

    std::unordered_map<std::string, std::vector<std::string>> by_key;
    for (const auto& e : entries) by_key[gold_key(e)].push_back(e.entry_id);

    constexpr std::uint64_t kStride = 16;
    for (std::size_t pos = 0; pos < entries.size(); ++pos) {
        const auto& e = entries[pos];
        const auto slots = entry_slots(e, corpus.root(e.root_id));
        const auto& gold = by_key.at(gold_key(e));
        for (auto fine : kEntryLevel) {
            emitter.emit(fine, e.entry_id, slots, gold, pos * kStride + fine_index(fine));
        }
    }

    for (std::size_t rpos = 0; rpos < corpus.roots().size(); ++rpos) {
        const auto& root = corpus.roots()[rpos];
        const auto ids = corpus.entries_of_root(root.root_id);
        const std::uint64_t base = (entries.size() + rpos) * kStride;
        if (ids.empty()) continue;

        auto earliest = [&](auto&& eligible) -> const LexicalEntry* {
            const LexicalEntry* best = nullptr;
            int best_year = INT_MAX;
            for (const auto& id : ids) {
                const auto& e = corpus.entry(id);
                if (!eligible(e)) continue;
                const int year = gregorian_year(e.date_label).value_or(INT_MAX);
                if (!best || year < best_year) {
                    best = &e;
                    best_year = year;
                }
            }
            return best;
        };
        auto single = [&](FineIntent fine, const LexicalEntry* subject) {
            if (!subject) {
                ++out.stats.skipped[fine];
                return;
            }
            emitter.emit(fine, root.root_id, entry_slots(*subject, root), {subject->entry_id},
                         base + fine_index(fine));
        };

        single(FineIntent::first_usage, earliest([](const LexicalEntry& e) { return !e.date_label.empty(); }));
        single(FineIntent::terminological_usage,
               earliest([](const LexicalEntry& e) { return e.semantic_field.has_value(); }));
        single(FineIntent::quranic_first_usage, earliest([](const LexicalEntry& e) { return e.is_quranic(); }));

        Slots slots = entry_slots(corpus.entry(ids.front()), root);
        Slot derivations;
        std::set<std::string> seen;
        for (const auto& id : ids) {
            const auto& word = corpus.entry(id).word;
            if (!seen.insert(text::normalize(word)).second) continue;
            if (!derivations.value.empty()) derivations.value += "، ";
            derivations.value += word;
            derivations.parts.push_back(word);
        }
        slots["derivations"] = std::move(derivations);
        for (auto fine : {FineIntent::derivations_list, FineIntent::etymology, FineIntent::inscription}) {
            emitter.emit(fine, root.root_id, slots, ids, base + fine_index(fine));
        }
    }
    return out;
}

IntentDataset generate_intent_dataset(std::span<const QAItem> items, std::size_t per_class, double test_fraction,
                                      std::uint64_t seed) {
    if (per_class == 0) throw Error(ErrorKind::invalid_argument, "per_class must be >= 1");
    if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, "test_fraction must lie in [0, 1]");
    }
    // A repeated question text is drawn at most once, so it cannot land on both sides.
    std::map<FineIntent, std::vector<std::size_t>> by_class;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (seen.insert(text::normalize(items[i].question)).second) by_class[items[i].fine_intent].push_back(i);
    }

    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(per_class) * test_fraction));
    IntentDataset out;
    for (auto fine : kFineIntents) {
        auto& pool = by_class[fine];
        if (pool.size() < per_class) {
            throw Error(ErrorKind::insufficient_data, "class " + std::string(to_string(fine)) + " has " +
                                                          std::to_string(pool.size()) + " distinct questions, " +
                                                          std::to_string(per_class) + " requested");
        }
        Rng rng(derive_seed(seed, fine_index(fine)));
        for (std::size_t i = 0; i < per_class; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
            intent::LabeledQuery row{items[pool[i]].question, fine};
            (i < n_test ? out.test : out.train).push_back(std::move(row));
        }
    }
    Rng rng(derive_seed(seed, kFineIntents.size()));
    rng.shuffle(std::span<intent::LabeledQuery>(out.train));
    rng.shuffle(std::span<intent::LabeledQuery>(out.test));
    return out;
}

bool is_answer_eval_type(FineIntent fine) noexcept {
    switch (fine) {
    case FineIntent::author:
    case FineIntent::contextual_meaning:
    case FineIntent::date:
    case FineIntent::source:
    case FineIntent::basic_meaning:
    case FineIntent::morphology: return true;
    default: return false;
    }
}

EvalSet build_eval_set(std::span<const QAItem> items, const Corpus& corpus, const EvalSetOptions& options) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& item = items[i];
        if (options.answer_types_only && !is_answer_eval_type(item.fine_intent)) continue;
        if (options.filter == EvalFilter::quran_hadith) {
            const bool religious = !item.gold_doc_ids.empty() &&
                                   std::all_of(item.gold_doc_ids.begin(), item.gold_doc_ids.end(), [&](const auto& id) {
                                       const auto* e = corpus.find_entry(id);
                                       return e && (e->is_quranic() || e->is_hadith());
                                   });
            if (!religious) continue;
        }
        keep.push_back(i);
    }

    EvalSet out;
    if (options.limit) {
        out.truncated_request = *options.limit > keep.size();
        if (*options.limit < keep.size()) {
            Rng rng(options.seed);
            for (std::size_t i = 0; i < *options.limit; ++i) {
                const auto j = i + static_cast<std::size_t>(rng.below(keep.size() - i));
                std::swap(keep[i], keep[j]);
            }
            keep.resize(*options.limit);
            std::sort(keep.begin(), keep.end());
        }
    }
    for (auto i : keep) {
        out.items.push_back(items[i]);
        ++out.distribution[items[i].fine_intent];
    }
    return out;
}

void write_qrels(std::ostream& out, std::span<const QAItem> items) {
    for (const auto& item : items) {
        for (const auto& doc : item.gold_doc_ids) out << item.id << '\t' << doc << '\n';
    }
}

} // namespace lexirag::datagen
