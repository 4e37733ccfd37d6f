#include "lexirag/corpus.hpp"

#include "lexirag/arabic_text.hpp"
#include "lexirag/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace lexirag {

using json = nlohmann::ordered_json;

namespace {

bool present(const std::optional<std::string>& v) { return v.has_value() && !v->empty(); }

struct Malformed {};

std::string scalar_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    throw Malformed{};
}

std::string required_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    return scalar_to_string(*it);
}

std::optional<std::string> optional_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    auto s = scalar_to_string(*it);
    if (s.empty()) return std::nullopt;
    return s;
}

std::optional<KeyedText> keyed_text(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    KeyedText block;
    if (it->is_string()) {
        if (!it->get<std::string>().empty()) block.emplace_back("text", it->get<std::string>());
    } else if (it->is_object()) {
        for (auto field = it->begin(); field != it->end(); ++field) {
            std::string value = field->is_string() ? field->get<std::string>() : field->dump();
            if (!value.empty()) block.emplace_back(field.key(), std::move(value));
        }
    } else {
        throw Malformed{};
    }
    if (block.empty()) return std::nullopt;
    return block;
}

void put_optional(json& obj, const char* key, const std::optional<std::string>& v) {
    if (present(v)) obj[key] = *v;
}

json keyed_to_json(const KeyedText& block) {
    json obj = json::object();
    for (const auto& [k, v] : block) obj[k] = v;
    return obj;
}

// Reads one line, throwing on stream failure or invalid UTF-8.
bool read_line(std::istream& in, std::string& line, std::size_t line_no, const char* what) {
    if (!std::getline(in, line)) {
        if (in.bad()) {
            throw Error(ErrorKind::io, std::string(what) + ": read failure at line " + std::to_string(line_no));
        }
        return false;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!text::is_valid_utf8(line)) {
        throw Error(ErrorKind::io, std::string(what) + ": invalid UTF-8 at line " + std::to_string(line_no));
    }
    return true;
}

} // namespace

bool LexicalEntry::is_quranic() const noexcept { return present(surah) && present(ayah); }
bool LexicalEntry::is_hadith() const noexcept { return present(hadith_ref); }

RetrievalDocument build_retrieval_document(const LexicalEntry& entry) {
    std::string joined;
    auto add = [&](const std::string& segment) {
        if (segment.empty()) return;
        if (!joined.empty()) joined.push_back(' ');
        joined += segment;
    };
    add(entry.word);
    add(entry.root);
    if (entry.compound_form) add(*entry.compound_form);
    if (entry.semantic_field) add(*entry.semantic_field);
    add(entry.meaning);
    add(entry.citation);
    return RetrievalDocument{entry.entry_id, text::normalize(joined), entry.entry_id};
}

Corpus::Corpus(std::vector<LexicalEntry> entries, std::vector<RootRecord> roots)
    : entries_(std::move(entries)), roots_(std::move(roots)) {
    for (std::size_t i = 0; i < roots_.size(); ++i) {
        if (!root_pos_.emplace(roots_[i].root_id, i).second) {
            throw Error(ErrorKind::invalid_argument, "duplicate root_id " + roots_[i].root_id);
        }
    }
    documents_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.entry_id.empty() || e.word.empty() || e.citation.empty()) {
            throw Error(ErrorKind::invalid_argument, "entry " + e.entry_id + " lacks a required field");
        }
        if (!root_pos_.contains(e.root_id)) {
            throw Error(ErrorKind::invalid_argument, "entry " + e.entry_id + " references unknown root " + e.root_id);
        }
        if (!entry_pos_.emplace(e.entry_id, i).second) {
            throw Error(ErrorKind::invalid_argument, "duplicate entry_id " + e.entry_id);
        }
        documents_.push_back(build_retrieval_document(e));
    }
}

const LexicalEntry* Corpus::find_entry(const std::string& entry_id) const noexcept {
    auto it = entry_pos_.find(entry_id);
    return it == entry_pos_.end() ? nullptr : &entries_[it->second];
}

const RootRecord* Corpus::find_root(const std::string& root_id) const noexcept {
    auto it = root_pos_.find(root_id);
    return it == root_pos_.end() ? nullptr : &roots_[it->second];
}

const LexicalEntry& Corpus::entry(const std::string& entry_id) const {
    if (const auto* e = find_entry(entry_id)) return *e;
    throw Error(ErrorKind::not_found, "unknown entry id " + entry_id);
}

const RetrievalDocument& Corpus::document(const std::string& doc_id) const {
    auto it = entry_pos_.find(doc_id);
    if (it == entry_pos_.end()) throw Error(ErrorKind::not_found, "unknown document id " + doc_id);
    return documents_[it->second];
}

const RootRecord& Corpus::root(const std::string& root_id) const {
    if (const auto* r = find_root(root_id)) return *r;
    throw Error(ErrorKind::not_found, "unknown root id " + root_id);
}

std::vector<std::string> Corpus::entries_of_root(const std::string& root_id) const {
    std::vector<std::string> ids;
    for (const auto& e : entries_) {
        if (e.root_id == root_id) ids.push_back(e.entry_id);
    }
    return ids;
}

IngestResult ingest_entries(std::istream& entry_stream, std::istream& root_stream) {
    IngestStats stats;

    std::vector<RootRecord> roots;
    std::unordered_map<std::string, bool> root_seen;
    std::string line;
    for (std::size_t line_no = 1; read_line(root_stream, line, line_no, "roots"); ++line_no) {
        if (text::normalize(line).empty()) continue;
        ++stats.roots_read;
        auto obj = json::parse(line, nullptr, false);
        try {
            if (obj.is_discarded() || !obj.is_object()) throw Malformed{};
            RootRecord r;
            r.root_id = required_string(obj, "root_id");
            r.root = required_string(obj, "root");
            r.etymology = keyed_text(obj, "etymology");
            r.inscriptions = keyed_text(obj, "inscriptions");
            if (r.root_id.empty() || root_seen.contains(r.root_id)) {
                ++stats.roots_dropped;
                continue;
            }
            root_seen.emplace(r.root_id, true);
            roots.push_back(std::move(r));
        } catch (const Malformed&) {
            ++stats.roots_dropped;
        } catch (const json::exception&) {
            ++stats.roots_dropped;
        }
    }
    stats.roots_kept = roots.size();

    std::vector<LexicalEntry> entries;
    std::unordered_map<std::string, bool> ids_seen;
    for (std::size_t line_no = 1; read_line(entry_stream, line, line_no, "entries"); ++line_no) {
        if (text::normalize(line).empty()) continue;
        ++stats.entries_read;
        auto obj = json::parse(line, nullptr, false);
        LexicalEntry e;
        try {
            if (obj.is_discarded() || !obj.is_object()) throw Malformed{};
            e.entry_id = required_string(obj, "entry_id");
            e.root = required_string(obj, "root");
            e.root_id = required_string(obj, "root_id");
            e.lemma_id = required_string(obj, "lemma_id");
            e.word = required_string(obj, "word");
            e.compound_form = optional_string(obj, "compound_form");
            e.morphology = required_string(obj, "morphology");
            e.date_label = required_string(obj, "date_label");
            e.citation = required_string(obj, "citation");
            e.author = optional_string(obj, "author");
            e.source_title = optional_string(obj, "source_title");
            e.surah = optional_string(obj, "surah");
            e.ayah = optional_string(obj, "ayah");
            e.hadith_ref = optional_string(obj, "hadith_ref");
            e.semantic_field = optional_string(obj, "semantic_field");
            e.meaning = required_string(obj, "meaning");
        } catch (const Malformed&) {
            ++stats.malformed;
            continue;
        } catch (const json::exception&) {
            ++stats.malformed;
            continue;
        }
        if (e.entry_id.empty() || e.word.empty() || e.citation.empty() || e.meaning.empty() || e.root_id.empty()) {
            ++stats.missing_required;
            continue;
        }
        if (ids_seen.contains(e.entry_id)) {
            ++stats.duplicate_ids;
            continue;
        }
        if (!root_seen.contains(e.root_id)) {
            ++stats.unknown_root;
            continue;
        }
        ids_seen.emplace(e.entry_id, true);
        entries.push_back(std::move(e));
    }
    stats.entries_kept = entries.size();

    return IngestResult{Corpus(std::move(entries), std::move(roots)), stats};
}

IngestResult ingest_files(const std::filesystem::path& entries, const std::filesystem::path& roots) {
    std::ifstream entry_in(entries);
    if (!entry_in) throw Error(ErrorKind::io, "cannot open entries file " + entries.string());
    std::ifstream root_in(roots);
    if (!root_in) throw Error(ErrorKind::io, "cannot open roots file " + roots.string());
    return ingest_entries(entry_in, root_in);
}

std::vector<LexicalEntry> filter_quran_hadith(const Corpus& corpus) {
    std::vector<LexicalEntry> out;
    for (const auto& e : corpus.entries()) {
        if (e.is_quranic() || e.is_hadith()) out.push_back(e);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const LexicalEntry& a, const LexicalEntry& b) { return a.entry_id < b.entry_id; });
    return out;
}

const LexicalEntry& lookup_entry(const Corpus& corpus, const std::string& doc_id) { return corpus.entry(doc_id); }

std::string entry_to_json(const LexicalEntry& e) {
    json obj;
    obj["entry_id"] = e.entry_id;
    obj["root"] = e.root;
    obj["root_id"] = e.root_id;
    obj["lemma_id"] = e.lemma_id;
    obj["word"] = e.word;
    put_optional(obj, "compound_form", e.compound_form);
    obj["morphology"] = e.morphology;
    obj["date_label"] = e.date_label;
    obj["citation"] = e.citation;
    put_optional(obj, "author", e.author);
    put_optional(obj, "source_title", e.source_title);
    put_optional(obj, "surah", e.surah);
    put_optional(obj, "ayah", e.ayah);
    put_optional(obj, "hadith_ref", e.hadith_ref);
    put_optional(obj, "semantic_field", e.semantic_field);
    obj["meaning"] = e.meaning;
    return obj.dump();
}

std::string root_to_json(const RootRecord& r) {
    json obj;
    obj["root_id"] = r.root_id;
    obj["root"] = r.root;
    if (r.etymology) obj["etymology"] = keyed_to_json(*r.etymology);
    if (r.inscriptions) obj["inscriptions"] = keyed_to_json(*r.inscriptions);
    return obj.dump();
}

void save_corpus(const Corpus& corpus, const IngestStats& stats, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / corpus_files::entries, std::ios::binary);
        for (const auto& e : corpus.entries()) out << entry_to_json(e) << '\n';
        if (!out) throw Error(ErrorKind::io, "failed writing " + (dir / corpus_files::entries).string());
    }
    {
        std::ofstream out(dir / corpus_files::roots, std::ios::binary);
        for (const auto& r : corpus.roots()) out << root_to_json(r) << '\n';
        if (!out) throw Error(ErrorKind::io, "failed writing " + (dir / corpus_files::roots).string());
    }
    json manifest;
    manifest["format"] = "lexirag-corpus";
    manifest["version"] = 1;
    manifest["entries"] = corpus.entries().size();
    manifest["roots"] = corpus.roots().size();
    manifest["documents"] = corpus.documents().size();
    manifest["ingest"] = {
        {"entries_read", stats.entries_read}, {"malformed", stats.malformed},
        {"missing_required", stats.missing_required}, {"duplicate_ids", stats.duplicate_ids},
        {"unknown_root", stats.unknown_root}, {"roots_read", stats.roots_read},
        {"roots_dropped", stats.roots_dropped},
    };
    std::ofstream out(dir / corpus_files::manifest, std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::io, "failed writing manifest in " + dir.string());
}

Corpus load_corpus(const std::filesystem::path& dir) {
    for (const char* name : {corpus_files::entries, corpus_files::roots}) {
        if (!std::filesystem::exists(dir / name)) {
            throw Error(ErrorKind::missing_artifact,
                        "missing " + (dir / name).string() + " (run `lexirag ingest --out " + dir.string() + "`)");
        }
    }
    auto result = ingest_files(dir / corpus_files::entries, dir / corpus_files::roots);
    if (result.stats.dropped() != 0) {
        throw Error(ErrorKind::format, "corpus directory " + dir.string() + " contains invalid records");
    }
    return std::move(result.corpus);
}

} // namespace lexirag
