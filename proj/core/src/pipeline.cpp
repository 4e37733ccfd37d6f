#include "lexirag/pipeline.hpp"

#include "lexirag/error.hpp"
#include "lexirag/resources.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace lexirag {

namespace {

struct FieldSpec {
    std::string_view key;
    std::string_view label;
};

constexpr FieldSpec kFieldLabels[] = {
    {"word", "الكلمة"},
    {"compound_form", "العبارة"},
    {"morphology", "التحليل الصرفي"},
    {"date_label", "تاريخ الشاهد"},
    {"citation", "الشاهد"},
    {"author", "القائل"},
    {"source_title", "المصدر"},
    {"surah", "السورة"},
    {"ayah", "الآية"},
    {"hadith_ref", "الحديث"},
    {"semantic_field", "الحقل الدلالي"},
    {"meaning", "المعنى"},
    {"root", "الجذر"},
    {"root_id", "رقم الجذر"},
    {"lemma_id", "رقم المدخل"},
    {"etymology", "التأثيل"},
    {"inscriptions", "النقوش"},
};

std::string_view label_for(std::string_view key) {
    for (const auto& f : kFieldLabels) {
        if (f.key == key) return f.label;
    }
    return key;
}

const std::string* entry_value(const LexicalEntry& e, const RootRecord& r, std::string_view key) {
    auto opt = [](const std::optional<std::string>& v) -> const std::string* { return v ? &*v : nullptr; };
    if (key == "word") return &e.word;
    if (key == "compound_form") return opt(e.compound_form);
    if (key == "morphology") return &e.morphology;
    if (key == "date_label") return &e.date_label;
    if (key == "citation") return &e.citation;
    if (key == "author") return opt(e.author);
    if (key == "source_title") return opt(e.source_title);
    if (key == "surah") return opt(e.surah);
    if (key == "ayah") return opt(e.ayah);
    if (key == "hadith_ref") return opt(e.hadith_ref);
    if (key == "semantic_field") return opt(e.semantic_field);
    if (key == "meaning") return &e.meaning;
    if (key == "root") return &e.root;
    if (key == "root_id") return &r.root_id;
    if (key == "lemma_id") return &e.lemma_id;
    return nullptr;
}

std::vector<std::string> keys(std::initializer_list<std::string_view> list) {
    return {list.begin(), list.end()};
}

std::string trim(std::string_view s) {
    return text::normalize(s);
}

} // namespace

std::string_view to_string(RetrievalMode mode) noexcept {
    return mode == RetrievalMode::bm25_rerank ? "bm25" : "fusion";
}

std::optional<RetrievalMode> parse_retrieval_mode(std::string_view name) noexcept {
    if (name == "bm25" || name == "bm25_rerank") return RetrievalMode::bm25_rerank;
    if (name == "fusion" || name == "fusion_rerank") return RetrievalMode::fusion_rerank;
    return std::nullopt;
}

std::string_view to_string(PromptStrategy strategy) noexcept {
    return strategy == PromptStrategy::few_shot ? "few_shot" : "zero_shot";
}

PromptStrategy default_strategy(RoutingIntent intent) noexcept {
    switch (intent) {
    case RoutingIntent::meaning:
    case RoutingIntent::author:
    case RoutingIntent::contextual:
    case RoutingIntent::morphology: return PromptStrategy::few_shot;
    default: return PromptStrategy::zero_shot;
    }
}

std::map<RoutingIntent, PromptStrategy> PipelineConfig::default_prompting() {
    std::map<RoutingIntent, PromptStrategy> out;
    for (auto intent : kRoutingIntents) out.emplace(intent, default_strategy(intent));
    return out;
}

void PipelineConfig::validate() const {
    if (top_k < 1) throw Error(ErrorKind::invalid_argument, "top_k must be >= 1");
    if (!(intent_threshold >= 0.0 && intent_threshold <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, "intent_threshold must lie in [0, 1]");
    }
    fusion.validate();
    bm25.validate();
    for (auto intent : kRoutingIntents) {
        if (!prompting.contains(intent)) {
            throw Error(ErrorKind::invalid_argument,
                        "prompting has no strategy for intent " + std::string(to_string(intent)));
        }
    }
}

QueryAnalysis analyze_query(const std::string& query, const intent::IntentModel& model,
                            const text::StopwordList& stopwords, const PipelineConfig& config) {
    QueryAnalysis out;
    out.tokenized = text::analyze(query, stopwords);
    const auto c = model.classify(query, config.intent_threshold);
    out.intent = c.intent;
    out.fine = c.fine;
    out.confidence = c.confidence;
    return out;
}

RankedList retrieve(const QueryAnalysis& analysis, const RetrievalResources& resources, RerankScorer& scorer,
                    const PipelineConfig& config) {
    if (!resources.corpus || !resources.bm25) {
        throw Error(ErrorKind::missing_artifact, "retrieval needs a corpus and a BM25 index");
    }
    RankedList candidates = bm25_search(*resources.bm25, analysis.tokenized, config.bm25, config.top_k);

    if (config.mode == RetrievalMode::fusion_rerank) {
        if (!resources.vectors || !resources.embedder) {
            throw Error(ErrorKind::missing_artifact,
                        std::string("fusion mode needs a vector index (") + corpus_files::vectors +
                            ", built by `lexirag index embed`) and an embedding provider");
        }
        RankedList dense;
        const std::string cleaned = analysis.tokenized.cleaned_text();
        if (!cleaned.empty() && resources.vectors->size() > 0) {
            const std::string texts[] = {cleaned};
            const auto q = embed_batch(*resources.embedder, texts);
            if (q.front().size() != resources.vectors->dimension()) {
                throw Error(ErrorKind::contract_violation,
                            "query embedding has dimension " + std::to_string(q.front().size()) +
                                " but the vector index has " + std::to_string(resources.vectors->dimension()));
            }
            dense = knn_l2(*resources.vectors, q.front(), config.top_k);
        }
        const RankedList lists[] = {candidates, dense};
        candidates = rrf_fuse(lists, config.fusion);
        truncate_ranked(candidates.items, config.top_k);
    }

    const std::string& cleaned_query = analysis.tokenized.tokens.empty() ? analysis.tokenized.raw
                                                                           : analysis.tokenized.cleaned_text();
    return rerank(scorer, cleaned_query, candidates, *resources.corpus);
}

const ContextField* ContextBlock::find(std::string_view key) const {
    for (const auto& f : fields) {
        if (f.key == key) return &f;
    }
    return nullptr;
}

std::string ContextBlock::render() const {
    std::string out;
    for (const auto& f : fields) {
        out += f.label;
        out += ": ";
        out += f.value;
        out += '\n';
    }
    return out;
}

const std::vector<std::string>& intent_fields(RoutingIntent intent) {
    static const std::vector<std::string> meaning = keys({"compound_form", "citation", "semantic_field", "meaning"});
    static const std::vector<std::string> author = keys({"word", "compound_form", "citation", "author"});
    static const std::vector<std::string> date = keys({"word", "compound_form", "citation", "date_label"});
    static const std::vector<std::string> source =
        keys({"word", "compound_form", "source_title", "surah", "ayah", "hadith_ref"});
    static const std::vector<std::string> morphology = keys({"root", "morphology", "word", "lemma_id"});
    static const std::vector<std::string> etymology = keys({"root", "root_id", "etymology"});
    static const std::vector<std::string> inscriptions = keys({"root", "root_id", "inscriptions"});
    static const std::vector<std::string> all = [] {
        std::vector<std::string> v;
        for (const auto& f : kFieldLabels) v.emplace_back(f.key);
        return v;
    }();
    switch (intent) {
    case RoutingIntent::meaning:
    case RoutingIntent::contextual: return meaning;
    case RoutingIntent::author: return author;
    case RoutingIntent::date: return date;
    case RoutingIntent::source: return source;
    case RoutingIntent::morphology: return morphology;
    case RoutingIntent::etymology: return etymology;
    case RoutingIntent::inscriptions: return inscriptions;
    case RoutingIntent::other: return all;
    }
    return all;
}

ContextBlock select_fields(RoutingIntent intent, const LexicalEntry& entry, const RootRecord& root) {
    ContextBlock block;
    block.doc_id = entry.entry_id;
    for (const auto& key : intent_fields(intent)) {
        if (key == "etymology" || key == "inscriptions") {
            const auto& keyed = key == "etymology" ? root.etymology : root.inscriptions;
            if (!keyed) continue;
            for (const auto& [sub, value] : *keyed) {
                if (value.empty()) continue;
                block.fields.push_back(
                    ContextField{key + "." + sub, std::string(label_for(key)) + " (" + sub + ")", value});
            }
            continue;
        }
        const std::string* value = entry_value(entry, root, key);
        if (!value || value->empty()) continue;
        block.fields.push_back(ContextField{key, std::string(label_for(key)), *value});
    }
    return block;
}

ExemplarStore::ExemplarStore(std::vector<Exemplar> exemplars) : exemplars_(std::move(exemplars)) {}

ExemplarStore ExemplarStore::parse(std::istream& in) {
    std::vector<Exemplar> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto where = "exemplars line " + std::to_string(lineno) + ": ";
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::format, where + e.what());
        }
        if (!j.is_object()) throw Error(ErrorKind::format, where + "expected a JSON object");
        auto str = [&](const char* key) {
            auto it = j.find(key);
            if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
                throw Error(ErrorKind::format, where + "missing string field '" + key + "'");
            }
            return it->get<std::string>();
        };
        const auto intent_name = str("intent");
        const auto intent = parse_routing_intent(intent_name);
        if (!intent) throw Error(ErrorKind::format, where + "unknown intent '" + intent_name + "'");
        out.push_back(Exemplar{*intent, str("question"), str("context"), str("answer")});
    }
    return ExemplarStore(std::move(out));
}

ExemplarStore ExemplarStore::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open exemplar file " + path.string());
    return parse(in);
}

const ExemplarStore& ExemplarStore::builtin() {
    static const ExemplarStore store = [] {
        std::istringstream in{std::string(resources::get("exemplars.jsonl"))};
        return parse(in);
    }();
    return store;
}

std::vector<Exemplar> ExemplarStore::for_intent(RoutingIntent intent) const {
    std::vector<Exemplar> out;
    for (const auto& e : exemplars_) {
        if (e.intent == intent) out.push_back(e);
    }
    return out;
}

std::vector<ChatMessage> render_messages(const PromptBundle& bundle) {
    std::string user;
    for (std::size_t i = 0; i < bundle.exemplars.size(); ++i) {
        const auto& ex = bundle.exemplars[i];
        user += "مثال " + std::to_string(i + 1) + ":\n";
        user += "السياق:\n" + ex.context;
        if (!ex.context.empty() && ex.context.back() != '\n') user += '\n';
        user += "السؤال: " + ex.question + "\n";
        user += "الإجابة: " + ex.answer + "\n\n";
    }
    if (!bundle.context_blocks.empty()) user += "الوثائق:\n";
    for (std::size_t i = 0; i < bundle.context_blocks.size(); ++i) {
        const auto& block = bundle.context_blocks[i];
        user += "[" + std::to_string(i + 1) + "] " + block.doc_id + "\n" + block.render() + "\n";
    }
    user += "السؤال: " + bundle.user_question + "\n";
    return {ChatMessage{"system", bundle.system_instructions}, ChatMessage{"user", std::move(user)}};
}

PromptBundle build_prompt(const QueryAnalysis& analysis, std::vector<ContextBlock> contexts,
                          const ExemplarStore& exemplars, const PipelineConfig& config) {
    PromptBundle bundle;
    bundle.intent = analysis.intent;
    auto it = config.prompting.find(analysis.intent);
    bundle.strategy = it == config.prompting.end() ? default_strategy(analysis.intent) : it->second;

    std::string instructions(resources::get("prompts/system.txt"));
    const std::string task = "prompts/task_" + std::string(to_string(analysis.intent)) + ".txt";
    if (resources::contains(task)) instructions += resources::get(task);
    bundle.system_instructions = std::move(instructions);

    if (bundle.strategy == PromptStrategy::few_shot) {
        bundle.exemplars = exemplars.for_intent(analysis.intent);
        if (bundle.exemplars.empty()) {
            throw Error(ErrorKind::invalid_argument, "few-shot intent '" + std::string(to_string(analysis.intent)) +
                                                         "' has no exemplars in the store");
        }
    }
    bundle.context_blocks = std::move(contexts);
    bundle.user_question = analysis.tokenized.raw;
    return bundle;
}

std::string ExtractiveStubClient::complete(const PromptBundle& prompt) {
    if (prompt.context_blocks.empty()) return std::string(kNotFoundSentinel);
    const auto& block = prompt.context_blocks.front();
    auto join = [&](std::initializer_list<const char*> keys) {
        std::string out;
        for (const char* key : keys) {
            if (const auto* f = block.find(key)) out += (out.empty() ? "" : " ") + f->value;
        }
        return out;
    };
    auto join_prefixed = [&](std::string_view prefix) {
        std::string out;
        for (const auto& f : block.fields) {
            if (f.key.rfind(prefix, 0) == 0) out += (out.empty() ? "" : "، ") + f.value;
        }
        return out;
    };
    std::string text;
    switch (prompt.intent) {
    case RoutingIntent::author: text = join({"author"}); break;
    case RoutingIntent::date: text = join({"date_label"}); break;
    case RoutingIntent::source: text = join({"source_title", "surah", "ayah", "hadith_ref"}); break;
    case RoutingIntent::morphology: text = join({"morphology"}); break;
    case RoutingIntent::etymology: text = join_prefixed("etymology."); break;
    case RoutingIntent::inscriptions: text = join_prefixed("inscriptions."); break;
    default: text = join({"meaning"}); break;
    }
    return text.empty() ? std::string(kNotFoundSentinel) : text;
}

bool is_not_found(std::string_view text) {
    std::string t = text::normalize(text);
    while (!t.empty() && (t.back() == '.' || t.back() == '!')) t.pop_back();
    return text::normalize(t) == kNotFoundSentinel;
}

Answer answer(GenerationClient& client, const PromptBundle& bundle) {
    Answer out;
    out.text = client.complete(bundle);
    if (trim(out.text).empty()) throw Error(ErrorKind::generation, client.name() + " returned an empty completion");
    out.intent = bundle.intent;
    out.not_found = is_not_found(out.text);
    for (const auto& block : bundle.context_blocks) out.supporting_doc_ids.push_back(block.doc_id);
    return out;
}

Pipeline::Pipeline(PipelineResources resources, PipelineConfig config)
    : resources_(resources), config_(std::move(config)) {
    config_.validate();
    auto require = [](const void* p, const char* what) {
        if (!p) throw Error(ErrorKind::invalid_argument, std::string("pipeline is missing ") + what);
    };
    require(resources_.retrieval.corpus, "a corpus");
    require(resources_.retrieval.bm25, "a BM25 index");
    require(resources_.intent_model, "an intent model");
    require(resources_.stopwords, "a stopword list");
    require(resources_.exemplars, "an exemplar store");
    require(resources_.scorer, "a rerank scorer");
    require(resources_.generator, "a generation client");
}

PipelineConfig Pipeline::overridden(std::optional<RetrievalMode> mode, std::optional<std::size_t> top_k) const {
    PipelineConfig c = config_;
    if (mode) c.mode = *mode;
    if (top_k) c.top_k = *top_k;
    if (c.top_k < 1) throw Error(ErrorKind::invalid_argument, "k must be >= 1");
    return c;
}

QueryAnalysis Pipeline::analyze(const std::string& question) const {
    return analyze_query(question, *resources_.intent_model, *resources_.stopwords, config_);
}

RankedList Pipeline::search(const QueryAnalysis& analysis, std::optional<RetrievalMode> mode,
                            std::optional<std::size_t> top_k) const {
    return retrieve(analysis, resources_.retrieval, *resources_.scorer, overridden(mode, top_k));
}

std::vector<ContextBlock> Pipeline::contexts(RoutingIntent intent, const RankedList& documents) const {
    std::vector<ContextBlock> out;
    out.reserve(documents.size());
    for (const auto& doc : documents.items) {
        const auto& entry = corpus().entry(doc.doc_id);
        out.push_back(select_fields(intent, entry, corpus().root(entry.root_id)));
    }
    return out;
}

PipelineResult Pipeline::run(const std::string& question, std::optional<RetrievalMode> mode,
                             std::optional<std::size_t> top_k) const {
    PipelineResult r;
    r.analysis = analyze(question);
    r.documents = search(r.analysis, mode, top_k);
    r.contexts = contexts(r.analysis.intent, r.documents);
    r.prompt = build_prompt(r.analysis, r.contexts, *resources_.exemplars, config_);
    r.answer = answer(*resources_.generator, r.prompt);
    return r;
}

} // namespace lexirag
