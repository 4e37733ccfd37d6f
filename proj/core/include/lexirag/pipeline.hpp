#pragma once

#include "lexirag/arabic_text.hpp"
#include "lexirag/bm25.hpp"
#include "lexirag/corpus.hpp"
#include "lexirag/dense.hpp"
#include "lexirag/fusion.hpp"
#include "lexirag/intent.hpp"
#include "lexirag/labels.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexirag {

/// Emitted by the generator when the supplied context does not answer the question.
inline constexpr std::string_view kNotFoundSentinel = "لم يتم العثور على المعلومات في الوثائق";

enum class RetrievalMode { bm25_rerank, fusion_rerank };
enum class PromptStrategy { zero_shot, few_shot };

std::string_view to_string(RetrievalMode mode) noexcept;
std::optional<RetrievalMode> parse_retrieval_mode(std::string_view name) noexcept;
std::string_view to_string(PromptStrategy strategy) noexcept;

/// Few-shot for interpretive intents (meaning, author, contextual, morphology),
/// zero-shot for extraction intents.
PromptStrategy default_strategy(RoutingIntent intent) noexcept;

struct PipelineConfig {
    RetrievalMode mode = RetrievalMode::bm25_rerank;
    std::size_t top_k = 10;
    FusionConfig fusion;
    Bm25Params bm25;
    double intent_threshold = intent::kDefaultThreshold;
    std::map<RoutingIntent, PromptStrategy> prompting = default_prompting();

    static std::map<RoutingIntent, PromptStrategy> default_prompting();
    /// Throws Error(invalid_argument).
    void validate() const;
};

struct QueryAnalysis {
    text::TokenizedQuery tokenized;
    RoutingIntent intent = RoutingIntent::other;
    std::optional<FineIntent> fine;
    double confidence = 0.0;
};

/// Noise removal and term weighting for retrieval, intent classification on the raw query.
QueryAnalysis analyze_query(const std::string& query, const intent::IntentModel& model,
                            const text::StopwordList& stopwords, const PipelineConfig& config);

struct RetrievalResources {
    const Corpus* corpus = nullptr;
    const InvertedIndex* bm25 = nullptr;
    const VectorIndex* vectors = nullptr;   // required for fusion mode
    EmbeddingProvider* embedder = nullptr;  // required for fusion mode
};

/// Stage-1 candidates (BM25, or weighted RRF of BM25 and k-NN) truncated to
/// top_k, then reranked. Output ids are a subset of the stage-1 candidates.
RankedList retrieve(const QueryAnalysis& analysis, const RetrievalResources& resources, RerankScorer& scorer,
                    const PipelineConfig& config);

struct ContextField {
    std::string key;    // e.g. "meaning", "etymology.origin"
    std::string label;  // display label used in prompts
    std::string value;  // diacritized original text

    friend bool operator==(const ContextField&, const ContextField&) = default;
};

struct ContextBlock {
    std::string doc_id;
    std::vector<ContextField> fields;

    const ContextField* find(std::string_view key) const;
    std::string render() const;
    friend bool operator==(const ContextBlock&, const ContextBlock&) = default;
};

/// Field keys an intent may expose, in rendering order. "etymology" and
/// "inscriptions" stand for every subfield of those root blocks.
const std::vector<std::string>& intent_fields(RoutingIntent intent);

/// Emits exactly the intent's fields that are present on the entry/root;
/// absent optional fields are omitted.
ContextBlock select_fields(RoutingIntent intent, const LexicalEntry& entry, const RootRecord& root);

struct Exemplar {
    RoutingIntent intent = RoutingIntent::other;
    std::string question;
    std::string context;
    std::string answer;

    friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

/// Curated few-shot examples per routing intent.
class ExemplarStore {
public:
    ExemplarStore() = default;
    explicit ExemplarStore(std::vector<Exemplar> exemplars);

    /// JSON Lines {intent, question, context, answer}.
    static ExemplarStore parse(std::istream& in);
    static ExemplarStore load(const std::filesystem::path& path);
    static const ExemplarStore& builtin();

    std::vector<Exemplar> for_intent(RoutingIntent intent) const;
    std::size_t size() const noexcept { return exemplars_.size(); }

private:
    std::vector<Exemplar> exemplars_;
};

struct PromptBundle {
    RoutingIntent intent = RoutingIntent::other;
    PromptStrategy strategy = PromptStrategy::zero_shot;
    std::string system_instructions;
    std::vector<ContextBlock> context_blocks;
    std::vector<Exemplar> exemplars;
    std::string user_question;
};

struct ChatMessage {
    std::string role;
    std::string content;
};

/// System message with the instructions, one user message carrying
/// exemplars, numbered context blocks, and the question.
std::vector<ChatMessage> render_messages(const PromptBundle& bundle);

/// Throws Error(invalid_argument) when a few-shot intent has no exemplars.
PromptBundle build_prompt(const QueryAnalysis& analysis, std::vector<ContextBlock> contexts,
                          const ExemplarStore& exemplars, const PipelineConfig& config);

/// Chat-completions style backend, used directly by the remote judge.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string name() const = 0;
    /// Issued with temperature 0. Throws Error(retriable) on transport failure.
    virtual std::string chat(const std::vector<ChatMessage>& messages) = 0;
};

/// Text generator. Every request is issued with temperature 0.
class GenerationClient {
public:
    virtual ~GenerationClient() = default;
    virtual std::string name() const = 0;
    static constexpr double temperature() noexcept { return 0.0; }
    /// Remote implementations throw Error(retriable) on transport failure.
    virtual std::string complete(const PromptBundle& prompt) = 0;
};

/// Offline stand-in: copies the field(s) the routed intent asks about from the
/// first context block, or answers with the not-found sentinel.
class ExtractiveStubClient final : public GenerationClient {
public:
    std::string name() const override { return "extractive-stub"; }
    std::string complete(const PromptBundle& prompt) override;
};

struct Answer {
    std::string text;
    RoutingIntent intent = RoutingIntent::other;
    std::vector<std::string> supporting_doc_ids;
    bool not_found = false;
};

bool is_not_found(std::string_view text);

/// Throws Error(generation) on an empty completion.
Answer answer(GenerationClient& client, const PromptBundle& bundle);

struct PipelineResources {
    RetrievalResources retrieval;
    const intent::IntentModel* intent_model = nullptr;
    const text::StopwordList* stopwords = nullptr;
    const ExemplarStore* exemplars = nullptr;
    RerankScorer* scorer = nullptr;
    GenerationClient* generator = nullptr;
};

struct PipelineResult {
    QueryAnalysis analysis;
    RankedList documents;
    std::vector<ContextBlock> contexts;
    PromptBundle prompt;
    Answer answer;
};

/// Query analysis → retrieval → rerank → intent routing → generation.
/// Stateless per query over immutable resources.
class Pipeline {
public:
    /// Throws Error(invalid_argument) if a required resource is missing.
    Pipeline(PipelineResources resources, PipelineConfig config);

    const PipelineConfig& config() const noexcept { return config_; }
    const Corpus& corpus() const noexcept { return *resources_.retrieval.corpus; }
    bool has_dense() const noexcept { return resources_.retrieval.vectors && resources_.retrieval.embedder; }

    QueryAnalysis analyze(const std::string& question) const;
    /// Retrieval and reranking only (no generation).
    RankedList search(const QueryAnalysis& analysis, std::optional<RetrievalMode> mode = std::nullopt,
                      std::optional<std::size_t> top_k = std::nullopt) const;
    std::vector<ContextBlock> contexts(RoutingIntent intent, const RankedList& documents) const;
    PipelineResult run(const std::string& question, std::optional<RetrievalMode> mode = std::nullopt,
                       std::optional<std::size_t> top_k = std::nullopt) const;

private:
    PipelineConfig overridden(std::optional<RetrievalMode> mode, std::optional<std::size_t> top_k) const;

    PipelineResources resources_;
    PipelineConfig config_;
};

} // namespace lexirag
