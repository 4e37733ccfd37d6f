#pragma once

#include "lexirag/pipeline.hpp"
#include "lexirag/providers.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace lexirag {

/// Where each model lives. Empty URLs select the local stand-ins: overlap
/// reranking, extractive generation, and (when `embeddings_file` is set)
/// file-backed embeddings.
struct ProviderConfig {
    Endpoint embed{"", "", "LEXIRAG_EMBED_API_KEY"};
    Endpoint rerank{"", "", "LEXIRAG_RERANK_API_KEY"};
    Endpoint llm{"", "", "LEXIRAG_LLM_API_KEY"};
    std::filesystem::path embeddings_file;
};

/// Owns a loaded corpus directory, its indexes and providers, and a Pipeline over them.
class Engine {
public:
    /// Throws Error(missing_artifact) naming the absent file and the command that builds it.
    /// An empty `stopwords` path keeps the built-in list.
    static std::unique_ptr<Engine> open(const std::filesystem::path& corpus_dir, const ProviderConfig& providers,
                                        PipelineConfig config, const std::filesystem::path& stopwords = {});

    const Pipeline& pipeline() const noexcept { return *pipeline_; }
    const Corpus& corpus() const noexcept { return corpus_; }
    bool has_vectors() const noexcept { return vectors_.has_value(); }

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

private:
    Engine() = default;

    Corpus corpus_;
    InvertedIndex bm25_;
    std::optional<VectorIndex> vectors_;
    intent::IntentModel intent_model_;
    std::optional<text::StopwordList> stopwords_;
    std::unique_ptr<EmbeddingProvider> embedder_;
    std::unique_ptr<RerankScorer> scorer_;
    std::unique_ptr<GenerationClient> generator_;
    std::unique_ptr<Pipeline> pipeline_;
};

/// Builds the embedding provider described by `providers`, or nullptr when none is configured.
std::unique_ptr<EmbeddingProvider> make_embedder(const ProviderConfig& providers, std::size_t dimension);

} // namespace lexirag
