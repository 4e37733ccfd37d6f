#pragma once

#include "lexirag/dense.hpp"
#include "lexirag/fusion.hpp"
#include "lexirag/pipeline.hpp"

#include <chrono>
#include <string>
#include <vector>

namespace lexirag {

/// A remote model behind an HTTP JSON API. The bearer token is read from the
/// named environment variable at call time; an unset variable sends no header.
struct Endpoint {
    std::string url;  // scheme://host[:port]/path
    std::string model;
    std::string api_key_env;
    std::chrono::milliseconds timeout{30000};
};

/// POST {model, input: [texts]} → {data: [{embedding: [...]}, ...]}.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(Endpoint endpoint, std::size_t dimension);
    std::string name() const override { return "http:" + endpoint_.model; }
    std::size_t dimension() const override { return dimension_; }
    std::vector<Vector> embed(std::span<const std::string> texts) override;

private:
    Endpoint endpoint_;
    std::size_t dimension_;
};

/// POST {model, query, passages} → {scores: [...]}.
class HttpRerankScorer final : public RerankScorer {
public:
    explicit HttpRerankScorer(Endpoint endpoint);
    std::string name() const override { return "http:" + endpoint_.model; }
    std::vector<double> score(const std::string& query, std::span<const std::string> passages) override;

private:
    Endpoint endpoint_;
};

/// POST {model, temperature: 0, messages} → {choices: [{message: {content}}]}.
class HttpChatClient final : public GenerationClient, public ChatClient {
public:
    explicit HttpChatClient(Endpoint endpoint);
    std::string name() const override { return "http:" + endpoint_.model; }
    std::string complete(const PromptBundle& prompt) override;
    std::string chat(const std::vector<ChatMessage>& messages) override;

private:
    Endpoint endpoint_;
};

} // namespace lexirag
