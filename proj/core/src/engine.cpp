#include "lexirag/engine.hpp"

#include "lexirag/error.hpp"

namespace lexirag {

namespace {

std::filesystem::path require(const std::filesystem::path& dir, const char* file, const char* how) {
    auto path = dir / file;
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::missing_artifact, "missing " + path.string() + "; build it with `" + how + "`");
    }
    return path;
}

} // namespace

std::unique_ptr<EmbeddingProvider> make_embedder(const ProviderConfig& providers, std::size_t dimension) {
    if (!providers.embed.url.empty()) return std::make_unique<HttpEmbeddingProvider>(providers.embed, dimension);
    if (!providers.embeddings_file.empty()) {
        return std::make_unique<FileEmbeddingProvider>(FileEmbeddingProvider::load(providers.embeddings_file));
    }
    return nullptr;
}

std::unique_ptr<Engine> Engine::open(const std::filesystem::path& corpus_dir, const ProviderConfig& providers,
                                     PipelineConfig config, const std::filesystem::path& stopwords) {
    std::unique_ptr<Engine> e(new Engine());
    require(corpus_dir, corpus_files::manifest, "lexirag ingest");
    e->corpus_ = load_corpus(corpus_dir);
    e->bm25_ = InvertedIndex::load(require(corpus_dir, corpus_files::bm25_index, "lexirag index build"));
    e->intent_model_ =
        intent::IntentModel::load(require(corpus_dir, corpus_files::intent_model, "lexirag intent train"));

    if (!stopwords.empty()) e->stopwords_ = text::StopwordList::load(stopwords);

    const auto vectors_path = corpus_dir / corpus_files::vectors;
    if (std::filesystem::exists(vectors_path)) {
        e->vectors_ = VectorIndex::load(vectors_path);
        e->embedder_ = make_embedder(providers, e->vectors_->dimension());
    }

    if (providers.rerank.url.empty()) {
        e->scorer_ = std::make_unique<OverlapScorer>();
    } else {
        e->scorer_ = std::make_unique<HttpRerankScorer>(providers.rerank);
    }
    if (providers.llm.url.empty()) {
        e->generator_ = std::make_unique<ExtractiveStubClient>();
    } else {
        e->generator_ = std::make_unique<HttpChatClient>(providers.llm);
    }

    PipelineResources res;
    res.retrieval.corpus = &e->corpus_;
    res.retrieval.bm25 = &e->bm25_;
    if (e->vectors_ && e->embedder_) {
        res.retrieval.vectors = &*e->vectors_;
        res.retrieval.embedder = e->embedder_.get();
    }
    res.intent_model = &e->intent_model_;
    res.stopwords = e->stopwords_ ? &*e->stopwords_ : &text::StopwordList::builtin();
    res.exemplars = &ExemplarStore::builtin();
    res.scorer = e->scorer_.get();
    res.generator = e->generator_.get();
    e->pipeline_ = std::make_unique<Pipeline>(res, std::move(config));
    return e;
}

} // namespace lexirag
