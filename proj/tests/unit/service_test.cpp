#include "lexirag/engine.hpp"
#include "lexirag/error.hpp"
#include "lexirag/service.hpp"

#include "synthetic.hpp"
#include "world.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <thread>

namespace lexirag {
namespace {

using json = nlohmann::json;
using testing::World;

class ServiceTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        world_ = new World(World::fixture());
        pipeline_ = new Pipeline(world_->pipeline());
    }
    static void TearDownTestSuite() {
        delete pipeline_;
        delete world_;
    }
    static World* world_;
    static Pipeline* pipeline_;
};

World* ServiceTest::world_ = nullptr;
Pipeline* ServiceTest::pipeline_ = nullptr;

TEST_F(ServiceTest, Healthz) {
    const Service service(*pipeline_);
    const auto r = service.handle("GET", "/healthz", "");
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(json::parse(r.body), (json{{"status", "ok"}, {"corpus_size", 10}}));
}

TEST_F(ServiceTest, EntryLookup) {
    const Service service(*pipeline_);
    const auto ok = service.handle("GET", "/v1/entry/e001", "");
    EXPECT_EQ(ok.status, 200);
    EXPECT_EQ(json::parse(ok.body)["word"], "قَلْب");
    const auto missing = service.handle("GET", "/v1/entry/nope", "");
    EXPECT_EQ(missing.status, 404);
    EXPECT_EQ(json::parse(missing.body)["error"]["kind"], "not_found");
}

TEST_F(ServiceTest, RoutingErrors) {
    const Service service(*pipeline_);
    EXPECT_EQ(service.handle("GET", "/v1/query", "").status, 405);
    EXPECT_EQ(service.handle("DELETE", "/healthz", "").status, 405);
    EXPECT_EQ(service.handle("GET", "/v2/anything", "").status, 404);
}

TEST_F(ServiceTest, BadBodies) {
    const Service service(*pipeline_);
    for (const std::string body : {"", "not json", "[]", R"({"q":"x"})", R"({"question":3})",
                                   R"({"question":"x","mode":"dense"})", R"({"question":"x","k":0})",
                                   R"({"question":"x","k":"ten"})"}) {
        const auto r = service.handle("POST", "/v1/query", body);
        EXPECT_EQ(r.status, 400) << body;
        const auto j = json::parse(r.body);
        EXPECT_FALSE(j["error"]["retriable"].get<bool>());
        EXPECT_FALSE(j["error"]["message"].get<std::string>().empty());
    }
}

TEST_F(ServiceTest, QueryMatchesGolden) {
    const Service service(*pipeline_);
    const auto r = service.handle("POST", "/v1/query", R"({"question":"ما معنى كلمة قَلْب؟","k":3})");
    ASSERT_EQ(r.status, 200);
    const auto golden_path = testing::golden_dir() / "query_response.json";
    if (std::getenv("LEXIRAG_UPDATE_GOLDEN")) testing::write_file(golden_path, r.body + "\n");
    EXPECT_EQ(r.body + "\n", testing::read_file(golden_path));

    const auto j = json::parse(r.body);
    EXPECT_EQ(j["intent"], "meaning");
    EXPECT_EQ(j["answer"], world_->corpus.entry("e001").meaning);
    EXPECT_FALSE(j["not_found"].get<bool>());
    ASSERT_LE(j["documents"].size(), 3U);
    EXPECT_EQ(j["documents"][0]["doc_id"], "e001");
    EXPECT_TRUE(j["documents"][0]["fields"].contains("meaning"));
    EXPECT_FALSE(j["documents"][0]["fields"].contains("author"));
}

TEST_F(ServiceTest, QueryIsByteStable) {
    const Service service(*pipeline_);
    const std::string body = R"({"question":"من قائل الشاهد الذي ورد فيه لفظ قَلْب؟"})";
    EXPECT_EQ(service.handle("POST", "/v1/query", body).body, service.handle("POST", "/v1/query", body).body);
}

TEST_F(ServiceTest, Search) {
    const Service service(*pipeline_);
    const auto r = service.handle("POST", "/v1/search", R"({"question":"ما معنى كلمة عَصَل؟","k":2})");
    ASSERT_EQ(r.status, 200);
    const auto j = json::parse(r.body);
    ASSERT_FALSE(j["documents"].empty());
    EXPECT_LE(j["documents"].size(), 2U);
    EXPECT_EQ(j["documents"][0]["doc_id"], "e003");
    EXPECT_FALSE(j.contains("answer"));
}

TEST_F(ServiceTest, NotFoundAnswer) {
    const Service service(*pipeline_);
    const auto j = json::parse(service.handle("POST", "/v1/query", R"({"question":"ما معنى كلمة طائرة؟"})").body);
    EXPECT_TRUE(j["not_found"].get<bool>());
    EXPECT_TRUE(j["documents"].empty());
}

TEST_F(ServiceTest, FusionWithoutDenseIsUnprocessable) {
    const auto bm25_only = world_->pipeline({}, false);
    const Service service(bm25_only);
    const auto r = service.handle("POST", "/v1/query", R"({"question":"ما معنى كلمة قَلْب؟","mode":"fusion"})");
    EXPECT_EQ(r.status, 422);
}

TEST_F(ServiceTest, ServesOverHttp) {
    Service service(*pipeline_);
    const int port = service.bind_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread server([&] { service.listen_after_bind(); });
    httplib::Client client("127.0.0.1", port);
    httplib::Result health;
    for (int attempt = 0; attempt < 50 && !health; ++attempt) {
        health = client.Get("/healthz");
        if (!health) std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    const auto q = client.Post("/v1/query", R"({"question":"ما معنى كلمة قَلْب؟","k":3})", "application/json");
    ASSERT_TRUE(q);
    EXPECT_EQ(q->status, 200);
    EXPECT_EQ(q->body,
              service.handle("POST", "/v1/query", R"({"question":"ما معنى كلمة قَلْب؟","k":3})").body);
    EXPECT_EQ(client.Get("/v1/entry/zzz")->status, 404);
    service.stop();
    server.join();
}

TEST(EngineOpen, FromCorpusDirectory) {
    World world = World::fixture();
    const std::string question = "ما معنى كلمة قَلْب؟";
    world.register_query(question);
    testing::TempDir dir;
    world.write_corpus_dir(dir.path());

    ProviderConfig providers;
    providers.embeddings_file = dir / "embeddings.jsonl";
    PipelineConfig config;
    config.mode = RetrievalMode::fusion_rerank;
    const auto engine = Engine::open(dir.path(), providers, config);
    EXPECT_TRUE(engine->has_vectors());
    EXPECT_EQ(engine->corpus().size(), world.corpus.size());
    const auto r = engine->pipeline().run(question);
    ASSERT_FALSE(r.documents.empty());
    EXPECT_EQ(r.documents[0].doc_id, "e001");
}

TEST(EngineOpen, MissingArtifactsAreNamed) {
    World world = World::fixture();
    testing::TempDir dir;
    world.write_corpus_dir(dir.path());
    auto expect_missing = [&](const std::string& needle) {
        try {
            Engine::open(dir.path(), {}, {});
            FAIL() << needle;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::missing_artifact);
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    std::filesystem::remove(dir / corpus_files::intent_model);
    expect_missing("intent train");
    std::filesystem::remove(dir / corpus_files::bm25_index);
    expect_missing("index build");
    std::filesystem::remove(dir / corpus_files::manifest);
    expect_missing("ingest");

    testing::TempDir no_vectors;
    world.write_corpus_dir(no_vectors.path());
    std::filesystem::remove(no_vectors / corpus_files::vectors);
    PipelineConfig fusion;
    fusion.mode = RetrievalMode::fusion_rerank;
    const auto engine = Engine::open(no_vectors.path(), {}, fusion);
    EXPECT_FALSE(engine->has_vectors());
    try {
        engine->pipeline().run("ما معنى كلمة قَلْب؟");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::missing_artifact);
        EXPECT_NE(std::string(e.what()).find("vectors.bin"), std::string::npos) << e.what();
    }
}

} // namespace
} // namespace lexirag
