#include "lexirag/error.hpp"
#include "lexirag/evalkit.hpp"
#include "lexirag/providers.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <mutex>
#include <thread>

namespace lexirag {
namespace {

using json = nlohmann::json;

/// Local HTTP server answering every POST with a scripted reply and
/// recording what it received.
class MockServer {
public:
    MockServer() {
        server_.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mu_);
            last_body_ = req.body;
            last_path_ = req.path;
            last_auth_ = req.has_header("Authorization") ? req.get_header_value("Authorization") : "";
            res.status = status_;
            res.set_content(reply_, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockServer() {
        server_.stop();
        thread_.join();
    }

    void script(int status, std::string reply) {
        std::lock_guard lock(mu_);
        status_ = status;
        reply_ = std::move(reply);
    }
    json last_body() const {
        std::lock_guard lock(mu_);
        return json::parse(last_body_);
    }
    std::string last_path() const {
        std::lock_guard lock(mu_);
        return last_path_;
    }
    std::string last_auth() const {
        std::lock_guard lock(mu_);
        return last_auth_;
    }
    Endpoint endpoint(const std::string& path, const std::string& key_env = "") const {
        return Endpoint{"http://127.0.0.1:" + std::to_string(port_) + path, "m1", key_env, std::chrono::seconds(5)};
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    mutable std::mutex mu_;
    int status_ = 200;
    std::string reply_ = "{}";
    std::string last_body_, last_path_, last_auth_;
};

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no Error thrown";
    return ErrorKind::io;
}

TEST(HttpEmbedding, WireContract) {
    MockServer mock;
    mock.script(200, R"({"data":[{"embedding":[1,0]},{"embedding":[0.5,0.25]}]})");
    HttpEmbeddingProvider provider(mock.endpoint("/v1/embeddings"), 2);
    const std::vector<std::string> texts{"قلب", "نهر"};
    const auto out = embed_batch(provider, texts);
    ASSERT_EQ(out.size(), 2U);
    EXPECT_FLOAT_EQ(out[1][1], 0.25F);
    EXPECT_EQ(mock.last_path(), "/v1/embeddings");
    const auto body = mock.last_body();
    EXPECT_EQ(body["model"], "m1");
    EXPECT_EQ(body["input"], json(texts));
}

TEST(HttpEmbedding, ShapeViolations) {
    MockServer mock;
    HttpEmbeddingProvider provider(mock.endpoint("/e"), 2);
    const std::vector<std::string> texts{"قلب"};
    mock.script(200, R"({"data":[{"embedding":[1,0,0]}]})");
    EXPECT_EQ(kind_of([&] { embed_batch(provider, texts); }), ErrorKind::contract_violation);
    mock.script(200, R"({"data":[]})");
    EXPECT_EQ(kind_of([&] { embed_batch(provider, texts); }), ErrorKind::contract_violation);
    mock.script(200, R"({"vectors":[]})");
    EXPECT_EQ(kind_of([&] { embed_batch(provider, texts); }), ErrorKind::contract_violation);
    mock.script(200, "not json");
    EXPECT_EQ(kind_of([&] { embed_batch(provider, texts); }), ErrorKind::contract_violation);
}

TEST(HttpRerank, WireContract) {
    MockServer mock;
    mock.script(200, R"({"scores":[0.1,0.9]})");
    HttpRerankScorer scorer(mock.endpoint("/rerank"));
    const std::vector<std::string> passages{"أ", "ب"};
    EXPECT_EQ(scorer.score("س", passages), (std::vector<double>{0.1, 0.9}));
    const auto body = mock.last_body();
    EXPECT_EQ(body["query"], "س");
    EXPECT_EQ(body["passages"], json(passages));
    EXPECT_EQ(body["model"], "m1");
}

LexicalEntry entry(const std::string& id, const std::string& word) {
    LexicalEntry e;
    e.entry_id = id;
    e.root_id = "R1";
    e.root = "قلب";
    e.word = word;
    e.citation = "شاهد";
    e.meaning = "معنى";
    return e;
}

TEST(HttpRerank, WrongCountIsContractViolation) {
    MockServer mock;
    mock.script(200, R"({"scores":[0.1]})");
    HttpRerankScorer scorer(mock.endpoint("/rerank"));
    const Corpus corpus({entry("a", "قلب"), entry("b", "نهر")}, {RootRecord{"R1", "قلب", std::nullopt, std::nullopt}});
    const RankedList candidates{{{"a", 2.0}, {"b", 1.0}}};
    EXPECT_EQ(kind_of([&] { rerank(scorer, "س", candidates, corpus); }), ErrorKind::contract_violation);
    mock.script(200, R"({"scores":[0.1,0.9]})");
    EXPECT_EQ(rerank(scorer, "س", candidates, corpus).ids(), (std::vector<std::string>{"b", "a"}));
}

TEST(HttpChat, TemperatureZeroAndMessages) {
    MockServer mock;
    mock.script(200, R"({"choices":[{"message":{"role":"assistant","content":"الجواب"}}]})");
    HttpChatClient client(mock.endpoint("/v1/chat/completions"));
    const auto reply = client.chat({ChatMessage{"system", "ت"}, ChatMessage{"user", "س"}});
    EXPECT_EQ(reply, "الجواب");
    const auto body = mock.last_body();
    EXPECT_EQ(body["temperature"], 0);
    EXPECT_EQ(body["model"], "m1");
    ASSERT_EQ(body["messages"].size(), 2U);
    EXPECT_EQ(body["messages"][1]["role"], "user");
    EXPECT_EQ(body["messages"][1]["content"], "س");
    static_assert(GenerationClient::temperature() == 0.0);
}

TEST(HttpChat, CompleteRendersPrompt) {
    MockServer mock;
    mock.script(200, R"({"choices":[{"message":{"content":"ok"}}]})");
    HttpChatClient client(mock.endpoint("/chat"));
    PromptBundle prompt;
    prompt.system_instructions = "تعليمات";
    prompt.user_question = "ما معنى قلب؟";
    EXPECT_EQ(client.complete(prompt), "ok");
    const auto body = mock.last_body();
    EXPECT_EQ(body["temperature"], 0);
    EXPECT_NE(body["messages"].back()["content"].get<std::string>().find("ما معنى قلب؟"), std::string::npos);
}

TEST(HttpChat, BearerFromEnvironment) {
    MockServer mock;
    mock.script(200, R"({"choices":[{"message":{"content":"ok"}}]})");
    ::setenv("LEXIRAG_TEST_KEY", "s3cret", 1);
    HttpChatClient with_key(mock.endpoint("/chat", "LEXIRAG_TEST_KEY"));
    with_key.chat({ChatMessage{"user", "x"}});
    EXPECT_EQ(mock.last_auth(), "Bearer s3cret");
    ::unsetenv("LEXIRAG_TEST_KEY");
    with_key.chat({ChatMessage{"user", "x"}});
    EXPECT_EQ(mock.last_auth(), "");
}

TEST(HttpStatus, Classification) {
    MockServer mock;
    HttpChatClient client(mock.endpoint("/chat"));
    auto call = [&] { client.chat({ChatMessage{"user", "x"}}); };
    mock.script(503, "{}");
    EXPECT_EQ(kind_of(call), ErrorKind::retriable);
    mock.script(429, "{}");
    EXPECT_EQ(kind_of(call), ErrorKind::retriable);
    mock.script(400, R"({"error":"bad"})");
    EXPECT_EQ(kind_of(call), ErrorKind::io);
    mock.script(200, R"({"choices":[]})");
    EXPECT_EQ(kind_of(call), ErrorKind::contract_violation);
}

TEST(HttpStatus, UnreachableIsRetriable) {
    int port = 0;
    {
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    HttpChatClient client(Endpoint{"http://127.0.0.1:" + std::to_string(port) + "/chat", "m", "",
                                   std::chrono::milliseconds(500)});
    try {
        client.chat({ChatMessage{"user", "x"}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::retriable);
        EXPECT_TRUE(e.retriable());
    }
}

TEST(Endpoints, UrlValidation) {
    EXPECT_EQ(kind_of([] { HttpChatClient(Endpoint{"localhost:8080/chat", "m"}); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { HttpChatClient(Endpoint{"ftp://host/chat", "m"}); }), ErrorKind::invalid_argument);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    EXPECT_EQ(kind_of([] { HttpRerankScorer(Endpoint{"https://host/rerank", "m"}); }), ErrorKind::invalid_argument);
#endif
}

TEST(RemoteJudge, ThroughHttpChat) {
    MockServer mock;
    mock.script(200, R"({"choices":[{"message":{"content":"Score: 85"}}]})");
    HttpChatClient client(mock.endpoint("/judge"));
    EXPECT_EQ(eval::judge_remote(client, "س", "مرجع", "مرشح"), 75);
    EXPECT_EQ(mock.last_body()["temperature"], 0);
    mock.script(200, R"({"choices":[{"message":{"content":"no idea"}}]})");
    EXPECT_EQ(kind_of([&] { eval::judge_remote(client, "س", "م", "ج"); }), ErrorKind::format);
}

} // namespace
} // namespace lexirag
