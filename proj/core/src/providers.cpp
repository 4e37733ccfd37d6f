#include "lexirag/providers.hpp"

#include "lexirag/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

namespace lexirag {

namespace {

using json = nlohmann::json;

struct Target {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Target split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorKind::invalid_argument, "endpoint '" + url + "' lacks a scheme");
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(ErrorKind::invalid_argument, "endpoint '" + url + "' must use http or https");
    }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme == "https") throw Error(ErrorKind::invalid_argument, "this build has no TLS support for '" + url + "'");
#endif
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

json post_json(const Endpoint& endpoint, const json& body) {
    const auto target = split_url(endpoint.url);
    httplib::Client client(target.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (!endpoint.api_key_env.empty()) {
        if (const char* key = std::getenv(endpoint.api_key_env.c_str()); key && *key) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }
    auto res = client.Post(target.path, headers, body.dump(), "application/json");
    if (!res) {
        throw Error(ErrorKind::retriable, endpoint.url + ": " + httplib::to_string(res.error()));
    }
    if (res->status >= 500 || res->status == 429) {
        throw Error(ErrorKind::retriable, endpoint.url + ": HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) {
        throw Error(ErrorKind::io, endpoint.url + ": HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::contract_violation, endpoint.url + ": response is not JSON: " + e.what());
    }
}

[[noreturn]] void bad_shape(const Endpoint& endpoint, const std::string& what) {
    throw Error(ErrorKind::contract_violation, endpoint.url + ": unexpected response shape: " + what);
}

} // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(Endpoint endpoint, std::size_t dimension)
    : endpoint_(std::move(endpoint)), dimension_(dimension) {
    split_url(endpoint_.url);
}

std::vector<Vector> HttpEmbeddingProvider::embed(std::span<const std::string> texts) {
    json body{{"model", endpoint_.model}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
    const auto res = post_json(endpoint_, body);
    if (!res.contains("data") || !res["data"].is_array()) bad_shape(endpoint_, "missing data array");
    std::vector<Vector> out;
    out.reserve(res["data"].size());
    try {
        for (const auto& item : res["data"]) out.push_back(item.at("embedding").get<Vector>());
    } catch (const json::exception& e) {
        bad_shape(endpoint_, e.what());
    }
    return out;
}

HttpRerankScorer::HttpRerankScorer(Endpoint endpoint) : endpoint_(std::move(endpoint)) { split_url(endpoint_.url); }

std::vector<double> HttpRerankScorer::score(const std::string& query, std::span<const std::string> passages) {
    if (passages.empty()) return {};
    json body{{"model", endpoint_.model},
              {"query", query},
              {"passages", std::vector<std::string>(passages.begin(), passages.end())}};
    const auto res = post_json(endpoint_, body);
    try {
        return res.at("scores").get<std::vector<double>>();
    } catch (const json::exception& e) {
        bad_shape(endpoint_, e.what());
    }
}

HttpChatClient::HttpChatClient(Endpoint endpoint) : endpoint_(std::move(endpoint)) { split_url(endpoint_.url); }

std::string HttpChatClient::complete(const PromptBundle& prompt) { return chat(render_messages(prompt)); }

std::string HttpChatClient::chat(const std::vector<ChatMessage>& messages) {
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    json body{{"model", endpoint_.model}, {"temperature", GenerationClient::temperature()}, {"messages", msgs}};
    const auto res = post_json(endpoint_, body);
    try {
        return res.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        bad_shape(endpoint_, e.what());
    }
}

} // namespace lexirag
