#include "lexirag/service.hpp"

#include "lexirag/error.hpp"

#include <httplib.h>
#include <json.hpp>

namespace lexirag {

namespace {

using json = nlohmann::ordered_json;

HttpResponse reply(int status, const json& body) { return HttpResponse{status, body.dump()}; }

HttpResponse error_reply(const Error& e) {
    int status = 500;
    switch (e.kind()) {
    case ErrorKind::invalid_argument:
    case ErrorKind::format: status = 400; break;
    case ErrorKind::not_found: status = 404; break;
    case ErrorKind::missing_artifact:
    case ErrorKind::insufficient_data: status = 422; break;
    case ErrorKind::retriable:
    case ErrorKind::contract_violation:
    case ErrorKind::generation:
    case ErrorKind::io: status = 502; break;
    }
    json body;
    body["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}, {"retriable", e.retriable()}};
    return reply(status, body);
}

struct Request {
    std::string question;
    std::optional<RetrievalMode> mode;
    std::optional<std::size_t> k;
};

Request parse_request(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::format, std::string("request body is not JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::format, "request body must be a JSON object");
    Request r;
    auto q = j.find("question");
    if (q == j.end() || !q->is_string()) throw Error(ErrorKind::invalid_argument, "'question' must be a string");
    r.question = q->get<std::string>();
    if (auto m = j.find("mode"); m != j.end() && !m->is_null()) {
        if (!m->is_string()) throw Error(ErrorKind::invalid_argument, "'mode' must be \"bm25\" or \"fusion\"");
        r.mode = parse_retrieval_mode(m->get<std::string>());
        if (!r.mode) throw Error(ErrorKind::invalid_argument, "'mode' must be \"bm25\" or \"fusion\"");
    }
    if (auto k = j.find("k"); k != j.end() && !k->is_null()) {
        if (!k->is_number_integer() || k->get<long long>() < 1) {
            throw Error(ErrorKind::invalid_argument, "'k' must be a positive integer");
        }
        r.k = static_cast<std::size_t>(k->get<long long>());
    }
    return r;
}

json analysis_json(const QueryAnalysis& a) {
    json j;
    j["intent"] = std::string(to_string(a.intent));
    j["fine_intent"] = a.fine ? json(std::string(to_string(*a.fine))) : json(nullptr);
    j["confidence"] = a.confidence;
    return j;
}

} // namespace

struct Service::Server {
    httplib::Server http;
};

Service::Service(const Pipeline& pipeline) : pipeline_(pipeline) {}

Service::~Service() = default;

HttpResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) const {
    try {
        if (method == "GET" && path == "/healthz") {
            return reply(200, json{{"status", "ok"}, {"corpus_size", pipeline_.corpus().size()}});
        }
        const std::string entry_prefix = "/v1/entry/";
        if (method == "GET" && path.rfind(entry_prefix, 0) == 0) {
            const auto id = path.substr(entry_prefix.size());
            const auto* entry = pipeline_.corpus().find_entry(id);
            if (!entry) throw Error(ErrorKind::not_found, "no entry with id '" + id + "'");
            return HttpResponse{200, entry_to_json(*entry)};
        }
        if (method == "POST" && path == "/v1/search") {
            const auto req = parse_request(body);
            const auto analysis = pipeline_.analyze(req.question);
            const auto docs = pipeline_.search(analysis, req.mode, req.k);
            json j = analysis_json(analysis);
            j["documents"] = json::array();
            for (const auto& d : docs.items) j["documents"].push_back({{"doc_id", d.doc_id}, {"score", d.score}});
            return reply(200, j);
        }
        if (method == "POST" && path == "/v1/query") {
            const auto req = parse_request(body);
            const auto result = pipeline_.run(req.question, req.mode, req.k);
            json j;
            j["answer"] = result.answer.text;
            j["not_found"] = result.answer.not_found;
            const json analysis = analysis_json(result.analysis);
            for (const auto& [key, value] : analysis.items()) j[key] = value;
            j["documents"] = json::array();
            for (std::size_t i = 0; i < result.documents.size(); ++i) {
                json fields = json::object();
                for (const auto& f : result.contexts[i].fields) fields[f.key] = f.value;
                j["documents"].push_back({{"doc_id", result.documents[i].doc_id},
                                          {"score", result.documents[i].score},
                                          {"fields", fields}});
            }
            return reply(200, j);
        }
        const bool known = path == "/healthz" || path == "/v1/search" || path == "/v1/query" ||
                           path.rfind(entry_prefix, 0) == 0;
        json err;
        err["error"] = {{"kind", known ? "method_not_allowed" : "not_found"},
                        {"message", method + " " + path + (known ? " is not supported" : " does not exist")},
                        {"retriable", false}};
        return reply(known ? 405 : 404, err);
    } catch (const Error& e) {
        return error_reply(e);
    } catch (const std::exception& e) {
        return reply(500, json{{"error", {{"kind", "internal"}, {"message", e.what()}, {"retriable", false}}}});
    }
}

namespace {

void install(httplib::Server& http, const Service& service) {
    auto bridge = [&service](const httplib::Request& req, httplib::Response& res) {
        const auto out = service.handle(req.method, req.path, req.body);
        res.status = out.status;
        res.set_content(out.body, "application/json; charset=utf-8");
    };
    http.Get(".*", bridge);
    http.Post(".*", bridge);
    http.Put(".*", bridge);
    http.Delete(".*", bridge);
}

} // namespace

bool Service::listen(const std::string& host, int port) {
    server_ = std::make_unique<Server>();
    install(server_->http, *this);
    return server_->http.listen(host, port);
}

int Service::bind_any_port(const std::string& host) {
    server_ = std::make_unique<Server>();
    install(server_->http, *this);
    const int port = server_->http.bind_to_any_port(host);
    return port < 0 ? 0 : port;
}

bool Service::listen_after_bind() { return server_ && server_->http.listen_after_bind(); }

void Service::stop() {
    if (server_) server_->http.stop();
}

} // namespace lexirag
