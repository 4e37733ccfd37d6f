#pragma once

#include "lexirag/pipeline.hpp"

#include <memory>
#include <string>

namespace lexirag {

struct HttpResponse {
    int status = 200;
    std::string body;  // JSON
};

/// JSON API over a Pipeline:
///   POST /v1/query  {question, mode?, k?}
///   POST /v1/search {question, k?, mode?}
///   GET  /v1/entry/{id}
///   GET  /healthz
/// Provider failures map to 502 with "retriable": true.
class Service {
public:
    explicit Service(const Pipeline& pipeline);
    ~Service();

    /// Routes one request without any network I/O.
    HttpResponse handle(const std::string& method, const std::string& path, const std::string& body) const;

    /// Binds and serves until stop(). Returns false if the address cannot be bound.
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it (0 on failure); call listen_after_bind() to serve.
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();

private:
    struct Server;
    const Pipeline& pipeline_;
    std::unique_ptr<Server> server_;
};

} // namespace lexirag
