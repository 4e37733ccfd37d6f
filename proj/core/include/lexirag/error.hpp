#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexirag {

enum class ErrorKind {
    invalid_argument,
    not_found,
    io,
    format,
    /// Transport-level failure of a remote provider; the caller may retry.
    retriable,
    /// A provider returned data that breaks its declared contract (wrong count or dimension).
    contract_violation,
    generation,
    missing_artifact,
    insufficient_data,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    bool retriable() const noexcept { return kind_ == ErrorKind::retriable; }

private:
    ErrorKind kind_;
};

} // namespace lexirag
