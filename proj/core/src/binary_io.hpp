#pragma once

// Little-endian binary helpers for the on-disk index formats.

#include "lexirag/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace lexirag::binio {

static_assert(std::endian::native == std::endian::little, "index formats assume a little-endian host");

template <class T>
    requires std::is_arithmetic_v<T>
void write(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

inline void write_string(std::ostream& out, std::string_view s) {
    write<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_magic(std::ostream& out, std::string_view magic, std::uint32_t version) {
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
    write<std::uint32_t>(out, version);
}

class Reader {
public:
    Reader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

    template <class T>
        requires std::is_arithmetic_v<T>
    T read() {
        T value{};
        in_.read(reinterpret_cast<char*>(&value), sizeof(T));
        if (!in_) fail("truncated");
        return value;
    }

    std::string read_string(std::size_t max_len = 1u << 24) {
        const auto len = read<std::uint32_t>();
        if (len > max_len) fail("string length out of range");
        std::string s(len, '\0');
        in_.read(s.data(), len);
        if (!in_) fail("truncated");
        return s;
    }

    void read_bytes(void* dst, std::size_t n) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (!in_) fail("truncated");
    }

    /// Checks the magic and returns the version; throws on mismatch.
    std::uint32_t expect_magic(std::string_view magic, std::uint32_t max_version) {
        std::string got(magic.size(), '\0');
        in_.read(got.data(), static_cast<std::streamsize>(got.size()));
        if (!in_ || got != magic) fail("bad magic header");
        const auto version = read<std::uint32_t>();
        if (version == 0 || version > max_version) fail("unsupported version " + std::to_string(version));
        return version;
    }

    [[noreturn]] void fail(const std::string& why) const { throw Error(ErrorKind::format, what_ + ": " + why); }

private:
    std::istream& in_;
    std::string what_;
};

} // namespace lexirag::binio
