#include "lexirag/resources.hpp"

#include "lexirag/error.hpp"

#include <algorithm>
#include <utility>

namespace lexirag::resources {

namespace detail {
extern const std::pair<std::string_view, std::string_view> kEntries[];
extern const std::size_t kEntryCount;
} // namespace detail

namespace {
const std::pair<std::string_view, std::string_view>* find(std::string_view name) {
    for (std::size_t i = 0; i < detail::kEntryCount; ++i) {
        if (detail::kEntries[i].first == name) return &detail::kEntries[i];
    }
    return nullptr;
}
} // namespace

std::string_view get(std::string_view name) {
    if (const auto* entry = find(name)) return entry->second;
    throw Error(ErrorKind::not_found, "no bundled resource named " + std::string(name));
}

bool contains(std::string_view name) { return find(name) != nullptr; }

std::vector<std::string> list(std::string_view prefix) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < detail::kEntryCount; ++i) {
        if (detail::kEntries[i].first.starts_with(prefix)) out.emplace_back(detail::kEntries[i].first);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace lexirag::resources
