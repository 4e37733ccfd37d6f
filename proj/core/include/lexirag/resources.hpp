#pragma once

#include <string>
#include <string_view>
#include <vector>

// Data files under core/resources/ compiled into the library at build time.
namespace lexirag::resources {

/// Contents of a bundled file, e.g. "stopwords.txt" or "templates/questions/date.txt".
/// Throws Error(not_found) for unknown names.
std::string_view get(std::string_view name);

bool contains(std::string_view name);

/// Names of all bundled files starting with `prefix`, sorted.
std::vector<std::string> list(std::string_view prefix = {});

} // namespace lexirag::resources
