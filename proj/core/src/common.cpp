#include "lexirag/labels.hpp"

#include "lexirag/error.hpp"
#include "lexirag/ranked_list.hpp"

#include <unordered_set>

namespace lexirag {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::retriable: return "retriable";
    case ErrorKind::contract_violation: return "contract_violation";
    case ErrorKind::generation: return "generation";
    case ErrorKind::missing_artifact: return "missing_artifact";
    case ErrorKind::insufficient_data: return "insufficient_data";
    }
    return "unknown";
}

std::string_view to_string(RoutingIntent intent) noexcept {
    switch (intent) {
    case RoutingIntent::meaning: return "meaning";
    case RoutingIntent::author: return "author";
    case RoutingIntent::date: return "date";
    case RoutingIntent::source: return "source";
    case RoutingIntent::contextual: return "contextual";
    case RoutingIntent::morphology: return "morphology";
    case RoutingIntent::etymology: return "etymology";
    case RoutingIntent::inscriptions: return "inscriptions";
    case RoutingIntent::other: return "other";
    }
    return "other";
}

std::string_view to_string(FineIntent intent) noexcept {
    switch (intent) {
    case FineIntent::basic_meaning: return "basic_meaning";
    case FineIntent::contextual_meaning: return "contextual_meaning";
    case FineIntent::author: return "author";
    case FineIntent::date: return "date";
    case FineIntent::first_usage: return "first_usage";
    case FineIntent::source: return "source";
    case FineIntent::morphology: return "morphology";
    case FineIntent::derivations_list: return "derivations_list";
    case FineIntent::etymology: return "etymology";
    case FineIntent::inscription: return "inscription";
    case FineIntent::terminological_usage: return "terminological_usage";
    case FineIntent::quranic_first_usage: return "quranic_first_usage";
    case FineIntent::other: return "other";
    }
    return "other";
}

std::optional<RoutingIntent> parse_routing_intent(std::string_view name) noexcept {
    for (auto intent : kRoutingIntents) {
        if (to_string(intent) == name) return intent;
    }
    return std::nullopt;
}

std::optional<FineIntent> parse_fine_intent(std::string_view name) noexcept {
    for (auto intent : kFineIntents) {
        if (to_string(intent) == name) return intent;
    }
    return std::nullopt;
}

bool is_well_formed(const RankedList& list) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < list.items.size(); ++i) {
        if (!seen.insert(list.items[i].doc_id).second) return false;
        if (i > 0 && list.items[i].score > list.items[i - 1].score) return false;
    }
    return true;
}

} // namespace lexirag
