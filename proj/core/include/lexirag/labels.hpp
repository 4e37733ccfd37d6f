#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace lexirag {

/// The nine intents that select context fields and prompt strategy.
enum class RoutingIntent {
    meaning,
    author,
    date,
    source,
    contextual,
    morphology,
    etymology,
    inscriptions,
    other,
};

inline constexpr std::array<RoutingIntent, 9> kRoutingIntents = {
    RoutingIntent::meaning,    RoutingIntent::author,    RoutingIntent::date,
    RoutingIntent::source,     RoutingIntent::contextual, RoutingIntent::morphology,
    RoutingIntent::etymology,  RoutingIntent::inscriptions, RoutingIntent::other,
};

/// Classifier training labels (question types). Each routes onto exactly one RoutingIntent.
enum class FineIntent {
    basic_meaning,
    contextual_meaning,
    author,
    date,
    first_usage,
    source,
    morphology,
    derivations_list,
    etymology,
    inscription,
    terminological_usage,
    quranic_first_usage,
    other,
};

inline constexpr std::array<FineIntent, 13> kFineIntents = {
    FineIntent::basic_meaning,   FineIntent::contextual_meaning,   FineIntent::author,
    FineIntent::date,            FineIntent::first_usage,          FineIntent::source,
    FineIntent::morphology,      FineIntent::derivations_list,     FineIntent::etymology,
    FineIntent::inscription,     FineIntent::terminological_usage, FineIntent::quranic_first_usage,
    FineIntent::other,
};

constexpr RoutingIntent route(FineIntent fine) noexcept {
    switch (fine) {
    case FineIntent::basic_meaning: return RoutingIntent::meaning;
    case FineIntent::contextual_meaning: return RoutingIntent::contextual;
    case FineIntent::author: return RoutingIntent::author;
    case FineIntent::date: return RoutingIntent::date;
    case FineIntent::first_usage: return RoutingIntent::date;
    case FineIntent::source: return RoutingIntent::source;
    case FineIntent::morphology: return RoutingIntent::morphology;
    case FineIntent::derivations_list: return RoutingIntent::morphology;
    case FineIntent::etymology: return RoutingIntent::etymology;
    case FineIntent::inscription: return RoutingIntent::inscriptions;
    case FineIntent::terminological_usage: return RoutingIntent::other;
    case FineIntent::quranic_first_usage: return RoutingIntent::source;
    case FineIntent::other: return RoutingIntent::other;
    }
    return RoutingIntent::other;
}

std::string_view to_string(RoutingIntent intent) noexcept;
std::string_view to_string(FineIntent intent) noexcept;
std::optional<RoutingIntent> parse_routing_intent(std::string_view name) noexcept;
std::optional<FineIntent> parse_fine_intent(std::string_view name) noexcept;

} // namespace lexirag
