#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace lexirag {

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Ordered (doc_id, score) pairs: scores non-increasing, ids unique.
/// This is the interchange type between every retrieval stage.
struct RankedList {
    std::vector<ScoredDoc> items;

    std::size_t size() const noexcept { return items.size(); }
    bool empty() const noexcept { return items.empty(); }
    const ScoredDoc& operator[](std::size_t i) const { return items[i]; }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        out.reserve(items.size());
        for (const auto& item : items) out.push_back(item.doc_id);
        return out;
    }

    friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// Descending score, ascending doc_id on ties.
inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) noexcept {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

inline void sort_ranked(std::vector<ScoredDoc>& items) {
    std::sort(items.begin(), items.end(), ranks_before);
}

/// Sorts and keeps the best `k` items.
inline void truncate_ranked(std::vector<ScoredDoc>& items, std::size_t k) {
    if (items.size() > k) {
        std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k), items.end(),
                          ranks_before);
        items.resize(k);
    } else {
        sort_ranked(items);
    }
}

/// True when the list satisfies the RankedList invariants.
bool is_well_formed(const RankedList& list);

} // namespace lexirag
