#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace lexirag {

/// Seeded generator with platform-independent draws.
///
/// std::uniform_int_distribution is implementation-defined, so generated
/// datasets would differ between standard libraries. Bounded draws here use
/// rejection sampling over std::mt19937_64, whose output sequence is fixed by
/// the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % bound;
    }

    /// Uniform real in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <class T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Derives independent child seeds (e.g. one per tree) from a parent seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace lexirag
