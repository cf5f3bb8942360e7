#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace revtox {

/// splitmix64 finalizer, used to derive independent sub-seeds (per repeat,
/// per tree, ...) from one user-facing seed.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix_seed(base ^ mix_seed(stream + 1));
}

/// Thin wrapper over std::mt19937_64. The engine's output sequence is fixed
/// by the standard, so results are identical across platforms. We draw
/// bounded integers by modulo (pinned; the tiny bias is irrelevant for the
/// sizes involved) instead of std::uniform_int_distribution, whose mapping
/// is implementation-defined.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) { return engine_() % n; }

    double next_unit() {
        // 53 random bits -> [0,1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

/// In-place Fisher-Yates shuffle with the pinned draw rule above.
template <typename T>
void fisher_yates(std::vector<T>& items, SeededRng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

/// First k elements of a shuffled [0,n) index range, returned sorted
/// ascending (ascending order keeps split tie-breaking deterministic).
inline std::vector<std::uint32_t> sample_indices(std::uint32_t n, std::uint32_t k,
                                                 SeededRng& rng) {
    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (std::uint32_t i = 0; i < k; ++i) {
        std::uint32_t j = i + static_cast<std::uint32_t>(rng.next_below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace revtox
