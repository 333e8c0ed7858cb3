#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qosrank {

// Seeded random stream used by every learner. The generator identity is
// std::mt19937_64 with modulo reduction for bounded draws; both are fixed
// so model metadata can name the stream and runs stay reproducible across
// platforms. Derived streams (per forest tree, per cube cell) are seeded
// as base seed + index.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next() { return engine_(); }

    // n must be > 0.
    std::size_t next_below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    // Uniform in [0, 1) with 53 significant bits.
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    SplitRng derive(std::uint64_t index) const { return SplitRng(seed_ + index); }

    // Fisher-Yates, descending, so the permutation depends only on the seed.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct values from 0..n-1, ascending order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::size_t> picked;
        picked.reserve(k);
        for (std::size_t i = 0; i < k && !pool.empty(); ++i) {
            std::size_t j = next_below(pool.size());
            picked.push_back(pool[j]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
        }
        std::sort(picked.begin(), picked.end());
        return picked;
    }

    static constexpr const char* algorithm_name() { return "mt19937_64/modulo"; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace qosrank
