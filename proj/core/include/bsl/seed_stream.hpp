#pragma once

#include <cstdint>
#include <random>

namespace bsl {

// Counter-based seed tree.  A node is (root, index); its leaf seed is a
// 64-bit hash of both, and child(i) re-roots at that hash.  Children can be
// derived in any order (or in parallel) and always get the same seeds, which
// is what makes threaded batch simulation bit-reproducible.
class SeedStream {
public:
    SeedStream() : root_(0), index_(0) {}
    explicit SeedStream(std::uint64_t root, std::uint64_t index = 0)
        : root_(root), index_(index) {}

    std::uint64_t root() const { return root_; }
    std::uint64_t index() const { return index_; }

    // Leaf seed for this node.
    std::uint64_t seed() const { return mix(root_ ^ mix(index_)); }

    // Independent substream i.
    SeedStream child(std::uint64_t i) const { return SeedStream(seed(), i); }

    // splitmix64 finalizer; bijective on 64-bit words.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t root_;
    std::uint64_t index_;
};

// Thin RNG wrapper seeded from a SeedStream leaf.  One instance per logical
// draw site; never shared across sites, so draw order stays fixed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    explicit Rng(const SeedStream& s) : engine_(s.seed()) {}

    double uniform() { return unit_(engine_); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }

    double normal() { return normal_(engine_); }

    double normal(double mean, double sd) { return mean + sd * normal_(engine_); }

    double gamma(double shape, double scale) {
        std::gamma_distribution<double> g(shape, scale);
        return g(engine_);
    }

    double chi_squared(double df) { return gamma(0.5 * df, 2.0); }

    double exponential(double rate) {
        std::exponential_distribution<double> e(rate);
        return e(engine_);
    }

    std::uint64_t bits() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace bsl
