#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sublinear {

/// One SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for the sub-stream identified by `ids` under a master seed. Distinct
/// id paths give independent-looking seeds; the derivation is platform independent.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids);

/// mt19937_64 with portable uniform and normal transforms.
///
/// The transforms are written out here rather than taken from <random>, whose
/// distributions are implementation-defined, so a seed produces the same
/// stream with every standard library.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    /// Standard normal by the Box-Muller transform (pairs are cached).
    double normal();
    double normal(double mean, double sd);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sublinear
