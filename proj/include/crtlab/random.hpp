#ifndef CRTLAB_RANDOM_HPP
#define CRTLAB_RANDOM_HPP

#include <cstdint>
#include <random>

namespace crtlab {

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    /// Child stream, e.g. replicate i of this experiment.
    SeedSpec child(std::uint64_t i) const;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Stable string hash (FNV-1a) for deriving experiment seeds from names.
std::uint64_t stable_hash(const char* s);

class Rng {
public:
    explicit Rng(const SeedSpec& seed);

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    std::uint64_t binomial(std::uint64_t n, double p) {
        return std::binomial_distribution<std::uint64_t>(n, p)(engine_);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace crtlab

#endif
