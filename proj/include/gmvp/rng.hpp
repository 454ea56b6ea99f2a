#pragma once

#include <array>
#include <cstdint>

namespace gmvp {

// Addressable random stream: a master seed plus a stream id. Distinct ids
// give statistically independent streams; the same pair reproduces the
// identical draw sequence on every platform (no standard-library
// distributions are involved anywhere in the generation path).
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

// xoshiro256++ generator with SplitMix64-derived state.
class Rng {
public:
    explicit Rng(RngStream stream);
    Rng(std::uint64_t master_seed, std::uint64_t stream_id)
        : Rng(RngStream{master_seed, stream_id}) {}

    std::uint64_t next_u64();

    // Uniform on (0, 1), 53-bit resolution, never exactly 0 or 1.
    double uniform01();

    // Standard normal via Box-Muller (second variate cached).
    double normal();

    // Gamma(shape, scale), Marsaglia-Tsang squeeze; shape > 0.
    double gamma(double shape, double scale = 1.0);

    // Chi-squared with df >= 0; df == 0 is the point mass at zero.
    double chi_squared(double df);

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gmvp
