// rng.hpp
// Splittable counter-based random number streams.
//
// Every stream is a pure function of (master_seed, stream_index): sample i of
// a Monte Carlo run reads only stream i, so results do not depend on how the
// index range is split across workers. The construction follows the SplitMix
// design (Steele/Lea/Flood): per-stream state and an odd per-stream gamma,
// both derived from the seed pair with a 64-bit finalizing mix.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace qbell {

namespace detail {

// Murmur3/Stafford fmix64 finalizer.
constexpr std::uint64_t fmix64(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

} // namespace detail

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : state_(detail::fmix64(master_seed ^ detail::fmix64(stream_index + detail::kGolden))),
          gamma_(detail::fmix64(stream_index ^ detail::fmix64(master_seed + 0xbf58476d1ce4e5b9ULL)) | 1ULL) {}

    std::uint64_t next_u64() {
        state_ += gamma_;
        return detail::fmix64(state_);
    }

    // Uniform in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; never zero, safe under log().
    double next_double_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Uniform angle in [0, 2*pi).
    double next_angle() { return 2.0 * M_PI * next_double(); }

    // Standard normal via Box-Muller; consumes two uniforms per pair.
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double r = std::sqrt(-2.0 * std::log(next_double_open()));
        const double t = next_angle();
        cached_ = r * std::sin(t);
        have_cached_ = true;
        return r * std::cos(t);
    }

    std::complex<double> next_complex_gaussian() {
        const double re = next_gaussian();
        const double im = next_gaussian();
        return {re, im};
    }

private:
    std::uint64_t state_;
    std::uint64_t gamma_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace qbell
