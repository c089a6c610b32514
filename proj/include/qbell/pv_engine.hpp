// pv_engine.hpp
// Monte Carlo estimation of the probability of violation.
//
// Sample i draws everything it needs from RngStream(seed, i), so the verdict
// of a sample is a pure function of (seed, i): violation counts are identical
// for any worker count, resumption from a checkpoint is exact, and extending
// a run preserves the earlier per-sample verdicts.
//
// Scenarios:
//  * cglmp-mbsps — draw the 4d phase-shifter angles uniformly from [0, 2*pi)
//    and count configurations where any of the four observable relabelings of
//    the CGLMP inequality is violated (this realizes the relabeling factor
//    nu = 4 of the violation-probability normalization).
//  * behaviour  — draw mA + mB Haar unitaries, build the behaviour and count
//    points outside the local polytope; no relabeling factor (the polytope
//    already contains every relabeling).
#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "qbell/behaviour.hpp"
#include "qbell/cglmp.hpp"
#include "qbell/schmidt_state.hpp"

namespace qbell {

struct PvEstimate {
    std::uint64_t violations = 0;
    std::uint64_t samples = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;  // Wilson score interval at z = 3
    double ci_high = 1.0;
    std::string scenario; // "cglmp-mbsps" | "behaviour"
    int mA = 2;
    int mB = 2;
    int d = 0;
    std::uint64_t seed = 0;
};

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::uint64_t violations, std::uint64_t samples,
                                          double z);

struct EstimateOptions {
    int workers = 1;                       // <= 0 means hardware concurrency
    std::uint64_t checkpoint_every = 100000;
    std::string checkpoint_path;           // empty: no checkpointing
    std::uint64_t min_hits = 0;            // stop at a block edge once reached (0: off)
    double lp_tol = 1e-8;                  // behaviour scenario LP tolerance
};

// Per-sample verdicts (exposed for determinism and prefix-consistency tests).
bool cglmp_sample_violates(const ClosedFormCoefficients& coeffs, std::uint64_t seed,
                           std::uint64_t index);
bool behaviour_sample_nonlocal(const SchmidtState& state, int mA, int mB,
                               LocalPolytopeTester& tester, double lp_tol,
                               std::uint64_t seed, std::uint64_t index);

PvEstimate estimate_pv_cglmp(const SchmidtState& state, std::uint64_t samples,
                             std::uint64_t seed, const EstimateOptions& options = {});

PvEstimate estimate_pv_behaviour(const SchmidtState& state, int mA, int mB,
                                 std::uint64_t samples, std::uint64_t seed,
                                 const EstimateOptions& options = {});

} // namespace qbell
