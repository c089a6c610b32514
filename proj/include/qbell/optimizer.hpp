// optimizer.hpp
// Maximal-violation state search, rank-3 family scans and the dimension-decay
// fit of the violation probability.
//
// For fixed phases the CGLMP score is the quadratic form alpha' M alpha with
//   M_mn = (2/d) sum_{ab} (-1)^{b(1+a)} Ccal_mn cos(theta^{mn}_ab + Psi^{mn}_ab)
// (zero diagonal), so the optimal state for those phases is the principal
// eigenvector. For a fixed state, the score is optimized over the 4d phase
// angles by exact single-angle updates: the score restricted to one angle is
// P cos(x) + Q sin(x) + const, maximized in closed form. Alternating the two
// blocks is a see-saw whose score never decreases.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbell/cglmp.hpp"
#include "qbell/pv_engine.hpp"
#include "qbell/schmidt_state.hpp"

namespace qbell {

// Largest eigenvalue and eigenvector of a dense symmetric matrix (row-major,
// n <= 16), via cyclic Jacobi rotations.
std::pair<double, std::vector<double>> symmetric_principal_eigenpair(
    const std::vector<double>& matrix, int n);

// Quadratic-form kernel of the CGLMP score in the Schmidt coefficients.
std::vector<double> cglmp_alpha_kernel(const PhaseConfig& phases);

struct SeesawOutcome {
    SchmidtState alpha;
    PhaseConfig phases;
    double value = 0.0;
    std::vector<double> trace; // score after each see-saw round (non-decreasing)
    bool converged = false;
};

// One see-saw run from the given start (alpha fixed to MES internally when
// callers follow find_mvs; any valid start is accepted).
SeesawOutcome seesaw_run(const SchmidtState& alpha0, const PhaseConfig& phases0,
                         int max_rounds = 200, double value_tol = 1e-10);

struct MvsResult {
    int d = 0;
    SchmidtState alpha;
    double best_value = 0.0;
    PhaseConfig phases;
    int restarts_used = 0;
    bool converged = false; // best run hit the see-saw tolerance
    bool symmetric = false; // alpha_j ~ alpha_{d-1-j} within 1e-2
};

// Multi-start see-saw: restart 0 uses the linear-in-index phase pattern that
// is optimal for the CGLMP scenario, the rest use uniform random phases.
MvsResult find_mvs(int d, int restarts, std::uint64_t seed);

struct ScanGrid {
    std::vector<double> theta0_axis;
    std::vector<double> theta1_axis;
    std::vector<PvEstimate> pv; // row-major [theta0][theta1]
    double argmax_theta0 = 0.0;
    double argmax_theta1 = 0.0;
    double argmax_p_hat = 0.0;

    const PvEstimate& at(int i, int j) const { return pv[static_cast<std::size_t>(i) * theta1_axis.size() + j]; }
};

// Violation probability of the rank-3 family over a grid_n x grid_n grid of
// (theta0, theta1) in [0, pi/2]^2. scenario: "cglmp" | "behaviour".
ScanGrid scan_family(int d, const std::string& scenario, int grid_n,
                     std::uint64_t samples_per_point, std::uint64_t seed,
                     const EstimateOptions& options = {});

struct FitResult {
    double slope_b = 0.0;   // p_v ~ (2*pi)^(slope_b * d + intercept)
    double intercept = 0.0;
    double residual = 0.0;  // sum of squared natural-log residuals
};

// Least-squares line through (d, ln p_v).
FitResult fit_decay(const std::vector<std::pair<double, double>>& points);

} // namespace qbell
