// cglmp.hpp
// CGLMP Bell functional for two qudits measured with multiport beam splitters
// and phase shifters (MBSPS).
//
// Measurement model: each party applies a diagonal phase shift (angles
// phi^m_a for Alice's setting a, phi^n_b for Bob's setting b), a discrete
// Fourier transform (conjugated on Bob's side), then projects onto the
// computational basis. The joint outcome probability collapses to
//
//   P_ab(k,l) = 1/d^2 + (2/d^2) sum_{m>n} alpha_m alpha_n cos D^{mn}_ab(k,l),
//   D^{mn}_ab(k,l) = phi^m_a + phi^m_b - phi^n_a - phi^n_b
//                    + (2*pi/d)(m-n) * ((k - l) mod d).
//
// The CGLMP score I_d <= 2 (local bound) is assembled from outcome-difference
// class probabilities B_k. Two evaluators are provided:
//   * cglmp_direct  — the B_k sum, O(d^3); serves as the testing oracle.
//   * cglmp_closed  — the harmonic-addition closed form
//       I_d = sum_{ab} sum_{m>n} C^{mn}_ab cos(theta^{mn}_ab + Psi^{mn}_ab),
//     O(d^2); this is the hot path for Monte Carlo sampling.
// Both must agree to 1e-9; the direct form is authoritative.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qbell/rng.hpp"
#include "qbell/schmidt_state.hpp"

namespace qbell {

// Tiny guard above the local bound so that configurations landing on the
// boundary (value == 2 up to rounding) do not count as violations. Affects a
// measure-zero-adjacent set, invisible to the Monte Carlo estimates.
constexpr double kViolationBoundaryEps = 1e-12;

// Phase-shifter angles for the two settings of each party. Angles are stored
// raw; every consumer is 2*pi-periodic, so no normalization pass is needed.
struct PhaseConfig {
    int d = 0;
    std::array<std::vector<double>, 2> alice; // alice[a-1][m], a in {1,2}
    std::array<std::vector<double>, 2> bob;   // bob[b-1][n],  b in {1,2}

    PhaseConfig() = default;
    explicit PhaseConfig(int dim);

    static PhaseConfig zero(int d);
    // Draws all 4d angles uniformly from [0, 2*pi); order: Alice setting 1,
    // Alice setting 2, Bob setting 1, Bob setting 2.
    static PhaseConfig random(int d, RngStream& rng);

    // Observable relabelings: exchange the two phase rows of one party.
    PhaseConfig with_alice_swapped() const;
    PhaseConfig with_bob_swapped() const;
};

struct BellValue {
    double value = 0.0;
    double classical_bound = 2.0;

    bool violates() const { return value > classical_bound + kViolationBoundaryEps; }
};

// Coefficients of the closed cosine form, defined for m > n (zero elsewhere).
// Indexing: a, b in {1,2} map to slots [a-1][b-1].
//   Ccal_mn = sum_k (1 - 2k/(d-1)) sin(pi (m-n)(2k+1) / d)     (depends on m-n)
//   C_ab    = (4 alpha_m alpha_n / d) (-1)^{b(1+a)} Ccal_mn
//   Psi_ab  = (-1)^{a(1+b)} [pi/2 - pi (m-n)/d]
//   A_ab    = (-1)^{a(1+b)+1} cot(pi (m-n)/d)                  (intermediate form)
struct ClosedFormCoefficients {
    int d = 0;
    // [a][b] each a d*d row-major matrix, entry (m,n).
    std::array<std::array<std::vector<double>, 2>, 2> C;
    std::array<std::array<std::vector<double>, 2>, 2> Psi;
    std::array<std::array<std::vector<double>, 2>, 2> A;
    std::vector<double> Ccal;

    // Hot-path tables: C*cos(Psi) and C*sin(Psi), flattened [a][b][pair].
    std::array<std::array<std::vector<double>, 2>, 2> c_cos_psi;
    std::array<std::array<std::vector<double>, 2>, 2> c_sin_psi;
    std::vector<int> pair_m, pair_n; // enumeration of m > n

    double at(const std::array<std::array<std::vector<double>, 2>, 2>& t,
              int a, int b, int m, int n) const {
        return t[a - 1][b - 1][static_cast<std::size_t>(m) * d + n];
    }
};

// Joint probability P_ab(k,l) of Eq. above; result clamped to [0,1] when the
// excursion is within 1e-12 of the boundary.
double joint_probability(const SchmidtState& state, const PhaseConfig& phases,
                         int a, int b, int k, int l);

// Same value before clamping (exposed for range tests).
double joint_probability_raw(const SchmidtState& state, const PhaseConfig& phases,
                             int a, int b, int k, int l);

// Outcome-difference class sum B_k = sum_{ab} sum_j P_ab(j + kappa, j + lambda)
// with kappa_11k = kappa_22k = lambda_12k = k, lambda_21k = k + 1 (mod d).
double bk_term(const SchmidtState& state, const PhaseConfig& phases, int k);

// I_d = sum_{k=0}^{[d/2]-1} (1 - 2k/(d-1)) { B_k - B_{-(k+1)} }.
BellValue cglmp_direct(const SchmidtState& state, const PhaseConfig& phases);

ClosedFormCoefficients closed_form_coefficients(const SchmidtState& state, int d);

// Closed cosine form, evaluated from precomputed coefficients.
double cglmp_closed_value(const ClosedFormCoefficients& coeffs, const PhaseConfig& phases);
BellValue cglmp_closed(const SchmidtState& state, const PhaseConfig& phases);

// I_d for the four observable relabelings {id, swap a, swap b, swap both},
// sharing one trigonometric pass over the phase differences.
std::array<double, 4> cglmp_relabeled_values(const ClosedFormCoefficients& coeffs,
                                             const PhaseConfig& phases);

// True iff any of the four relabeled inequalities is strictly violated.
bool violates_with_relabelings(const ClosedFormCoefficients& coeffs, const PhaseConfig& phases);
bool violates_with_relabelings(const SchmidtState& state, const PhaseConfig& phases);

} // namespace qbell
