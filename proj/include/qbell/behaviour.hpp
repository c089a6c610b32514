// behaviour.hpp
// Behaviours p(ab|xy), local deterministic strategies and local-polytope
// membership. A behaviour is local iff it is a convex mixture of products of
// deterministic single-party strategies; membership is decided by a phase-1
// feasibility LP over the d^mA * d^mB vertex weights.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qbell/schmidt_state.hpp"
#include "qbell/simplex.hpp"
#include "qbell/unitary.hpp"

namespace qbell {

struct Behaviour {
    int d = 0;  // outcomes per measurement
    int mA = 0; // settings for Alice
    int mB = 0; // settings for Bob
    std::vector<double> p; // [x][y][a][b] row-major

    Behaviour() = default;
    Behaviour(int outcomes, int settings_a, int settings_b);

    double& at(int x, int y, int a, int b) { return p[index(x, y, a, b)]; }
    double at(int x, int y, int a, int b) const { return p[index(x, y, a, b)]; }
    std::size_t index(int x, int y, int a, int b) const {
        return ((static_cast<std::size_t>(x) * mB + y) * d + a) * d + b;
    }

    // Normalization (1e-10), nonnegativity (-1e-12) and no-signaling (1e-10).
    bool is_valid(double norm_tol = 1e-10, double neg_tol = 1e-12,
                  double nosig_tol = 1e-10) const;
};

// Free dimension of the no-signaling polytope containing these behaviours;
// 4d(d-1) for two settings per party.
long behaviour_effective_dimension(int d, int mA, int mB);

// All d^m deterministic assignments; strategy k maps setting x to digit x of
// k in base d (least significant digit = setting 0).
struct StrategySet {
    int d = 0;
    int m = 0;
    std::vector<std::vector<int>> assignments;

    int outcome(int strategy, int setting) const { return assignments[strategy][setting]; }
    int size() const { return static_cast<int>(assignments.size()); }
};

StrategySet enumerate_strategies(int d, int m);

struct MembershipResult {
    bool is_local = false;
    double slack = 0.0; // minimized phase-1 objective
    // Vertex weights q[lambda][mu], flattened lambda * d^mB + mu, when local
    // and requested.
    std::optional<std::vector<double>> certificate;
};

// p[x][y][a][b] = |sum_j alpha_j Ua[x](a,j) Ub[y](b,j)|^2.
Behaviour behaviour_from_state(const SchmidtState& state, const std::vector<Unitary>& alice,
                               const std::vector<Unitary>& bob);

// LP membership test with a reusable workspace (one instance per thread).
class LocalPolytopeTester {
public:
    LocalPolytopeTester(int d, int mA, int mB);

    MembershipResult test(const Behaviour& behaviour, double tol = 1e-8,
                          bool want_certificate = false);

    // Behaviour of a vertex mixture; certificate soundness checks go through
    // this reconstruction.
    Behaviour reconstruct(const std::vector<double>& weights) const;

    int n_vertices() const { return n_cols_; }

private:
    int d_, mA_, mB_;
    int n_rows_, n_cols_, rows_per_col_;
    std::vector<std::int32_t> col_rows_;
    std::vector<double> rhs_;
    PhaseOneSimplex solver_;
};

// One-shot membership test (builds the strategy table per call).
MembershipResult is_local(const Behaviour& behaviour, double tol = 1e-8,
                          bool want_certificate = true);

// Independent d=2, two-setting oracle: local iff all eight sign-symmetrized
// CHSH combinations of the correlators stay within [-2, 2].
bool chsh_facet_oracle(const Behaviour& behaviour);

} // namespace qbell
