// schmidt_state.hpp
// Pure two-qudit states in Schmidt form: |psi> = sum_j alpha_j |j>|j> with
// real nonnegative coefficients (complex phases on alpha are absorbable into
// the local phase shifters, so nothing is lost by this restriction).
#pragma once

#include <vector>

namespace qbell {

struct SchmidtState {
    int d = 0;
    std::vector<double> alpha; // nonnegative, unit 2-norm

    SchmidtState() = default;
    // Validates dimension, nonnegativity and normalization (1e-12).
    SchmidtState(int dim, std::vector<double> coefficients);

    // Number of strictly positive coefficients.
    int rank() const;
};

// Maximally entangled state: alpha_j = 1/sqrt(d).
SchmidtState make_mes(int d);

// Maximally symmetric state of rank r: alpha_j = 1/sqrt(r) for j < r.
SchmidtState make_mss(int r, int d);

// Rank-3 family (cos t0, sin t0 cos t1, sin t0 sin t1, 0, ..., 0) in dim d.
SchmidtState make_family_state(double theta0, double theta1, int d);

} // namespace qbell
