#include "qbell/schmidt_state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qbell {

namespace {
constexpr double kNormTol = 1e-12;
}

SchmidtState::SchmidtState(int dim, std::vector<double> coefficients)
    : d(dim), alpha(std::move(coefficients)) {
    if (d < 2)
        throw std::invalid_argument("SchmidtState: invalid-dimension (d must be >= 2)");
    if (static_cast<int>(alpha.size()) != d)
        throw std::invalid_argument("SchmidtState: invalid-argument (expected " +
                                    std::to_string(d) + " coefficients)");
    double norm2 = 0.0;
    for (double a : alpha) {
        if (a < 0.0)
            throw std::invalid_argument("SchmidtState: invalid-argument (negative coefficient)");
        norm2 += a * a;
    }
    if (std::abs(norm2 - 1.0) > kNormTol)
        throw std::invalid_argument("SchmidtState: invalid-argument (not normalized)");
}

int SchmidtState::rank() const {
    int r = 0;
    for (double a : alpha)
        if (a > 0.0) ++r;
    return r;
}

SchmidtState make_mes(int d) {
    if (d < 2)
        throw std::invalid_argument("make_mes: invalid-dimension (d must be >= 2)");
    return SchmidtState(d, std::vector<double>(d, 1.0 / std::sqrt(static_cast<double>(d))));
}

SchmidtState make_mss(int r, int d) {
    if (r < 1 || r > d)
        throw std::invalid_argument("make_mss: invalid-rank (need 1 <= r <= d)");
    if (d < 2)
        throw std::invalid_argument("make_mss: invalid-dimension (d must be >= 2)");
    std::vector<double> a(d, 0.0);
    for (int j = 0; j < r; ++j)
        a[j] = 1.0 / std::sqrt(static_cast<double>(r));
    return SchmidtState(d, std::move(a));
}

SchmidtState make_family_state(double theta0, double theta1, int d) {
    if (d < 3)
        throw std::invalid_argument("make_family_state: invalid-dimension (d must be >= 3)");
    std::vector<double> a(d, 0.0);
    a[0] = std::cos(theta0);
    a[1] = std::sin(theta0) * std::cos(theta1);
    a[2] = std::sin(theta0) * std::sin(theta1);
    // Renormalize: cos^2 + sin^2 ties already give unit norm up to rounding,
    // but the constructor enforces 1e-12 so make it exact.
    double norm = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    for (double& x : a) x /= norm;
    return SchmidtState(d, std::move(a));
}

} // namespace qbell
