#include "qbell/unitary.hpp"

#include <cmath>
#include <stdexcept>

namespace qbell {

double unitarity_defect(const Unitary& u) {
    double worst = 0.0;
    for (int i = 0; i < u.d; ++i) {
        for (int j = 0; j < u.d; ++j) {
            std::complex<double> dot = 0.0;
            for (int k = 0; k < u.d; ++k)
                dot += u(i, k) * std::conj(u(j, k));
            const double target = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(dot - target));
        }
    }
    return worst;
}

Unitary haar_unitary(int d, RngStream& rng) {
    if (d < 2)
        throw std::invalid_argument("haar_unitary: invalid-dimension (d must be >= 2)");

    Unitary u(d);
    // Draw order is fixed (column-major, re then im) so streams reproduce.
    for (int col = 0; col < d; ++col) {
        for (;;) {
            for (int row = 0; row < d; ++row)
                u(row, col) = rng.next_complex_gaussian();
            // Modified Gram-Schmidt against previous columns, run twice.
            for (int pass = 0; pass < 2; ++pass) {
                for (int prev = 0; prev < col; ++prev) {
                    std::complex<double> proj = 0.0;
                    for (int row = 0; row < d; ++row)
                        proj += std::conj(u(row, prev)) * u(row, col);
                    for (int row = 0; row < d; ++row)
                        u(row, col) -= proj * u(row, prev);
                }
            }
            double norm2 = 0.0;
            for (int row = 0; row < d; ++row)
                norm2 += std::norm(u(row, col));
            if (norm2 > 1e-16) { // degenerate draw: redraw the column
                const double inv = 1.0 / std::sqrt(norm2);
                for (int row = 0; row < d; ++row)
                    u(row, col) *= inv;
                break;
            }
        }
    }
    return u;
}

} // namespace qbell
