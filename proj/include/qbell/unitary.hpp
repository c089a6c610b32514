// unitary.hpp
// Dense complex unitaries and Haar-distributed sampling.
#pragma once

#include <complex>
#include <vector>

#include "qbell/rng.hpp"

namespace qbell {

struct Unitary {
    int d = 0;
    std::vector<std::complex<double>> entries; // row-major d x d

    Unitary() = default;
    explicit Unitary(int dim) : d(dim), entries(static_cast<std::size_t>(dim) * dim) {}

    std::complex<double>& operator()(int row, int col) { return entries[static_cast<std::size_t>(row) * d + col]; }
    const std::complex<double>& operator()(int row, int col) const {
        return entries[static_cast<std::size_t>(row) * d + col];
    }
};

// Max-norm deviation of U * U^dagger from the identity.
double unitarity_defect(const Unitary& u);

// Haar-distributed d x d unitary: complex Gaussian matrix, modified
// Gram-Schmidt on the columns (twice, for orthogonality at the 1e-15 level).
// Column-by-column normalization makes the triangular factor's diagonal real
// positive, which is exactly the phase convention that removes the QR
// sampling bias.
Unitary haar_unitary(int d, RngStream& rng);

} // namespace qbell
