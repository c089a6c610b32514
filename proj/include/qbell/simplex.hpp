// simplex.hpp
// Phase-1 simplex for equality-form feasibility problems
//
//   find x >= 0 with A x = b (b >= 0), via  min 1'ated s  s.t.  A x + s = b,
//
// where every column of A is sparse with unit coefficients (each column lists
// the rows it hits). The solver keeps an explicit basis inverse and prices
// columns against it, which is the natural layout here: columns carry only
// rows_per_col entries, so pricing and direction computation are a handful of
// adds per column. Pivot selection is Dantzig (most negative reduced cost)
// with a permanent switch to Bland's anti-cycling rule after a long run of
// degenerate pivots. Artificial variables never re-enter the basis.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qbell {

// LP iteration cap exceeded; distinct from an infeasible verdict.
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PhaseOneResult {
    bool feasible = false;  // objective <= tol
    double objective = 0.0; // minimized total artificial slack (clamped at 0)
    long iterations = 0;
};

// Reusable buffers; a solver workspace is private to one thread.
class PhaseOneSimplex {
public:
    // col_rows: n_cols blocks of rows_per_col row indices (coefficients 1.0).
    PhaseOneResult solve(int n_rows, int n_cols, int rows_per_col,
                         std::span<const std::int32_t> col_rows,
                         std::span<const double> rhs, double tol,
                         std::vector<double>* solution = nullptr);

private:
    std::vector<double> binv_;   // n_rows x n_rows row-major basis inverse
    std::vector<double> xb_;     // basic variable values
    std::vector<double> y_;      // phase-1 pricing vector
    std::vector<double> dir_;    // entering column in the current basis
    std::vector<int> basis_;     // basic variable per row; >= n_cols: artificial
};

} // namespace qbell
