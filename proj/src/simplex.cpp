#include "qbell/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace qbell {

namespace {
constexpr double kPriceTol = 1e-9;  // reduced cost must beat this to enter
constexpr double kPivotTol = 1e-9;  // minimum pivot magnitude in the ratio test
constexpr double kZeroObj = 1e-13;  // objective at which feasibility is settled
constexpr int kDegenerateSwitch = 128; // stalled pivots before Bland takes over
} // namespace

PhaseOneResult PhaseOneSimplex::solve(int n_rows, int n_cols, int rows_per_col,
                                      std::span<const std::int32_t> col_rows,
                                      std::span<const double> rhs, double tol,
                                      std::vector<double>* solution) {
    const int R = n_rows;
    binv_.assign(static_cast<std::size_t>(R) * R, 0.0);
    for (int r = 0; r < R; ++r)
        binv_[static_cast<std::size_t>(r) * R + r] = 1.0;
    xb_.assign(rhs.begin(), rhs.end());
    basis_.resize(R);
    for (int r = 0; r < R; ++r)
        basis_[r] = n_cols + r; // start from the all-artificial basis
    y_.assign(R, 0.0);
    dir_.assign(R, 0.0);

    int artificials_in_basis = R;
    const long max_iterations =
        std::max<long>(50000, 40L * (static_cast<long>(R) + n_cols));
    bool bland = false;
    int stalled = 0;
    long iter = 0;

    auto objective = [&]() {
        double obj = 0.0;
        for (int r = 0; r < R; ++r)
            if (basis_[r] >= n_cols) obj += std::max(xb_[r], 0.0);
        return obj;
    };

    double obj = objective();
    while (obj > kZeroObj) {
        if (++iter > max_iterations)
            throw SolverFailure("phase-1 simplex: iteration cap exceeded");

        // Pricing vector y = (phase-1 costs of basic vars)' * Binv: the cost
        // row is 1 exactly on rows still holding an artificial variable.
        std::fill(y_.begin(), y_.end(), 0.0);
        for (int r = 0; r < R; ++r) {
            if (basis_[r] < n_cols) continue;
            const double* row = &binv_[static_cast<std::size_t>(r) * R];
            for (int i = 0; i < R; ++i)
                y_[i] += row[i];
        }

        // Entering column among structural variables (cost 0): rc_j = -y'a_j.
        int enter = -1;
        double best = -kPriceTol;
        for (int j = 0; j < n_cols; ++j) {
            const std::int32_t* rows = &col_rows[static_cast<std::size_t>(j) * rows_per_col];
            double ya = 0.0;
            for (int t = 0; t < rows_per_col; ++t)
                ya += y_[rows[t]];
            const double rc = -ya;
            if (rc < best) {
                best = rc;
                enter = j;
                if (bland) break; // lowest index with negative reduced cost
            }
        }
        if (enter < 0) break; // phase-1 optimum reached

        // Direction w = Binv * a_enter (sum of the column's unit rows).
        std::fill(dir_.begin(), dir_.end(), 0.0);
        {
            const std::int32_t* rows = &col_rows[static_cast<std::size_t>(enter) * rows_per_col];
            for (int t = 0; t < rows_per_col; ++t) {
                const int c = rows[t];
                for (int r = 0; r < R; ++r)
                    dir_[r] += binv_[static_cast<std::size_t>(r) * R + c];
            }
        }

        // Ratio test; ties prefer kicking an artificial out, then Bland order.
        int leave = -1;
        double best_ratio = 0.0;
        for (int r = 0; r < R; ++r) {
            if (dir_[r] <= kPivotTol) continue;
            const double ratio = std::max(xb_[r], 0.0) / dir_[r];
            if (leave < 0 || ratio < best_ratio - 1e-12) {
                leave = r;
                best_ratio = ratio;
            } else if (ratio < best_ratio + 1e-12) {
                const bool cand_art = basis_[r] >= n_cols;
                const bool cur_art = basis_[leave] >= n_cols;
                if ((cand_art && !cur_art) ||
                    (cand_art == cur_art && basis_[r] < basis_[leave]))
                    leave = r;
            }
        }
        if (leave < 0) {
            // Unbounded descent cannot happen in phase 1 (objective >= 0);
            // reaching here means numerics broke down.
            throw SolverFailure("phase-1 simplex: no leaving row (numerical breakdown)");
        }

        // Pivot: update the basis inverse and basic solution in place.
        const double pivot = dir_[leave];
        double* lrow = &binv_[static_cast<std::size_t>(leave) * R];
        const double inv_pivot = 1.0 / pivot;
        for (int i = 0; i < R; ++i)
            lrow[i] *= inv_pivot;
        xb_[leave] *= inv_pivot;
        for (int r = 0; r < R; ++r) {
            if (r == leave) continue;
            const double f = dir_[r];
            if (f == 0.0) continue;
            double* row = &binv_[static_cast<std::size_t>(r) * R];
            for (int i = 0; i < R; ++i)
                row[i] -= f * lrow[i];
            xb_[r] -= f * xb_[leave];
        }
        if (basis_[leave] >= n_cols)
            --artificials_in_basis;
        basis_[leave] = enter;

        const double new_obj = objective();
        if (new_obj > obj - 1e-13) {
            if (++stalled >= kDegenerateSwitch) bland = true;
        } else {
            stalled = 0;
        }
        obj = new_obj;
        if (artificials_in_basis == 0) {
            obj = 0.0;
            break;
        }
    }

    PhaseOneResult result;
    result.objective = std::max(obj, 0.0);
    result.feasible = result.objective <= tol;
    result.iterations = iter;
    if (solution) {
        solution->assign(n_cols, 0.0);
        for (int r = 0; r < R; ++r)
            if (basis_[r] < n_cols)
                (*solution)[basis_[r]] = std::max(xb_[r], 0.0);
    }
    return result;
}

} // namespace qbell
