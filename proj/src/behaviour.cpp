#include "qbell/behaviour.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qbell {

namespace {
constexpr long kStrategyGuard = 1000000; // d^m cap
}

Behaviour::Behaviour(int outcomes, int settings_a, int settings_b)
    : d(outcomes), mA(settings_a), mB(settings_b),
      p(static_cast<std::size_t>(outcomes) * outcomes * settings_a * settings_b, 0.0) {}

bool Behaviour::is_valid(double norm_tol, double neg_tol, double nosig_tol) const {
    for (double v : p)
        if (v < -neg_tol) return false;
    for (int x = 0; x < mA; ++x) {
        for (int y = 0; y < mB; ++y) {
            double sum = 0.0;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    sum += at(x, y, a, b);
            if (std::abs(sum - 1.0) > norm_tol) return false;
        }
    }
    // Alice's marginals must not depend on y, and symmetrically for Bob.
    for (int x = 0; x < mA; ++x) {
        for (int a = 0; a < d; ++a) {
            double ref = 0.0;
            for (int b = 0; b < d; ++b) ref += at(x, 0, a, b);
            for (int y = 1; y < mB; ++y) {
                double marg = 0.0;
                for (int b = 0; b < d; ++b) marg += at(x, y, a, b);
                if (std::abs(marg - ref) > nosig_tol) return false;
            }
        }
    }
    for (int y = 0; y < mB; ++y) {
        for (int b = 0; b < d; ++b) {
            double ref = 0.0;
            for (int a = 0; a < d; ++a) ref += at(0, y, a, b);
            for (int x = 1; x < mA; ++x) {
                double marg = 0.0;
                for (int a = 0; a < d; ++a) marg += at(x, y, a, b);
                if (std::abs(marg - ref) > nosig_tol) return false;
            }
        }
    }
    return true;
}

long behaviour_effective_dimension(int d, int mA, int mB) {
    return static_cast<long>(mA) * mB * (d - 1) * (d - 1) +
           static_cast<long>(mA) * (d - 1) + static_cast<long>(mB) * (d - 1);
}

StrategySet enumerate_strategies(int d, int m) {
    if (d < 2 || m < 1)
        throw std::invalid_argument("enumerate_strategies: invalid-argument");
    long count = 1;
    for (int i = 0; i < m; ++i) {
        count *= d;
        if (count > kStrategyGuard)
            throw std::invalid_argument("enumerate_strategies: scenario-too-large (d^m > 10^6)");
    }
    StrategySet set;
    set.d = d;
    set.m = m;
    set.assignments.resize(count);
    for (long k = 0; k < count; ++k) {
        auto& row = set.assignments[k];
        row.resize(m);
        long rest = k;
        for (int x = 0; x < m; ++x) {
            row[x] = static_cast<int>(rest % d);
            rest /= d;
        }
    }
    return set;
}

Behaviour behaviour_from_state(const SchmidtState& state, const std::vector<Unitary>& alice,
                               const std::vector<Unitary>& bob) {
    const int d = state.d;
    for (const auto& u : alice)
        if (u.d != d) throw std::invalid_argument("behaviour_from_state: invalid-argument (Alice unitary dimension)");
    for (const auto& u : bob)
        if (u.d != d) throw std::invalid_argument("behaviour_from_state: invalid-argument (Bob unitary dimension)");
    if (alice.empty() || bob.empty())
        throw std::invalid_argument("behaviour_from_state: invalid-argument (no measurements)");

    Behaviour beh(d, static_cast<int>(alice.size()), static_cast<int>(bob.size()));
    for (int x = 0; x < beh.mA; ++x) {
        for (int y = 0; y < beh.mB; ++y) {
            for (int a = 0; a < d; ++a) {
                for (int b = 0; b < d; ++b) {
                    std::complex<double> amp = 0.0;
                    for (int j = 0; j < d; ++j)
                        amp += state.alpha[j] * alice[x](a, j) * bob[y](b, j);
                    beh.at(x, y, a, b) = std::norm(amp);
                }
            }
        }
    }
    return beh;
}

LocalPolytopeTester::LocalPolytopeTester(int d, int mA, int mB) : d_(d), mA_(mA), mB_(mB) {
    const StrategySet alice = enumerate_strategies(d, mA);
    const StrategySet bob = enumerate_strategies(d, mB);

    n_rows_ = mA * mB * d * d + 1; // one equality per p(ab|xy) plus sum q = 1
    n_cols_ = alice.size() * bob.size();
    rows_per_col_ = mA * mB + 1;

    col_rows_.resize(static_cast<std::size_t>(n_cols_) * rows_per_col_);
    std::size_t pos = 0;
    Behaviour idx(d, mA, mB); // index layout helper only
    for (int la = 0; la < alice.size(); ++la) {
        for (int mu = 0; mu < bob.size(); ++mu) {
            for (int x = 0; x < mA; ++x)
                for (int y = 0; y < mB; ++y)
                    col_rows_[pos++] = static_cast<std::int32_t>(
                        idx.index(x, y, alice.outcome(la, x), bob.outcome(mu, y)));
            col_rows_[pos++] = static_cast<std::int32_t>(n_rows_ - 1);
        }
    }
    rhs_.resize(n_rows_);
}

MembershipResult LocalPolytopeTester::test(const Behaviour& behaviour, double tol,
                                           bool want_certificate) {
    if (behaviour.d != d_ || behaviour.mA != mA_ || behaviour.mB != mB_)
        throw std::invalid_argument("is_local: invalid-argument (scenario mismatch)");
    if (tol <= 0.0)
        throw std::invalid_argument("is_local: invalid-argument (tol must be positive)");
    if (!behaviour.is_valid())
        throw std::invalid_argument("is_local: invalid-argument (malformed behaviour)");

    for (std::size_t i = 0; i < behaviour.p.size(); ++i)
        rhs_[i] = std::max(behaviour.p[i], 0.0);
    rhs_[n_rows_ - 1] = 1.0;

    std::vector<double> weights;
    const PhaseOneResult lp = solver_.solve(n_rows_, n_cols_, rows_per_col_, col_rows_,
                                            rhs_, tol, want_certificate ? &weights : nullptr);

    MembershipResult result;
    result.is_local = lp.feasible;
    result.slack = lp.objective;
    if (lp.feasible && want_certificate)
        result.certificate = std::move(weights);
    return result;
}

Behaviour LocalPolytopeTester::reconstruct(const std::vector<double>& weights) const {
    if (static_cast<int>(weights.size()) != n_cols_)
        throw std::invalid_argument("reconstruct: invalid-argument (weight count)");
    const StrategySet alice = enumerate_strategies(d_, mA_);
    const StrategySet bob = enumerate_strategies(d_, mB_);
    Behaviour beh(d_, mA_, mB_);
    std::size_t col = 0;
    for (int la = 0; la < alice.size(); ++la) {
        for (int mu = 0; mu < bob.size(); ++mu, ++col) {
            const double w = weights[col];
            if (w == 0.0) continue;
            for (int x = 0; x < mA_; ++x)
                for (int y = 0; y < mB_; ++y)
                    beh.at(x, y, alice.outcome(la, x), bob.outcome(mu, y)) += w;
        }
    }
    return beh;
}

MembershipResult is_local(const Behaviour& behaviour, double tol, bool want_certificate) {
    LocalPolytopeTester tester(behaviour.d, behaviour.mA, behaviour.mB);
    return tester.test(behaviour, tol, want_certificate);
}

bool chsh_facet_oracle(const Behaviour& behaviour) {
    if (behaviour.d != 2 || behaviour.mA != 2 || behaviour.mB != 2)
        throw std::invalid_argument("chsh_facet_oracle: invalid-argument (needs d=2, 2x2 settings)");

    double corr[2][2];
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            corr[x][y] = behaviour.at(x, y, 0, 0) + behaviour.at(x, y, 1, 1) -
                         behaviour.at(x, y, 0, 1) - behaviour.at(x, y, 1, 0);

    // The four placements of the minus sign; checking |.| <= 2 covers the
    // overall sign flip, eight combinations in total.
    for (int pos = 0; pos < 4; ++pos) {
        double s = 0.0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                s += (2 * x + y == pos ? -1.0 : 1.0) * corr[x][y];
        if (std::abs(s) > 2.0 + 1e-10) return false;
    }
    return true;
}

} // namespace qbell
