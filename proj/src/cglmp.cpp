#include "qbell/cglmp.hpp"

#include <cmath>
#include <stdexcept>

namespace qbell {

namespace {

int mod_d(int x, int d) {
    int r = x % d;
    return r < 0 ? r + d : r;
}

void check_setting(int a, int b) {
    if (a < 1 || a > 2 || b < 1 || b > 2)
        throw std::invalid_argument("cglmp: invalid-argument (setting must be 1 or 2)");
}

void check_dims(const SchmidtState& state, const PhaseConfig& phases) {
    if (state.d != phases.d)
        throw std::invalid_argument("cglmp: invalid-argument (state/phase dimension mismatch)");
}

// (-1)^e for integer exponent.
constexpr double neg_pow(int e) { return (e % 2 == 0) ? 1.0 : -1.0; }

} // namespace

PhaseConfig::PhaseConfig(int dim) : d(dim) {
    for (auto& row : alice) row.assign(dim, 0.0);
    for (auto& row : bob) row.assign(dim, 0.0);
}

PhaseConfig PhaseConfig::zero(int d) { return PhaseConfig(d); }

PhaseConfig PhaseConfig::random(int d, RngStream& rng) {
    PhaseConfig p(d);
    for (int a = 0; a < 2; ++a)
        for (int m = 0; m < d; ++m)
            p.alice[a][m] = rng.next_angle();
    for (int b = 0; b < 2; ++b)
        for (int n = 0; n < d; ++n)
            p.bob[b][n] = rng.next_angle();
    return p;
}

PhaseConfig PhaseConfig::with_alice_swapped() const {
    PhaseConfig p = *this;
    std::swap(p.alice[0], p.alice[1]);
    return p;
}

PhaseConfig PhaseConfig::with_bob_swapped() const {
    PhaseConfig p = *this;
    std::swap(p.bob[0], p.bob[1]);
    return p;
}

double joint_probability_raw(const SchmidtState& state, const PhaseConfig& phases,
                             int a, int b, int k, int l) {
    check_setting(a, b);
    check_dims(state, phases);
    const int d = state.d;
    if (k < 0 || k >= d || l < 0 || l >= d)
        throw std::invalid_argument("joint_probability: invalid-argument (outcome out of range)");

    const auto& pa = phases.alice[a - 1];
    const auto& pb = phases.bob[b - 1];
    const int diff = mod_d(k - l, d);

    double sum = 0.0;
    for (int m = 1; m < d; ++m) {
        if (state.alpha[m] == 0.0) continue;
        for (int n = 0; n < m; ++n) {
            if (state.alpha[n] == 0.0) continue;
            const double delta =
                pa[m] + pb[m] - pa[n] - pb[n] + 2.0 * M_PI / d * (m - n) * diff;
            sum += state.alpha[m] * state.alpha[n] * std::cos(delta);
        }
    }
    return 1.0 / (d * d) + 2.0 / (d * d) * sum;
}

double joint_probability(const SchmidtState& state, const PhaseConfig& phases,
                         int a, int b, int k, int l) {
    double p = joint_probability_raw(state, phases, a, b, k, l);
    if (p < 0.0 && p >= -1e-12) p = 0.0;
    if (p > 1.0 && p <= 1.0 + 1e-12) p = 1.0;
    return p;
}

double bk_term(const SchmidtState& state, const PhaseConfig& phases, int k) {
    check_dims(state, phases);
    const int d = state.d;
    if (k < -d || k >= d)
        throw std::invalid_argument("bk_term: invalid-argument (k out of [-d, d))");

    // Nonvanishing offsets: kappa_11 = kappa_22 = lambda_12 = k, lambda_21 = k+1.
    const int kap[2][2] = {{k, 0}, {0, k}};
    const int lam[2][2] = {{0, k}, {k + 1, 0}};

    double total = 0.0;
    for (int a = 1; a <= 2; ++a) {
        for (int b = 1; b <= 2; ++b) {
            const int kappa = kap[a - 1][b - 1];
            const int lambda = lam[a - 1][b - 1];
            for (int j = 0; j < d; ++j)
                total += joint_probability(state, phases, a, b, mod_d(j + kappa, d),
                                           mod_d(j + lambda, d));
        }
    }
    return total;
}

BellValue cglmp_direct(const SchmidtState& state, const PhaseConfig& phases) {
    check_dims(state, phases);
    const int d = state.d;
    double value = 0.0;
    for (int k = 0; k <= d / 2 - 1; ++k) {
        const double weight = 1.0 - 2.0 * k / (d - 1);
        value += weight * (bk_term(state, phases, k) - bk_term(state, phases, -(k + 1)));
    }
    return BellValue{value, 2.0};
}

ClosedFormCoefficients closed_form_coefficients(const SchmidtState& state, int d) {
    if (state.d != d)
        throw std::invalid_argument("closed_form_coefficients: invalid-argument (dimension mismatch)");

    ClosedFormCoefficients cf;
    cf.d = d;
    cf.Ccal.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (auto& row : cf.C) for (auto& m : row) m.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (auto& row : cf.Psi) for (auto& m : row) m.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (auto& row : cf.A) for (auto& m : row) m.assign(static_cast<std::size_t>(d) * d, 0.0);

    for (int m = 1; m < d; ++m) {
        for (int n = 0; n < m; ++n) {
            const std::size_t idx = static_cast<std::size_t>(m) * d + n;
            double ccal = 0.0;
            for (int k = 0; k <= d / 2 - 1; ++k)
                ccal += (1.0 - 2.0 * k / (d - 1)) * std::sin(M_PI * (m - n) * (2 * k + 1) / d);
            cf.Ccal[idx] = ccal;

            const double half_gap = M_PI * (m - n) / d; // pi (m-n) / d
            for (int a = 1; a <= 2; ++a) {
                for (int b = 1; b <= 2; ++b) {
                    const double amp =
                        4.0 * state.alpha[m] * state.alpha[n] / d * neg_pow(b * (1 + a)) * ccal;
                    cf.C[a - 1][b - 1][idx] = amp;
                    cf.Psi[a - 1][b - 1][idx] = neg_pow(a * (1 + b)) * (0.5 * M_PI - half_gap);
                    cf.A[a - 1][b - 1][idx] =
                        neg_pow(a * (1 + b) + 1) * (std::cos(half_gap) / std::sin(half_gap));
                }
            }
        }
    }

    // Hot-path layout: only pairs with nonzero amplitude, C cos(Psi)/C sin(Psi).
    for (int m = 1; m < d; ++m) {
        for (int n = 0; n < m; ++n) {
            if (state.alpha[m] * state.alpha[n] == 0.0) continue;
            cf.pair_m.push_back(m);
            cf.pair_n.push_back(n);
            const std::size_t idx = static_cast<std::size_t>(m) * d + n;
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    cf.c_cos_psi[a][b].push_back(cf.C[a][b][idx] * std::cos(cf.Psi[a][b][idx]));
                    cf.c_sin_psi[a][b].push_back(cf.C[a][b][idx] * std::sin(cf.Psi[a][b][idx]));
                }
            }
        }
    }
    return cf;
}

std::array<double, 4> cglmp_relabeled_values(const ClosedFormCoefficients& coeffs,
                                             const PhaseConfig& phases) {
    if (coeffs.d != phases.d)
        throw std::invalid_argument("cglmp: invalid-argument (coefficient/phase dimension mismatch)");

    // Relabeling r: bit 0 swaps Alice's settings, bit 1 swaps Bob's.
    std::array<double, 4> totals{0.0, 0.0, 0.0, 0.0};

    const std::size_t npairs = coeffs.pair_m.size();
    for (std::size_t p = 0; p < npairs; ++p) {
        const int m = coeffs.pair_m[p];
        const int n = coeffs.pair_n[p];

        // Phase differences per party and setting, with sin/cos evaluated once.
        double ca[2], sa[2], cb[2], sb[2];
        for (int s = 0; s < 2; ++s) {
            const double da = phases.alice[s][m] - phases.alice[s][n];
            ca[s] = std::cos(da);
            sa[s] = std::sin(da);
            const double db = phases.bob[s][m] - phases.bob[s][n];
            cb[s] = std::cos(db);
            sb[s] = std::sin(db);
        }

        // cos/sin of (theta_a + theta_b) for each physical row pair.
        double cth[2][2], sth[2][2];
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                cth[a][b] = ca[a] * cb[b] - sa[a] * sb[b];
                sth[a][b] = sa[a] * cb[b] + ca[a] * sb[b];
            }
        }

        for (int rel = 0; rel < 4; ++rel) {
            const int sw_a = rel & 1;
            const int sw_b = rel >> 1;
            double acc = 0.0;
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const int pa = a ^ sw_a;
                    const int pb = b ^ sw_b;
                    acc += coeffs.c_cos_psi[a][b][p] * cth[pa][pb] -
                           coeffs.c_sin_psi[a][b][p] * sth[pa][pb];
                }
            }
            totals[rel] += acc;
        }
    }
    return totals;
}

double cglmp_closed_value(const ClosedFormCoefficients& coeffs, const PhaseConfig& phases) {
    if (coeffs.d != phases.d)
        throw std::invalid_argument("cglmp: invalid-argument (coefficient/phase dimension mismatch)");
    double total = 0.0;
    const std::size_t npairs = coeffs.pair_m.size();
    for (std::size_t p = 0; p < npairs; ++p) {
        const int m = coeffs.pair_m[p];
        const int n = coeffs.pair_n[p];
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const double theta = phases.alice[a][m] + phases.bob[b][m] -
                                     phases.alice[a][n] - phases.bob[b][n];
                total += coeffs.c_cos_psi[a][b][p] * std::cos(theta) -
                         coeffs.c_sin_psi[a][b][p] * std::sin(theta);
            }
        }
    }
    return total;
}

BellValue cglmp_closed(const SchmidtState& state, const PhaseConfig& phases) {
    check_dims(state, phases);
    const ClosedFormCoefficients cf = closed_form_coefficients(state, state.d);
    return BellValue{cglmp_closed_value(cf, phases), 2.0};
}

bool violates_with_relabelings(const ClosedFormCoefficients& coeffs, const PhaseConfig& phases) {
    const auto values = cglmp_relabeled_values(coeffs, phases);
    for (double v : values)
        if (v > 2.0 + kViolationBoundaryEps) return true;
    return false;
}

bool violates_with_relabelings(const SchmidtState& state, const PhaseConfig& phases) {
    check_dims(state, phases);
    return violates_with_relabelings(closed_form_coefficients(state, state.d), phases);
}

} // namespace qbell
