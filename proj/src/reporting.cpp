#include "qbell/reporting.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qbell {

using nlohmann::json;

const char* const kArtifactVersion = "0.1.0";

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json to_json(const PvEstimate& e) {
    return json{{"violations", e.violations},
                {"samples", e.samples},
                {"p_hat", e.p_hat},
                {"p_hat_percent", 100.0 * e.p_hat},
                {"ci_low", e.ci_low},
                {"ci_high", e.ci_high},
                {"scenario", e.scenario},
                {"mA", e.mA},
                {"mB", e.mB},
                {"d", e.d},
                {"seed", e.seed}};
}

json to_json(const MvsResult& r) {
    return json{{"d", r.d},
                {"alpha", r.alpha.alpha},
                {"best_value", r.best_value},
                {"phases",
                 {{"alice", {r.phases.alice[0], r.phases.alice[1]}},
                  {"bob", {r.phases.bob[0], r.phases.bob[1]}}}},
                {"restarts_used", r.restarts_used},
                {"converged", r.converged},
                {"symmetric", r.symmetric}};
}

json to_json(const ScanGrid& g) {
    const std::size_t n0 = g.theta0_axis.size();
    const std::size_t n1 = g.theta1_axis.size();
    json p_hat = json::array();
    json ci_low = json::array();
    json ci_high = json::array();
    for (std::size_t i = 0; i < n0; ++i) {
        json row_p = json::array(), row_lo = json::array(), row_hi = json::array();
        for (std::size_t j = 0; j < n1; ++j) {
            const PvEstimate& e = g.pv[i * n1 + j];
            row_p.push_back(e.p_hat);
            row_lo.push_back(e.ci_low);
            row_hi.push_back(e.ci_high);
        }
        p_hat.push_back(std::move(row_p));
        ci_low.push_back(std::move(row_lo));
        ci_high.push_back(std::move(row_hi));
    }
    return json{{"theta0_axis", g.theta0_axis},
                {"theta1_axis", g.theta1_axis},
                {"p_hat", std::move(p_hat)},
                {"ci_low", std::move(ci_low)},
                {"ci_high", std::move(ci_high)},
                {"argmax",
                 {{"theta0", g.argmax_theta0},
                  {"theta1", g.argmax_theta1},
                  {"p_hat", g.argmax_p_hat}}}};
}

json to_json(const FitResult& f) {
    return json{{"slope_b", f.slope_b}, {"intercept", f.intercept}, {"residual", f.residual}};
}

json make_result_record(json config, json result, std::uint64_t seed, double wall_time_s) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return json{{"config", std::move(config)},
                {"result", std::move(result)},
                {"meta",
                 {{"version", kArtifactVersion},
                  {"seed", seed},
                  {"wall_time_s", wall_time_s},
                  {"timestamp", stamp}}}};
}

namespace {

// Published per-row sampling budgets of the two-setting table.
std::uint64_t table1_samples(int d) {
    switch (d) {
        case 2: return 10000000000ULL;
        case 3: return 1000000000ULL;
        case 4: return 500000000ULL;
        case 5: return 100000000ULL;
        case 6: return 10000000ULL;
        default: return 1000000ULL; // d = 7
    }
}

std::uint64_t scaled(std::uint64_t base, double scale) {
    const double s = static_cast<double>(base) * scale;
    return std::max<std::uint64_t>(100, static_cast<std::uint64_t>(s));
}

bool wanted(int d, const std::vector<int>& only_d) {
    if (only_d.empty()) return true;
    for (int x : only_d)
        if (x == d) return true;
    return false;
}

// Rank-r MVS Schmidt vector zero-padded into dimension d.
SchmidtState padded_mvs(int r, int d, std::uint64_t seed, int restarts) {
    const MvsResult mvs = find_mvs(r, restarts, seed);
    std::vector<double> alpha(d, 0.0);
    for (int j = 0; j < r; ++j) alpha[j] = mvs.alpha.alpha[j];
    return SchmidtState(d, std::move(alpha));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return detail::fmix64(seed ^ detail::fmix64(salt));
}

} // namespace

std::vector<Table1Row> compute_table1(double samples_scale, std::uint64_t seed,
                                      const EstimateOptions& options,
                                      const std::vector<int>& only_d, int mvs_restarts) {
    if (samples_scale <= 0.0 || samples_scale > 1.0)
        throw std::invalid_argument("table1: invalid-argument (scale must be in (0, 1])");

    std::vector<Table1Row> rows;
    for (int d = 2; d <= 7; ++d) {
        if (!wanted(d, only_d)) continue;
        const std::uint64_t samples = scaled(table1_samples(d), samples_scale);
        for (int r = 2; r <= d; ++r) {
            const std::uint64_t row_seed = mix_seed(seed, 100 * d + r);
            {
                Table1Row row{d, r, "mss", estimate_pv_behaviour(make_mss(r, d), 2, 2,
                                                                 samples, row_seed, options)};
                rows.push_back(std::move(row));
            }
            if (r >= 3) { // the rank-2 MVS is the rank-2 MSS; single shared row
                Table1Row row{d, r, "mvs",
                              estimate_pv_behaviour(
                                  padded_mvs(r, d, mix_seed(seed, 7777 + r), mvs_restarts), 2,
                                  2, samples, mix_seed(seed, 100 * d + r + 50), options)};
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::string table1_csv(const std::vector<Table1Row>& rows) {
    std::ostringstream csv;
    csv << "d,r,state_kind,samples,p_hat_percent,ci_low,ci_high\n";
    for (const auto& row : rows) {
        csv << row.d << ',' << row.r << ',' << row.kind << ',' << row.estimate.samples << ','
            << format_double(100.0 * row.estimate.p_hat) << ','
            << format_double(100.0 * row.estimate.ci_low) << ','
            << format_double(100.0 * row.estimate.ci_high) << '\n';
    }
    return csv.str();
}

std::vector<Table2Row> compute_table2(double samples_scale, std::uint64_t seed,
                                      const EstimateOptions& options,
                                      const std::vector<int>& only_d) {
    if (samples_scale <= 0.0 || samples_scale > 1.0)
        throw std::invalid_argument("table2: invalid-argument (scale must be in (0, 1])");

    const std::uint64_t base[] = {1000000000ULL, 100000000ULL, 10000000ULL, 225000ULL};
    std::vector<Table2Row> rows;
    for (int d = 2; d <= 5; ++d) {
        if (!wanted(d, only_d)) continue;
        const std::uint64_t samples = scaled(base[d - 2], samples_scale);
        rows.push_back(Table2Row{
            d, estimate_pv_behaviour(make_mes(d), 3, 3, samples, mix_seed(seed, 200 + d), options)});
    }
    return rows;
}

std::string table2_csv(const std::vector<Table2Row>& rows) {
    std::ostringstream csv;
    csv << "d,settings,samples,p_hat_percent,ci_low,ci_high\n";
    for (const auto& row : rows) {
        csv << row.d << ",3," << row.estimate.samples << ','
            << format_double(100.0 * row.estimate.p_hat) << ','
            << format_double(100.0 * row.estimate.ci_low) << ','
            << format_double(100.0 * row.estimate.ci_high) << '\n';
    }
    return csv.str();
}

std::string scan_grid_csv(const ScanGrid& grid) {
    std::ostringstream csv;
    csv << "theta0,theta1,pv\n";
    const std::size_t n1 = grid.theta1_axis.size();
    for (std::size_t i = 0; i < grid.theta0_axis.size(); ++i)
        for (std::size_t j = 0; j < n1; ++j)
            csv << format_double(grid.theta0_axis[i]) << ',' << format_double(grid.theta1_axis[j])
                << ',' << format_double(grid.pv[i * n1 + j].p_hat) << '\n';
    return csv.str();
}

namespace {

void append_series_point(std::ostringstream& csv, const std::string& series, double x,
                         const PvEstimate& e) {
    csv << series << ',' << format_double(x) << ',' << format_double(e.p_hat) << ','
        << format_double(e.ci_low) << ',' << format_double(e.ci_high) << '\n';
}

} // namespace

std::string emit_figure_data(const std::string& which, const FigureParams& params,
                             std::uint64_t seed, const EstimateOptions& options) {
    EstimateOptions point_options = options;
    point_options.min_hits = params.min_hits;

    if (which == "fig3" || which == "fig6") {
        const ScanGrid grid =
            scan_family(params.d, which == "fig3" ? "cglmp" : "behaviour", params.grid_n,
                        params.samples, seed, point_options);
        return scan_grid_csv(grid);
    }

    std::ostringstream csv;
    csv << "series,x,y,ci_low,ci_high\n";

    if (which == "fig2" || which == "fig4") {
        const bool cglmp = (which == "fig2");
        for (int d = params.dmin; d <= params.dmax; ++d) {
            const PvEstimate e =
                cglmp ? estimate_pv_cglmp(make_mes(d), params.samples, mix_seed(seed, 300 + d),
                                          point_options)
                      : estimate_pv_behaviour(make_mes(d), 2, 2, params.samples,
                                              mix_seed(seed, 300 + d), point_options);
            append_series_point(csv, "MES", d, e);
        }
        for (int d = params.dmin; d <= params.dmax; ++d) {
            const SchmidtState mvs =
                d == 2 ? make_mes(2)
                       : find_mvs(d, params.mvs_restarts, mix_seed(seed, 400 + d)).alpha;
            const PvEstimate e =
                cglmp ? estimate_pv_cglmp(mvs, params.samples, mix_seed(seed, 500 + d),
                                          point_options)
                      : estimate_pv_behaviour(mvs, 2, 2, params.samples, mix_seed(seed, 500 + d),
                                              point_options);
            append_series_point(csv, "MVS", d, e);
        }
        return csv.str();
    }

    if (which == "fig5") {
        for (int r = 2; r <= std::min(7, params.dmax); ++r) {
            for (int d = std::max(r, params.dmin); d <= params.dmax; ++d) {
                const PvEstimate e =
                    estimate_pv_behaviour(make_mss(r, d), 2, 2, params.samples,
                                          mix_seed(seed, 600 + 10 * r + d), point_options);
                append_series_point(csv, "r=" + std::to_string(r), d, e);
            }
        }
        return csv.str();
    }

    throw std::invalid_argument("figure: invalid-argument (unknown tag " + which + ")");
}

} // namespace qbell
