#include "qbell/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbell/reporting.hpp"

namespace qbell {

namespace {

using nlohmann::json;

struct GlobalOpts {
    std::uint64_t seed = 12345;
    int threads = 0; // 0: QBL_THREADS env or hardware concurrency
    std::string out_path;
    std::string csv_path;
};

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QBL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0; // engine falls back to hardware concurrency
}

std::vector<double> parse_alpha_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        values.push_back(std::stod(item));
    return values;
}

struct StateSpec {
    std::string kind = "mes"; // mes | mss | family | alpha | mvs
    int rank = 0;             // 0: defaults to d
    double theta0 = 0.0;
    double theta1 = 0.0;
    std::string alpha_csv;
    int restarts = 20;
};

SchmidtState resolve_state(const StateSpec& spec, int d, std::uint64_t seed) {
    if (spec.kind == "mes") return make_mes(d);
    if (spec.kind == "mss") return make_mss(spec.rank == 0 ? d : spec.rank, d);
    if (spec.kind == "family") {
        if (d < 4)
            throw CLI::ValidationError("--state family requires --d >= 4");
        return make_family_state(spec.theta0, spec.theta1, d);
    }
    if (spec.kind == "alpha") {
        std::vector<double> a = parse_alpha_list(spec.alpha_csv);
        if (static_cast<int>(a.size()) != d)
            throw CLI::ValidationError("--alpha must list exactly d coefficients");
        double norm2 = 0.0;
        for (double x : a) {
            if (x < 0.0) throw CLI::ValidationError("--alpha coefficients must be nonnegative");
            norm2 += x * x;
        }
        if (std::abs(norm2 - 1.0) > 1e-6)
            throw CLI::ValidationError("--alpha must be normalized (within 1e-6)");
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& x : a) x *= inv;
        return SchmidtState(d, std::move(a));
    }
    if (spec.kind == "mvs") {
        const int r = spec.rank == 0 ? d : spec.rank;
        if (r > d) throw CLI::ValidationError("--rank must be <= --d");
        const MvsResult mvs =
            find_mvs(r, spec.restarts, detail::fmix64(seed ^ 0x4d565321ULL));
        std::vector<double> a(d, 0.0);
        for (int j = 0; j < r; ++j) a[j] = mvs.alpha.alpha[j];
        return SchmidtState(d, std::move(a));
    }
    throw CLI::ValidationError("unknown --state " + spec.kind);
}

json state_config_json(const StateSpec& spec, int d) {
    json j{{"state", spec.kind}, {"d", d}};
    if (spec.kind == "mss" || spec.kind == "mvs") j["rank"] = spec.rank == 0 ? d : spec.rank;
    if (spec.kind == "family") {
        j["theta0"] = spec.theta0;
        j["theta1"] = spec.theta1;
    }
    if (spec.kind == "alpha") j["alpha"] = parse_alpha_list(spec.alpha_csv);
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

// JSON record to --out or stdout; CSV (if any) to --csv or embedded in the
// record; the one-line summary goes wherever stdout is not carrying data.
void deliver(const GlobalOpts& g, json record, const std::string* csv,
             const std::string& summary, std::ostream& out, std::ostream& err) {
    if (csv) {
        if (!g.csv_path.empty()) {
            write_text_file(g.csv_path, *csv);
            record["result"]["csv_path"] = g.csv_path;
        } else {
            record["result"]["csv"] = *csv;
        }
    }
    if (!g.out_path.empty()) {
        write_text_file(g.out_path, record.dump(2) + "\n");
        out << summary << '\n';
    } else {
        out << record.dump(2) << '\n';
        err << summary << '\n';
    }
}

std::string percent(double p) { return format_double(100.0 * p) + "%"; }

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qbell - Bell nonlocality of entangled qudit pairs under random measurements"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (default: QBL_THREADS or hardware)");
    app.add_option("--out", g.out_path, "write the JSON result record to this file");
    app.add_option("--csv", g.csv_path, "write CSV output to this file");

    // ---- pv ----------------------------------------------------------------
    auto* pv = app.add_subcommand("pv", "estimate the probability of violation");
    std::string pv_scenario;
    pv->add_option("scenario", pv_scenario, "cglmp | behaviour")
        ->required()
        ->check(CLI::IsMember({"cglmp", "behaviour"}));
    int pv_d = 0;
    StateSpec pv_state;
    std::uint64_t pv_samples = 0;
    int pv_settings = 2, pv_settings_b = 0;
    std::uint64_t pv_min_hits = 0;
    std::string pv_checkpoint;
    double pv_tol = 1e-8;
    pv->add_option("--d", pv_d, "local dimension")->required()->check(CLI::Range(2, 64));
    pv->add_option("--state", pv_state.kind, "mes | mss | family | alpha | mvs")
        ->check(CLI::IsMember({"mes", "mss", "family", "alpha", "mvs"}));
    pv->add_option("--rank", pv_state.rank, "rank for mss/mvs states");
    pv->add_option("--theta0", pv_state.theta0, "family angle theta0");
    pv->add_option("--theta1", pv_state.theta1, "family angle theta1");
    pv->add_option("--alpha", pv_state.alpha_csv, "explicit comma-separated Schmidt coefficients");
    pv->add_option("--restarts", pv_state.restarts, "see-saw restarts for --state mvs");
    pv->add_option("--samples", pv_samples, "Monte Carlo sample count")->required();
    pv->add_option("--settings", pv_settings, "measurements per party (behaviour scenario)");
    pv->add_option("--settings-b", pv_settings_b, "Bob's measurement count when different");
    pv->add_option("--min-hits", pv_min_hits, "stop early once this many violations are found");
    pv->add_option("--checkpoint", pv_checkpoint, "checkpoint file (resumes if present)");
    pv->add_option("--tol", pv_tol, "LP feasibility tolerance");

    // ---- mvs ---------------------------------------------------------------
    auto* mvs_cmd = app.add_subcommand("mvs", "search the maximally violating state");
    int mvs_d = 0;
    int mvs_restarts = 20;
    mvs_cmd->add_option("--d", mvs_d, "local dimension")->required()->check(CLI::Range(2, 7));
    mvs_cmd->add_option("--restarts", mvs_restarts, "see-saw restarts")->capture_default_str();

    // ---- scan --------------------------------------------------------------
    auto* scan_cmd = app.add_subcommand("scan", "rank-3 family grid scan of p_v");
    int scan_d = 4, scan_grid_n = 40;
    std::string scan_scenario = "cglmp";
    std::uint64_t scan_samples = 100000;
    scan_cmd->add_option("--d", scan_d, "local dimension")->check(CLI::Range(4, 64));
    scan_cmd->add_option("--scenario", scan_scenario, "cglmp | behaviour")
        ->check(CLI::IsMember({"cglmp", "behaviour"}));
    scan_cmd->add_option("--grid-n", scan_grid_n, "grid points per axis")->capture_default_str();
    scan_cmd->add_option("--samples", scan_samples, "samples per grid point")->capture_default_str();

    // ---- fit ---------------------------------------------------------------
    auto* fit_cmd = app.add_subcommand("fit", "fit p_v(d) ~ (2*pi)^(b*d)");
    std::string fit_points, fit_in;
    fit_cmd->add_option("--points", fit_points, "inline points, e.g. 2:0.32,3:0.047");
    fit_cmd->add_option("--in", fit_in, "CSV file with d,p_v rows");

    // ---- table1 / table2 ---------------------------------------------------
    auto* t1 = app.add_subcommand("table1", "two-setting MSS/MVS violation table");
    double t1_scale = 1e-6;
    std::vector<int> t1_only;
    int t1_restarts = 12;
    t1->add_option("--scale", t1_scale, "fraction of the published sample sizes")
        ->capture_default_str();
    t1->add_option("--only-d", t1_only, "restrict to these dimensions");
    t1->add_option("--restarts", t1_restarts, "see-saw restarts for MVS rows");

    auto* t2 = app.add_subcommand("table2", "three-setting MES violation table");
    double t2_scale = 1e-4;
    std::vector<int> t2_only;
    t2->add_option("--scale", t2_scale, "fraction of the published sample sizes")
        ->capture_default_str();
    t2->add_option("--only-d", t2_only, "restrict to these dimensions");

    // ---- figure ------------------------------------------------------------
    auto* fig = app.add_subcommand("figure", "emit plot data as CSV");
    std::string fig_which;
    FigureParams fig_params;
    fig->add_option("--which", fig_which, "fig2 | fig3 | fig4 | fig5 | fig6")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig6"}));
    fig->add_option("--d", fig_params.d, "dimension for grid figures")->capture_default_str();
    fig->add_option("--dmin", fig_params.dmin, "first dimension for series figures");
    fig->add_option("--dmax", fig_params.dmax, "last dimension for series figures");
    fig->add_option("--grid-n", fig_params.grid_n, "grid points per axis")->capture_default_str();
    fig->add_option("--samples", fig_params.samples, "samples per point")->capture_default_str();
    fig->add_option("--min-hits", fig_params.min_hits, "early stop per point at this many hits");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream help;
        const int code = app.exit(e, help, help);
        (code == 0 ? out : err) << help.str();
        return code == 0 ? 0 : 2;
    }

    const auto t_start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    EstimateOptions opts;
    opts.workers = resolve_threads(g.threads);

    try {
        if (pv->parsed()) {
            const SchmidtState state = resolve_state(pv_state, pv_d, g.seed);
            opts.min_hits = pv_min_hits;
            opts.checkpoint_path = pv_checkpoint;
            opts.lp_tol = pv_tol;
            PvEstimate estimate;
            if (pv_scenario == "cglmp") {
                estimate = estimate_pv_cglmp(state, pv_samples, g.seed, opts);
            } else {
                const int mb = pv_settings_b > 0 ? pv_settings_b : pv_settings;
                estimate = estimate_pv_behaviour(state, pv_settings, mb, pv_samples, g.seed, opts);
            }
            json config = state_config_json(pv_state, pv_d);
            config["command"] = "pv";
            config["scenario"] = pv_scenario;
            config["samples"] = pv_samples;
            config["seed"] = g.seed;
            config["mA"] = estimate.mA;
            config["mB"] = estimate.mB;
            const std::string summary = "pv[" + estimate.scenario + "] d=" + std::to_string(pv_d) +
                                        ": p_hat=" + percent(estimate.p_hat) + " (" +
                                        percent(estimate.ci_low) + ", " + percent(estimate.ci_high) +
                                        ") from " + std::to_string(estimate.samples) + " samples";
            deliver(g, make_result_record(std::move(config), to_json(estimate), g.seed, elapsed()),
                    nullptr, summary, out, err);
            return 0;
        }

        if (mvs_cmd->parsed()) {
            const MvsResult result = find_mvs(mvs_d, mvs_restarts, g.seed);
            json config{{"command", "mvs"}, {"d", mvs_d}, {"restarts", mvs_restarts}, {"seed", g.seed}};
            std::string alpha_text;
            for (std::size_t j = 0; j < result.alpha.alpha.size(); ++j)
                alpha_text += (j ? ", " : "") + format_double(result.alpha.alpha[j]);
            const std::string summary = "mvs d=" + std::to_string(mvs_d) + ": I_d=" +
                                        format_double(result.best_value) + " alpha=(" + alpha_text + ")";
            deliver(g, make_result_record(std::move(config), to_json(result), g.seed, elapsed()),
                    nullptr, summary, out, err);
            return 0;
        }

        if (scan_cmd->parsed()) {
            const ScanGrid grid = scan_family(scan_d, scan_scenario, scan_grid_n, scan_samples,
                                              g.seed, opts);
            json config{{"command", "scan"},   {"d", scan_d},
                        {"scenario", scan_scenario}, {"grid_n", scan_grid_n},
                        {"samples", scan_samples},   {"seed", g.seed}};
            const std::string csv = scan_grid_csv(grid);
            const std::string summary =
                "scan[" + scan_scenario + "] d=" + std::to_string(scan_d) + ": argmax (" +
                format_double(grid.argmax_theta0) + ", " + format_double(grid.argmax_theta1) +
                ") p_hat=" + percent(grid.argmax_p_hat);
            deliver(g, make_result_record(std::move(config), to_json(grid), g.seed, elapsed()),
                    &csv, summary, out, err);
            return 0;
        }

        if (fit_cmd->parsed()) {
            std::vector<std::pair<double, double>> points;
            if (!fit_points.empty()) {
                std::stringstream ss(fit_points);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    const auto colon = item.find(':');
                    if (colon == std::string::npos)
                        throw CLI::ValidationError("--points expects d:pv pairs");
                    points.emplace_back(std::stod(item.substr(0, colon)),
                                        std::stod(item.substr(colon + 1)));
                }
            } else if (!fit_in.empty()) {
                std::ifstream in(fit_in);
                if (!in) throw CLI::ValidationError("cannot read " + fit_in);
                std::string line;
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    const auto comma = line.find(',');
                    if (comma == std::string::npos) continue;
                    try {
                        points.emplace_back(std::stod(line.substr(0, comma)),
                                            std::stod(line.substr(comma + 1)));
                    } catch (const std::exception&) {
                        continue; // header row
                    }
                }
            } else {
                throw CLI::ValidationError("fit needs --points or --in");
            }
            const FitResult result = fit_decay(points);
            json config{{"command", "fit"}, {"seed", g.seed}};
            json jpoints = json::array();
            for (const auto& [d, pv_val] : points) jpoints.push_back({d, pv_val});
            config["points"] = std::move(jpoints);
            const std::string summary =
                "fit: p_v ~ (2*pi)^(" + format_double(result.slope_b) + " d), residual=" +
                format_double(result.residual);
            deliver(g, make_result_record(std::move(config), to_json(result), g.seed, elapsed()),
                    nullptr, summary, out, err);
            return 0;
        }

        if (t1->parsed()) {
            const auto rows = compute_table1(t1_scale, g.seed, opts, t1_only, t1_restarts);
            const std::string csv = table1_csv(rows);
            json config{{"command", "table1"}, {"scale", t1_scale}, {"seed", g.seed}};
            if (!t1_only.empty()) config["only_d"] = t1_only;
            json jrows = json::array();
            for (const auto& row : rows) {
                json jr = to_json(row.estimate);
                jr["r"] = row.r;
                jr["state_kind"] = row.kind;
                jrows.push_back(std::move(jr));
            }
            const std::string summary = "table1: " + std::to_string(rows.size()) + " rows";
            deliver(g, make_result_record(std::move(config), json{{"rows", std::move(jrows)}},
                                          g.seed, elapsed()),
                    &csv, summary, out, err);
            return 0;
        }

        if (t2->parsed()) {
            const auto rows = compute_table2(t2_scale, g.seed, opts, t2_only);
            const std::string csv = table2_csv(rows);
            json config{{"command", "table2"}, {"scale", t2_scale}, {"seed", g.seed}};
            if (!t2_only.empty()) config["only_d"] = t2_only;
            json jrows = json::array();
            for (const auto& row : rows) jrows.push_back(to_json(row.estimate));
            const std::string summary = "table2: " + std::to_string(rows.size()) + " rows";
            deliver(g, make_result_record(std::move(config), json{{"rows", std::move(jrows)}},
                                          g.seed, elapsed()),
                    &csv, summary, out, err);
            return 0;
        }

        if (fig->parsed()) {
            const std::string csv = emit_figure_data(fig_which, fig_params, g.seed, opts);
            json config{{"command", "figure"},      {"which", fig_which},
                        {"d", fig_params.d},        {"dmin", fig_params.dmin},
                        {"dmax", fig_params.dmax},  {"grid_n", fig_params.grid_n},
                        {"samples", fig_params.samples}, {"seed", g.seed}};
            const std::string summary = "figure " + fig_which + ": CSV ready";
            deliver(g, make_result_record(std::move(config), json::object(), g.seed, elapsed()),
                    &csv, summary, out, err);
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const SolverFailure& e) {
        err << "solver-failure: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    err << "error: no command executed\n";
    return 2;
}

} // namespace qbell
