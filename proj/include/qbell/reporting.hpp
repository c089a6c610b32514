// reporting.hpp
// JSON result records and CSV emission for the table and figure commands.
// CSV is locale-independent (shortest round-trip formatting, dot decimal).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbell/optimizer.hpp"
#include "qbell/pv_engine.hpp"

namespace qbell {

std::string format_double(double v);

nlohmann::json to_json(const PvEstimate& e);
nlohmann::json to_json(const MvsResult& r);
nlohmann::json to_json(const ScanGrid& g);
nlohmann::json to_json(const FitResult& f);

// {config, result, meta:{version, seed, wall_time_s, timestamp}}
nlohmann::json make_result_record(nlohmann::json config, nlohmann::json result,
                                  std::uint64_t seed, double wall_time_s);

extern const char* const kArtifactVersion;

struct Table1Row {
    int d = 0;
    int r = 0;
    std::string kind; // "mss" | "mvs"
    PvEstimate estimate;
};

struct Table2Row {
    int d = 0;
    PvEstimate estimate;
};

// Table of two-setting behaviour-space violation probabilities for MSS and
// (zero-padded rank-r) MVS states, d = 2..7, r = 2..d. Row sample sizes are
// the published per-row budgets times `samples_scale`. `only_d` (when
// non-empty) restricts the emitted dimensions.
std::vector<Table1Row> compute_table1(double samples_scale, std::uint64_t seed,
                                      const EstimateOptions& options,
                                      const std::vector<int>& only_d = {},
                                      int mvs_restarts = 12);
std::string table1_csv(const std::vector<Table1Row>& rows);

// Three settings per party, MES, d = 2..5.
std::vector<Table2Row> compute_table2(double samples_scale, std::uint64_t seed,
                                      const EstimateOptions& options,
                                      const std::vector<int>& only_d = {});
std::string table2_csv(const std::vector<Table2Row>& rows);

struct FigureParams {
    int d = 4;        // grid figures
    int dmin = 2;     // series figures
    int dmax = 5;
    int grid_n = 40;
    std::uint64_t samples = 100000;
    std::uint64_t min_hits = 0;
    int mvs_restarts = 12;
};

// fig2: CGLMP p_v vs d for MES and MVS.        (long CSV)
// fig4: behaviour-space p_v vs d, MES and MVS. (long CSV)
// fig5: behaviour-space p_v vs d per MSS rank. (long CSV)
// fig3: CGLMP rank-3 family grid.              (grid CSV)
// fig6: behaviour-space rank-3 family grid.    (grid CSV)
std::string emit_figure_data(const std::string& which, const FigureParams& params,
                             std::uint64_t seed, const EstimateOptions& options);

std::string scan_grid_csv(const ScanGrid& grid);

} // namespace qbell
