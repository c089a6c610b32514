#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "qbell/cli.hpp"
#include "qbell/reporting.hpp"

using namespace qbell;
using nlohmann::json;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
    json record; // parsed when stdout carried the JSON record
};

CliResult run(const std::vector<std::string>& args, bool parse_json = true) {
    std::ostringstream out, err;
    CliResult r;
    r.code = run_command(args, out, err);
    r.out = out.str();
    r.err = err.str();
    if (parse_json && r.code == 0 && !r.out.empty())
        r.record = json::parse(r.out);
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("pv cglmp end to end") {
    const CliResult r =
        run({"pv", "cglmp", "--state", "mes", "--d", "2", "--samples", "20000", "--seed", "7"});
    REQUIRE(r.code == 0);
    CHECK(r.record.at("config").at("command") == "pv");
    CHECK(r.record.at("config").at("scenario") == "cglmp");
    CHECK(r.record.at("config").at("d") == 2);
    CHECK(r.record.at("config").at("samples") == 20000);
    CHECK(r.record.at("meta").at("version") == kArtifactVersion);
    const double p = r.record.at("result").at("p_hat").get<double>();
    CHECK(p > 0.29);
    CHECK(p < 0.35);
    CHECK(r.err.find("p_hat") != std::string::npos); // summary line on stderr
}

TEST_CASE("pv behaviour end to end with --out file") {
    const std::string path = "cli_pv_record.json";
    std::remove(path.c_str());
    const CliResult r = run({"--seed", "7", "--out", path, "pv", "behaviour", "--state", "mes",
                             "--d", "2", "--settings", "2", "--samples", "5000"},
                            false);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("p_hat") != std::string::npos); // summary on stdout when JSON goes to a file
    const json record = json::parse(slurp(path));
    const double p = record.at("result").at("p_hat").get<double>();
    CHECK(p > 0.25);
    CHECK(p < 0.32);
    CHECK(record.at("result").at("scenario") == "behaviour");
    std::remove(path.c_str());
}

TEST_CASE("reproducibility: identical config gives identical config+result JSON") {
    const std::vector<std::string> args{"pv",        "cglmp", "--state", "mss",  "--rank", "2",
                                        "--d",       "3",     "--samples", "4000", "--seed", "99"};
    const CliResult a = run(args);
    const CliResult b = run(args);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.record.at("config") == b.record.at("config"));
    CHECK(a.record.at("result") == b.record.at("result"));
}

TEST_CASE("result records round-trip through parse/dump") {
    const CliResult r = run({"mvs", "--d", "3", "--restarts", "4", "--seed", "5"});
    REQUIRE(r.code == 0);
    const std::string dumped = r.record.dump(2);
    CHECK(json::parse(dumped) == r.record);

    const auto alpha = r.record.at("result").at("alpha").get<std::vector<double>>();
    REQUIRE(alpha.size() == 3);
    CHECK(alpha[0] == doctest::Approx(0.6169).epsilon(5e-3));
    CHECK(alpha[1] == doctest::Approx(0.4888).epsilon(5e-3));
}

TEST_CASE("fit command with inline points") {
    // Points exactly (2*pi)^(-d) in shortest round-trip form: slope -1, residual ~0.
    std::string points;
    for (int d = 2; d <= 5; ++d)
        points += (d > 2 ? "," : "") + std::to_string(d) + ":" +
                  format_double(std::pow(2.0 * M_PI, -d));
    const CliResult r = run({"fit", "--points", points});
    REQUIRE(r.code == 0);
    CHECK(r.record.at("result").at("slope_b").get<double>() == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(r.record.at("result").at("residual").get<double>() < 1e-16);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run({"frobnicate"}, false).code == 2);
    CHECK(run({"pv", "cglmp", "--d", "2"}, false).code == 2);          // missing --samples
    CHECK(run({"pv", "wat", "--d", "2", "--samples", "10"}, false).code == 2);
    CHECK(run({"pv", "cglmp", "--state", "family", "--d", "3", "--samples", "10"}, false).code == 2);
    CHECK(run({"fit"}, false).code == 2);
    CHECK(run({}, false).code == 2);
    CHECK(run({"figure", "--which", "fig9"}, false).code == 2);
}

TEST_CASE("help exits cleanly") {
    CHECK(run({"--help"}, false).code == 0);
}

TEST_CASE("table1 restricted to d=2") {
    const std::string csv_path = "cli_table1.csv";
    std::remove(csv_path.c_str());
    const CliResult r = run({"--seed", "3", "--csv", csv_path, "table1", "--scale", "1e-6",
                             "--only-d", "2"},
                            true);
    REQUIRE(r.code == 0);
    const std::string csv = slurp(csv_path);
    CHECK(csv.find("d,r,state_kind,samples,p_hat_percent,ci_low,ci_high") == 0);
    CHECK(csv.find("2,2,mss,10000,") != std::string::npos);

    const auto rows = r.record.at("result").at("rows");
    REQUIRE(rows.size() == 1);
    // 3-sigma band around the published 28.318% at 10^4 samples is ~1.4 points.
    CHECK(rows[0].at("p_hat_percent").get<double>() == doctest::Approx(28.318).epsilon(0.05));
    std::remove(csv_path.c_str());
}

TEST_CASE("table1 d=3 rows keep the MSS >= MVS ordering") {
    const CliResult r = run({"--seed", "21", "table1", "--scale", "2e-5", "--only-d", "3"});
    REQUIRE(r.code == 0);
    const auto rows = r.record.at("result").at("rows");
    REQUIRE(rows.size() == 3); // (3,2) shared, (3,3) mss, (3,3) mvs
    double mss = 0, mvs = 0, sigma = 0;
    for (const auto& row : rows) {
        if (row.at("r") != 3) continue;
        const double p = row.at("p_hat").get<double>();
        if (row.at("state_kind") == "mss") {
            mss = p;
            sigma = (row.at("ci_high").get<double>() - row.at("ci_low").get<double>()) / 6.0;
        } else {
            mvs = p;
        }
    }
    CHECK(mss >= mvs - 3.0 * sigma);
}

TEST_CASE("table2 restricted to d=2") {
    const CliResult r = run({"--seed", "4", "table2", "--scale", "1e-5", "--only-d", "2"});
    REQUIRE(r.code == 0);
    const auto rows = r.record.at("result").at("rows");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at("mA") == 3);
    // 78.219% within a wide band at 10^4 samples.
    CHECK(rows[0].at("p_hat_percent").get<double>() == doctest::Approx(78.219).epsilon(0.05));
    CHECK(r.record.at("result").at("csv").get<std::string>().find("d,settings,") == 0);
}

TEST_CASE("figure fig2 emits a monotone MES series") {
    const CliResult r = run({"--seed", "11", "figure", "--which", "fig2", "--dmin", "2", "--dmax",
                             "4", "--samples", "150000", "--min-hits", "2000"});
    REQUIRE(r.code == 0);
    const std::string csv = r.record.at("result").at("csv").get<std::string>();
    CHECK(csv.find("series,x,y,ci_low,ci_high") == 0);

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line); // header
    std::vector<double> mes_y;
    while (std::getline(lines, line)) {
        if (line.rfind("MES,", 0) != 0) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const auto c3 = line.find(',', c2 + 1);
        mes_y.push_back(std::stod(line.substr(c2 + 1, c3 - c2 - 1)));
    }
    REQUIRE(mes_y.size() == 3);
    CHECK(mes_y[0] > mes_y[1]);
    CHECK(mes_y[1] > mes_y[2]);
}

TEST_CASE("figure fig3 emits a grid CSV") {
    const CliResult r = run({"--seed", "12", "figure", "--which", "fig3", "--d", "4", "--grid-n",
                             "5", "--samples", "2000"});
    REQUIRE(r.code == 0);
    const std::string csv = r.record.at("result").at("csv").get<std::string>();
    CHECK(csv.find("theta0,theta1,pv") == 0);
    int lines = 0;
    for (char c : csv)
        lines += (c == '\n');
    CHECK(lines == 1 + 25);
}

TEST_CASE("scan command reports an argmax") {
    const CliResult r = run({"--seed", "13", "scan", "--d", "4", "--scenario", "cglmp", "--grid-n",
                             "7", "--samples", "5000"});
    REQUIRE(r.code == 0);
    CHECK(r.record.at("result").at("argmax").contains("theta0"));
    CHECK(r.record.at("result").at("p_hat").size() == 7);
}

TEST_CASE("figure fig5 series are strictly positive for every rank at d=5") {
    const CliResult r = run({"--seed", "14", "figure", "--which", "fig5", "--dmin", "5", "--dmax",
                             "5", "--samples", "30000"});
    REQUIRE(r.code == 0);
    const std::string csv = r.record.at("result").at("csv").get<std::string>();
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    int series_seen = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++series_seen;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const auto c3 = line.find(',', c2 + 1);
        const double y = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
        CAPTURE(line);
        CHECK(y > 0.0);
    }
    CHECK(series_seen == 4); // ranks 2..5 at d=5
}
