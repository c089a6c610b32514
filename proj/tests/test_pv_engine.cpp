#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "qbell/pv_engine.hpp"

#include <json.hpp>

using namespace qbell;
using namespace qbell::testing;

TEST_CASE("wilson_interval") {
    CHECK(wilson_interval(0, 100, 3.0).first == 0.0);
    CHECK(wilson_interval(100, 100, 3.0).second == 1.0);

    const auto [lo, hi] = wilson_interval(283, 1000, 3.0);
    CHECK(lo < 0.283);
    CHECK(hi > 0.283);
    // Closed-form half-width, computed independently.
    const double p = 0.283, n = 1000.0, z2 = 9.0;
    const double half = 3.0 * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    CHECK(half == doctest::Approx(0.043).epsilon(0.02));
    CHECK((hi - lo) / 2 == doctest::Approx(half).epsilon(1e-12));

    RngStream rng(1, 2);
    for (int t = 0; t < 200; ++t) {
        const std::uint64_t n_samples = 1 + rng.next_u64() % 10000;
        const std::uint64_t v = rng.next_u64() % (n_samples + 1);
        const auto [a, b] = wilson_interval(v, n_samples, 3.0);
        const double ph = static_cast<double>(v) / n_samples;
        CHECK(a >= 0.0);
        CHECK(a <= ph);
        CHECK(b >= ph);
        CHECK(b <= 1.0);
    }

    CHECK_THROWS_AS(wilson_interval(5, 4, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(wilson_interval(0, 0, 3.0), std::invalid_argument);
}

TEST_CASE("estimate_pv_cglmp basics") {
    CHECK_THROWS_AS(estimate_pv_cglmp(make_mes(2), 0, 1), std::invalid_argument);

    // Product states never violate.
    const SchmidtState product(3, {1, 0, 0});
    const PvEstimate zero = estimate_pv_cglmp(product, 20000, 3);
    CHECK(zero.violations == 0);
    CHECK(zero.p_hat == 0.0);
    CHECK(zero.ci_low == 0.0);

    // MES d=2 sits near 0.32 under MBSPS with relabelings.
    const PvEstimate mes2 = estimate_pv_cglmp(make_mes(2), 30000, 7);
    CHECK(mes2.p_hat == doctest::Approx(0.32).epsilon(0.05));
    CHECK(mes2.p_hat == static_cast<double>(mes2.violations) / mes2.samples);
    CHECK(mes2.scenario == "cglmp-mbsps");
    CHECK(mes2.ci_low <= mes2.p_hat);
    CHECK(mes2.ci_high >= mes2.p_hat);
}

TEST_CASE("per-sample verdicts are pure functions of (seed, index)") {
    const SchmidtState mes3 = make_mes(3);
    const ClosedFormCoefficients cf = closed_form_coefficients(mes3, 3);
    for (std::uint64_t i = 0; i < 200; ++i)
        CHECK(cglmp_sample_violates(cf, 11, i) == cglmp_sample_violates(cf, 11, i));

    // Estimates equal the direct per-sample count and are worker-independent.
    std::uint64_t direct = 0;
    const std::uint64_t n = 20000;
    for (std::uint64_t i = 0; i < n; ++i)
        direct += cglmp_sample_violates(cf, 19, i);

    for (int workers : {1, 2, 8}) {
        EstimateOptions o;
        o.workers = workers;
        const PvEstimate e = estimate_pv_cglmp(mes3, n, 19, o);
        CHECK(e.violations == direct);
    }
}

TEST_CASE("monotone consistency: doubling samples keeps the prefix verdicts") {
    const SchmidtState mes2 = make_mes(2);
    EstimateOptions o;
    o.workers = 2;
    const PvEstimate half = estimate_pv_cglmp(mes2, 5000, 23, o);
    const PvEstimate full = estimate_pv_cglmp(mes2, 10000, 23, o);
    const ClosedFormCoefficients cf = closed_form_coefficients(mes2, 2);
    std::uint64_t tail = 0;
    for (std::uint64_t i = 5000; i < 10000; ++i)
        tail += cglmp_sample_violates(cf, 23, i);
    CHECK(full.violations == half.violations + tail);
}

TEST_CASE("estimate_pv_behaviour at d=2 reproduces the known rate and ordering") {
    EstimateOptions o;
    o.workers = 2;
    const PvEstimate beh = estimate_pv_behaviour(make_mes(2), 2, 2, 30000, 101, o);
    CHECK(beh.p_hat == doctest::Approx(0.28318).epsilon(0.05));
    CHECK(beh.p_hat > 0.27);
    CHECK(beh.scenario == "behaviour");

    const PvEstimate cg = estimate_pv_cglmp(make_mes(2), 30000, 101, o);
    CHECK(cg.p_hat > beh.p_hat); // the MBSPS restriction raises p_v at d=2

    // Behaviour verdicts are worker-independent too.
    LocalPolytopeTester tester(2, 2, 2);
    std::uint64_t direct = 0;
    for (std::uint64_t i = 0; i < 3000; ++i)
        direct += behaviour_sample_nonlocal(make_mes(2), 2, 2, tester, 1e-8, 55, i);
    for (int workers : {1, 2, 8}) {
        EstimateOptions opts;
        opts.workers = workers;
        CHECK(estimate_pv_behaviour(make_mes(2), 2, 2, 3000, 55, opts).violations == direct);
    }
}

TEST_CASE("checkpointing: resume reproduces the uninterrupted run") {
    const std::string path = "pv_checkpoint_test.json";
    std::remove(path.c_str());

    const SchmidtState mes2 = make_mes(2);
    EstimateOptions plain;
    plain.workers = 2;
    const PvEstimate reference = estimate_pv_cglmp(mes2, 30000, 31, plain);

    EstimateOptions ck = plain;
    ck.checkpoint_path = path;
    ck.checkpoint_every = 10000;
    const PvEstimate first = estimate_pv_cglmp(mes2, 10000, 31, ck);
    CHECK(first.samples == 10000);

    // The checkpoint file carries the full run configuration.
    {
        std::ifstream in(path);
        REQUIRE(in.good());
        nlohmann::json j;
        in >> j;
        CHECK(j.at("scenario") == "cglmp-mbsps");
        CHECK(j.at("d") == 2);
        CHECK(j.at("mA") == 2);
        CHECK(j.at("mB") == 2);
        CHECK(j.at("seed") == 31);
        CHECK(j.at("samples_done") == 10000);
        CHECK(j.at("violations") == first.violations);
        CHECK(j.at("alpha").size() == 2);
    }

    const PvEstimate resumed = estimate_pv_cglmp(mes2, 30000, 31, ck);
    CHECK(resumed.samples == reference.samples);
    CHECK(resumed.violations == reference.violations);

    // A mismatched configuration must refuse to resume.
    CHECK_THROWS_AS(estimate_pv_cglmp(make_mes(3), 30000, 31, ck), std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("min_hits early stop halts on a block boundary") {
    EstimateOptions o;
    o.workers = 1;
    o.min_hits = 100;
    o.checkpoint_every = 1000;
    const PvEstimate e = estimate_pv_cglmp(make_mes(2), 1000000, 3, o);
    CHECK(e.samples == 1000); // ~320 hits expected in the first block
    CHECK(e.violations >= 100);
    CHECK(e.p_hat == doctest::Approx(0.32).epsilon(0.2));
}

TEST_CASE("MSS r=3 in d=6 produces no CGLMP violations") {
    const PvEstimate e = estimate_pv_cglmp(make_mss(3, 6), 20000, 5);
    CHECK(e.violations == 0);
}
