#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blpp/experiments.hpp"
#include "blpp/lpp.hpp"
#include "blpp/rng.hpp"
#include "doctest.h"

using namespace blpp;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("log-log fits recover exact power laws") {
    std::vector<FitPoint> pts;
    for (double n : {8.0, 16.0, 32.0, 64.0}) pts.push_back({n, 3.0 * std::pow(n, 1.7), 0.0});
    const auto fit = fit_loglog(pts);
    CHECK(fit.slope == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fit.slope_stderr == doctest::Approx(0.0).epsilon(1e-10));

    std::vector<FitPoint> flat;
    for (double n : {8.0, 16.0, 32.0}) flat.push_back({n, 5.0, 0.0});
    CHECK(fit_loglog(flat).slope == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(fit_loglog({{1.0, 1.0, 0.0}, {2.0, -1.0, 0.0}, {3.0, 1.0, 0.0}}),
                    std::invalid_argument);
}

TEST_CASE("log-log slope estimator is unbiased on noisy power laws") {
    Rng rng(99);
    double total_slope = 0.0;
    const int reps = 2000;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<FitPoint> pts;
        for (double n : {8.0, 16.0, 32.0, 64.0}) {
            const double v = 2.0 * std::pow(n, 0.8) * std::exp(0.05 * rng.normal());
            pts.push_back({n, v, 0.0});
        }
        total_slope += fit_loglog(pts).slope;
    }
    const double mean_slope = total_slope / reps;
    // multiplicative noise is slope-neutral in log space
    CHECK(mean_slope == doctest::Approx(0.8).epsilon(0.01));
}

TEST_CASE("KS statistic: identical samples and shifted samples") {
    std::vector<double> a, b, c;
    Rng rng(5);
    for (int i = 0; i < 400; ++i) {
        const double v = rng.normal();
        a.push_back(v);
        b.push_back(rng.normal());
        c.push_back(rng.normal() + 2.0);
    }
    CHECK(ks_statistic(a, a) == 0.0);
    CHECK(ks_statistic(a, b) < ks_critical(0.01, a.size(), b.size()));
    CHECK(ks_statistic(a, c) > ks_critical(0.01, a.size(), c.size()));
}

TEST_CASE("stationarity experiment: null passes, drifted control rejects") {
    ExperimentConfig cfg;
    cfg.name = "stationarity";
    cfg.n_list = {12};
    cfg.grid = 8;
    cfg.trials = 300;
    cfg.t_end = 1.0;
    cfg.seed = 71;
    const auto null_run = run_experiment(cfg);
    CHECK(!null_run.checks.at("reject_n12"));

    ExperimentConfig biased = cfg;
    biased.drift = 2.0;
    const auto control = run_experiment(biased);
    CHECK(control.checks.at("reject_n12"));

    ExperimentConfig frozen = cfg;
    frozen.t_end = 0.0;
    const auto still = run_experiment(frozen);
    CHECK(still.scalars.at("ks_n12") == 0.0);
}

TEST_CASE("switch scaling smoke run: ratio near two and a positive slope") {
    ExperimentConfig cfg;
    cfg.name = "switch-scaling";
    cfg.n_list = {8, 12, 16};
    cfg.grid = 8;
    cfg.trials = 120;
    cfg.dt = 0.25;
    cfg.seed = 2;
    cfg.check_fraction = 0.05;
    const auto result = run_experiment(cfg);
    const auto& rows = result.tables.at(0).rows;
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(row[3] > 0.0);  // mean switch at dt
        CHECK(row[6] > 1.5);  // ratio of the two window means
        CHECK(row[6] < 2.5);
    }
    REQUIRE(result.fits.count("switch_slope") == 1);
    CHECK(result.fits.at("switch_slope").slope > 0.5);

    // zero window: all means are zero and no fit is defined
    ExperimentConfig frozen = cfg;
    frozen.trials = 10;
    frozen.dt = 0.0;
    const auto none = run_experiment(frozen);
    CHECK(none.fits.count("switch_slope") == 0);
    for (const auto& row : none.tables.at(0).rows) CHECK(row[3] == 0.0);
}

TEST_CASE("hitset experiment: monotone in the window on coupled clocks") {
    ExperimentConfig cfg;
    cfg.name = "hitset";
    cfg.n_list = {6, 8, 10};
    cfg.grid = 4;
    cfg.trials = 12;
    cfg.dt = 0.05;
    cfg.seed = 9;
    const auto result = run_experiment(cfg);
    CHECK(result.checks.at("monotone_in_dt"));
    REQUIRE(result.fits.count("hitset_vs_n") == 1);
}

TEST_CASE("experiment outputs are deterministic and reproducible from the manifest") {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "blpp_test_out";
    fs::remove_all(base);

    ExperimentConfig cfg;
    cfg.name = "transversal";
    cfg.n_list = {12};
    cfg.grid = 8;
    cfg.trials = 40;
    cfg.seed = 33;
    cfg.out_dir = (base / "a").string();
    cfg.jobs = 1;
    const auto r1 = run_experiment(cfg);
    write_outputs(r1);

    // same campaign on many threads: identical table bytes
    ExperimentConfig cfg8 = cfg;
    cfg8.jobs = 8;
    cfg8.out_dir = (base / "b").string();
    const auto r2 = run_experiment(cfg8);
    write_outputs(r2);
    CHECK(slurp((base / "a" / "exceedance.csv").string()) ==
          slurp((base / "b" / "exceedance.csv").string()));
    CHECK(slurp((base / "a" / "mesoscopic_tf.csv").string()) ==
          slurp((base / "b" / "mesoscopic_tf.csv").string()));

    // rerun from the manifest: identical bytes for every output
    const auto rerun = rerun_from_manifest((base / "a" / "manifest.json").string(),
                                           (base / "c").string());
    write_outputs(rerun);
    CHECK(slurp((base / "a" / "exceedance.csv").string()) ==
          slurp((base / "c" / "exceedance.csv").string()));
    CHECK(slurp((base / "a" / "summary.json").string()).size() > 0);
    fs::remove_all(base);
}

TEST_CASE("config json round trip") {
    ExperimentConfig cfg;
    cfg.name = "twin-peaks";
    cfg.n_list = {64};
    cfg.ell_list = {8, 16};
    cfg.seed = 123456789ull;
    cfg.sigma = 0.25;
    const auto back = config_from_json(config_to_json(cfg));
    CHECK(back.name == cfg.name);
    CHECK(back.n_list == cfg.n_list);
    CHECK(back.ell_list == cfg.ell_list);
    CHECK(back.seed == cfg.seed);
    CHECK(back.sigma == cfg.sigma);
}

TEST_CASE("basin volume estimates stay away from zero") {
    ExperimentConfig cfg;
    cfg.name = "basin";
    cfg.n_list = {32, 64};
    cfg.trials = 10;
    cfg.samples = 32;
    cfg.seed = 17;
    const auto result = run_experiment(cfg);
    for (const auto& row : result.tables.at(0).rows) {
        CHECK(row[3] > 0.0);   // coalescence fraction
        CHECK(row[5] >= 0.9);  // share of trials clearing the volume floor
    }
}

TEST_CASE("hit probability smoke: valid frequencies, nonincreasing in n") {
    ExperimentConfig cfg;
    cfg.name = "hit-probability";
    cfg.n_list = {8, 16};
    cfg.trials = 200;
    cfg.seed = 23;
    const auto result = run_experiment(cfg);
    const auto& rows = result.tables.at(0).rows;
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row[4] >= 0.0);
        CHECK(row[4] <= 1.0);
    }
    CHECK(rows[1][4] <= rows[0][4] + 2.0 * (rows[0][5] + rows[1][5]));
}

TEST_CASE("zero-width tubes are always exceeded") {
    ExperimentConfig cfg;
    cfg.name = "transversal";
    cfg.n_list = {8};
    cfg.grid = 4;
    cfg.trials = 25;
    cfg.alpha_list = {0.0, 1.0};
    cfg.ell_list = {4};
    cfg.seed = 3;
    const auto result = run_experiment(cfg);
    const auto& rows = result.tables.at(0).rows;
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][3] == 1.0);           // alpha = 0
    CHECK(rows[1][3] <= rows[0][3]);    // nested events
}
