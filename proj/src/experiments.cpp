#include "blpp/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "blpp/dynamics.hpp"
#include "blpp/errors.hpp"
#include "blpp/lpp.hpp"
#include "blpp/rng.hpp"
#include "json.hpp"

namespace blpp {

namespace {

constexpr const char* kVersion = "1.0.0";

double grid_floor(double x, int G) { return std::floor(x * G + 1e-9) / G; }

GridSpec square_spec(int n, int G) { return GridSpec{G, -1, n + 1, 0, n}; }

RowBand central_band(int n, double beta) {
    return RowBand{static_cast<int>(std::ceil(beta * n)),
                   static_cast<int>(std::floor((1.0 - beta) * n))};
}

double freq_stderr(double freq, int trials) {
    return std::sqrt(std::max(freq * (1.0 - freq), 0.0) / std::max(trials, 1));
}

}  // namespace

void parallel_for_indexed(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> workers;
    const int used = std::min(jobs, count);
    workers.reserve(used);
    for (int w = 0; w < used; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        std::fprintf(stderr, "campaign aborted at trial %d\n", i);
                        first_error = std::current_exception();
                    }
                    break;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

ExperimentConfig resolve_config(ExperimentConfig config) {
    const std::string& name = config.name;
    auto defaults = [&](std::vector<int> ns, int trials, int grid) {
        if (config.n_list.empty()) config.n_list = std::move(ns);
        if (config.trials == 0) config.trials = trials;
        if (config.grid == 0) config.grid = grid;
    };
    if (name == "switch-scaling") {
        defaults({16, 32, 64, 96}, 200, 16);
    } else if (name == "transversal") {
        defaults({32, 64}, 200, 16);
        if (config.alpha_list.empty()) config.alpha_list = {1.0, 2.0, 3.0};
        if (config.ell_list.empty()) config.ell_list = {4, 8, 16};
    } else if (name == "twin-peaks") {
        defaults({128}, 2000, 16);
        if (config.ell_list.empty()) config.ell_list = {8, 16, 32, 64};
    } else if (name == "peak-count") {
        defaults({16, 32, 64}, 200, 16);
    } else if (name == "hitset") {
        defaults({16, 24, 32}, 60, 8);
    } else if (name == "hit-probability") {
        defaults({16, 32, 64}, 2000, 4);
    } else if (name == "basin") {
        defaults({32}, 20, 8);
    } else if (name == "stationarity") {
        defaults({32}, 500, 16);
    } else {
        require(false, "unknown experiment: " + name);
    }
    require(config.trials >= 1, "need at least one trial");
    require(config.grid >= 1, "grid resolution must be >= 1");
    return config;
}

ExperimentResult exp_switch_scaling(const ExperimentConfig& config) {
    ExperimentResult result;
    result.name = config.name;
    result.config = config;
    Table table{"switch_scaling",
                {"n", "trials", "dt", "mean_switch", "stderr", "mean_switch_2dt", "ratio",
                 "ratio_stderr"},
                {}};
    std::vector<FitPoint> fit_points;
    bool all_ratios_close = true;
    for (const int n : config.n_list) {
        const GridSpec spec = square_spec(n, config.grid);
        const RowBand band = central_band(n, config.beta);
        // expected ring count over the doubled window stays workable
        require(2.0 * config.dt * (n + 1) * (n + 2) <= 1e6,
                "window too long: expected event count exceeds 10^6 per run");
        std::vector<double> at_dt(config.trials), at_2dt(config.trials);
        parallel_for_indexed(config.trials, config.jobs, [&](int trial) {
            RunOptions opt;
            opt.spec = spec;
            opt.seed = derive(config.seed, Stream::Trial, n, trial);
            opt.band = band;
            opt.t_end = 2.0 * config.dt;
            opt.checkpoints = {config.dt};
            opt.check_fraction = config.check_fraction;
            const Point p{spec.index_of(0.0), 0}, q{spec.index_of(double(n)), n};
            const auto run = run_pair_dynamics({{p, q}}, opt);
            at_dt[trial] = static_cast<double>(run.checkpoints.at(0).switch_total);
            at_2dt[trial] = static_cast<double>(run.ledger.total);
        });
        const double m1 = mean(at_dt), m2 = mean(at_2dt);
        const double ratio = m1 > 0.0 ? m2 / m1 : 0.0;
        const double ratio_se = m1 > 0.0 ? jackknife_ratio_stderr(at_2dt, at_dt) : 0.0;
        table.rows.push_back({double(n), double(config.trials), config.dt, m1,
                              jackknife_stderr(at_dt), m2, ratio, ratio_se});
        if (m1 > 0.0) fit_points.push_back({double(n), m1, jackknife_stderr(at_dt)});
        if (m1 > 0.0 && std::abs(ratio - 2.0) > std::max(0.15, 3.0 * ratio_se))
            all_ratios_close = false;
    }
    result.tables.push_back(std::move(table));
    if (fit_points.size() >= 3) result.fits["switch_slope"] = fit_loglog(fit_points);
    result.checks["time_ratio_near_two"] = all_ratios_close;
    return result;
}

ExperimentResult exp_transversal(const ExperimentConfig& config) {
    ExperimentResult result;
    result.name = config.name;
    result.config = config;
    Table exceed{"exceedance", {"n", "alpha", "trials", "frequency", "stderr"}, {}};
    Table tf{"mesoscopic_tf", {"n", "ell", "trials", "mean_scaled", "q50", "q90"}, {}};
    bool monotone = true;
    for (const int n : config.n_list) {
        const GridSpec spec{config.grid, 0, n, 0, n};
        const size_t A = config.alpha_list.size();
        std::vector<std::vector<double>> exceed_flags(A, std::vector<double>(config.trials));
        std::vector<std::vector<double>> tf_scaled(config.ell_list.size(),
                                                   std::vector<double>(config.trials));
        parallel_for_indexed(config.trials, config.jobs, [&](int trial) {
            const BrownianField field(spec, derive(config.seed, Stream::Trial, n, trial));
            const Point p{0, 0}, q{spec.index_of(double(n)), n};
            const Staircase geo = geodesic(field, p, q);
            for (size_t a = 0; a < A; ++a) {
                const double r = config.alpha_list[a] * std::pow(n, 2.0 / 3.0);
                bool exceeds = false;
                for (int k = 0; k <= n - 1 && !exceeds; ++k) {
                    const double z = spec.x_of(geo.jump(k));
                    if (z < k + 1 - r || z > k + r) exceeds = true;
                }
                exceed_flags[a][trial] = exceeds ? 1.0 : 0.0;
            }
            for (size_t e = 0; e < config.ell_list.size(); ++e) {
                const int ell = config.ell_list[e];
                if (ell > n - 1) {
                    tf_scaled[e][trial] = 0.0;
                    continue;
                }
                const double lo = spec.x_of(geo.jump(ell - 1));
                const double hi = spec.x_of(geo.jump(ell));
                const double dev = std::max({double(ell) - lo, hi - double(ell), 0.0});
                tf_scaled[e][trial] = dev / std::pow(ell, 2.0 / 3.0);
            }
        });
        double prev = 2.0;
        for (size_t a = 0; a < A; ++a) {
            const double f = mean(exceed_flags[a]);
            const double se = freq_stderr(f, config.trials);
            exceed.rows.push_back({double(n), config.alpha_list[a], double(config.trials), f, se});
            if (f > prev + 2.0 * se) monotone = false;
            prev = f;
        }
        for (size_t e = 0; e < config.ell_list.size(); ++e) {
            if (config.ell_list[e] > n - 1) continue;
            tf.rows.push_back({double(n), double(config.ell_list[e]), double(config.trials),
                               mean(tf_scaled[e]), quantile(tf_scaled[e], 0.5),
                               quantile(tf_scaled[e], 0.9)});
        }
    }
    result.tables.push_back(std::move(exceed));
    result.tables.push_back(std::move(tf));
    result.checks["exceedance_nonincreasing"] = monotone;
    return result;
}

ExperimentResult exp_twin_peaks(const ExperimentConfig& config) {
    ExperimentResult result;
    result.name = config.name;
    result.config = config;
    Table table{"twin_peaks", {"n", "ell", "m", "trials", "frequency", "stderr"}, {}};
    bool monotone = true;
    for (const int n : config.n_list) {
        const int m = n / 2;
        const GridSpec spec{config.grid, 0, n, 0, n};
        const size_t E = config.ell_list.size();
        std::vector<std::vector<double>> flags(E, std::vector<double>(config.trials));
        parallel_for_indexed(config.trials, config.jobs, [&](int trial) {
            const BrownianField field(spec, derive(config.seed, Stream::Trial, n, trial));
            const Point p{0, 0}, q{spec.index_of(double(n)), n};
            auto [t, fwd] = passage_time(field, p, q);
            const BackwardTable bwd(field, p, q);
            const auto profile = routed_profile(fwd, bwd, p, q, m, ProfileKind::Split);
            const Staircase geo = backtrack_geodesic(fwd, p, q);
            for (size_t e = 0; e < E; ++e) {
                flags[e][trial] = twin_peak_event_from_profile(profile, t, geo.jump(m), spec,
                                                               config.ell_list[e], config.delta)
                                      ? 1.0
                                      : 0.0;
            }
        });
        std::vector<FitPoint> points;
        double prev = 2.0, prev_se = 0.0;
        for (size_t e = 0; e < E; ++e) {
            const double f = mean(flags[e]);
            const double se = freq_stderr(f, config.trials);
            table.rows.push_back(
                {double(n), double(config.ell_list[e]), double(m), double(config.trials), f, se});
            if (f > prev + 2.0 * (se + prev_se)) monotone = false;
            prev = f;
            prev_se = se;
            if (f > 0.0) points.push_back({double(config.ell_list[e]), f, se});
        }
        if (points.size() >= 3) result.fits["tp_slope_n" + std::to_string(n)] = fit_loglog(points);
    }
    result.tables.push_back(std::move(table));
    result.checks["frequency_nonincreasing_in_ell"] = monotone;
    return result;
}

ExperimentResult exp_peak_count(const ExperimentConfig& config) {
    ExperimentResult result;
    result.name = config.name;
    result.config = config;
    Table table{"peak_count", {"n", "trials", "alpha", "mean_max", "q50", "q90", "max", "bound"},
                {}};
    std::vector<FitPoint> medians;
    for (const int n : config.n_list) {
        const GridSpec spec{config.grid, 0, n, 0, n};
        const double alpha = std::pow(n, config.delta);
        std::vector<double> max_counts(config.trials);
        parallel_for_indexed(config.trials, config.jobs, [&](int trial) {
            const BrownianField field(spec, derive(config.seed, Stream::Trial, n, trial));
            const Point p{0, 0}, q{spec.index_of(double(n)), n};
            auto [t, fwd] = passage_time(field, p, q);
            (void)t;
            const BackwardTable bwd(field, p, q);
            size_t worst = 0;
            for (int m = 0; m <= n; ++m) {
                const auto profile = routed_profile(fwd, bwd, p, q, m, ProfileKind::Plain);
                const auto peaks = peak_set_from_profile(profile, spec, p, q, alpha);
                check_invariant(peaks.size() <= static_cast<size_t>(n) + 2,
                                "peak cell count exceeded the row bound");
                worst = std::max(worst, peaks.size());
            }
            max_counts[trial] = static_cast<double>(worst);
        });
        table.rows.push_back({double(n), double(config.trials), alpha, mean(max_counts),
                              quantile(max_counts, 0.5), quantile(max_counts, 0.9),
                              quantile(max_counts, 1.0), double(n + 2)});
        medians.push_back({double(n), quantile(max_counts, 0.5), 0.0});
    }
    result.tables.push_back(std::move(table));
    if (medians.size() >= 3) result.fits["peak_median_slope"] = fit_loglog(medians);
    result.checks["row_bound_held"] = true;  // enforced per evaluation above
    return result;
}

namespace {

GridSpec hitset_spec(int n, int G, double r) {
    const int pad = static_cast<int>(std::ceil(r)) + 1;
    return GridSpec{G, -(n + pad), n + pad, -n, n};
}

}  // namespace

ExperimentResult exp_hitset(const ExperimentConfig& config) {
    ExperimentResult result;
    result.name = config.name;
    result.config = config;
    Table table{"hitset", {"n", "dt", "trials", "pairs", "mean_hitset", "stderr"}, {}};
    std::vector<FitPoint> n_points;
    bool monotone = true;
    for (const int n : config.n_list) {
        const double r = grid_floor(std::pow(n, 2.0 / 3.0), config.grid);
        const double sigma = config.sigma > 0.0 ? config.sigma : r;
        const GridSpec spec = hitset_spec(n, config.grid, r);
        const auto pairs = hitset_pairs_mesh(n, sigma, spec);
        const int band_half = n / 2;
        const std::vector<double> dts = {0.0, config.dt / 2.0, config.dt, 2.0 * config.dt};
        std::vector<std::vector<double>> sizes(dts.size(), std::vector<double>(config.trials));
        parallel_for_indexed(config.trials, config.jobs, [&](int trial) {
            RunOptions opt;
            opt.spec = spec;
            opt.seed = derive(config.seed, Stream::Trial, n, trial);
            opt.band = RowBand{-band_half, band_half};
            opt.t_end = 2.0 * config.dt;
            opt.checkpoints = {0.0, config.dt / 2.0, config.dt};
            opt.check_fraction = config.check_fraction;
            const auto run = run_pair_dynamics(pairs, opt);
            for (size_t d = 0; d + 1 < dts.size(); ++d)
                sizes[d][trial] = static_cast<double>(run.checkpoints.at(d).hitset_size);
            sizes.back()[trial] = static_cast<double>(run.hitset.size());
        });
        for (size_t d = 0; d < dts.size(); ++d) {
            table.rows.push_back({double(n), dts[d], double(config.trials), double(pairs.size()),
                                  mean(sizes[d]), jackknife_stderr(sizes[d])});
            if (d > 0 && mean(sizes[d]) < mean(sizes[d - 1]) - 1e-12) monotone = false;
        }
        n_points.push_back({double(n), mean(sizes.back()), jackknife_stderr(sizes.back())});
        if (n == config.n_list.back() && config.dt > 0.0) {
            std::vector<FitPoint> dt_points;
            for (size_t d = 1; d < dts.size(); ++d) {
                const double growth = mean(sizes[d]) - mean(sizes[0]);
                if (growth > 0.0) dt_points.push_back({dts[d], growth, 0.0});
            }
            if (dt_points.size() >= 3) result.fits["growth_vs_dt"] = fit_loglog(dt_points);
        }
    }
    result.tables.push_back(std::move(table));
    if (n_points.size() >= 3) result.fits["hitset_vs_n"] = fit_loglog(n_points);
    result.checks["monotone_in_dt"] = monotone;
    return result;
}

ExperimentResult exp_hit_probability(const ExperimentConfig& config) {
    ExperimentResult result;
    result.name = config.name;
    result.config = config;
    Table table{"hit_probability", {"n", "window", "trials", "pairs", "hit_probability", "stderr"},
                {}};
    std::vector<FitPoint> points;
    for (const int n : config.n_list) {
        const double r = grid_floor(std::pow(n, 2.0 / 3.0), config.grid);
        const double sigma = config.sigma > 0.0 ? config.sigma : 2.0 * r;
        const GridSpec spec = hitset_spec(n, config.grid, r);
        const auto pairs = hitset_pairs_mesh(n, sigma, spec);
        const double window = std::pow(n, -2.0 / 3.0);
        const int band_half = n / 2;
        std::vector<double> hits(config.trials);
        parallel_for_indexed(config.trials, config.jobs, [&](int trial) {
            RunOptions opt;
            opt.spec = spec;
            opt.seed = derive(config.seed, Stream::Trial, n, trial);
            opt.band = RowBand{-band_half, band_half};
            opt.t_end = window;
            opt.check_fraction = config.check_fraction;
            const auto run = run_pair_dynamics(pairs, opt);
            hits[trial] = run.hitset.contains({0, 0}) ? 1.0 : 0.0;
        });
        const double f = mean(hits);
        table.rows.push_back({double(n), window, double(config.trials), double(pairs.size()), f,
                              freq_stderr(f, config.trials)});
        if (f > 0.0) points.push_back({double(n), f, freq_stderr(f, config.trials)});
    }
    result.tables.push_back(std::move(table));
    if (points.size() >= 3) result.fits["hit_probability_slope"] = fit_loglog(points);
    return result;
}

ExperimentResult exp_basin(const ExperimentConfig& config) {
    ExperimentResult result;
    result.name = config.name;
    result.config = config;
    Table table{"basin",
                {"n", "trials", "samples", "mean_fraction", "mean_ratio", "frac_ratio_above"},
                {}};
    // per-trial volume estimates must clear this multiple of n^{10/3} for the
    // qualitative volume check
    const double ratio_floor = 0.005;
    for (const int n : config.n_list) {
        const double r = std::pow(n, 2.0 / 3.0 - 4.0 * config.delta / 11.0);
        const int pad = static_cast<int>(std::ceil(r)) + 1;
        const GridSpec spec{config.grid, -(n + pad), n + pad, -n, n};
        const int inner = static_cast<int>(std::ceil(0.75 * n));
        std::vector<double> fractions(config.trials), ratios(config.trials);
        parallel_for_indexed(config.trials, config.jobs, [&](int trial) {
            const uint64_t seed = derive(config.seed, Stream::Trial, n, trial);
            const BrownianField field(spec, seed);
            const Point p{spec.index_of(-double(n)), -n}, q{spec.index_of(double(n)), n};
            const Staircase geo = geodesic(field, p, q);
            const int band_half = n / 2;
            Rng rng(derive(seed, Stream::Sample, 1));
            auto sample_near = [&](int row_lo, int row_hi) {
                const int row =
                    row_lo + static_cast<int>(rng.below(static_cast<uint64_t>(row_hi - row_lo + 1)));
                const int center_j = geo.jump(row);
                const int radius_j = static_cast<int>(std::floor(r * config.grid + 1e-9));
                const int j_lo = std::max(0, center_j - radius_j);
                const int j_hi = std::min(spec.width() - 1, center_j + radius_j);
                return Point{j_lo + static_cast<int>(rng.below(
                                        static_cast<uint64_t>(j_hi - j_lo + 1))),
                             row};
            };
            int in_basin = 0;
            for (int s = 0; s < config.samples; ++s) {
                const Point ps = sample_near(-n, -inner);
                const Point qs = sample_near(inner, n);
                if (!point_leq(ps, qs)) continue;
                const Staircase alt = geodesic(field, ps, qs);
                // coalescence: the two geodesics agree on the central band
                bool agree = true;
                for (int k = -band_half - 1; k <= band_half && agree; ++k)
                    if (alt.jump(k) != geo.jump(k)) agree = false;
                if (agree) ++in_basin;
            }
            const double fraction = static_cast<double>(in_basin) / config.samples;
            const double rows_side = static_cast<double>(n - inner + 1);
            const double domain = (rows_side * 2.0 * r) * (rows_side * 2.0 * r);
            fractions[trial] = fraction;
            ratios[trial] = fraction * domain / std::pow(n, 10.0 / 3.0);
        });
        int above = 0;
        for (double v : ratios)
            if (v >= ratio_floor) ++above;
        table.rows.push_back({double(n), double(config.trials), double(config.samples),
                              mean(fractions), mean(ratios),
                              static_cast<double>(above) / config.trials});
        result.scalars["ratio_floor"] = ratio_floor;
    }
    result.tables.push_back(std::move(table));
    return result;
}

ExperimentResult exp_stationarity(const ExperimentConfig& config) {
    ExperimentResult result;
    result.name = config.name;
    result.config = config;
    Table table{"stationarity",
                {"n", "runs", "t_end", "drift", "ks_stat", "ks_critical_1pct", "reject"},
                {}};
    for (const int n : config.n_list) {
        const GridSpec spec = square_spec(n, config.grid);
        std::vector<double> t0(config.trials), t1(config.trials);
        parallel_for_indexed(config.trials, config.jobs, [&](int run) {
            const uint64_t seed = derive(config.seed, Stream::Trial, n, run);
            BrownianField field(spec, seed);
            const Point p{spec.index_of(0.0), 0}, q{spec.index_of(double(n)), n};
            t0[run] = passage_time_value(field, p, q);
            MSet ms;
            ms.add_pair(p, q, spec);
            evolve_field(field, ms, 0.0, config.t_end, seed, config.drift);
            t1[run] = passage_time_value(field, p, q);
        });
        const double ks = config.t_end > 0.0 ? ks_statistic(t0, t1) : 0.0;
        const double crit = ks_critical(0.01, t0.size(), t1.size());
        table.rows.push_back({double(n), double(config.trials), config.t_end, config.drift, ks,
                              crit, ks > crit ? 1.0 : 0.0});
        result.scalars["ks_n" + std::to_string(n)] = ks;
        result.checks["reject_n" + std::to_string(n)] = ks > crit;
    }
    result.tables.push_back(std::move(table));
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& raw) {
    const ExperimentConfig config = resolve_config(raw);
    if (config.name == "switch-scaling") return exp_switch_scaling(config);
    if (config.name == "transversal") return exp_transversal(config);
    if (config.name == "twin-peaks") return exp_twin_peaks(config);
    if (config.name == "peak-count") return exp_peak_count(config);
    if (config.name == "hitset") return exp_hitset(config);
    if (config.name == "hit-probability") return exp_hit_probability(config);
    if (config.name == "basin") return exp_basin(config);
    if (config.name == "stationarity") return exp_stationarity(config);
    require(false, "unknown experiment: " + config.name);
    return {};
}

namespace {

using nlohmann::json;

json config_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["n_list"] = c.n_list;
    j["grid"] = c.grid;
    j["trials"] = c.trials;
    j["dt"] = c.dt;
    j["beta"] = c.beta;
    j["delta"] = c.delta;
    j["sigma"] = c.sigma;
    j["ell_list"] = c.ell_list;
    j["alpha_list"] = c.alpha_list;
    j["t_end"] = c.t_end;
    j["drift"] = c.drift;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["out_dir"] = c.out_dir;
    j["format"] = c.format;
    j["check_fraction"] = c.check_fraction;
    return j;
}

ExperimentConfig config_from(const json& j) {
    ExperimentConfig c;
    c.name = j.at("name").get<std::string>();
    c.n_list = j.at("n_list").get<std::vector<int>>();
    c.grid = j.at("grid").get<int>();
    c.trials = j.at("trials").get<int>();
    c.dt = j.at("dt").get<double>();
    c.beta = j.at("beta").get<double>();
    c.delta = j.at("delta").get<double>();
    c.sigma = j.at("sigma").get<double>();
    c.ell_list = j.at("ell_list").get<std::vector<int>>();
    c.alpha_list = j.at("alpha_list").get<std::vector<double>>();
    c.t_end = j.at("t_end").get<double>();
    c.drift = j.at("drift").get<double>();
    c.samples = j.at("samples").get<int>();
    c.seed = j.at("seed").get<uint64_t>();
    c.jobs = j.at("jobs").get<int>();
    c.out_dir = j.at("out_dir").get<std::string>();
    c.format = j.at("format").get<std::string>();
    c.check_fraction = j.at("check_fraction").get<double>();
    return c;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json fit_json(const FitResult& fit) {
    json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["slope_stderr"] = fit.slope_stderr;
    j["points_used"] = fit.points_used;
    return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) {
    return config_json(config).dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    return config_from(json::parse(text));
}

std::vector<std::string> write_outputs(const ExperimentResult& result) {
    namespace fs = std::filesystem;
    const ExperimentConfig& config = result.config;
    require(!config.out_dir.empty(), "output directory not set");
    fs::create_directories(config.out_dir);
    std::vector<std::string> written;

    if (config.format != "json") {
        for (const auto& table : result.tables) {
            const std::string path = config.out_dir + "/" + table.name + ".csv";
            std::ofstream os(path);
            require(os.good(), "cannot write " + path);
            for (size_t c = 0; c < table.columns.size(); ++c)
                os << (c ? "," : "") << table.columns[c];
            os << "\n";
            for (const auto& row : table.rows) {
                for (size_t c = 0; c < row.size(); ++c)
                    os << (c ? "," : "") << format_double(row[c]);
                os << "\n";
            }
            written.push_back(path);
        }
    }

    json summary;
    summary["schema"] = "v1";
    summary["name"] = result.name;
    // the summary records only result-determining parameters; where the run
    // executed (out_dir, jobs) lives in the manifest
    json summary_config = config_json(config);
    summary_config.erase("out_dir");
    summary_config.erase("jobs");
    summary["config"] = summary_config;
    json tables = json::object();
    for (const auto& table : result.tables) {
        json t;
        t["columns"] = table.columns;
        t["rows"] = table.rows;
        tables[table.name] = t;
    }
    summary["tables"] = tables;
    json fits = json::object();
    for (const auto& [key, fit] : result.fits) fits[key] = fit_json(fit);
    summary["fits"] = fits;
    summary["checks"] = result.checks;
    summary["scalars"] = result.scalars;
    {
        const std::string path = config.out_dir + "/summary.json";
        std::ofstream os(path);
        require(os.good(), "cannot write " + path);
        os << summary.dump(2) << "\n";
        written.push_back(path);
    }
    {
        json manifest;
        manifest["tool"] = "blpp";
        manifest["version"] = kVersion;
        manifest["schema"] = "v1";
        manifest["config"] = config_json(config);
        const std::string path = config.out_dir + "/manifest.json";
        std::ofstream os(path);
        require(os.good(), "cannot write " + path);
        os << manifest.dump(2) << "\n";
        written.push_back(path);
    }
    return written;
}

ExperimentResult rerun_from_manifest(const std::string& manifest_path,
                                     const std::string& out_dir) {
    std::ifstream is(manifest_path);
    require(is.good(), "cannot read manifest: " + manifest_path);
    json manifest;
    is >> manifest;
    ExperimentConfig config = config_from(manifest.at("config"));
    if (!out_dir.empty()) config.out_dir = out_dir;
    ExperimentResult result = run_experiment(config);
    result.config.out_dir = config.out_dir;
    return result;
}

}  // namespace blpp
