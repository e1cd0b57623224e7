// Command line front end: environment sampling, static passage queries,
// dynamical runs, oracle self-checks, Monte Carlo experiments, and manifest
// replay. Exit codes: 0 success, 1 usage error, 2 failed runtime invariant.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blpp/dynamics.hpp"
#include "blpp/experiments.hpp"
#include "blpp/lpp.hpp"
#include "blpp/oracle.hpp"
#include "blpp/rng.hpp"

namespace {

using namespace blpp;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct StaticArgs {
    int n = 8;
    int grid = 16;
    uint64_t seed = 1;
};

void add_static_args(CLI::App* cmd, StaticArgs& args) {
    cmd->add_option("--n", args.n, "endpoint scale: the pair (0,0) -> (n,n)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--grid", args.grid, "grid points per unit length")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args.seed, "master seed");
}

int cmd_env_sample(const GridSpec& spec, uint64_t seed, const std::string& out) {
    const BrownianField field(spec, seed);
    if (out.empty()) {
        std::printf("sampled field G=%d x=%d:%d m=%d:%d seed=%llu\n", spec.grid, spec.x_min,
                    spec.x_max, spec.m_min, spec.m_max, static_cast<unsigned long long>(seed));
        return 0;
    }
    std::ofstream os(out, std::ios::binary);
    require(os.good(), "cannot write " + out);
    field.dump(os);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_env_dump(const std::string& in) {
    std::ifstream is(in, std::ios::binary);
    require(is.good(), "cannot read " + in);
    const BrownianField field = BrownianField::load(is);
    const auto& spec = field.spec();
    std::printf("BLPPFIELD v1 G=%d x=%d:%d m=%d:%d\n", spec.grid, spec.x_min, spec.x_max,
                spec.m_min, spec.m_max);
    for (int m = spec.m_min; m <= spec.m_max; ++m) {
        const auto line = field.line(m);
        double lo = line[0], hi = line[0];
        for (double v : line) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        std::printf("line %d: end=%s min=%s max=%s\n", m, fmt(line.back()).c_str(),
                    fmt(lo).c_str(), fmt(hi).c_str());
    }
    return 0;
}

int cmd_lpp(const StaticArgs& args, const std::string& what, int m, const std::string& kind,
            const std::string& out) {
    const GridSpec spec{args.grid, 0, args.n, 0, args.n};
    const BrownianField field(spec, args.seed);
    const Point p{0, 0}, q{spec.index_of(double(args.n)), args.n};
    auto [t, dp] = passage_time(field, p, q);
    const Staircase geo = backtrack_geodesic(dp, p, q);
    if (what == "passage" || what == "geodesic") {
        std::printf("T = %s\n", fmt(t).c_str());
        std::printf("geodesic jumps:");
        for (int k = geo.m_lo - 1; k <= geo.m_hi; ++k)
            std::printf(" %s", fmt(spec.x_of(geo.jump(k))).c_str());
        std::printf("\n");
        return 0;
    }
    require(m >= 0 && m <= args.n, "profile line outside [0, n]");
    const ProfileKind pk = kind == "split" ? ProfileKind::Split : ProfileKind::Plain;
    const auto profile = routed_profile(field, p, q, m, pk);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        require(file.good(), "cannot write " + out);
        os = &file;
    }
    (*os) << "x,value,gap\n";
    for (size_t c = 0; c < profile.values.size(); ++c) {
        const double x = spec.x_of(profile.j_lo + static_cast<int>(c));
        (*os) << fmt(x) << "," << fmt(profile.values[c]) << "," << fmt(t - profile.values[c])
              << "\n";
    }
    return 0;
}

int cmd_dyn_run(const StaticArgs& args, double dt, double beta, const std::string& log_path,
                double check_fraction) {
    RunOptions opt;
    opt.spec = GridSpec{args.grid, -1, args.n + 1, 0, args.n};
    opt.seed = args.seed;
    opt.band = RowBand{static_cast<int>(std::ceil(beta * args.n)),
                       static_cast<int>(std::floor((1.0 - beta) * args.n))};
    opt.t_end = dt;
    opt.record_events = !log_path.empty();
    opt.check_fraction = check_fraction;
    const Point p{opt.spec.index_of(0.0), 0}, q{opt.spec.index_of(double(args.n)), args.n};
    const auto run = run_pair_dynamics({{p, q}}, opt);

    if (!log_path.empty()) {
        std::ofstream os(log_path);
        require(os.good(), "cannot write " + log_path);
        os << "r,block_i,block_m,changed,switch_delta,loc_l,loc_m,excursion_case,dT_bound_ok\n";
        for (const auto& ev : run.events) {
            os << fmt(ev.r) << "," << ev.unit << "," << ev.line << "," << (ev.changed ? 1 : 0)
               << "," << ev.switch_delta << "," << ev.loc_ell << "," << ev.loc_m << ","
               << ev.excursion_case << "," << (ev.dt_bound_ok ? 1 : 0) << "\n";
        }
    }
    std::printf("events %lld, geodesic changes %lld\n", static_cast<long long>(run.event_count),
                static_cast<long long>(run.changed_count));
    std::printf("switch total (band) %lld\n", static_cast<long long>(run.ledger.total));
    std::printf("hitset: initial %zu, final %zu, bound slack %lld\n", run.initial_cells[0],
                run.hitset.size(),
                static_cast<long long>(run.initial_cells[0] + run.pair_switch[0] -
                                       run.hitset.size()));
    std::printf("scale buckets:");
    for (const auto& [key, count] : run.ledger.buckets)
        std::printf(" (l=%d,m=%d):%lld", key.first, key.second, static_cast<long long>(count));
    std::printf("\n");
    return 0;
}

int cmd_oracle_check(uint64_t seed, int instances) {
    Rng pick(derive(seed, Stream::Sample, 1));
    int verified = 0;
    for (int rep = 0; rep < instances; ++rep) {
        const int G = 1 + static_cast<int>(pick.below(4));
        const int lines = 1 + static_cast<int>(pick.below(4));
        const int units = 1 + static_cast<int>(pick.below(3));
        const GridSpec spec{G, 0, units, 0, lines - 1};
        const BrownianField field(spec, derive(seed, Stream::Trial, rep));
        const Point p{static_cast<int>(pick.below(spec.width())), 0};
        const Point q{p.j + static_cast<int>(pick.below(spec.width() - p.j)), lines - 1};

        const auto brute = brute_passage(field, p, q);
        const auto [t, dp] = passage_time(field, p, q);
        check_invariant(std::abs(t - brute.value) <= 1e-9 * (1.0 + std::abs(brute.value)),
                        "passage time disagrees with enumeration");
        check_invariant(backtrack_geodesic(dp, p, q).jumps == brute.maximizer.jumps,
                        "geodesic disagrees with the enumerated maximizer");
        const double pair_dp = disjoint_passage(field, p, q, 2);
        const double pair_brute = brute_disjoint(field, p, q);
        const bool both_inf = std::isinf(pair_dp) && std::isinf(pair_brute);
        check_invariant(
            both_inf || std::abs(pair_dp - pair_brute) <= 1e-9 * (1.0 + std::abs(pair_brute)),
            "disjoint pair value disagrees with enumeration");
        ++verified;
    }
    std::printf("oracle check: %d instances verified\n", verified);
    return 0;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamical Brownian last passage percolation toolkit"};
    app.require_subcommand(1);

    auto* env = app.add_subcommand("env", "sample or inspect environment snapshots");
    env->require_subcommand(1);
    GridSpec env_spec{16, 0, 8, 0, 8};
    uint64_t env_seed = 1;
    std::string env_out, env_in;
    auto* env_sample = env->add_subcommand("sample", "sample a field, optionally dump it");
    env_sample->add_option("--grid", env_spec.grid)->check(CLI::PositiveNumber);
    env_sample->add_option("--xmin", env_spec.x_min);
    env_sample->add_option("--xmax", env_spec.x_max);
    env_sample->add_option("--mmin", env_spec.m_min);
    env_sample->add_option("--mmax", env_spec.m_max);
    env_sample->add_option("--seed", env_seed);
    env_sample->add_option("--out", env_out, "snapshot file");
    auto* env_dump = env->add_subcommand("dump", "print a snapshot header and line stats");
    env_dump->add_option("--in", env_in, "snapshot file")->required();

    auto* lpp = app.add_subcommand("lpp", "static passage computations on one field");
    lpp->require_subcommand(1);
    StaticArgs lpp_args;
    int profile_m = 0;
    std::string profile_kind = "plain", lpp_out;
    auto* lpp_passage = lpp->add_subcommand("passage", "passage time from (0,0) to (n,n)");
    add_static_args(lpp_passage, lpp_args);
    auto* lpp_geodesic = lpp->add_subcommand("geodesic", "leftmost geodesic and its value");
    add_static_args(lpp_geodesic, lpp_args);
    auto* lpp_profile = lpp->add_subcommand("profile", "routed weight profile on one line");
    add_static_args(lpp_profile, lpp_args);
    lpp_profile->add_option("--m", profile_m, "profile line")->required();
    lpp_profile->add_option("--kind", profile_kind, "plain or split")
        ->check(CLI::IsMember({"plain", "split"}));
    lpp_profile->add_option("--out", lpp_out, "CSV output path (default stdout)");

    auto* dyn = app.add_subcommand("dyn", "event-driven dynamical runs");
    dyn->require_subcommand(1);
    StaticArgs dyn_args;
    double dyn_dt = 0.1, dyn_beta = 0.25, dyn_checks = 0.05;
    std::string dyn_log;
    auto* dyn_run = dyn->add_subcommand("run", "evolve one tracked pair and report ledgers");
    add_static_args(dyn_run, dyn_args);
    dyn_run->add_option("--dt", dyn_dt, "length of the dynamical window");
    dyn_run->add_option("--beta", dyn_beta, "central band fraction");
    dyn_run->add_option("--log", dyn_log, "write the per-event CSV log here");
    dyn_run->add_option("--checks", dyn_checks, "fraction of events cross-checked");

    auto* oracle = app.add_subcommand("oracle", "brute-force agreement checks");
    oracle->require_subcommand(1);
    auto* oracle_check = oracle->add_subcommand("check", "verify DP against enumeration");
    uint64_t oracle_seed = 1;
    int oracle_instances = 50;
    oracle_check->add_option("--seed", oracle_seed);
    oracle_check->add_option("--instances", oracle_instances)->check(CLI::PositiveNumber);

    auto* exp = app.add_subcommand("exp", "Monte Carlo experiment campaigns");
    ExperimentConfig cfg;
    std::string exp_name, exp_n, exp_ell, exp_alpha;
    exp->add_option("name", exp_name,
                    "switch-scaling | transversal | twin-peaks | peak-count | hitset | "
                    "hit-probability | basin | stationarity")
        ->required();
    exp->add_option("--n", exp_n, "comma-separated endpoint scales");
    exp->add_option("--grid", cfg.grid, "grid points per unit length");
    exp->add_option("--trials", cfg.trials, "Monte Carlo trials per n");
    exp->add_option("--dt", cfg.dt, "dynamical window");
    exp->add_option("--beta", cfg.beta, "central band fraction");
    exp->add_option("--delta", cfg.delta, "small exponent for thresholds");
    exp->add_option("--sigma", cfg.sigma, "mesh spacing (0 = per-experiment default)");
    exp->add_option("--ell", exp_ell, "comma-separated scales");
    exp->add_option("--alpha", exp_alpha, "comma-separated tube multiples");
    exp->add_option("--t-end", cfg.t_end, "stationarity window");
    exp->add_option("--drift", cfg.drift, "bias injected into resamples (control runs)");
    exp->add_option("--samples", cfg.samples, "candidate pairs per trial (basin)");
    exp->add_option("--seed", cfg.seed, "master seed");
    exp->add_option("--jobs", cfg.jobs, "trial-level worker threads");
    exp->add_option("--out", cfg.out_dir, "output directory")->required();
    exp->add_option("--format", cfg.format, "csv | json | both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    exp->add_option("--checks", cfg.check_fraction, "fraction of events cross-checked");

    auto* report = app.add_subcommand("report", "re-run an experiment from its manifest");
    std::string report_manifest, report_out;
    report->add_option("--manifest", report_manifest)->required();
    report->add_option("--out", report_out, "output directory (default: alongside manifest)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (env_sample->parsed()) return cmd_env_sample(env_spec, env_seed, env_out);
        if (env_dump->parsed()) return cmd_env_dump(env_in);
        if (lpp_passage->parsed()) return cmd_lpp(lpp_args, "passage", 0, "", "");
        if (lpp_geodesic->parsed()) return cmd_lpp(lpp_args, "geodesic", 0, "", "");
        if (lpp_profile->parsed())
            return cmd_lpp(lpp_args, "profile", profile_m, profile_kind, lpp_out);
        if (dyn_run->parsed()) return cmd_dyn_run(dyn_args, dyn_dt, dyn_beta, dyn_log, dyn_checks);
        if (oracle_check->parsed()) return cmd_oracle_check(oracle_seed, oracle_instances);
        if (exp->parsed()) {
            cfg.name = exp_name;
            if (!exp_n.empty()) cfg.n_list = parse_int_list(exp_n);
            if (!exp_ell.empty()) cfg.ell_list = parse_int_list(exp_ell);
            if (!exp_alpha.empty()) cfg.alpha_list = parse_double_list(exp_alpha);
            const auto result = run_experiment(cfg);
            for (const auto& path : write_outputs(result))
                std::printf("wrote %s\n", path.c_str());
            for (const auto& [key, fit] : result.fits)
                std::printf("fit %s: slope %s +- %s\n", key.c_str(), fmt(fit.slope).c_str(),
                            fmt(fit.slope_stderr).c_str());
            for (const auto& [key, ok] : result.checks)
                std::printf("check %s: %s\n", key.c_str(), ok ? "ok" : "FAILED");
            return 0;
        }
        if (report->parsed()) {
            const auto result = rerun_from_manifest(report_manifest, report_out);
            for (const auto& path : write_outputs(result))
                std::printf("wrote %s\n", path.c_str());
            return 0;
        }
        std::fprintf(stderr, "no subcommand\n");
        return 1;
    } catch (const blpp::InvariantViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
