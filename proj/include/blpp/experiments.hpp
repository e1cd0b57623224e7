#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "blpp/stats.hpp"

namespace blpp {

// Resolved parameters of one Monte Carlo campaign. All fields are recorded in
// the output manifest, so a run can be reproduced bit-exactly from it.
struct ExperimentConfig {
    std::string name;
    std::vector<int> n_list;
    int grid = 0;    // 0 picks the per-experiment default
    int trials = 0;  // 0 picks the per-experiment default
    double dt = 0.02;
    double beta = 0.25;   // central row band fraction
    double delta = 0.05;  // small exponent used by peak/twin-peak thresholds
    double sigma = 0.0;   // mesh spacing; 0 picks the per-experiment default
    std::vector<int> ell_list;
    std::vector<double> alpha_list;
    double t_end = 1.0;  // stationarity window
    double drift = 0.0;  // nonzero only for the biased-dynamics control
    int samples = 64;    // candidate pairs per trial (basin)
    uint64_t seed = 1;
    int jobs = 1;
    std::string out_dir;
    std::string format = "csv";
    double check_fraction = 0.01;
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
    std::string name;
    ExperimentConfig config;
    std::vector<Table> tables;
    std::map<std::string, FitResult> fits;
    std::map<std::string, bool> checks;
    std::map<std::string, double> scalars;
};

// Fill unset fields with the experiment's documented defaults.
ExperimentConfig resolve_config(ExperimentConfig config);

ExperimentResult exp_switch_scaling(const ExperimentConfig& config);
ExperimentResult exp_transversal(const ExperimentConfig& config);
ExperimentResult exp_twin_peaks(const ExperimentConfig& config);
ExperimentResult exp_peak_count(const ExperimentConfig& config);
ExperimentResult exp_hitset(const ExperimentConfig& config);
ExperimentResult exp_hit_probability(const ExperimentConfig& config);
ExperimentResult exp_basin(const ExperimentConfig& config);
ExperimentResult exp_stationarity(const ExperimentConfig& config);

// Dispatch by config.name ("switch-scaling", "transversal", "twin-peaks",
// "peak-count", "hitset", "hit-probability", "basin", "stationarity").
ExperimentResult run_experiment(const ExperimentConfig& config);

// Write tables (CSV and/or JSON summary) plus manifest.json into
// config.out_dir. Returns the list of files written.
std::vector<std::string> write_outputs(const ExperimentResult& result);

// Re-run the experiment recorded in a manifest; outputs go to out_dir when
// nonempty, else to the manifest's own directory.
ExperimentResult rerun_from_manifest(const std::string& manifest_path,
                                     const std::string& out_dir);

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

// Run fn(0..count-1) on `jobs` threads; results must be written to
// preallocated slots so the reduction order never depends on scheduling.
void parallel_for_indexed(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace blpp
