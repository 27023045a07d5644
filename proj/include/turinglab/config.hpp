#pragma once

// Run configuration: a single JSON file with one section per subsystem, plus
// command-line overrides. Identical config + seed must produce byte-identical
// CSV output.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace turinglab {

struct ModelConfig {
    std::string name = "benchmark";
    std::map<std::string, double> params;
    std::optional<std::array<double, 2>> guess;
    std::string derivative_mode = "analytic";
    double eta = 0.5;
};

struct GridConfig {
    int d = 1;
    int n = 64;
};

struct SimConfig {
    double dt = 1e-3;
    double t_end = 5.0;
    std::string scheme = "imex_cn_ab2";
    std::string mode = "nonlinear";
    int snapshot_stride = 100;
    bool dealias = true;
};

struct InitialConfig {
    std::string profile = "mixed";
    double delta = 1e-3;
};

struct ExperimentConfig {
    double theta = 0.1;
    std::vector<double> deltas{1e-3, 1e-4, 1e-5};
    double epsilon_frac = 0.25;
    int samples = 200;
    int growth_trials = 100;
    double growth_t_max = 30.0;
};

struct ScanConfig {
    // parameter name -> list of values; the scan covers the cartesian product
    std::vector<std::pair<std::string, std::vector<double>>> parameters;
};

struct DispersionConfig {
    double k_max = -1.0;  // < 0: derive from the instability interval
    int points = 257;
};

struct RunConfig {
    ModelConfig model;
    GridConfig grid;
    SimConfig sim;
    InitialConfig initial;
    ExperimentConfig experiment;
    ScanConfig scan;
    DispersionConfig dispersion;
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int threads = 0;  // 0 = hardware default; TURING_LAB_THREADS caps it
};

// Parses the JSON file; throws ConfigError with the offending field on bad input.
RunConfig load_config(const std::string& path);

// Flag overrides applied on top of the file (empty optional = keep).
struct CliOverrides {
    std::optional<std::string> model;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> theta;
    std::optional<std::vector<double>> deltas;
    std::optional<int> grid_n;
    std::optional<int> grid_d;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::string> profile;
};
void apply_overrides(RunConfig& cfg, const CliOverrides& o);

}  // namespace turinglab
