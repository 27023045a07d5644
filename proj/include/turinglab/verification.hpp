#pragma once

// Numerical reproduction of the escape-time picture: delta-scaled initial
// data, deviation of the nonlinear evolution from its dominant-mode
// prediction, the delta-scaling study, and the diagnostic constants.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "turinglab/simulator.hpp"
#include "turinglab/spectral.hpp"

namespace turinglab {

// T = (1/lambda_max) ln(theta/delta); BadOrderError when delta > theta.
double escape_time(double delta, double theta, double lambda_max);

// Keeps only the fastest-growing part of the initial data: for q attaining
// lambda_max, the component along r_plus(q), amplified by exp(lambda_max t).
// `coords` must come from the delta-scaled initial coefficients.
Eigen::ArrayXXd dominant_mode_prediction(const EigenCoordinates& coords,
                                         const ModeSpectrum& spectrum,
                                         const GrowingModeSummary& summary,
                                         double t);

enum class ProfileKind { mixed, pure_q0, zero };
ProfileKind profile_from_string(const std::string& s);
const char* to_string(ProfileKind p);

// Deterministic unit-L2 initial profiles. "pure_q0" is the fastest-growing
// eigenmode alone; "mixed" spreads energy over a handful of low modes while
// keeping a solid component along r_plus(q0).
Eigen::ArrayXXd build_profile(ProfileKind kind, const ModeSpectrum& spectrum,
                              const GrowingModeSummary& summary);

struct ExperimentSpec {
    ReactionSystem system;
    Linearization lin;
    ProfileKind profile = ProfileKind::mixed;
    Eigen::ArrayXXd w0;  // optional custom unit-L2 profile; empty = use `profile`
    double theta = 0.1;
    std::vector<double> deltas{1e-3, 1e-4, 1e-5};
    double epsilon_frac = 0.25;  // observation window [eps*T, T]
    int samples = 200;
};

struct DeviationSample {
    double t = 0.0;
    double dev = 0.0;    // || w(t) - prediction(t) ||_{L2}
    double bound = 0.0;  // (e^{-nu t} + delta ||w0||_{H2}^2 + delta e^{l t}) delta e^{l t}
    double ratio = 0.0;
    double l2 = 0.0;
    double h2 = 0.0;
};

struct DeltaReport {
    double delta = 0.0;
    double t_escape = 0.0;
    double dt_used = 0.0;
    double w0_h2 = 0.0;
    std::vector<DeviationSample> samples;
    double final_l2 = 0.0;
    bool instability_flag = false;  // ||w(T)|| >= theta/2
    double max_ratio_window = 0.0;  // over [eps*T, T]
    bool completed = false;
    HaltReason halt = HaltReason::completed;
    std::string error;
};

struct DeviationReport {
    double theta = 0.0;
    double epsilon_frac = 0.0;
    double lambda_max = 0.0;
    double nu = 0.0;
    ProfileKind profile = ProfileKind::mixed;
    SimMode mode = SimMode::nonlinear;
    std::vector<DeltaReport> per_delta;
};

// Simulates each delta to its escape time (the per-delta runs are independent
// and execute in parallel up to max_threads; 0 = hardware default) and records
// dev/bound/ratio at `samples` uniform times. Per-delta simulator failures are
// recorded in the corresponding DeltaReport without aborting the sweep.
DeviationReport run_escape_time_experiment(const ExperimentSpec& spec,
                                       const SimulationConfig& cfg,
                                       int max_threads = 0);

struct ScalingRow {
    double delta = 0.0;
    double max_ratio_window = 0.0;
    double dev_final = 0.0;
    double envelope = 0.0;  // delta^{nu/lambda_max} + theta^2
};

struct ScalingSummary {
    double c_fit = 0.0;            // max ratio over deltas and window times
    double stability_factor = 0.0; // max/min of the per-delta window maxima
    bool bounded = false;
    bool stable_within_factor3 = false;
    bool dev_monotone = false;     // dev(T) non-increasing as delta decreases
    std::vector<ScalingRow> rows;
};

// Requires >= 3 completed deltas spanning >= 2 decades (InsufficientDataError).
ScalingSummary scaling_study(const DeviationReport& report);

// Fit of the decay-only deviation law dev <= C (e^{-nu t} + floor) delta e^{l t}
// over the observation window; `floor` absorbs time-integration error where
// the true linear deviation is below solver accuracy.
double decay_term_fit(const DeviationReport& report, const DeltaReport& dr,
                      double floor);

// ((f_v + g_u)^2 / (2|g_v|) + f_u)^3 / d1^2; NonNegativeGvError when g_v >= 0.
double bootstrap_constant_c2(const Linearization& lin);

// Empirical linear-growth constant: max over random unit single-mode
// coefficient sets and the t grid of ||exp(L t) w0|| / exp(lambda_max t).
// Trials draw a mode from the scanned band and a direction on the circle, so
// the maximum saturates quickly; always >= 1 when the grid contains t = 0.
double growth_bound_fit(const Linearization& lin, const GrowingModeSummary& summary,
                        int trials, const std::vector<double>& t_grid,
                        std::uint64_t seed);

}  // namespace turinglab
