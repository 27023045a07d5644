#pragma once

// Command pipelines behind the CLI: analyze / scan / simulate / verify.
// Exit codes: 0 success, 1 configuration or model error, 2 numerical failure,
// 3 acceptance failure.

#include <string>
#include <utility>
#include <vector>

#include "turinglab/config.hpp"
#include "turinglab/verification.hpp"

namespace turinglab {

ReactionSystem system_from_config(const ModelConfig& m);
SimulationConfig sim_from_config(const RunConfig& cfg);

// Worker cap: config value, clamped by the TURING_LAB_THREADS environment
// variable when set.
int effective_threads(const RunConfig& cfg);

struct VerifyOutcome {
    DeviationReport nonlinear;
    DeviationReport linear;
    DeviationReport pure;
    ScalingSummary scaling;
    double c1 = 0.0;
    double c1_doubled = 0.0;
    double c2 = 0.0;
    double linear_fit_min = 0.0;  // per-delta decay-term fits, linear variant
    double linear_fit_max = 0.0;
    std::vector<std::pair<std::string, bool>> checks;
    bool all_pass = false;
};

// Full verification pipeline (throws on configuration/model errors); used by
// cmd_verify and by the acceptance suite.
VerifyOutcome run_verify_pipeline(const RunConfig& cfg);

int cmd_analyze(const RunConfig& cfg);
int cmd_scan(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

// Maps a thrown error to the CLI exit code contract.
int classify_exit(const Error& e);

}  // namespace turinglab
