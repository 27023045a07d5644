// End-to-end checks of the installed command-line tool: exit codes, emitted
// files, and byte-level determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    auto p = fs::temp_directory_path() / "turinglab_cli_test";
    fs::create_directories(p);
    return p;
}

int run_cli(const string& args) {
    const string cmd = string(TURINGLAB_CLI_PATH) + " " + args + " > " +
                       (work_dir() / "stdout.txt").string() + " 2> " +
                       (work_dir() / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const string& text) {
    std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("analyze on the benchmark model") {
    const fs::path out = work_dir() / "analyze_out";
    fs::remove_all(out);
    const int rc = run_cli("analyze --model benchmark --out " + out.string());
    CHECK(rc == 0);
    CHECK(fs::exists(out / "analysis.txt"));
    CHECK(fs::exists(out / "dispersion.csv"));
    CHECK(fs::exists(out / "modes.csv"));
    const string rep = slurp(out / "analysis.txt");
    CHECK(rep.find("turing_unstable: true") != string::npos);
    CHECK(rep.find("lambda_max: 0.2526") != string::npos);
    CHECK(rep.find("omega_max: (1)") != string::npos);
    const string csv = slurp(out / "dispersion.csv");
    CHECK(csv.rfind("k,re_lambda_plus,re_lambda_minus,im_lambda,class", 0) == 0);
}

TEST_CASE("equal diffusivities give a clean nonzero exit") {
    const fs::path cfg = work_dir() / "equal.json";
    write_file(cfg, R"({"model": {"name": "benchmark",
                         "params": {"d1": 2.0, "d2": 2.0}}})");
    const int rc = run_cli("analyze --config " + cfg.string() + " --out " +
                           (work_dir() / "equal_out").string());
    CHECK(rc == 1);
    CHECK(slurp(work_dir() / "stderr.txt").find("error:") != string::npos);
}

TEST_CASE("unknown model name exits with a configuration error") {
    const int rc = run_cli("analyze --model not_a_model --out " +
                           (work_dir() / "x").string());
    CHECK(rc == 1);
}

TEST_CASE("scan over the diffusivity grid") {
    const fs::path cfg = work_dir() / "scan.json";
    write_file(cfg, R"({"model": {"name": "benchmark"},
                        "scan": {"parameters": {"d1": [0.5, 1.0], "d2": [20, 40]}}})");
    const fs::path out = work_dir() / "scan_out";
    const int rc = run_cli("scan --config " + cfg.string() + " --out " + out.string());
    CHECK(rc == 0);
    const string csv = slurp(out / "scan.csv");
    CHECK(csv.rfind("d1,d2,rest_stable,turing_unstable,lambda_max,omega_max_size", 0) ==
          0);
    // 4 data rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.find("0.5,20,true,true,0.2526") != string::npos);
    CHECK(csv.find("1,40,true,false,,0") != string::npos);
}

TEST_CASE("empty scan grid produces a header-only CSV") {
    const fs::path cfg = work_dir() / "scan_empty.json";
    write_file(cfg, R"({"model": {"name": "benchmark"}, "scan": {"parameters": {}}})");
    const fs::path out = work_dir() / "scan_empty_out";
    CHECK(run_cli("scan --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(slurp(out / "scan.csv") ==
          "rest_stable,turing_unstable,lambda_max,omega_max_size\n");
}

TEST_CASE("simulate with t_end = 0 writes only the initial snapshot") {
    const fs::path out = work_dir() / "sim0_out";
    fs::remove_all(out);
    const int rc = run_cli(
        "simulate --model benchmark --grid-n 32 --t-end 0 --profile pure_q0 --out " +
        out.string());
    CHECK(rc == 0);
    CHECK(fs::exists(out / "snap_000000.turf"));
    CHECK_FALSE(fs::exists(out / "snap_000001.turf"));
    const string diag = slurp(out / "diagnostics.csv");
    CHECK(std::count(diag.begin(), diag.end(), '\n') == 2);  // header + t=0
}

TEST_CASE("simulate emits snapshots and diagnostics") {
    const fs::path out = work_dir() / "sim_out";
    fs::remove_all(out);
    const int rc = run_cli(
        "simulate --model benchmark_cubic --grid-n 32 --dt 0.001 --t-end 0.2 "
        "--profile mixed --out " +
        out.string());
    CHECK(rc == 0);
    const string diag = slurp(out / "diagnostics.csv");
    CHECK(diag.rfind("t,l2,h2,max_abs,dominant_amp", 0) == 0);
    CHECK(std::count(diag.begin(), diag.end(), '\n') == 202);  // header + 201 steps
    CHECK(fs::exists(out / "snap_000002.turf"));
}

TEST_CASE("verify is deterministic byte for byte") {
    const fs::path cfg = work_dir() / "verify.json";
    write_file(cfg, R"({
      "model": {"name": "benchmark_cubic"},
      "grid": {"d": 1, "n": 32},
      "simulation": {"dt": 0.002},
      "experiment": {"theta": 0.1, "deltas": [1e-2, 1e-3, 1e-4],
                      "samples": 50, "growth_trials": 100},
      "seed": 777
    })");
    const fs::path out1 = work_dir() / "verify1";
    const fs::path out2 = work_dir() / "verify2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    const int rc1 =
        run_cli("verify --config " + cfg.string() + " --out " + out1.string());
    const int rc2 =
        run_cli("verify --config " + cfg.string() + " --out " + out2.string());
    CHECK(rc1 == 0);
    CHECK(rc2 == 0);
    for (const char* name :
         {"deviation_nonlinear.csv", "deviation_linear.csv", "deviation_pure.csv",
          "scaling.csv", "verify_summary.txt"}) {
        CAPTURE(name);
        CHECK(slurp(out1 / name) == slurp(out2 / name));
        CHECK_FALSE(slurp(out1 / name).empty());
    }
    const string summary = slurp(out1 / "verify_summary.txt");
    CHECK(summary.find("[PASS] ratio_stable_factor3") != string::npos);
    CHECK(summary.find("[PASS] instability_flag_theta_half") != string::npos);
    CHECK(summary.find("[FAIL]") == string::npos);
    const string dev = slurp(out1 / "deviation_nonlinear.csv");
    CHECK(dev.rfind("delta,t,dev,bound,ratio,l2,h2", 0) == 0);
}

TEST_CASE("a run leaving the validity radius exits with a numerical failure") {
    const fs::path cfg = work_dir() / "tight_eta.json";
    write_file(cfg, R"({"model": {"name": "benchmark_cubic", "eta": 0.001},
                        "grid": {"n": 32},
                        "simulation": {"dt": 0.001, "t_end": 40.0},
                        "initial": {"profile": "pure_q0", "delta": 0.0005}})");
    const int rc = run_cli("simulate --config " + cfg.string() + " --out " +
                           (work_dir() / "tight_eta_out").string());
    CHECK(rc == 2);
}

TEST_CASE("delta above theta exits with a model error") {
    const int rc = run_cli("verify --model benchmark_cubic --grid-n 32 "
                           "--theta 0.01 --delta 0.1 0.001 0.0001 --out " +
                           (work_dir() / "bad_delta").string());
    CHECK(rc == 1);
}
