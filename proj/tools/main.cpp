// turinglab: linear Turing-instability analysis and nonlinear verification of
// two-species reaction-diffusion systems on (0,pi)^d with Neumann walls.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "turinglab/driver.hpp"

using namespace turinglab;

int main(int argc, char** argv) {
    CLI::App app{"Turing instability laboratory for 2-species reaction-diffusion systems"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::string config_path, out_dir, model, profile;
    std::uint64_t seed = 0;
    bool seed_set = false, out_set = false, model_set = false, profile_set = false;
    double theta = 0.0, dt = 0.0, t_end = -1.0;
    bool theta_set = false, dt_set = false, t_end_set = false;
    std::vector<double> deltas;
    int grid_n = 0, grid_d = 0;

    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory")->each([&](const std::string&) {
        out_set = true;
    });
    app.add_option("--seed", seed, "seed for randomized fixtures")
        ->each([&](const std::string&) { seed_set = true; });
    app.add_option("--model", model, "built-in model name")
        ->each([&](const std::string&) { model_set = true; });
    app.add_option("--theta", theta, "escape amplitude theta")
        ->each([&](const std::string&) { theta_set = true; });
    app.add_option("--delta", deltas, "perturbation size(s) delta");
    app.add_option("--grid-n", grid_n, "points per axis");
    app.add_option("--grid-d", grid_d, "dimension (1..3)");
    app.add_option("--dt", dt, "time step")->each([&](const std::string&) {
        dt_set = true;
    });
    app.add_option("--t-end", t_end, "final time")->each([&](const std::string&) {
        t_end_set = true;
    });
    app.add_option("--profile", profile, "initial profile: mixed|pure_q0|zero")
        ->each([&](const std::string&) { profile_set = true; });

    auto* analyze = app.add_subcommand("analyze", "linear stability report");
    auto* scan = app.add_subcommand("scan", "parameter sweep");
    auto* simulate = app.add_subcommand("simulate", "nonlinear time integration");
    auto* verify = app.add_subcommand("verify", "escape-time deviation experiment");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        CliOverrides o;
        if (model_set) o.model = model;
        if (out_set) o.out_dir = out_dir;
        if (seed_set) o.seed = seed;
        if (theta_set) o.theta = theta;
        if (!deltas.empty()) o.deltas = deltas;
        if (grid_n > 0) o.grid_n = grid_n;
        if (grid_d > 0) o.grid_d = grid_d;
        if (dt_set) o.dt = dt;
        if (t_end_set) o.t_end = t_end;
        if (profile_set) o.profile = profile;
        apply_overrides(cfg, o);

        if (analyze->parsed()) return cmd_analyze(cfg);
        if (scan->parsed()) return cmd_scan(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
