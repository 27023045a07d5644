#include "turinglab/config.hpp"

#include <fstream>

#include "json.hpp"
#include "turinglab/errors.hpp"

namespace turinglab {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* section, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field ") + section + "." + key + ": " +
                          e.what());
    }
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }

    RunConfig cfg;
    if (j.contains("model")) {
        const auto& m = j["model"];
        read_field(m, "model", "name", cfg.model.name);
        read_field(m, "model", "derivative_mode", cfg.model.derivative_mode);
        read_field(m, "model", "eta", cfg.model.eta);
        if (m.contains("params")) {
            if (!m["params"].is_object())
                throw ConfigError("config field model.params: expected an object");
            for (auto it = m["params"].begin(); it != m["params"].end(); ++it) {
                if (!it.value().is_number())
                    throw ConfigError("config field model.params." + it.key() +
                                      ": expected a number");
                cfg.model.params[it.key()] = it.value().get<double>();
            }
        }
        if (m.contains("guess")) {
            std::vector<double> g;
            read_field(m, "model", "guess", g);
            if (g.size() != 2)
                throw ConfigError("config field model.guess: expected two numbers");
            cfg.model.guess = {g[0], g[1]};
        }
    }
    if (j.contains("grid")) {
        read_field(j["grid"], "grid", "d", cfg.grid.d);
        read_field(j["grid"], "grid", "n", cfg.grid.n);
    }
    if (j.contains("simulation")) {
        const auto& s = j["simulation"];
        read_field(s, "simulation", "dt", cfg.sim.dt);
        read_field(s, "simulation", "t_end", cfg.sim.t_end);
        read_field(s, "simulation", "scheme", cfg.sim.scheme);
        read_field(s, "simulation", "mode", cfg.sim.mode);
        read_field(s, "simulation", "snapshot_stride", cfg.sim.snapshot_stride);
        read_field(s, "simulation", "dealias", cfg.sim.dealias);
    }
    if (j.contains("initial")) {
        read_field(j["initial"], "initial", "profile", cfg.initial.profile);
        read_field(j["initial"], "initial", "delta", cfg.initial.delta);
    }
    if (j.contains("experiment")) {
        const auto& e = j["experiment"];
        read_field(e, "experiment", "theta", cfg.experiment.theta);
        read_field(e, "experiment", "deltas", cfg.experiment.deltas);
        read_field(e, "experiment", "epsilon_frac", cfg.experiment.epsilon_frac);
        read_field(e, "experiment", "samples", cfg.experiment.samples);
        read_field(e, "experiment", "growth_trials", cfg.experiment.growth_trials);
        read_field(e, "experiment", "growth_t_max", cfg.experiment.growth_t_max);
    }
    if (j.contains("scan")) {
        const auto& s = j["scan"];
        if (s.contains("parameters")) {
            if (!s["parameters"].is_object())
                throw ConfigError("config field scan.parameters: expected an object");
            for (auto it = s["parameters"].begin(); it != s["parameters"].end(); ++it) {
                std::vector<double> vals;
                try {
                    vals = it.value().get<std::vector<double>>();
                } catch (const json::exception&) {
                    throw ConfigError("config field scan.parameters." + it.key() +
                                      ": expected a list of numbers");
                }
                cfg.scan.parameters.emplace_back(it.key(), std::move(vals));
            }
        }
    }
    if (j.contains("dispersion")) {
        read_field(j["dispersion"], "dispersion", "k_max", cfg.dispersion.k_max);
        read_field(j["dispersion"], "dispersion", "points", cfg.dispersion.points);
    }
    read_field(j, "", "out_dir", cfg.out_dir);
    read_field(j, "", "seed", cfg.seed);
    read_field(j, "", "threads", cfg.threads);
    return cfg;
}

void apply_overrides(RunConfig& cfg, const CliOverrides& o) {
    if (o.model) cfg.model.name = *o.model;
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.seed) cfg.seed = *o.seed;
    if (o.theta) cfg.experiment.theta = *o.theta;
    if (o.deltas) cfg.experiment.deltas = *o.deltas;
    if (o.grid_n) cfg.grid.n = *o.grid_n;
    if (o.grid_d) cfg.grid.d = *o.grid_d;
    if (o.dt) cfg.sim.dt = *o.dt;
    if (o.t_end) cfg.sim.t_end = *o.t_end;
    if (o.profile) cfg.initial.profile = *o.profile;
}

}  // namespace turinglab
