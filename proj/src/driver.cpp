#include "turinglab/driver.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "turinglab/io.hpp"

namespace turinglab {

namespace fs = std::filesystem;

ReactionSystem system_from_config(const ModelConfig& m) {
    Eigen::Vector2d guess;
    const Eigen::Vector2d* gp = nullptr;
    if (m.guess) {
        guess = {(*m.guess)[0], (*m.guess)[1]};
        gp = &guess;
    }
    auto params = m.params;
    params.emplace("eta", m.eta);
    ReactionSystem sys = make_builtin_model(m.name, params, gp);
    if (m.derivative_mode == "numeric")
        sys.derivative_mode = DerivativeMode::numeric;
    else if (m.derivative_mode != "analytic")
        throw ConfigError("model.derivative_mode must be 'analytic' or 'numeric'");
    return sys;
}

SimulationConfig sim_from_config(const RunConfig& cfg) {
    SimulationConfig s;
    s.grid = make_grid(cfg.grid.d, cfg.grid.n);
    s.dt = cfg.sim.dt;
    s.t_end = cfg.sim.t_end;
    if (cfg.sim.scheme == "imex_cn_ab2")
        s.scheme = TimeScheme::imex_cn_ab2;
    else if (cfg.sim.scheme == "explicit_rk4")
        s.scheme = TimeScheme::explicit_rk4;
    else
        throw ConfigError("simulation.scheme must be 'imex_cn_ab2' or 'explicit_rk4'");
    if (cfg.sim.mode == "nonlinear")
        s.mode = SimMode::nonlinear;
    else if (cfg.sim.mode == "linear_only")
        s.mode = SimMode::linear_only;
    else
        throw ConfigError("simulation.mode must be 'nonlinear' or 'linear_only'");
    s.snapshot_stride = cfg.sim.snapshot_stride;
    s.dealias = cfg.sim.dealias;
    return s;
}

int effective_threads(const RunConfig& cfg) {
    int t = cfg.threads > 0 ? cfg.threads
                            : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    if (const char* env = std::getenv("TURING_LAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) t = std::min(t, cap);
    }
    return t;
}

int classify_exit(const Error& e) {
    if (dynamic_cast<const ValidityExceededError*>(&e) ||
        dynamic_cast<const NonFiniteError*>(&e) ||
        dynamic_cast<const InsufficientDataError*>(&e))
        return 2;
    return 1;
}

namespace {

std::string mode_label(const ModeIndex& m) {
    std::string s = "(";
    for (int i = 0; i < m.d; ++i) s += (i ? "," : "") + std::to_string(m.q[i]);
    return s + ")";
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + dir);
}

std::vector<std::string> q_header(int d) {
    std::vector<std::string> h;
    for (int i = 0; i < d; ++i) h.push_back("q" + std::to_string(i + 1));
    return h;
}

void write_deviation_csv(const fs::path& path, const DeviationReport& rep) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& dr : rep.per_delta)
        for (const auto& s : dr.samples)
            rows.push_back({format_double(dr.delta), format_double(s.t),
                            format_double(s.dev), format_double(s.bound),
                            format_double(s.ratio), format_double(s.l2),
                            format_double(s.h2)});
    write_csv(path, {"delta", "t", "dev", "bound", "ratio", "l2", "h2"}, rows);
}

}  // namespace

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

int cmd_analyze(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir);
    const ReactionSystem sys = system_from_config(cfg.model);
    const Linearization lin = linearize(sys);
    const int d = cfg.grid.d;

    std::ostringstream rep;
    rep << "model: " << sys.name << "\n";
    rep << "steady_state: (" << format_double(sys.steady_state[0]) << ", "
        << format_double(sys.steady_state[1]) << ")\n";
    rep << "jacobian: [" << format_double(lin.A(0, 0)) << ", " << format_double(lin.A(0, 1))
        << "; " << format_double(lin.A(1, 0)) << ", " << format_double(lin.A(1, 1))
        << "]\n";
    rep << "diffusivities: (" << format_double(lin.d1bar) << ", "
        << format_double(lin.d2bar) << ")\n";
    rep << "trace: " << format_double(lin.A.trace())
        << "  det: " << format_double(lin.A.determinant()) << "\n";

    const bool rest = rest_state_stable(lin);
    rep << "rest_stable: " << (rest ? "true" : "false") << "\n";
    rep << "sign_pattern: " << to_string(classify_sign_pattern(lin)) << "\n";

    const RangeDiagnostics rd = range_condition_diagnostics(lin);
    rep << "range_lhs: " << format_double(rd.lhs) << "\n";
    rep << "range_rhs_det_variant: " << format_double(rd.rhs_det) << " holds: "
        << (rd.holds_det_variant ? "true" : "false") << "\n";
    rep << "range_rhs_sqrt_variant: " << format_double(rd.rhs_sqrt_det) << " holds: "
        << (rd.holds_sqrt_variant ? "true" : "false") << "\n";

    double k_max_curve = cfg.dispersion.k_max;
    bool unstable = false;
    if (rest) {
        const TuringWitness w = has_turing_instability(lin, d);
        unstable = w.unstable;
        rep << "turing_unstable: " << (w.unstable ? "true" : "false") << "\n";
        if (w.has_real_roots) {
            rep << "instability_interval: (" << format_double(w.k_minus) << ", "
                << format_double(w.k_plus) << ")\n";
            if (k_max_curve <= 0.0) k_max_curve = std::ceil(w.k_plus) + 1.0;
        }
        rep << "witness_q2:";
        for (int s : w.q_squared) rep << " " << s;
        rep << "\n";

        if (w.unstable) {
            const GrowingModeSummary sum = growing_mode_summary(lin, d);
            rep << "lambda_max: " << format_double(sum.lambda_max) << "\n";
            rep << "omega_max:";
            for (const auto& m : sum.omega_max) rep << " " << mode_label(m);
            rep << "\n";
            rep << "growing:";
            for (const auto& m : sum.growing) rep << " " << mode_label(m);
            rep << "\n";
            rep << "nu: " << format_double(sum.nu) << "\n";
            rep << "k_cut: " << sum.k_cut << "\n";

            std::vector<std::vector<std::string>> rows;
            for (const auto& m : enumerate_modes_up_to(d, sum.k_cut)) {
                const ModeEigenData e = dispersion_eigen(lin, m);
                std::vector<std::string> row;
                for (int i = 0; i < d; ++i) row.push_back(std::to_string(m.q[i]));
                if (e.cls == ModeClass::complex_pair) {
                    row.push_back(format_double(e.lambda_plus));
                    row.push_back(format_double(e.lambda_plus));
                    row.push_back(format_double(e.lambda_minus));
                } else {
                    row.push_back(format_double(e.lambda_plus));
                    row.push_back(format_double(e.lambda_minus));
                    row.push_back(format_double(0.0));
                }
                row.push_back(to_string(e.cls));
                rows.push_back(std::move(row));
            }
            auto header = q_header(d);
            for (const char* c : {"re_lambda_plus", "re_lambda_minus", "im_lambda", "class"})
                header.push_back(c);
            write_csv(fs::path(cfg.out_dir) / "modes.csv", header, rows);
        }
    } else {
        rep << "turing_unstable: false\n";
    }

    if (k_max_curve <= 0.0) k_max_curve = 8.0;
    const int npts = std::max(2, cfg.dispersion.points);
    std::vector<double> ks(npts);
    for (int i = 0; i < npts; ++i) ks[i] = k_max_curve * i / (npts - 1);
    std::vector<std::vector<std::string>> crows;
    for (const DispersionRow& r : dispersion_curve(lin, ks))
        crows.push_back({format_double(r.k), format_double(r.re_lambda_plus),
                         format_double(r.re_lambda_minus), format_double(r.im_lambda),
                         to_string(r.cls)});
    write_csv(fs::path(cfg.out_dir) / "dispersion.csv",
              {"k", "re_lambda_plus", "re_lambda_minus", "im_lambda", "class"}, crows);

    std::ofstream txt(fs::path(cfg.out_dir) / "analysis.txt", std::ios::binary);
    txt << rep.str();
    std::cout << rep.str();
    (void)unstable;
    return 0;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

int cmd_scan(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir);

    std::vector<std::string> header;
    for (const auto& [name, vals] : cfg.scan.parameters) {
        (void)vals;
        header.push_back(name);
    }
    for (const char* c : {"rest_stable", "turing_unstable", "lambda_max", "omega_max_size"})
        header.push_back(c);

    std::vector<std::vector<std::string>> rows;
    const auto& params = cfg.scan.parameters;
    bool grid_nonempty = !params.empty();
    for (const auto& [name, vals] : params) {
        (void)name;
        grid_nonempty = grid_nonempty && !vals.empty();
    }
    if (grid_nonempty) {
        std::vector<std::size_t> idx(params.size(), 0);
        for (;;) {
            ModelConfig m = cfg.model;
            std::vector<std::string> row;
            for (std::size_t i = 0; i < params.size(); ++i) {
                const double v = params[i].second[idx[i]];
                m.params[params[i].first] = v;
                row.push_back(format_double(v));
            }

            const ReactionSystem sys = system_from_config(m);
            const Linearization lin = linearize(sys);
            const bool rest = rest_state_stable(lin);
            bool unstable = false;
            std::string lmax, omax = "0";
            if (rest && lin.d1bar != lin.d2bar) {
                const TuringWitness w = has_turing_instability(lin, cfg.grid.d);
                unstable = w.unstable;
                if (unstable) {
                    const GrowingModeSummary sum = growing_mode_summary(lin, cfg.grid.d);
                    lmax = format_double(sum.lambda_max);
                    omax = std::to_string(sum.omega_max.size());
                }
            }
            row.push_back(rest ? "true" : "false");
            row.push_back(unstable ? "true" : "false");
            row.push_back(lmax);
            row.push_back(unstable ? omax : "0");
            rows.push_back(std::move(row));

            // advance the cartesian-product counter
            std::size_t k = params.size();
            while (k > 0) {
                --k;
                if (++idx[k] < params[k].second.size()) break;
                idx[k] = 0;
                if (k == 0) goto done;
            }
        }
    }
done:
    write_csv(fs::path(cfg.out_dir) / "scan.csv", header, rows);
    std::cout << "scan: " << rows.size() << " points -> "
              << (fs::path(cfg.out_dir) / "scan.csv").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir);
    const ReactionSystem sys = system_from_config(cfg.model);
    const Linearization lin = linearize(sys);
    SimulationConfig sim = sim_from_config(cfg);

    const CosineTransform tf(sim.grid);
    Eigen::ArrayXXd w0;
    std::vector<int> dominant;
    const ProfileKind kind = profile_from_string(cfg.initial.profile);
    if (kind == ProfileKind::zero) {
        w0 = Eigen::ArrayXXd::Zero(sim.grid.num_cells(), 2);
    } else {
        const GrowingModeSummary sum = growing_mode_summary(lin, sim.grid.d);
        const ModeSpectrum spec = build_mode_spectrum(lin, sim.grid);
        w0 = cfg.initial.delta * build_profile(kind, spec, sum);
        for (const auto& m : sum.omega_max) dominant.push_back(flat_index(sim.grid, m));
    }

    const Trajectory traj = run(field_from_coeffs(tf, w0), lin, sys, sim, dominant);

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : traj.diagnostics)
        rows.push_back({format_double(r.t), format_double(r.l2), format_double(r.h2),
                        format_double(r.max_abs), format_double(r.dominant_amp)});
    write_csv(fs::path(cfg.out_dir) / "diagnostics.csv",
              {"t", "l2", "h2", "max_abs", "dominant_amp"}, rows);

    char name[32];
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        std::snprintf(name, sizeof(name), "snap_%06zu.turf", i);
        write_snapshot(fs::path(cfg.out_dir) / name, traj.snapshots[i].field,
                       traj.snapshots[i].t);
    }

    std::cout << "simulate: " << traj.steps << " steps, dt=" << format_double(traj.dt_used)
              << ", halt=" << to_string(traj.halt) << ", snapshots="
              << traj.snapshots.size() << "\n";
    if (traj.resolution_warning)
        std::cout << "warning: top third of the mode band exceeded 1% of the energy\n";
    if (traj.halt != HaltReason::completed) {
        std::cout << "halt detail: " << traj.halt_message << "\n";
        return 2;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

VerifyOutcome run_verify_pipeline(const RunConfig& cfg) {
    const ReactionSystem sys = system_from_config(cfg.model);
    const Linearization lin = linearize(sys);
    SimulationConfig sim = sim_from_config(cfg);
    const int threads = effective_threads(cfg);

    ExperimentSpec spec;
    spec.system = sys;
    spec.lin = lin;
    spec.theta = cfg.experiment.theta;
    spec.deltas = cfg.experiment.deltas;
    spec.epsilon_frac = cfg.experiment.epsilon_frac;
    spec.samples = cfg.experiment.samples;

    VerifyOutcome out;

    spec.profile = ProfileKind::mixed;
    sim.mode = SimMode::nonlinear;
    out.nonlinear = run_escape_time_experiment(spec, sim, threads);
    sim.mode = SimMode::linear_only;
    out.linear = run_escape_time_experiment(spec, sim, threads);
    spec.profile = ProfileKind::pure_q0;
    sim.mode = SimMode::nonlinear;
    out.pure = run_escape_time_experiment(spec, sim, threads);

    out.scaling = scaling_study(out.nonlinear);

    // Decay-only deviation fit for the linear variant; the floor absorbs the
    // integrator tolerance where the true deviation underflows it.
    out.linear_fit_min = std::numeric_limits<double>::infinity();
    out.linear_fit_max = 0.0;
    for (const auto& dr : out.linear.per_delta) {
        if (!dr.completed) continue;
        const double c = decay_term_fit(out.linear, dr, 1e-6);
        out.linear_fit_min = std::min(out.linear_fit_min, c);
        out.linear_fit_max = std::max(out.linear_fit_max, c);
    }

    const GrowingModeSummary sum = growing_mode_summary(lin, sim.grid.d);
    std::vector<double> tgrid;
    for (double t = 0.0; t <= cfg.experiment.growth_t_max + 1e-9; t += 0.1)
        tgrid.push_back(t);
    out.c1 = growth_bound_fit(lin, sum, cfg.experiment.growth_trials, tgrid, cfg.seed);
    out.c1_doubled =
        growth_bound_fit(lin, sum, 2 * cfg.experiment.growth_trials, tgrid, cfg.seed);

    try {
        out.c2 = bootstrap_constant_c2(lin);
    } catch (const NonNegativeGvError&) {
        out.c2 = std::numeric_limits<double>::quiet_NaN();
    }

    bool pure_flags = !out.pure.per_delta.empty();
    for (const auto& dr : out.pure.per_delta)
        pure_flags = pure_flags && dr.completed && dr.instability_flag;

    bool all_completed = true;
    for (const auto* rep : {&out.nonlinear, &out.linear, &out.pure})
        for (const auto& dr : rep->per_delta) all_completed = all_completed && dr.completed;

    out.checks = {
        {"sweep_completed", all_completed},
        {"ratio_bounded", out.scaling.bounded},
        {"ratio_stable_factor3", out.scaling.stable_within_factor3},
        {"linear_collapse_stable",
         out.linear_fit_max < std::numeric_limits<double>::infinity() &&
             out.linear_fit_min > 0.0 && out.linear_fit_max / out.linear_fit_min <= 3.0},
        {"instability_flag_theta_half", pure_flags},
        {"growth_constant_valid",
         std::isfinite(out.c1) && out.c1 >= 1.0 &&
             std::abs(out.c1_doubled - out.c1) <= 0.01 * out.c1},
    };
    out.all_pass = true;
    for (const auto& [name, ok] : out.checks) {
        (void)name;
        out.all_pass = out.all_pass && ok;
    }
    return out;
}

int cmd_verify(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir);
    const VerifyOutcome out = run_verify_pipeline(cfg);

    write_deviation_csv(fs::path(cfg.out_dir) / "deviation_nonlinear.csv", out.nonlinear);
    write_deviation_csv(fs::path(cfg.out_dir) / "deviation_linear.csv", out.linear);
    write_deviation_csv(fs::path(cfg.out_dir) / "deviation_pure.csv", out.pure);

    std::vector<std::vector<std::string>> srows;
    for (const auto& r : out.scaling.rows)
        srows.push_back({format_double(r.delta), format_double(r.max_ratio_window),
                         format_double(r.dev_final), format_double(r.envelope)});
    write_csv(fs::path(cfg.out_dir) / "scaling.csv",
              {"delta", "max_ratio_window", "dev_final", "envelope"}, srows);

    std::ostringstream rep;
    rep << "theta: " << format_double(out.nonlinear.theta) << "\n";
    rep << "lambda_max: " << format_double(out.nonlinear.lambda_max) << "\n";
    rep << "nu: " << format_double(out.nonlinear.nu) << "\n";
    rep << "c_fit: " << format_double(out.scaling.c_fit) << "\n";
    rep << "ratio_stability_factor: " << format_double(out.scaling.stability_factor)
        << "\n";
    rep << "dev_final_monotone: " << (out.scaling.dev_monotone ? "true" : "false") << "\n";
    rep << "linear_decay_fit: [" << format_double(out.linear_fit_min) << ", "
        << format_double(out.linear_fit_max) << "]\n";
    rep << "growth_constant_c1: " << format_double(out.c1) << " (doubled trials: "
        << format_double(out.c1_doubled) << ")\n";
    rep << "bootstrap_c2: " << format_double(out.c2) << "\n";
    for (const auto& dr : out.pure.per_delta)
        rep << "final_norm delta=" << format_double(dr.delta) << ": "
            << format_double(dr.final_l2) << " flag_theta_half: "
            << (dr.instability_flag ? "true" : "false") << "\n";
    for (const auto& [name, ok] : out.checks)
        rep << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";

    std::ofstream txt(fs::path(cfg.out_dir) / "verify_summary.txt", std::ios::binary);
    txt << rep.str();
    std::cout << rep.str();
    return out.all_pass ? 0 : 3;
}

}  // namespace turinglab
