#include "turinglab/verification.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <thread>

namespace turinglab {

double escape_time(double delta, double theta, double lambda_max) {
    if (!(lambda_max > 0.0)) throw Error("escape_time: lambda_max must be positive");
    if (!(delta > 0.0)) throw Error("escape_time: delta must be positive");
    if (delta > theta) throw BadOrderError("escape_time: delta exceeds theta");
    return std::log(theta / delta) / lambda_max;
}

Eigen::ArrayXXd dominant_mode_prediction(const EigenCoordinates& coords,
                                         const ModeSpectrum& spectrum,
                                         const GrowingModeSummary& summary,
                                         double t) {
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(coords.coords.rows(), 2);
    const double gain = std::exp(summary.lambda_max * t);
    for (const ModeIndex& q : summary.omega_max) {
        const int i = flat_index(spectrum.grid, q);
        const ModeEigenData& e = spectrum.modes[i];
        const Eigen::Vector2d part = coords.coords(i, 1) * gain * e.r_plus;
        out(i, 0) = part[0];
        out(i, 1) = part[1];
    }
    return out;
}

ProfileKind profile_from_string(const std::string& s) {
    if (s == "mixed") return ProfileKind::mixed;
    if (s == "pure_q0") return ProfileKind::pure_q0;
    if (s == "zero") return ProfileKind::zero;
    throw ConfigError("unknown profile: " + s);
}

const char* to_string(ProfileKind p) {
    switch (p) {
        case ProfileKind::mixed: return "mixed";
        case ProfileKind::pure_q0: return "pure_q0";
        default: return "zero";
    }
}

Eigen::ArrayXXd build_profile(ProfileKind kind, const ModeSpectrum& spectrum,
                              const GrowingModeSummary& summary) {
    const Grid& grid = spectrum.grid;
    Eigen::ArrayXXd w = Eigen::ArrayXXd::Zero(grid.num_cells(), 2);
    if (kind == ProfileKind::zero) return w;

    const ModeIndex q0 = summary.omega_max.front();
    const int i0 = flat_index(grid, q0);
    const ModeEigenData& e0 = spectrum.modes[i0];

    auto set_mode = [&](int i, const Eigen::Vector2d& c) {
        w(i, 0) = c[0];
        w(i, 1) = c[1];
    };

    if (kind == ProfileKind::pure_q0) {
        set_mode(i0, e0.r_plus / e0.r_plus.norm());
    } else {
        // Dominant component along r_plus(q0), a small stable-direction part,
        // and low-mode clutter so the expansion exercises several blocks. The
        // off-dominant mass is kept small; the deviation it feeds decays like
        // the gap term of the bound and would otherwise mask the saturation
        // scale the escape-time study measures.
        Eigen::Vector2d c0 = 0.95 * e0.r_plus / e0.r_plus.norm();
        if (e0.cls == ModeClass::generic) c0 += 0.03 * e0.r_minus / e0.r_minus.norm();
        set_mode(i0, c0);

        std::vector<Eigen::Vector2d> extras = {{0.02, -0.015}, {0.10, 0.07},
                                               {-0.06, 0.03}, {0.03, -0.03}};
        std::size_t used = 0;
        for (const ModeIndex& m : enumerate_modes_up_to(grid.d, 16)) {
            if (used == extras.size()) break;
            const int i = flat_index(grid, m);
            if (i == i0) continue;
            set_mode(i, extras[used++]);
        }
    }

    const double norm = l2_norm(grid, w);
    if (!(norm > 0.0)) throw Error("build_profile: empty profile");
    return w / norm;
}

namespace {

void check_band_limit(const Grid& grid, const Eigen::ArrayXXd& w0) {
    const int cap = grid.n / 2;
    for (int i = 0; i < w0.rows(); ++i) {
        if (w0(i, 0) == 0.0 && w0(i, 1) == 0.0) continue;
        const ModeIndex m = mode_at(grid, i);
        for (int a = 0; a < grid.d; ++a)
            if (m.q[a] > cap)
                throw ConfigError(
                    "initial data must be band-limited to q_i <= n/2; found mode past the cap");
    }
}

DeltaReport run_one_delta(const ExperimentSpec& spec, const SimulationConfig& cfg,
                          const ModeSpectrum& spectrum, const GrowingModeSummary& summary,
                          const Eigen::ArrayXXd& w0, double w0_h2, double delta) {
    DeltaReport rep;
    rep.delta = delta;
    rep.w0_h2 = w0_h2;
    rep.t_escape = escape_time(delta, spec.theta, summary.lambda_max);

    const int n_steps =
        rep.t_escape > 0.0
            ? std::max(1, static_cast<int>(std::ceil(rep.t_escape / cfg.dt - 1e-9)))
            : 0;
    SimulationConfig c2 = cfg;
    c2.dt = n_steps > 0 ? rep.t_escape / n_steps : cfg.dt;
    rep.dt_used = c2.dt;

    std::set<int> sample_steps;
    const int nsamp = std::max(2, spec.samples);
    for (int s = 0; s < nsamp; ++s)
        sample_steps.insert(
            static_cast<int>(std::llround(double(s) * n_steps / double(nsamp - 1))));

    const Eigen::ArrayXXd w_init = (delta * w0).eval();
    const EigenCoordinates coords0 = eigen_decompose(w_init, spectrum);
    const Grid& grid = spectrum.grid;

    auto record = [&](const Stepper& st) {
        DeviationSample s;
        s.t = st.time();
        const Eigen::ArrayXXd pred =
            dominant_mode_prediction(coords0, spectrum, summary, s.t);
        s.dev = l2_norm(grid, st.coeffs() - pred);
        const double gain = delta * std::exp(summary.lambda_max * s.t);
        s.bound = (std::exp(-summary.nu * s.t) + delta * w0_h2 * w0_h2 + gain) * gain;
        s.ratio = s.dev / s.bound;
        s.l2 = l2_norm(grid, st.coeffs());
        s.h2 = h2_norm(grid, st.coeffs());
        rep.samples.push_back(s);
    };

    try {
        Stepper st(spec.system, spec.lin, c2, w_init);
        if (sample_steps.count(0)) record(st);
        for (int s = 1; s <= n_steps; ++s) {
            st.advance();
            if (sample_steps.count(s)) record(st);
        }
        rep.completed = true;
    } catch (const ValidityExceededError& e) {
        rep.halt = HaltReason::validity_exceeded;
        rep.error = e.what();
    } catch (const NonFiniteError& e) {
        rep.halt = HaltReason::non_finite;
        rep.error = e.what();
    } catch (const Error& e) {
        rep.error = e.what();
    }

    if (!rep.samples.empty()) {
        rep.final_l2 = rep.samples.back().l2;
        rep.instability_flag =
            rep.completed && rep.final_l2 >= spec.theta / 2.0;
        const double t_lo = spec.epsilon_frac * rep.t_escape - 1e-12;
        for (const auto& s : rep.samples)
            if (s.t >= t_lo) rep.max_ratio_window = std::max(rep.max_ratio_window, s.ratio);
    }
    return rep;
}

}  // namespace

DeviationReport run_escape_time_experiment(const ExperimentSpec& spec,
                                       const SimulationConfig& cfg, int max_threads) {
    if (!(spec.theta > 0.0 && spec.theta < 1.0))
        throw ConfigError("experiment: theta must lie in (0,1)");
    if (!(spec.epsilon_frac > 0.0 && spec.epsilon_frac < 1.0))
        throw ConfigError("experiment: epsilon_frac must lie in (0,1)");
    if (spec.deltas.empty()) throw ConfigError("experiment: delta list is empty");

    const GrowingModeSummary summary = growing_mode_summary(spec.lin, cfg.grid.d);
    const ModeSpectrum spectrum = build_mode_spectrum(spec.lin, cfg.grid);

    // Validates the ordering for every delta before any simulation starts.
    for (double d : spec.deltas) escape_time(d, spec.theta, summary.lambda_max);

    Eigen::ArrayXXd w0 = spec.w0.size() > 0
                             ? spec.w0
                             : build_profile(spec.profile, spectrum, summary);
    const double norm = l2_norm(cfg.grid, w0);
    if (std::abs(norm - 1.0) > 1e-10)
        throw ConfigError("experiment: initial profile must have unit L2 norm");
    check_band_limit(cfg.grid, w0);
    const double w0_h2 = h2_norm(cfg.grid, w0);

    DeviationReport report;
    report.theta = spec.theta;
    report.epsilon_frac = spec.epsilon_frac;
    report.lambda_max = summary.lambda_max;
    report.nu = summary.nu;
    report.profile = spec.profile;
    report.mode = cfg.mode;
    report.per_delta.resize(spec.deltas.size());

    int threads = max_threads > 0 ? max_threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(spec.deltas.size())));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= spec.deltas.size()) return;
            report.per_delta[i] = run_one_delta(spec, cfg, spectrum, summary, w0, w0_h2,
                                                spec.deltas[i]);
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return report;
}

ScalingSummary scaling_study(const DeviationReport& report) {
    std::vector<const DeltaReport*> done;
    for (const auto& r : report.per_delta)
        if (r.completed) done.push_back(&r);
    if (done.size() < 3)
        throw InsufficientDataError("scaling_study: need at least 3 completed deltas");
    double dmin = done.front()->delta, dmax = done.front()->delta;
    for (const auto* r : done) {
        dmin = std::min(dmin, r->delta);
        dmax = std::max(dmax, r->delta);
    }
    if (dmax / dmin < 99.999)
        throw InsufficientDataError("scaling_study: deltas must span at least 2 decades");

    ScalingSummary s;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto* r : done) {
        ScalingRow row;
        row.delta = r->delta;
        row.max_ratio_window = r->max_ratio_window;
        row.dev_final = r->samples.empty() ? 0.0 : r->samples.back().dev;
        row.envelope = std::pow(r->delta, report.nu / report.lambda_max) +
                       report.theta * report.theta;
        s.rows.push_back(row);
        lo = std::min(lo, r->max_ratio_window);
        hi = std::max(hi, r->max_ratio_window);
    }
    std::sort(s.rows.begin(), s.rows.end(),
              [](const ScalingRow& a, const ScalingRow& b) { return a.delta > b.delta; });
    s.c_fit = hi;
    s.stability_factor = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    s.bounded = std::isfinite(hi);
    s.stable_within_factor3 = s.bounded && s.stability_factor <= 3.0;
    s.dev_monotone = true;
    for (std::size_t i = 1; i < s.rows.size(); ++i)
        if (s.rows[i].dev_final > s.rows[i - 1].dev_final * 1.05) s.dev_monotone = false;
    return s;
}

double decay_term_fit(const DeviationReport& report, const DeltaReport& dr,
                      double floor) {
    double c = 0.0;
    const double t_lo = report.epsilon_frac * dr.t_escape - 1e-12;
    for (const auto& s : dr.samples) {
        if (s.t < t_lo) continue;
        const double denom = (std::exp(-report.nu * s.t) + floor) * dr.delta *
                             std::exp(report.lambda_max * s.t);
        c = std::max(c, s.dev / denom);
    }
    return c;
}

double bootstrap_constant_c2(const Linearization& lin) {
    const double gv = lin.A(1, 1);
    if (gv >= 0.0)
        throw NonNegativeGvError("bootstrap_constant_c2: requires g_v < 0");
    const double fv = lin.A(0, 1), gu = lin.A(1, 0), fu = lin.A(0, 0);
    const double base = (fv + gu) * (fv + gu) / (2.0 * std::abs(gv)) + fu;
    return base * base * base / (lin.d1bar * lin.d1bar);
}

double growth_bound_fit(const Linearization& lin, const GrowingModeSummary& summary,
                        int trials, const std::vector<double>& t_grid,
                        std::uint64_t seed) {
    if (summary.omega_max.empty()) throw Error("growth_bound_fit: summary is empty");
    const int d = summary.omega_max.front().d;

    // Candidate q^2 values: everything the gap scan covered, extended a little
    // so the decaying far band is represented too.
    std::set<int> q2s;
    for (const ModeIndex& m : enumerate_modes_up_to(d, std::max(summary.k_scan, 66)))
        q2s.insert(m.q2);
    std::vector<int> ks(q2s.begin(), q2s.end());

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, ks.size() - 1);
    const double pi = 3.14159265358979323846;
    std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);

    // Each trial spans a fan of unit coefficient sets on its drawn mode, so a
    // visited mode contributes its worst direction up to the fan resolution
    // and the fitted maximum saturates instead of chasing angle luck.
    constexpr int kFan = 32;
    double best = 0.0;
    for (int tr = 0; tr < trials; ++tr) {
        const double k = double(ks[pick(rng)]);
        const double phi0 = angle(rng);
        for (double t : t_grid) {
            const Eigen::Matrix2d P =
                mode_propagator(lin, k, t) / std::exp(summary.lambda_max * t);
            for (int j = 0; j < kFan; ++j) {
                const double phi = phi0 + j * pi / kFan;
                best = std::max(
                    best, (P * Eigen::Vector2d(std::cos(phi), std::sin(phi))).norm());
            }
        }
    }
    return best;
}

}  // namespace turinglab
