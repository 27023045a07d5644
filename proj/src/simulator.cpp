#include "turinglab/simulator.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace turinglab {

namespace {
constexpr double kPi = std::numbers::pi;

// Spectral radius and most negative real part of a 2x2 block, without
// touching the eigenvector formula (valid for f_v = 0 as well).
struct BlockEigBounds {
    double rho = 0.0;
    double min_real = 0.0;
};

BlockEigBounds block_eig_bounds(const Eigen::Matrix2d& L) {
    const double p = -L.trace();
    const double c = L.determinant();
    const double disc = p * p - 4.0 * c;
    BlockEigBounds b;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double l1 = 0.5 * (-p + sq);
        const double l2 = 0.5 * (-p - sq);
        b.rho = std::max(std::abs(l1), std::abs(l2));
        b.min_real = std::min(l1, l2);
    } else {
        const double re = -0.5 * p;
        const double im = 0.5 * std::sqrt(-disc);
        b.rho = std::hypot(re, im);
        b.min_real = re;
    }
    return b;
}

Eigen::ArrayXXd apply_separable(const std::array<const Eigen::MatrixXd*, 3>& ms,
                                Eigen::ArrayXXd t, std::array<int, 3> dims, int d) {
    for (int ax = 0; ax < d; ++ax) {
        t = apply_axis(*ms[ax], t, dims, d, ax);
        dims[ax] = static_cast<int>(ms[ax]->rows());
    }
    return t;
}

}  // namespace

const char* to_string(HaltReason r) {
    switch (r) {
        case HaltReason::completed: return "completed";
        case HaltReason::validity_exceeded: return "validity_exceeded";
        default: return "non_finite";
    }
}

double max_timestep(const Linearization& lin, const SimulationConfig& cfg) {
    if (cfg.scheme == TimeScheme::imex_cn_ab2) {
        // The stiff constant part is implicit; the explicitly extrapolated
        // remainder carries the reaction scale.
        const double rho = block_eig_bounds(lin.A).rho;
        return rho > 0.0 ? 0.5 / rho : std::numeric_limits<double>::infinity();
    }
    const double k_max = double(cfg.grid.d) * double(cfg.grid.n - 1) * double(cfg.grid.n - 1);
    const double stiff = std::abs(block_eig_bounds(mode_matrix(lin, k_max)).min_real);
    return stiff > 0.0 ? 0.5 / stiff : std::numeric_limits<double>::infinity();
}

Stepper::Stepper(const ReactionSystem& system, const Linearization& lin,
                 const SimulationConfig& cfg, Eigen::ArrayXXd initial_coeffs,
                 std::vector<int> dominant_modes)
    : system_(system),
      lin_(lin),
      cfg_(cfg),
      grid_(make_grid(cfg.grid.d, cfg.grid.n)),
      coarse_(grid_),
      coeffs_(std::move(initial_coeffs)),
      dominant_modes_(std::move(dominant_modes)) {
    if (!(cfg_.dt > 0.0)) throw ConfigError("simulator: dt must be positive");
    const double dt_max = max_timestep(lin_, cfg_);
    if (cfg_.dt > dt_max)
        throw ConfigError("simulator: dt exceeds the stability bound " +
                          std::to_string(dt_max));
    if (coeffs_.rows() != grid_.num_cells() || coeffs_.cols() != 2)
        throw Error("simulator: initial coefficient shape does not match grid");

    dt_ = cfg_.dt;
    fine_n_ = cfg_.dealias ? 2 * grid_.n : grid_.n;
    fine_syn_ = cosine_synthesis_matrix(fine_n_, grid_.n);
    fine_ana_ = cosine_analysis_matrix(grid_.n, fine_n_);
    fine_grad_ = sine_gradient_matrix(fine_n_, grid_.n);
    fine_div_ = sine_divergence_matrix(grid_.n, fine_n_);

    mu_ = mode_weights(grid_);
    q2_ = mode_q2(grid_);
    h2w_.resize(mu_.size());
    for (int i = 0; i < mu_.size(); ++i) {
        const double k = q2_[i];
        h2w_[i] = mu_[i] * (1.0 + k + k * k);
    }

    const int cells = grid_.num_cells();
    imex_prop_.resize(cells);
    imex_solve_.resize(cells);
    lq_.resize(cells);
    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    for (int i = 0; i < cells; ++i) {
        const Eigen::Matrix2d L = mode_matrix(lin_, double(q2_[i]));
        lq_[i] = L;
        const Eigen::Matrix2d Mm = I - 0.5 * dt_ * L;
        const Eigen::Matrix2d Minv = Mm.inverse();
        imex_solve_[i] = Minv;
        imex_prop_[i] = Minv * (I + 0.5 * dt_ * L);
    }

    const int cut = (2 * grid_.n) / 3;
    top_band_mask_.resize(cells);
    for (int i = 0; i < cells; ++i) {
        const ModeIndex m = mode_at(grid_, i);
        bool top = false;
        for (int a = 0; a < grid_.d; ++a) top = top || (m.q[a] >= cut);
        top_band_mask_[i] = top ? 1.0 : 0.0;
    }
}

Eigen::ArrayXXd Stepper::values() const { return coarse_.synthesize(coeffs_); }

void Stepper::check_validity() const {
    if (!coeffs_.allFinite())
        throw NonFiniteError("simulator: state is not finite at t = " + std::to_string(t_));
    const double max_abs = values().abs().maxCoeff();
    if (max_abs > system_.eta)
        throw ValidityExceededError("simulator: |state| = " + std::to_string(max_abs) +
                                    " exceeds the validity radius " +
                                    std::to_string(system_.eta) + " at t = " +
                                    std::to_string(t_));
}

Eigen::ArrayXXd Stepper::nonlinear_remainder(const Eigen::ArrayXXd& w) const {
    const int d = grid_.d;
    std::array<int, 3> coarse_dims{grid_.n, grid_.n, grid_.n};

    // Pointwise data on the product grid (zero-padded when dealiasing).
    std::array<const Eigen::MatrixXd*, 3> syn_all{&fine_syn_, &fine_syn_, &fine_syn_};
    const Eigen::ArrayXXd vals = apply_separable(syn_all, w, coarse_dims, d);
    const int fcells = static_cast<int>(vals.rows());

    Eigen::ArrayXd d1v(fcells), d2v(fcells), fv(fcells), gv(fcells);
    const double ub = system_.steady_state[0];
    const double vb = system_.steady_state[1];
    for (int i = 0; i < fcells; ++i) {
        const double U = vals(i, 0) + ub;
        const double V = vals(i, 1) + vb;
        d1v[i] = system_.D1(U, V);
        d2v[i] = system_.D2(U, V);
        fv[i] = system_.f(U, V);
        gv[i] = system_.g(U, V);
    }

    // Divergence-form diffusion: per axis, differentiate (sine series on the
    // even extension), scale pointwise by D, differentiate back. The zero row
    // of the divergence map keeps the mean of each species exactly invariant.
    Eigen::ArrayXXd n_out = Eigen::ArrayXXd::Zero(w.rows(), 2);
    for (int ax = 0; ax < d; ++ax) {
        std::array<const Eigen::MatrixXd*, 3> grad_ms{&fine_syn_, &fine_syn_, &fine_syn_};
        grad_ms[ax] = &fine_grad_;
        Eigen::ArrayXXd grad = apply_separable(grad_ms, w, coarse_dims, d);
        grad.col(0) *= d1v;
        grad.col(1) *= d2v;
        std::array<const Eigen::MatrixXd*, 3> div_ms{&fine_ana_, &fine_ana_, &fine_ana_};
        div_ms[ax] = &fine_div_;
        std::array<int, 3> fine_dims{fine_n_, fine_n_, fine_n_};
        n_out += apply_separable(div_ms, grad, fine_dims, d);
    }
    // Subtract the frozen diffusion (coefficients of Dbar * Laplacian).
    for (int i = 0; i < w.rows(); ++i) {
        const double k = q2_[i];
        n_out(i, 0) += k * lin_.d1bar * w(i, 0);
        n_out(i, 1) += k * lin_.d2bar * w(i, 1);
    }

    // Kinetics minus the Jacobian part.
    Eigen::ArrayXXd fg(fcells, 2);
    fg.col(0) = fv;
    fg.col(1) = gv;
    std::array<const Eigen::MatrixXd*, 3> ana_all{&fine_ana_, &fine_ana_, &fine_ana_};
    std::array<int, 3> fine_dims{fine_n_, fine_n_, fine_n_};
    const Eigen::ArrayXXd fc = apply_separable(ana_all, fg, fine_dims, d);
    const auto& A = lin_.A;
    for (int i = 0; i < w.rows(); ++i) {
        n_out(i, 0) += fc(i, 0) - (A(0, 0) * w(i, 0) + A(0, 1) * w(i, 1));
        n_out(i, 1) += fc(i, 1) - (A(1, 0) * w(i, 0) + A(1, 1) * w(i, 1));
    }
    return n_out;
}

Eigen::ArrayXXd Stepper::rhs(const Eigen::ArrayXXd& w) const {
    Eigen::ArrayXXd out(w.rows(), 2);
    for (int i = 0; i < w.rows(); ++i) {
        const Eigen::Vector2d lw = lq_[i] * Eigen::Vector2d(w(i, 0), w(i, 1));
        out(i, 0) = lw[0];
        out(i, 1) = lw[1];
    }
    if (cfg_.mode == SimMode::nonlinear) out += nonlinear_remainder(w);
    return out;
}

void Stepper::advance() {
    check_validity();

    if (cfg_.scheme == TimeScheme::imex_cn_ab2) {
        Eigen::ArrayXXd combo;
        if (cfg_.mode == SimMode::nonlinear) {
            Eigen::ArrayXXd n_now = nonlinear_remainder(coeffs_);
            combo = have_prev_n_ ? (1.5 * n_now - 0.5 * prev_n_).eval() : n_now;
            prev_n_ = std::move(n_now);
            have_prev_n_ = true;
        }
        Eigen::ArrayXXd next(coeffs_.rows(), 2);
        for (int i = 0; i < coeffs_.rows(); ++i) {
            Eigen::Vector2d w(coeffs_(i, 0), coeffs_(i, 1));
            Eigen::Vector2d y = imex_prop_[i] * w;
            if (cfg_.mode == SimMode::nonlinear)
                y += dt_ * (imex_solve_[i] * Eigen::Vector2d(combo(i, 0), combo(i, 1)));
            next(i, 0) = y[0];
            next(i, 1) = y[1];
        }
        coeffs_ = std::move(next);
    } else {
        const Eigen::ArrayXXd k1 = rhs(coeffs_);
        const Eigen::ArrayXXd k2 = rhs(coeffs_ + 0.5 * dt_ * k1);
        const Eigen::ArrayXXd k3 = rhs(coeffs_ + 0.5 * dt_ * k2);
        const Eigen::ArrayXXd k4 = rhs(coeffs_ + dt_ * k3);
        coeffs_ += (dt_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    ++steps_;
    t_ = steps_ * dt_;
    if (!coeffs_.allFinite())
        throw NonFiniteError("simulator: state became non-finite at t = " +
                             std::to_string(t_));
}

DiagnosticsRow Stepper::diagnostics_row() const {
    DiagnosticsRow row;
    row.t = t_;
    double s2 = 0.0, h2 = 0.0, dom2 = 0.0, dom_max = 0.0;
    for (int i = 0; i < coeffs_.rows(); ++i) {
        const double e = coeffs_(i, 0) * coeffs_(i, 0) + coeffs_(i, 1) * coeffs_(i, 1);
        s2 += mu_[i] * e;
        h2 += h2w_[i] * e;
        dom_max = std::max(dom_max, e);
    }
    for (int i : dominant_modes_)
        dom2 += mu_[i] * (coeffs_(i, 0) * coeffs_(i, 0) + coeffs_(i, 1) * coeffs_(i, 1));
    row.l2 = std::sqrt(s2);
    row.h2 = std::sqrt(h2);
    row.max_abs = values().abs().maxCoeff();
    row.dominant_amp = dominant_modes_.empty() ? std::sqrt(dom_max) : std::sqrt(dom2);
    return row;
}

double Stepper::high_mode_energy_fraction() const {
    double top = 0.0, total = 0.0;
    for (int i = 0; i < coeffs_.rows(); ++i) {
        const double e =
            mu_[i] * (coeffs_(i, 0) * coeffs_(i, 0) + coeffs_(i, 1) * coeffs_(i, 1));
        total += e;
        top += top_band_mask_[i] * e;
    }
    return total > 0.0 ? top / total : 0.0;
}

SpectralField step(const SpectralField& state, const Linearization& lin,
                   const ReactionSystem& system, const SimulationConfig& cfg) {
    Stepper st(system, lin, cfg, state.coeffs);
    st.advance();
    return field_from_coeffs(CosineTransform(cfg.grid), st.coeffs());
}

Trajectory run(const SpectralField& initial, const Linearization& lin,
               const ReactionSystem& system, const SimulationConfig& cfg,
               std::vector<int> dominant_modes) {
    if (cfg.t_end < 0.0) throw ConfigError("simulator: t_end must be >= 0");
    if (cfg.snapshot_stride < 1) throw ConfigError("simulator: snapshot_stride must be >= 1");

    Trajectory traj;
    const int n_steps =
        cfg.t_end > 0.0 ? static_cast<int>(std::ceil(cfg.t_end / cfg.dt - 1e-9)) : 0;
    SimulationConfig c2 = cfg;
    c2.dt = n_steps > 0 ? cfg.t_end / n_steps : cfg.dt;
    traj.dt_used = c2.dt;

    CosineTransform tf(cfg.grid);
    Stepper st(system, lin, c2, initial.coeffs, std::move(dominant_modes));

    traj.diagnostics.push_back(st.diagnostics_row());
    traj.snapshots.push_back({0.0, field_from_coeffs(tf, st.coeffs())});

    for (int s = 1; s <= n_steps; ++s) {
        try {
            st.advance();
        } catch (const ValidityExceededError& e) {
            traj.halt = HaltReason::validity_exceeded;
            traj.halt_message = e.what();
            break;
        } catch (const NonFiniteError& e) {
            traj.halt = HaltReason::non_finite;
            traj.halt_message = e.what();
            break;
        }
        traj.diagnostics.push_back(st.diagnostics_row());
        if (st.high_mode_energy_fraction() > 0.01) traj.resolution_warning = true;
        if (s % cfg.snapshot_stride == 0 || s == n_steps)
            traj.snapshots.push_back({st.time(), field_from_coeffs(tf, st.coeffs())});
        traj.steps = s;
    }
    return traj;
}

double evenness_check(const SpectralField& state) {
    const Grid& g = state.grid;
    const int ext_n = 2 * g.n;
    Eigen::MatrixXd ext(ext_n, g.n);
    for (int j = 0; j < ext_n; ++j) {
        const double y = -kPi + kPi * (j + 0.5) / g.n;
        for (int q = 0; q < g.n; ++q) ext(j, q) = std::cos(q * y);
    }
    std::array<const Eigen::MatrixXd*, 3> ms{&ext, &ext, &ext};
    std::array<int, 3> dims{g.n, g.n, g.n};
    const Eigen::ArrayXXd ext_vals = apply_separable(ms, state.coeffs, dims, g.d);
    return evenness_asymmetry(ext_vals, g);
}

double evenness_asymmetry(const Eigen::ArrayXXd& extended_values, const Grid& grid) {
    const int ext_n = 2 * grid.n;
    int cells = 1;
    for (int i = 0; i < grid.d; ++i) cells *= ext_n;
    if (extended_values.rows() != cells)
        throw Error("evenness_asymmetry: sample count does not match the extended grid");

    double worst = 0.0;
    for (int ax = 0; ax < grid.d; ++ax) {
        int inner = 1;
        for (int i = ax + 1; i < grid.d; ++i) inner *= ext_n;
        for (int idx = 0; idx < cells; ++idx) {
            const int c = (idx / inner) % ext_n;
            const int mirrored = idx + (ext_n - 1 - 2 * c) * inner;
            for (int comp = 0; comp < extended_values.cols(); ++comp)
                worst = std::max(worst, std::abs(extended_values(idx, comp) -
                                                 extended_values(mirrored, comp)));
        }
    }
    return worst;
}

}  // namespace turinglab
