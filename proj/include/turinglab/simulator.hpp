#pragma once

// Time integration of the full nonlinear perturbation system. The constant
// linear part (frozen diffusion + Jacobian) advances implicitly with exact
// per-mode 2x2 solves; the remainder — state-dependent diffusion in divergence
// form plus the nonlinear part of the kinetics — is evaluated pseudospectrally
// on a zero-padded grid and extrapolated to second order.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "turinglab/kinetics.hpp"
#include "turinglab/spectral.hpp"

namespace turinglab {

enum class TimeScheme { imex_cn_ab2, explicit_rk4 };
enum class SimMode { nonlinear, linear_only };
enum class HaltReason { completed, validity_exceeded, non_finite };

const char* to_string(HaltReason r);

struct SimulationConfig {
    Grid grid{1, 64};
    double dt = 1e-3;
    double t_end = 1.0;
    TimeScheme scheme = TimeScheme::imex_cn_ab2;
    SimMode mode = SimMode::nonlinear;
    int snapshot_stride = 100;
    bool dealias = true;
};

struct DiagnosticsRow {
    double t = 0.0;
    double l2 = 0.0;
    double h2 = 0.0;
    double max_abs = 0.0;
    double dominant_amp = 0.0;
};

struct Snapshot {
    double t = 0.0;
    SpectralField field;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<DiagnosticsRow> diagnostics;
    HaltReason halt = HaltReason::completed;
    std::string halt_message;
    bool resolution_warning = false;  // top-third of modes exceeded 1% of energy
    double dt_used = 0.0;
    int steps = 0;
};

// Largest admissible time step for the scheme: the explicit scheme is limited
// by the most negative eigenvalue of the mode blocks over the resolved band;
// the IMEX scheme only by the reaction scale (spectral radius of A), since the
// stiff part is implicit.
double max_timestep(const Linearization& lin, const SimulationConfig& cfg);

// Holds the state of one trajectory and advances it step by step.
class Stepper {
  public:
    Stepper(const ReactionSystem& system, const Linearization& lin,
            const SimulationConfig& cfg, Eigen::ArrayXXd initial_coeffs,
            std::vector<int> dominant_modes = {});

    // One step of size dt(); throws ValidityExceededError / NonFiniteError.
    void advance();

    double time() const { return t_; }
    double dt() const { return dt_; }
    int step_count() const { return steps_; }
    const Eigen::ArrayXXd& coeffs() const { return coeffs_; }
    Eigen::ArrayXXd values() const;
    DiagnosticsRow diagnostics_row() const;
    // Energy fraction carried by modes with any q_i in the top third of the band.
    double high_mode_energy_fraction() const;

    // Remainder term N(w): divergence-form diffusion minus its frozen part,
    // plus kinetics minus the Jacobian part. Exposed for testing.
    Eigen::ArrayXXd nonlinear_remainder(const Eigen::ArrayXXd& coeffs) const;

  private:
    void check_validity() const;
    Eigen::ArrayXXd rhs(const Eigen::ArrayXXd& coeffs) const;  // L w + N(w)

    ReactionSystem system_;
    Linearization lin_;
    SimulationConfig cfg_;
    Grid grid_;
    int fine_n_ = 0;

    CosineTransform coarse_;
    Eigen::MatrixXd fine_syn_, fine_ana_, fine_grad_, fine_div_;

    Eigen::VectorXd mu_;
    Eigen::VectorXi q2_;
    Eigen::VectorXd h2w_;
    std::vector<Eigen::Matrix2d> imex_prop_;   // (I - dt/2 L_q)^{-1} (I + dt/2 L_q)
    std::vector<Eigen::Matrix2d> imex_solve_;  // (I - dt/2 L_q)^{-1}
    std::vector<Eigen::Matrix2d> lq_;

    Eigen::ArrayXXd coeffs_;
    Eigen::ArrayXXd prev_n_;
    bool have_prev_n_ = false;
    double t_ = 0.0;
    double dt_ = 0.0;
    int steps_ = 0;
    std::vector<int> dominant_modes_;
    Eigen::ArrayXd top_band_mask_;
};

// Single step from a consistent field; first-step semantics (explicit Euler on
// the remainder).
SpectralField step(const SpectralField& state, const Linearization& lin,
                   const ReactionSystem& system, const SimulationConfig& cfg);

// Integrates to t_end (dt is shrunk to the nearest exact divisor), recording
// snapshots every snapshot_stride steps and diagnostics every step. A validity
// or finiteness failure truncates the trajectory instead of throwing.
Trajectory run(const SpectralField& initial, const Linearization& lin,
               const ReactionSystem& system, const SimulationConfig& cfg,
               std::vector<int> dominant_modes = {});

// Maximum deviation from evenness of the field's extension to (-pi,pi)^d,
// measured by direct evaluation of the cosine series on the mirrored grid.
// Zero up to rounding for any cosine-band field.
double evenness_check(const SpectralField& state);

// Same measurement on raw extended-grid samples ((2n)^d cells per axis,
// mirrored midpoint layout); lets tests inject odd components.
double evenness_asymmetry(const Eigen::ArrayXXd& extended_values, const Grid& grid);

}  // namespace turinglab
