#pragma once

// Reaction-diffusion model definitions: kinetics f, g, concentration-dependent
// diffusivities D1, D2, homogeneous steady states, and the linearization
// (Jacobian + frozen diffusivities) that the rest of the toolkit consumes.

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "turinglab/errors.hpp"

namespace turinglab {

using ScalarFn = std::function<double(double, double)>;

enum class DerivativeMode { analytic, numeric };

// A two-species reaction-diffusion model. Immutable by convention once built;
// safe to share across threads.
struct ReactionSystem {
    std::string name;
    ScalarFn f, g;    // reaction rates, functions of (U, V)
    ScalarFn D1, D2;  // diffusivities, positive functions of (U, V)

    // Closed-form partials; required when derivative_mode == analytic.
    ScalarFn df_du, df_dv, dg_du, dg_dv;

    Eigen::Vector2d steady_state{0.0, 0.0};
    DerivativeMode derivative_mode = DerivativeMode::numeric;

    // Radius (in max-norm of the perturbation) within which the model is
    // declared smooth enough for the nonlinear solver to trust.
    double eta = 0.5;
};

// Jacobian of (f, g) at the steady state together with the frozen
// diffusivities. A(0,0)=f_u, A(0,1)=f_v, A(1,0)=g_u, A(1,1)=g_v.
struct Linearization {
    Eigen::Matrix2d A;
    double d1bar = 0.0;
    double d2bar = 0.0;
};

// Damped Newton iteration on (f, g) = 0 starting from `guess`.
// Residual tolerance 1e-12 in max-norm, at most 100 iterations, step halving
// on non-decreasing residual, Tikhonov fallback when the Newton matrix is
// numerically singular. Throws NoConvergenceError when the cap is reached and
// SingularJacobianError when the Newton matrix cannot be formed (non-finite
// entries).
Eigen::Vector2d find_steady_state(const ReactionSystem& system,
                                  const Eigen::Vector2d& guess);

// Jacobian and diffusivities at the stored steady state. In numeric mode the
// partials come from central differences with step 1e-6*max(1, |value|); in
// analytic mode the supplied partials are used and cross-checked against the
// numeric ones (relative tolerance 1e-5, DerivativeMismatchError otherwise).
Linearization linearize(const ReactionSystem& system);

// Central-difference Jacobian of (f, g) at (u, v); shared with the Newton
// solver and the analytic/numeric cross-check.
Eigen::Matrix2d numeric_jacobian(const ReactionSystem& system, double u, double v);

// Built-in models: "benchmark", "benchmark_cubic", "linear", "schnakenberg",
// "gierer_meinhardt", "brusselator". Parameters not present in `params` take
// the model defaults; the steady state is located with find_steady_state from
// the model's default guess (or `guess` when provided).
ReactionSystem make_builtin_model(const std::string& name,
                                  const std::map<std::string, double>& params = {},
                                  const Eigen::Vector2d* guess = nullptr);

const std::vector<std::string>& builtin_model_names();

}  // namespace turinglab
