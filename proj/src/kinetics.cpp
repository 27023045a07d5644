#include "turinglab/kinetics.hpp"

#include <cmath>
#include <sstream>

namespace turinglab {

namespace {

constexpr double kResidualTol = 1e-12;
constexpr int kMaxNewtonIter = 100;

double merit(const Eigen::Vector2d& r) { return 0.5 * r.squaredNorm(); }

Eigen::Vector2d residual(const ReactionSystem& sys, const Eigen::Vector2d& x) {
    return {sys.f(x[0], x[1]), sys.g(x[0], x[1])};
}

}  // namespace

Eigen::Matrix2d numeric_jacobian(const ReactionSystem& sys, double u, double v) {
    const double hu = 1e-6 * std::max(1.0, std::abs(u));
    const double hv = 1e-6 * std::max(1.0, std::abs(v));
    Eigen::Matrix2d J;
    J(0, 0) = (sys.f(u + hu, v) - sys.f(u - hu, v)) / (2.0 * hu);
    J(0, 1) = (sys.f(u, v + hv) - sys.f(u, v - hv)) / (2.0 * hv);
    J(1, 0) = (sys.g(u + hu, v) - sys.g(u - hu, v)) / (2.0 * hu);
    J(1, 1) = (sys.g(u, v + hv) - sys.g(u, v - hv)) / (2.0 * hv);
    return J;
}

static Eigen::Matrix2d jacobian_at(const ReactionSystem& sys, double u, double v) {
    if (sys.derivative_mode == DerivativeMode::analytic && sys.df_du && sys.df_dv &&
        sys.dg_du && sys.dg_dv) {
        Eigen::Matrix2d J;
        J << sys.df_du(u, v), sys.df_dv(u, v), sys.dg_du(u, v), sys.dg_dv(u, v);
        return J;
    }
    return numeric_jacobian(sys, u, v);
}

Eigen::Vector2d find_steady_state(const ReactionSystem& sys,
                                  const Eigen::Vector2d& guess) {
    if (!guess.allFinite())
        throw ConfigError("find_steady_state: guess is not finite");

    Eigen::Vector2d x = guess;
    Eigen::Vector2d r = residual(sys, x);

    for (int iter = 0; iter < kMaxNewtonIter; ++iter) {
        if (!r.allFinite())
            throw NoConvergenceError("find_steady_state: kinetics not finite at iterate");
        if (r.lpNorm<Eigen::Infinity>() <= kResidualTol)
            return x;

        Eigen::Matrix2d J = jacobian_at(sys, x[0], x[1]);
        if (!J.allFinite())
            throw SingularJacobianError("find_steady_state: Newton matrix has non-finite entries");

        const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
        Eigen::Vector2d step;
        if (std::abs(J.determinant()) > 1e-14 * scale * scale) {
            step = J.partialPivLu().solve(-r);
        } else {
            // Gauss-Newton with Tikhonov damping keeps the iteration alive on a
            // singular Jacobian; a vanishing gradient simply stalls the loop
            // and ends in NoConvergenceError.
            const Eigen::Matrix2d JtJ = J.transpose() * J;
            const double mu = 1e-8 * std::max(1.0, JtJ.trace());
            step = (JtJ + mu * Eigen::Matrix2d::Identity())
                       .partialPivLu()
                       .solve(-(J.transpose() * r).eval());
        }
        if (!step.allFinite())
            throw SingularJacobianError("find_steady_state: Newton step not finite");

        // Step halving until the residual decreases; give up on this iterate
        // after 40 halvings.
        const double m0 = merit(r);
        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40; ++h) {
            Eigen::Vector2d xt = x + alpha * step;
            Eigen::Vector2d rt = residual(sys, xt);
            if (rt.allFinite() && merit(rt) < m0) {
                x = xt;
                r = rt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // No descent available from here; keep iterating (the cap turns
            // this into NoConvergenceError).
            continue;
        }
    }
    if (r.lpNorm<Eigen::Infinity>() <= kResidualTol) return x;
    std::ostringstream msg;
    msg << "find_steady_state: no convergence after " << kMaxNewtonIter
        << " iterations (residual " << r.lpNorm<Eigen::Infinity>() << ")";
    throw NoConvergenceError(msg.str());
}

Linearization linearize(const ReactionSystem& sys) {
    const double u = sys.steady_state[0];
    const double v = sys.steady_state[1];

    const double fr = std::abs(sys.f(u, v));
    const double gr = std::abs(sys.g(u, v));
    if (std::max(fr, gr) > 1e-8)
        throw Error("linearize: steady-state residual too large; run find_steady_state first");

    const Eigen::Matrix2d Jnum = numeric_jacobian(sys, u, v);
    Eigen::Matrix2d A = Jnum;

    if (sys.derivative_mode == DerivativeMode::analytic) {
        if (!(sys.df_du && sys.df_dv && sys.dg_du && sys.dg_dv))
            throw ConfigError("linearize: analytic mode requires all four partials");
        Eigen::Matrix2d Jan;
        Jan << sys.df_du(u, v), sys.df_dv(u, v), sys.dg_du(u, v), sys.dg_dv(u, v);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double a = Jan(i, j), n = Jnum(i, j);
                const double tol = 1e-5 * std::max({1.0, std::abs(a), std::abs(n)});
                if (std::abs(a - n) > tol) {
                    std::ostringstream msg;
                    msg << "linearize: analytic/numeric partial mismatch at entry (" << i
                        << "," << j << "): " << a << " vs " << n;
                    throw DerivativeMismatchError(msg.str());
                }
            }
        A = Jan;
    }

    Linearization lin;
    lin.A = A;
    lin.d1bar = sys.D1(u, v);
    lin.d2bar = sys.D2(u, v);
    if (!(lin.d1bar > 0.0) || !(lin.d2bar > 0.0))
        throw Error("linearize: diffusivities must be positive at the steady state");
    return lin;
}

// ---------------------------------------------------------------------------
// Built-in models
// ---------------------------------------------------------------------------

namespace {

double param(const std::map<std::string, double>& p, const std::string& key,
             double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

ScalarFn constant_fn(double c) {
    return [c](double, double) { return c; };
}

}  // namespace

const std::vector<std::string>& builtin_model_names() {
    static const std::vector<std::string> names = {
        "benchmark", "benchmark_cubic", "linear",
        "schnakenberg", "gierer_meinhardt", "brusselator"};
    return names;
}

ReactionSystem make_builtin_model(const std::string& name,
                                  const std::map<std::string, double>& p,
                                  const Eigen::Vector2d* guess) {
    ReactionSystem sys;
    sys.name = name;
    sys.derivative_mode = DerivativeMode::analytic;
    sys.eta = param(p, "eta", 0.5);
    Eigen::Vector2d g0(0.0, 0.0);

    if (name == "benchmark" || name == "linear" || name == "benchmark_cubic") {
        // Linear reference kinetics with Jacobian (1,-2;3,-4); the "_cubic"
        // variant adds a saturating -u^3 to the first species.
        const bool general = (name == "linear");
        const double a11 = general ? param(p, "a11", 1.0) : 1.0;
        const double a12 = general ? param(p, "a12", -2.0) : -2.0;
        const double a21 = general ? param(p, "a21", 3.0) : 3.0;
        const double a22 = general ? param(p, "a22", -4.0) : -4.0;
        const double d1 = param(p, "d1", 0.5);
        const double d2 = param(p, "d2", 20.0);
        const bool cubic = (name == "benchmark_cubic");
        sys.f = [a11, a12, cubic](double u, double v) {
            return a11 * u + a12 * v - (cubic ? u * u * u : 0.0);
        };
        sys.g = [a21, a22](double u, double v) { return a21 * u + a22 * v; };
        sys.df_du = [a11, cubic](double u, double) {
            return a11 - (cubic ? 3.0 * u * u : 0.0);
        };
        sys.df_dv = constant_fn(a12);
        sys.dg_du = constant_fn(a21);
        sys.dg_dv = constant_fn(a22);
        sys.D1 = constant_fn(d1);
        sys.D2 = constant_fn(d2);
        g0 = {0.0, 0.0};
    } else if (name == "schnakenberg") {
        const double a = param(p, "a", 0.1);
        const double b = param(p, "b", 0.9);
        sys.f = [a](double u, double v) { return a - u + u * u * v; };
        sys.g = [b](double u, double v) { return b - u * u * v; };
        sys.df_du = [](double u, double v) { return -1.0 + 2.0 * u * v; };
        sys.df_dv = [](double u, double) { return u * u; };
        sys.dg_du = [](double u, double v) { return -2.0 * u * v; };
        sys.dg_dv = [](double u, double) { return -u * u; };
        sys.D1 = constant_fn(param(p, "d1", 1.0));
        sys.D2 = constant_fn(param(p, "d2", 40.0));
        g0 = {a + b, b / ((a + b) * (a + b))};
    } else if (name == "gierer_meinhardt") {
        const double a = param(p, "a", 0.5);
        const double b = param(p, "b", 1.0);
        const double c = param(p, "c", 1.0);
        sys.f = [a, b](double u, double v) { return a - b * u + u * u / v; };
        sys.g = [c](double u, double v) { return u * u - c * v; };
        sys.df_du = [b](double u, double v) { return -b + 2.0 * u / v; };
        sys.df_dv = [](double u, double v) { return -u * u / (v * v); };
        sys.dg_du = [](double u, double) { return 2.0 * u; };
        sys.dg_dv = [c](double, double) { return -c; };
        sys.D1 = constant_fn(param(p, "d1", 0.01));
        sys.D2 = constant_fn(param(p, "d2", 1.0));
        const double ubar = (a + c) / b;
        g0 = {ubar, ubar * ubar / c};
    } else if (name == "brusselator") {
        const double a = param(p, "a", 2.0);
        const double b = param(p, "b", 4.5);
        sys.f = [a, b](double u, double v) { return a - (b + 1.0) * u + u * u * v; };
        sys.g = [b](double u, double v) { return b * u - u * u * v; };
        sys.df_du = [b](double u, double v) { return -(b + 1.0) + 2.0 * u * v; };
        sys.df_dv = [](double u, double) { return u * u; };
        sys.dg_du = [b](double u, double v) { return b - 2.0 * u * v; };
        sys.dg_dv = [](double u, double) { return -u * u; };
        sys.D1 = constant_fn(param(p, "d1", 1.0));
        sys.D2 = constant_fn(param(p, "d2", 10.0));
        g0 = {a, b / a};
    } else {
        throw ConfigError("unknown model: " + name);
    }

    sys.steady_state = find_steady_state(sys, guess ? *guess : g0);
    return sys;
}

}  // namespace turinglab
