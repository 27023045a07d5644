#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>

#include "turinglab/kinetics.hpp"

using namespace turinglab;

namespace {

ReactionSystem custom_system(ScalarFn f, ScalarFn g) {
    ReactionSystem s;
    s.name = "custom";
    s.f = std::move(f);
    s.g = std::move(g);
    s.D1 = [](double, double) { return 1.0; };
    s.D2 = [](double, double) { return 2.0; };
    s.derivative_mode = DerivativeMode::numeric;
    return s;
}

}  // namespace

TEST_CASE("schnakenberg steady state matches the closed form") {
    // a - U + U^2 V = 0 and b - U^2 V = 0 give U = a+b, V = b/(a+b)^2.
    auto sys = make_builtin_model("schnakenberg", {{"a", 0.1}, {"b", 0.9}});
    CHECK(sys.steady_state[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sys.steady_state[1] == doctest::Approx(0.9).epsilon(1e-13));
    CHECK(std::abs(sys.f(sys.steady_state[0], sys.steady_state[1])) <= 1e-12);
    CHECK(std::abs(sys.g(sys.steady_state[0], sys.steady_state[1])) <= 1e-12);
}

TEST_CASE("linear decay kinetics: root found from an offset guess") {
    auto sys = custom_system([](double u, double) { return -u; },
                             [](double, double v) { return -v; });
    const Eigen::Vector2d root = find_steady_state(sys, {0.3, -0.2});
    CHECK(std::abs(root[0]) <= 1e-12);
    CHECK(std::abs(root[1]) <= 1e-12);
}

TEST_CASE("kinetics with no root near the guess reports NoConvergence") {
    auto sys = custom_system([](double u, double) { return 1.0 + u * u; },
                             [](double, double v) { return -v; });
    CHECK_THROWS_AS(find_steady_state(sys, {0.0, 0.0}), NoConvergenceError);
}

TEST_CASE("non-finite Newton matrix reports SingularJacobian") {
    auto sys = custom_system([](double u, double) { return u; },
                             [](double, double v) { return -v - 1.0; });
    sys.derivative_mode = DerivativeMode::analytic;
    sys.df_du = [](double, double) { return std::nan(""); };
    sys.df_dv = [](double, double) { return 0.0; };
    sys.dg_du = [](double, double) { return 0.0; };
    sys.dg_dv = [](double, double) { return -1.0; };
    CHECK_THROWS_AS(find_steady_state(sys, {0.5, 0.5}), SingularJacobianError);
}

TEST_CASE("benchmark linearization is exact") {
    auto sys = make_builtin_model("benchmark");
    const Linearization lin = linearize(sys);
    CHECK(lin.A(0, 0) == 1.0);
    CHECK(lin.A(0, 1) == -2.0);
    CHECK(lin.A(1, 0) == 3.0);
    CHECK(lin.A(1, 1) == -4.0);
    CHECK(lin.d1bar == 0.5);
    CHECK(lin.d2bar == 20.0);
}

TEST_CASE("schnakenberg jacobian agrees with the closed-form partials") {
    // f_u = -1 + 2 U V, f_v = U^2, g_u = -2 U V, g_v = -U^2 at (1.0, 0.9).
    auto sys = make_builtin_model("schnakenberg", {{"a", 0.1}, {"b", 0.9}});
    const Linearization lin = linearize(sys);
    CHECK(lin.A(0, 0) == doctest::Approx(-1.0 + 2.0 * 1.0 * 0.9).epsilon(1e-12));
    CHECK(lin.A(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lin.A(1, 0) == doctest::Approx(-2.0 * 1.0 * 0.9).epsilon(1e-12));
    CHECK(lin.A(1, 1) == doctest::Approx(-1.0).epsilon(1e-12));

    // and with the central-difference route
    const Eigen::Matrix2d J = numeric_jacobian(sys, 1.0, 0.9);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(J(i, j) == doctest::Approx(lin.A(i, j)).epsilon(1e-7));
}

TEST_CASE("state-dependent diffusivity is frozen at the steady state") {
    auto sys = custom_system([](double u, double) { return -u; },
                             [](double, double v) { return -v; });
    sys.D1 = [](double u, double) { return 0.5 * (1.0 + u * u); };
    sys.steady_state = {0.0, 0.0};
    const Linearization lin = linearize(sys);
    CHECK(lin.d1bar == 0.5);
    CHECK(lin.d2bar == 2.0);
}

TEST_CASE("analytic and numeric jacobians agree on every built-in model") {
    for (const auto& name : builtin_model_names()) {
        CAPTURE(name);
        auto sys = make_builtin_model(name);
        const Linearization lin = linearize(sys);  // analytic + cross-check
        const Eigen::Matrix2d J =
            numeric_jacobian(sys, sys.steady_state[0], sys.steady_state[1]);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double tol =
                    1e-5 * std::max({1.0, std::abs(J(i, j)), std::abs(lin.A(i, j))});
                CHECK(std::abs(J(i, j) - lin.A(i, j)) <= tol);
            }
    }
}

TEST_CASE("built-in steady states satisfy the residual tolerance") {
    for (const auto& name : builtin_model_names()) {
        CAPTURE(name);
        auto sys = make_builtin_model(name);
        CHECK(std::abs(sys.f(sys.steady_state[0], sys.steady_state[1])) <= 1e-12);
        CHECK(std::abs(sys.g(sys.steady_state[0], sys.steady_state[1])) <= 1e-12);
        const Linearization lin = linearize(sys);
        CHECK(lin.d1bar > 0.0);
        CHECK(lin.d2bar > 0.0);
    }
}

TEST_CASE("linearize is deterministic to the bit") {
    auto sys = make_builtin_model("gierer_meinhardt");
    const Linearization a = linearize(sys);
    const Linearization b = linearize(sys);
    CHECK(std::memcmp(a.A.data(), b.A.data(), sizeof(double) * 4) == 0);
    CHECK(a.d1bar == b.d1bar);
    CHECK(a.d2bar == b.d2bar);
}

TEST_CASE("a wrong analytic partial triggers DerivativeMismatch") {
    auto sys = custom_system([](double u, double v) { return -u + v; },
                             [](double u, double v) { return u - 2.0 * v; });
    sys.derivative_mode = DerivativeMode::analytic;
    sys.df_du = [](double, double) { return -1.0; };
    sys.df_dv = [](double, double) { return 1.5; };  // should be 1.0
    sys.dg_du = [](double, double) { return 1.0; };
    sys.dg_dv = [](double, double) { return -2.0; };
    sys.steady_state = {0.0, 0.0};
    CHECK_THROWS_AS(linearize(sys), DerivativeMismatchError);
}

TEST_CASE("unknown model name is a configuration error") {
    CHECK_THROWS_AS(make_builtin_model("nope"), ConfigError);
}
