#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "turinglab/spectral.hpp"

using namespace turinglab;

namespace {

constexpr double kPi = std::numbers::pi;

Linearization bench() {
    Linearization lin;
    lin.A << 1.0, -2.0, 3.0, -4.0;
    lin.d1bar = 0.5;
    lin.d2bar = 20.0;
    return lin;
}

Eigen::ArrayXXd random_coeffs(const Grid& g, std::mt19937& rng, int band = -1) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::ArrayXXd c = Eigen::ArrayXXd::Zero(g.num_cells(), 2);
    for (int i = 0; i < c.rows(); ++i) {
        const ModeIndex m = mode_at(g, i);
        bool ok = true;
        if (band >= 0)
            for (int a = 0; a < g.d; ++a) ok = ok && m.q[a] <= band;
        if (!ok) continue;
        c(i, 0) = u(rng);
        c(i, 1) = u(rng);
    }
    return c;
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(make_grid(0, 16), ConfigError);
    CHECK_THROWS_AS(make_grid(4, 16), ConfigError);
    CHECK_THROWS_AS(make_grid(1, 2), ConfigError);
    CHECK_THROWS_AS(make_grid(1, 24), ConfigError);
    CHECK(make_grid(2, 16).num_cells() == 256);
}

TEST_CASE("constant field lands entirely in the zero mode") {
    const Grid g = make_grid(2, 8);
    const CosineTransform tf(g);
    Eigen::ArrayXXd vals(g.num_cells(), 2);
    vals.col(0) = 3.25;
    vals.col(1) = -1.5;
    const Eigen::ArrayXXd c = tf.analyze(vals);
    CHECK(c(0, 0) == doctest::Approx(3.25).epsilon(1e-14));
    CHECK(c(0, 1) == doctest::Approx(-1.5).epsilon(1e-14));
    for (int i = 1; i < c.rows(); ++i) {
        CHECK(std::abs(c(i, 0)) <= 1e-13);
        CHECK(std::abs(c(i, 1)) <= 1e-13);
    }
}

TEST_CASE("a single cosine line is recovered exactly") {
    const Grid g = make_grid(1, 32);
    const CosineTransform tf(g);
    Eigen::ArrayXXd vals = Eigen::ArrayXXd::Zero(g.num_cells(), 2);
    for (int j = 0; j < g.n; ++j) vals(j, 0) = std::cos(midpoint_node(j, g.n));
    const Eigen::ArrayXXd c = tf.analyze(vals);
    CHECK(c(1, 0) == doctest::Approx(1.0).epsilon(1e-13));
    for (int i = 0; i < c.rows(); ++i) {
        if (i != 1) CHECK(std::abs(c(i, 0)) <= 1e-13);
        CHECK(std::abs(c(i, 1)) <= 1e-13);
    }
}

TEST_CASE("synthesis of a single coefficient gives the sampled cosine") {
    const Grid g = make_grid(1, 16);
    const CosineTransform tf(g);
    Eigen::ArrayXXd c = Eigen::ArrayXXd::Zero(g.num_cells(), 2);
    c(2, 0) = 1.0;
    const Eigen::ArrayXXd vals = tf.synthesize(c);
    for (int j = 0; j < g.n; ++j)
        CHECK(vals(j, 0) == doctest::Approx(std::cos(2.0 * midpoint_node(j, g.n)))
                                .epsilon(1e-14));

    const Eigen::ArrayXXd zero =
        tf.synthesize(Eigen::ArrayXXd::Zero(g.num_cells(), 2));
    CHECK(zero.abs().maxCoeff() == 0.0);
}

TEST_CASE("transform round-trip across sizes and dimensions") {
    std::mt19937 rng(42);
    for (int d = 1; d <= 3; ++d) {
        for (int n : {8, 16, 32, 64}) {
            if (d == 3 && n > 32) continue;
            const Grid g = make_grid(d, n);
            const CosineTransform tf(g);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            Eigen::ArrayXXd vals(g.num_cells(), 2);
            for (int i = 0; i < vals.rows(); ++i) {
                vals(i, 0) = u(rng);
                vals(i, 1) = u(rng);
            }
            const Eigen::ArrayXXd back = tf.synthesize(tf.analyze(vals));
            const double err = (back - vals).abs().maxCoeff();
            CHECK(err <= 1e-12 * vals.abs().maxCoeff());
        }
    }
}

TEST_CASE("transform linearity") {
    const Grid g = make_grid(2, 8);
    const CosineTransform tf(g);
    std::mt19937 rng(5);
    const Eigen::ArrayXXd c1 = random_coeffs(g, rng);
    const Eigen::ArrayXXd c2 = random_coeffs(g, rng);
    const Eigen::ArrayXXd lhs = tf.synthesize(2.5 * c1 + c2);
    const Eigen::ArrayXXd rhs = 2.5 * tf.synthesize(c1) + tf.synthesize(c2);
    CHECK((lhs - rhs).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("norms: single cosine and constant") {
    const Grid g = make_grid(1, 16);
    Eigen::ArrayXXd c = Eigen::ArrayXXd::Zero(g.num_cells(), 2);
    c(1, 0) = 1.0;  // u = cos x
    CHECK(l2_norm(g, c) == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-14));

    Eigen::ArrayXXd k = Eigen::ArrayXXd::Zero(g.num_cells(), 2);
    k(0, 0) = 1.0;
    CHECK(l2_norm(g, k) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
    CHECK(h2_norm(g, k) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
}

TEST_CASE("Parseval norm agrees with midpoint quadrature") {
    std::mt19937 rng(11);
    for (int d = 1; d <= 2; ++d) {
        const Grid g = make_grid(d, 16);
        const CosineTransform tf(g);
        const Eigen::ArrayXXd c = random_coeffs(g, rng);
        const double spectral = l2_norm(g, c);
        const double grid_norm = quadrature_l2_norm(g, tf.synthesize(c));
        CHECK(std::abs(spectral - grid_norm) <= 1e-10 * spectral);
    }
}

TEST_CASE("H2 norm dominates L2 norm") {
    std::mt19937 rng(13);
    const Grid g = make_grid(2, 8);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::ArrayXXd c = random_coeffs(g, rng);
        CHECK(h2_norm(g, c) >= l2_norm(g, c));
    }
}

TEST_CASE("eigen-coordinate basis examples") {
    const Grid g = make_grid(1, 8);
    const ModeSpectrum spec = build_mode_spectrum(bench(), g);
    const int i1 = flat_index(g, make_mode({1}));
    const ModeEigenData& e = spec.modes[i1];

    Eigen::Vector2d ab = mode_coordinates(e, e.r_plus);
    CHECK(std::abs(ab[0]) <= 1e-13);
    CHECK(ab[1] == doctest::Approx(1.0).epsilon(1e-13));

    ab = mode_coordinates(e, (e.r_minus + 2.0 * e.r_plus).eval());
    CHECK(ab[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ab[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("decompose/recompose round trip") {
    const Grid g = make_grid(1, 16);
    const ModeSpectrum spec = build_mode_spectrum(bench(), g);
    std::mt19937 rng(3);
    const Eigen::ArrayXXd c = random_coeffs(g, rng);
    const EigenCoordinates coords = eigen_decompose(c, spec);
    const Eigen::ArrayXXd back = recompose(coords, spec);
    CHECK((back - c).abs().maxCoeff() <= 1e-10 * std::max(1.0, c.abs().maxCoeff()));
}

TEST_CASE("degenerate basis is rejected") {
    ModeEigenData e;
    e.cls = ModeClass::generic;
    e.r_plus = {1.0, 0.5};
    e.r_minus = {1.0, 0.5 + 1e-16};
    CHECK_THROWS_AS(mode_coordinates(e, Eigen::Vector2d(1.0, 0.0)),
                    DegenerateBasisError);
}

TEST_CASE("propagation at t = 0 is the identity") {
    const Grid g = make_grid(1, 16);
    const ModeSpectrum spec = build_mode_spectrum(bench(), g);
    std::mt19937 rng(8);
    const Eigen::ArrayXXd c = random_coeffs(g, rng);
    const EigenCoordinates coords = eigen_decompose(c, spec);
    const Eigen::ArrayXXd out = linear_propagate(coords, spec, 0.0);
    CHECK((out - c).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("a pure growing mode is scaled by its exponential") {
    const Grid g = make_grid(1, 16);
    const ModeSpectrum spec = build_mode_spectrum(bench(), g);
    const int i1 = flat_index(g, make_mode({1}));
    const ModeEigenData& e = spec.modes[i1];

    Eigen::ArrayXXd c = Eigen::ArrayXXd::Zero(g.num_cells(), 2);
    c(i1, 0) = e.r_plus[0];
    c(i1, 1) = e.r_plus[1];
    const EigenCoordinates coords = eigen_decompose(c, spec);
    const Eigen::ArrayXXd out = linear_propagate(coords, spec, 1.0);
    const double gain = std::exp(e.lambda_plus);
    CHECK(out(i1, 0) == doctest::Approx(gain * e.r_plus[0]).epsilon(1e-12));
    CHECK(out(i1, 1) == doctest::Approx(gain * e.r_plus[1]).epsilon(1e-12));
}

TEST_CASE("per-mode evolution matches the matrix exponential in all classes") {
    // generic block
    Linearization lin = bench();
    const Grid g = make_grid(1, 8);
    auto check_mode = [&](const Linearization& l, double k, double t) {
        const ModeEigenData e = mode_eigen_from_k(l, k);
        const Eigen::Matrix2d R = oracles::expm((mode_matrix(l, k) * t).eval());
        for (const Eigen::Vector2d w0 :
             {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.3, -0.7)}) {
            const Eigen::Vector2d ab = mode_coordinates(e, w0);
            const Eigen::Vector2d mine = mode_evolve(e, ab, t);
            CHECK((mine - R * w0).norm() <= 1e-9 * std::max(1.0, (R * w0).norm()));
        }
    };
    check_mode(lin, 1.0, 1.3);

    // defective block: a=1, d=-2, D=(1,2), k=1 gives an exact repeated root
    Linearization dlin;
    dlin.A << 1.0, -2.0, 2.0, -2.0;
    dlin.d1bar = 1.0;
    dlin.d2bar = 2.0;
    REQUIRE(mode_eigen_from_k(dlin, 1.0).cls == ModeClass::defective);
    check_mode(dlin, 1.0, 0.9);

    // complex block
    Linearization clin;
    clin.A << 1.0, -5.0, 5.0, -1.5;
    clin.d1bar = 1.0;
    clin.d2bar = 1.5;
    REQUIRE(mode_eigen_from_k(clin, 1.0).cls == ModeClass::complex_pair);
    check_mode(clin, 1.0, 2.1);
    (void)g;
}

TEST_CASE("semigroup property for generic, defective and complex spectra") {
    std::mt19937 rng(17);
    auto run_semigroup = [&](const Linearization& lin) {
        const Grid g = make_grid(1, 8);
        const ModeSpectrum spec = build_mode_spectrum(lin, g);
        const Eigen::ArrayXXd c = random_coeffs(g, rng);
        const double t = 0.8, s = 1.1;
        const Eigen::ArrayXXd joint =
            linear_propagate(eigen_decompose(c, spec), spec, t + s);
        const Eigen::ArrayXXd stage =
            linear_propagate(eigen_decompose(c, spec), spec, t);
        const Eigen::ArrayXXd two =
            linear_propagate(eigen_decompose(stage, spec), spec, s);
        const double scale = std::max(1.0, joint.abs().maxCoeff());
        CHECK((joint - two).abs().maxCoeff() <= 1e-9 * scale);
    };

    run_semigroup(bench());

    Linearization dlin;
    dlin.A << 1.0, -2.0, 2.0, -2.0;  // defective at q^2 = 1
    dlin.d1bar = 1.0;
    dlin.d2bar = 2.0;
    run_semigroup(dlin);

    Linearization clin;
    clin.A << 1.0, -5.0, 5.0, -1.5;  // complex at low q^2
    clin.d1bar = 1.0;
    clin.d2bar = 1.5;
    run_semigroup(clin);
}

TEST_CASE("linear growth stays within a fitted constant times exp(lambda_max t)") {
    const Grid g = make_grid(1, 16);
    const Linearization lin = bench();
    const ModeSpectrum spec = build_mode_spectrum(lin, g);
    const GrowingModeSummary sum = growing_mode_summary(lin, 1);

    // fit the constant over single-mode worst cases
    double c1 = 1.0;
    for (int i = 0; i < g.n; ++i) {
        for (double t = 0.0; t <= 30.0; t += 0.25) {
            const Eigen::Matrix2d P =
                oracles::expm((mode_matrix(lin, double(i * i)) * t).eval());
            c1 = std::max(c1, P.operatorNorm() / std::exp(sum.lambda_max * t));
        }
    }

    std::mt19937 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::ArrayXXd c = random_coeffs(g, rng, 8);
        c /= l2_norm(g, c);
        const EigenCoordinates coords = eigen_decompose(c, spec);
        for (double t : {0.0, 0.5, 2.0, 10.0, 30.0}) {
            const double norm = l2_norm(g, linear_propagate(coords, spec, t));
            CHECK(norm <= c1 * std::exp(sum.lambda_max * t) * (1.0 + 1e-9));
        }
    }
}
