#include "turinglab/linear_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace turinglab {

ModeIndex make_mode(std::initializer_list<int> qs) {
    return make_mode(std::vector<int>(qs));
}

ModeIndex make_mode(const std::vector<int>& qs) {
    if (qs.empty() || qs.size() > 3)
        throw Error("ModeIndex: dimension must be 1, 2 or 3");
    ModeIndex m;
    m.d = static_cast<int>(qs.size());
    for (int i = 0; i < m.d; ++i) {
        if (qs[i] < 0) throw Error("ModeIndex: entries must be non-negative");
        m.q[i] = qs[i];
        m.q2 += qs[i] * qs[i];
    }
    return m;
}

bool operator==(const ModeIndex& a, const ModeIndex& b) {
    return a.d == b.d && a.q == b.q;
}

bool lex_less(const ModeIndex& a, const ModeIndex& b) {
    return a.q < b.q;
}

bool rest_state_stable(const Linearization& lin) {
    return lin.A.trace() < 0.0 && lin.A.determinant() > 0.0;
}

double turing_criterion_value(const Linearization& lin, double k) {
    const auto& A = lin.A;
    return (A(0, 0) - lin.d1bar * k) * (A(1, 1) - lin.d2bar * k) - A(0, 1) * A(1, 0);
}

SignPattern classify_sign_pattern(const Linearization& lin) {
    const auto& A = lin.A;
    if (A(0, 0) > 0 && A(0, 1) < 0 && A(1, 0) > 0 && A(1, 1) < 0)
        return SignPattern::activator_inhibitor;
    if (A(0, 0) > 0 && A(0, 1) > 0 && A(1, 0) < 0 && A(1, 1) < 0)
        return SignPattern::positive_feedback;
    return SignPattern::other;
}

const char* to_string(SignPattern s) {
    switch (s) {
        case SignPattern::activator_inhibitor: return "activator_inhibitor";
        case SignPattern::positive_feedback: return "positive_feedback";
        default: return "other";
    }
}

const char* to_string(ModeClass c) {
    switch (c) {
        case ModeClass::generic: return "generic";
        case ModeClass::defective: return "defective";
        default: return "complex";
    }
}

Eigen::Matrix2d mode_matrix(const Linearization& lin, double k) {
    Eigen::Matrix2d L = lin.A;
    L(0, 0) -= lin.d1bar * k;
    L(1, 1) -= lin.d2bar * k;
    return L;
}

ModeEigenData mode_eigen_from_k(const Linearization& lin, double k) {
    const Eigen::Matrix2d L = mode_matrix(lin, k);
    const double fv = L(0, 1);
    if (fv == 0.0)
        throw ZeroFvError("dispersion: f_v = 0, eigenvector formula undefined");

    // lambda^2 + p*lambda + c = 0
    const double p = -L.trace();
    const double c = L.determinant();
    const double disc = p * p - 4.0 * c;

    const double scale = std::max({1.0, std::abs(p), std::sqrt(std::abs(c))});
    const double eps_disc = 1e-12 * scale * scale;

    ModeEigenData out;
    out.k = k;

    auto eigvec = [&](double lambda) {
        return Eigen::Vector2d(1.0, (lambda - L(0, 0)) / fv);
    };

    if (disc > eps_disc) {
        // Distinct real roots; avoid the cancelling branch of the quadratic
        // formula.
        const double sq = std::sqrt(disc);
        double lo, hi;
        if (p >= 0.0) {
            lo = 0.5 * (-p - sq);
            hi = (lo != 0.0) ? c / lo : 0.5 * (-p + sq);
        } else {
            hi = 0.5 * (-p + sq);
            lo = (hi != 0.0) ? c / hi : 0.5 * (-p - sq);
        }
        out.cls = ModeClass::generic;
        out.lambda_plus = hi;
        out.lambda_minus = lo;
        out.r_plus = eigvec(hi);
        out.r_minus = eigvec(lo);
    } else if (disc >= -eps_disc) {
        const double lambda = -0.5 * p;
        out.cls = ModeClass::defective;
        out.lambda_plus = lambda;
        out.lambda_minus = lambda;
        out.r_plus = eigvec(lambda);
        out.r_minus = Eigen::Vector2d(0.0, 1.0 / fv);  // (L - lambda I) r' = r
    } else {
        const double alpha = -0.5 * p;
        const double beta = 0.5 * std::sqrt(-disc);
        out.cls = ModeClass::complex_pair;
        out.lambda_plus = alpha;
        out.lambda_minus = beta;
        out.r_plus = Eigen::Vector2d(1.0, (alpha - L(0, 0)) / fv);
        out.r_minus = Eigen::Vector2d(0.0, beta / fv);
    }
    return out;
}

ModeEigenData dispersion_eigen(const Linearization& lin, const ModeIndex& q) {
    return mode_eigen_from_k(lin, static_cast<double>(q.q2));
}

Eigen::Matrix2d mode_propagator(const Linearization& lin, double k, double t) {
    const ModeEigenData e = mode_eigen_from_k(lin, k);
    const Eigen::Matrix2d L = mode_matrix(lin, k);
    switch (e.cls) {
        case ModeClass::generic: {
            Eigen::Matrix2d B;
            B.col(0) = e.r_minus;
            B.col(1) = e.r_plus;
            Eigen::Vector2d expd(std::exp(e.lambda_minus * t),
                                 std::exp(e.lambda_plus * t));
            return B * expd.asDiagonal() * B.inverse();
        }
        case ModeClass::defective: {
            const double el = std::exp(e.lambda_plus * t);
            return el * (Eigen::Matrix2d::Identity() +
                         t * (L - e.lambda_plus * Eigen::Matrix2d::Identity()));
        }
        default: {
            const double alpha = e.lambda_plus, beta = e.lambda_minus;
            const double ea = std::exp(alpha * t);
            return ea * (std::cos(beta * t) * Eigen::Matrix2d::Identity() +
                         (std::sin(beta * t) / beta) *
                             (L - alpha * Eigen::Matrix2d::Identity()));
        }
    }
}

std::vector<DispersionRow> dispersion_curve(const Linearization& lin,
                                            const std::vector<double>& k_grid) {
    std::vector<DispersionRow> rows;
    rows.reserve(k_grid.size());
    for (double k : k_grid) {
        if (k < 0.0) throw Error("dispersion_curve: k must be >= 0");
        const ModeEigenData e = mode_eigen_from_k(lin, k);
        DispersionRow r;
        r.k = k;
        r.cls = e.cls;
        if (e.cls == ModeClass::complex_pair) {
            r.re_lambda_plus = e.lambda_plus;
            r.re_lambda_minus = e.lambda_plus;
            r.im_lambda = e.lambda_minus;
        } else {
            r.re_lambda_plus = e.lambda_plus;
            r.re_lambda_minus = e.lambda_minus;
            r.im_lambda = 0.0;
        }
        rows.push_back(r);
    }
    return rows;
}

bool representable_as_squares(int s, int d) {
    if (s < 0) return false;
    if (d == 1) {
        const int r = static_cast<int>(std::lround(std::sqrt(double(s))));
        return r * r == s;
    }
    for (int a = 0; a * a <= s; ++a)
        if (representable_as_squares(s - a * a, d - 1)) return true;
    return false;
}

std::vector<ModeIndex> enumerate_modes_up_to(int d, int k_max) {
    if (d < 1 || d > 3) throw Error("dimension must be 1, 2 or 3");
    std::vector<ModeIndex> out;
    const int qmax = static_cast<int>(std::floor(std::sqrt(double(k_max))));
    if (d == 1) {
        for (int a = 0; a <= qmax; ++a)
            if (a * a <= k_max) out.push_back(make_mode({a}));
    } else if (d == 2) {
        for (int a = 0; a <= qmax; ++a)
            for (int b = 0; a * a + b * b <= k_max; ++b)
                out.push_back(make_mode({a, b}));
    } else {
        for (int a = 0; a <= qmax; ++a)
            for (int b = 0; a * a + b * b <= k_max; ++b)
                for (int c = 0; a * a + b * b + c * c <= k_max; ++c)
                    out.push_back(make_mode({a, b, c}));
    }
    return out;
}

TuringWitness has_turing_instability(const Linearization& lin, int d) {
    if (!rest_state_stable(lin))
        throw NotRestStableError("has_turing_instability: rest state is not stable");
    if (lin.d1bar == lin.d2bar)
        throw EqualDiffusivitiesError(
            "has_turing_instability: equal diffusivities cannot destabilize a stable rest state");

    TuringWitness w;
    const double qa = lin.d1bar * lin.d2bar;
    const double qb = -(lin.A(0, 0) * lin.d2bar + lin.A(1, 1) * lin.d1bar);
    const double qc = lin.A.determinant();
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) return w;  // h has no real roots: h > 0 for all k

    const double sq = std::sqrt(disc);
    double r0;
    if (qb >= 0.0)
        r0 = (-qb - sq) / 2.0;
    else
        r0 = (-qb + sq) / 2.0;
    double k1 = r0 / qa;
    double k2 = (r0 != 0.0) ? qc / r0 : (-qb + (qb >= 0 ? sq : -sq)) / (2.0 * qa);
    w.has_real_roots = true;
    w.k_minus = std::min(k1, k2);
    w.k_plus = std::max(k1, k2);

    const int lo = std::max(0, static_cast<int>(std::ceil(w.k_minus - 1e-12)));
    const int hi = static_cast<int>(std::floor(w.k_plus + 1e-12));
    for (int s = lo; s <= hi; ++s) {
        if (turing_criterion_value(lin, double(s)) < 0.0 && representable_as_squares(s, d))
            w.q_squared.push_back(s);
    }
    w.unstable = !w.q_squared.empty();
    return w;
}

namespace {

// Upper bound on Re(lambda) at continuous k, valid for every mode class:
// max(f_u - d1 k, g_v - d2 k) + sqrt(max(0, f_v g_u)).
double tail_real_part_bound(const Linearization& lin, double k) {
    const double a = lin.A(0, 0) - lin.d1bar * k;
    const double d = lin.A(1, 1) - lin.d2bar * k;
    const double cross = lin.A(0, 1) * lin.A(1, 0);
    return std::max(a, d) + std::sqrt(std::max(0.0, cross));
}

}  // namespace

GrowingModeSummary growing_mode_summary(const Linearization& lin, int d) {
    const TuringWitness w = has_turing_instability(lin, d);
    if (!w.unstable)
        throw NoInstabilityError("growing_mode_summary: no growing mode exists");

    GrowingModeSummary s;
    s.k_minus = w.k_minus;
    s.k_plus = w.k_plus;
    s.k_cut = static_cast<int>(std::ceil(w.k_plus)) + 1;

    std::map<int, ModeEigenData> cache;
    auto eigen_at = [&](int q2) -> const ModeEigenData& {
        auto it = cache.find(q2);
        if (it == cache.end())
            it = cache.emplace(q2, mode_eigen_from_k(lin, double(q2))).first;
        return it->second;
    };

    auto modes = enumerate_modes_up_to(d, s.k_cut);
    double lambda_max = -std::numeric_limits<double>::infinity();
    for (const auto& m : modes) lambda_max = std::max(lambda_max, eigen_at(m.q2).max_real());
    s.lambda_max = lambda_max;

    const double eps_max = 1e-9 * std::max(1.0, std::abs(lambda_max));
    double runner = -std::numeric_limits<double>::infinity();
    for (const auto& m : modes) {
        const auto& e = eigen_at(m.q2);
        if (e.max_real() > 0.0) s.growing.push_back(m);
        if (e.max_real() >= lambda_max - eps_max)
            s.omega_max.push_back(m);
        else
            runner = std::max(runner, e.max_real());
    }

    // Extend the scan until the analytic tail bound falls below the runner-up,
    // so nu = lambda_max - runner is certified over all of Omega.
    int K = s.k_cut;
    while (tail_real_part_bound(lin, double(K)) > runner && K < (1 << 24)) {
        const int K_new = std::max(K * 2, K + 4);
        for (const auto& m : enumerate_modes_up_to(d, K_new)) {
            if (m.q2 <= K) continue;
            runner = std::max(runner, eigen_at(m.q2).max_real());
        }
        K = K_new;
    }
    s.k_scan = K;
    s.tail_bound = tail_real_part_bound(lin, double(K));
    s.nu = lambda_max - std::max(runner, s.tail_bound);
    return s;
}

RangeDiagnostics range_condition_diagnostics(const Linearization& lin) {
    RangeDiagnostics r;
    const double det = lin.A.determinant();
    r.lhs = lin.A(0, 0) * lin.d2bar + lin.A(1, 1) * lin.d1bar;
    r.rhs_det = 2.0 * std::sqrt(lin.d1bar * lin.d2bar) * det;
    r.rhs_sqrt_det = det > 0.0 ? 2.0 * std::sqrt(lin.d1bar * lin.d2bar * det)
                               : std::numeric_limits<double>::quiet_NaN();
    r.holds_det_variant = r.lhs > r.rhs_det;
    r.holds_sqrt_variant = det > 0.0 && r.lhs > r.rhs_sqrt_det;
    return r;
}

}  // namespace turinglab
