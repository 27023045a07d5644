#pragma once

// Dispersion relation of the linearized reaction-diffusion operator on the
// Neumann cosine basis: per-mode eigenvalues/eigenvectors, diffusion-driven
// instability test, and the growing-mode summary (lambda_max, Omega_max, nu).

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "turinglab/errors.hpp"
#include "turinglab/kinetics.hpp"

namespace turinglab {

// Wave index q = (q_1, .., q_d), entries >= 0. q2 caches the squared modulus
// sum q_i^2, which is the only way q enters the dispersion relation.
struct ModeIndex {
    std::array<int, 3> q{0, 0, 0};
    int d = 1;
    int q2 = 0;
};

ModeIndex make_mode(std::initializer_list<int> qs);
ModeIndex make_mode(const std::vector<int>& qs);
bool operator==(const ModeIndex& a, const ModeIndex& b);
bool lex_less(const ModeIndex& a, const ModeIndex& b);

enum class ModeClass { generic, defective, complex_pair };

// Eigen-structure of one 2x2 mode block A - q^2 diag(d1bar, d2bar).
//
//   generic      : lambda_minus < lambda_plus real; r_plus / r_minus are the
//                  two independent eigenvectors.
//   defective    : lambda_plus == lambda_minus real; r_plus is the eigenvector
//                  r, r_minus is the auxiliary vector r' solving
//                  (L - lambda I) r' = r.
//   complex_pair : lambda_plus = Re(lambda), lambda_minus = Im(lambda) > 0;
//                  r_plus = Re(r), r_minus = Im(r).
struct ModeEigenData {
    ModeClass cls = ModeClass::generic;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    Eigen::Vector2d r_plus{1.0, 0.0};
    Eigen::Vector2d r_minus{0.0, 1.0};
    double k = 0.0;  // the q^2 value the block was formed with

    // Largest real part among the eigenvalues of the block.
    double max_real() const {
        return cls == ModeClass::complex_pair ? lambda_plus
                                              : std::max(lambda_plus, lambda_minus);
    }
};

struct GrowingModeSummary {
    double lambda_max = 0.0;               // largest growth rate, > 0
    std::vector<ModeIndex> omega_max;      // modes attaining lambda_max
    std::vector<ModeIndex> growing;        // all modes with lambda_plus > 0
    double nu = 0.0;                       // gap to the next-largest Re(lambda)
    double k_minus = 0.0, k_plus = 0.0;    // real-root interval of h(k)
    int k_cut = 0;                         // scan bound for the growing set
    int k_scan = 0;                        // extended scan bound used for nu
    double tail_bound = 0.0;               // upper bound on Re(lambda) past k_scan
};

struct TuringWitness {
    bool unstable = false;
    bool has_real_roots = false;
    double k_minus = 0.0, k_plus = 0.0;
    std::vector<int> q_squared;  // admissible integer q^2 strictly inside (k-, k+)
};

// Stability of the diffusionless kinetics: tr A < 0 and det A > 0.
bool rest_state_stable(const Linearization& lin);

// h(k) = (f_u - d1 k)(g_v - d2 k) - f_v g_u; the mode with q^2 = k grows iff
// h(k) < 0 once the rest state is stable.
double turing_criterion_value(const Linearization& lin, double k);

enum class SignPattern { activator_inhibitor, positive_feedback, other };
SignPattern classify_sign_pattern(const Linearization& lin);
const char* to_string(SignPattern s);
const char* to_string(ModeClass c);

// Existence of an admissible integer q^2 (a sum of d squares) strictly inside
// the real-root interval of h. Throws NotRestStableError / EqualDiffusivitiesError.
TuringWitness has_turing_instability(const Linearization& lin, int d);

// The 2x2 block and its eigen-structure at continuous k = q^2 >= 0.
Eigen::Matrix2d mode_matrix(const Linearization& lin, double k);
ModeEigenData mode_eigen_from_k(const Linearization& lin, double k);
ModeEigenData dispersion_eigen(const Linearization& lin, const ModeIndex& q);

// Exact 2x2 propagator exp(t * mode_matrix(lin, k)) assembled from the
// eigen-structure (all three classes).
Eigen::Matrix2d mode_propagator(const Linearization& lin, double k, double t);

struct DispersionRow {
    double k = 0.0;
    double re_lambda_plus = 0.0;
    double re_lambda_minus = 0.0;
    double im_lambda = 0.0;
    ModeClass cls = ModeClass::generic;
};
std::vector<DispersionRow> dispersion_curve(const Linearization& lin,
                                            const std::vector<double>& k_grid);

// Scan of all modes with q^2 <= k_cut (k_cut = ceil(k_plus) + 1; past it h > 0
// and the negative trace force decay). The gap nu additionally uses an
// extended scan plus the closed-form tail bound
//   Re(lambda) <= max(f_u - d1 k, g_v - d2 k) + sqrt(max(0, f_v g_u)).
GrowingModeSummary growing_mode_summary(const Linearization& lin, int d);

// All q in dimension d with sum q_i^2 <= k_max, lexicographically ordered.
std::vector<ModeIndex> enumerate_modes_up_to(int d, int k_max);
bool representable_as_squares(int s, int d);

// Both variants of the discriminant-positivity inequality that accompanies the
// instability criterion; reported side by side in diagnostics.
struct RangeDiagnostics {
    double lhs = 0.0;            // f_u d2 + g_v d1
    double rhs_det = 0.0;        // 2 sqrt(d1 d2) det A
    double rhs_sqrt_det = 0.0;   // 2 sqrt(d1 d2 det A)
    bool holds_det_variant = false;
    bool holds_sqrt_variant = false;
};
RangeDiagnostics range_condition_diagnostics(const Linearization& lin);

}  // namespace turinglab
