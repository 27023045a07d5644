#pragma once

// Cosine-basis representation of two-component Neumann fields on (0,pi)^d:
// midpoint-sampled transforms, Parseval norms, decomposition of coefficients
// into per-mode eigen-coordinates, and the exact solution operator of the
// linearized system applied in coefficient space.
//
// Nodes are the midpoints x_j = pi*(j+1/2)/n, which make the cosine family
// {prod_i cos(q_i x_i) : 0 <= q_i <= n-1} discretely orthogonal without
// endpoint weights, so analysis/synthesis form an exact inverse pair.

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "turinglab/errors.hpp"
#include "turinglab/kinetics.hpp"
#include "turinglab/linear_analysis.hpp"

namespace turinglab {

struct Grid {
    int d = 1;  // dimension, 1..3
    int n = 64; // points (= modes) per axis, power of two, >= 4

    int num_cells() const {
        int c = 1;
        for (int i = 0; i < d; ++i) c *= n;
        return c;
    }
};

Grid make_grid(int d, int n);

// Axis coordinate of sample j on an npts-point midpoint grid.
double midpoint_node(int j, int npts);

// Per-axis dense operators (row index = output slot, column = input slot).
Eigen::MatrixXd cosine_synthesis_matrix(int n_pts, int n_modes);  // cos(q x_j)
Eigen::MatrixXd cosine_analysis_matrix(int n_modes, int n_pts);   // (c_q/n) cos(q x_j)
Eigen::MatrixXd sine_gradient_matrix(int n_pts, int n_modes);     // -q sin(q x_j)
// Maps axis-flux samples to the cosine coefficients of its axis derivative:
// row q = (2q/n_pts) sin(q x_j), row 0 = 0 (a divergence has zero mean).
Eigen::MatrixXd sine_divergence_matrix(int n_modes, int n_pts);

// Applies M along axis `ax` of a row-major d-dimensional tensor stored as one
// column per field component; dims[ax] must equal M.cols().
Eigen::ArrayXXd apply_axis(const Eigen::MatrixXd& M, const Eigen::ArrayXXd& tensor,
                           const std::array<int, 3>& dims, int d, int ax);

class CosineTransform {
  public:
    explicit CosineTransform(const Grid& grid);
    const Grid& grid() const { return grid_; }
    // values (n^d x 2)  ->  coefficients (n^d x 2)
    Eigen::ArrayXXd analyze(const Eigen::ArrayXXd& values) const;
    // coefficients (n^d x 2)  ->  values (n^d x 2)
    Eigen::ArrayXXd synthesize(const Eigen::ArrayXXd& coeffs) const;

  private:
    Grid grid_;
    Eigen::MatrixXd syn_, ana_;
};

// A two-component field carried in both representations; the pair is kept
// consistent by construction.
struct SpectralField {
    Grid grid;
    Eigen::ArrayXXd values;  // num_cells x 2
    Eigen::ArrayXXd coeffs;  // num_cells x 2
};

SpectralField field_from_coeffs(const CosineTransform& tf, Eigen::ArrayXXd coeffs);
SpectralField field_from_values(const CosineTransform& tf, Eigen::ArrayXXd values);

// Flattened (row-major) position of a mode and its inverse.
int flat_index(const Grid& grid, const ModeIndex& q);
ModeIndex mode_at(const Grid& grid, int flat);

// Parseval weights mu_q = prod_i (pi if q_i == 0 else pi/2) and cached q^2.
Eigen::VectorXd mode_weights(const Grid& grid);
Eigen::VectorXi mode_q2(const Grid& grid);

// ||w||_{L2} = sqrt(sum_q mu_q (u_q^2 + v_q^2)); the H2 variant weights each
// mode by (1 + q^2 + q^4).
double l2_norm(const Grid& grid, const Eigen::ArrayXXd& coeffs);
double h2_norm(const Grid& grid, const Eigen::ArrayXXd& coeffs);

// Midpoint-rule L2 norm computed from grid samples; agrees with the Parseval
// norm for resolved fields and serves as an independent cross-check.
double quadrature_l2_norm(const Grid& grid, const Eigen::ArrayXXd& values);

// Eigen-structure of every mode block on the grid band (flattened layout).
struct ModeSpectrum {
    Grid grid;
    Linearization lin;
    std::vector<ModeEigenData> modes;
};
ModeSpectrum build_mode_spectrum(const Linearization& lin, const Grid& grid);

// Coefficients of w_q in the basis attached to its mode class:
// (w^-, w^+) generic, (w, w') defective, (w^Re, w^Im) complex.
struct EigenCoordinates {
    Eigen::ArrayXXd coords;  // num_cells x 2
};

// Cramer solve of the per-mode 2x2 basis system; DegenerateBasisError when
// the basis determinant magnitude drops below 1e-14.
Eigen::Vector2d mode_coordinates(const ModeEigenData& e, const Eigen::Vector2d& w);
Eigen::Vector2d mode_recompose(const ModeEigenData& e, const Eigen::Vector2d& ab);
// Closed-form evolution of one mode's coordinates over time t.
Eigen::Vector2d mode_evolve(const ModeEigenData& e, const Eigen::Vector2d& ab, double t);

EigenCoordinates eigen_decompose(const Eigen::ArrayXXd& coeffs, const ModeSpectrum& spectrum);
Eigen::ArrayXXd recompose(const EigenCoordinates& coords, const ModeSpectrum& spectrum);
Eigen::ArrayXXd linear_propagate(const EigenCoordinates& coords,
                                 const ModeSpectrum& spectrum, double t);

}  // namespace turinglab
