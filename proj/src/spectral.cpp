#include "turinglab/spectral.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace turinglab {

namespace {
constexpr double kPi = std::numbers::pi;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid make_grid(int d, int n) {
    if (d < 1 || d > 3) throw ConfigError("grid: dimension must be 1, 2 or 3");
    if (n < 4 || !power_of_two(n))
        throw ConfigError("grid: n must be a power of two and at least 4");
    return Grid{d, n};
}

double midpoint_node(int j, int npts) { return kPi * (j + 0.5) / npts; }

Eigen::MatrixXd cosine_synthesis_matrix(int n_pts, int n_modes) {
    Eigen::MatrixXd M(n_pts, n_modes);
    for (int j = 0; j < n_pts; ++j) {
        const double x = midpoint_node(j, n_pts);
        for (int q = 0; q < n_modes; ++q) M(j, q) = std::cos(q * x);
    }
    return M;
}

Eigen::MatrixXd cosine_analysis_matrix(int n_modes, int n_pts) {
    Eigen::MatrixXd M(n_modes, n_pts);
    for (int q = 0; q < n_modes; ++q) {
        const double cq = (q == 0 ? 1.0 : 2.0) / n_pts;
        for (int j = 0; j < n_pts; ++j)
            M(q, j) = cq * std::cos(q * midpoint_node(j, n_pts));
    }
    return M;
}

Eigen::MatrixXd sine_gradient_matrix(int n_pts, int n_modes) {
    Eigen::MatrixXd M(n_pts, n_modes);
    for (int j = 0; j < n_pts; ++j) {
        const double x = midpoint_node(j, n_pts);
        for (int q = 0; q < n_modes; ++q) M(j, q) = -q * std::sin(q * x);
    }
    return M;
}

Eigen::MatrixXd sine_divergence_matrix(int n_modes, int n_pts) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_modes, n_pts);
    for (int q = 1; q < n_modes; ++q)
        for (int j = 0; j < n_pts; ++j)
            M(q, j) = (2.0 * q / n_pts) * std::sin(q * midpoint_node(j, n_pts));
    return M;
}

Eigen::ArrayXXd apply_axis(const Eigen::MatrixXd& M, const Eigen::ArrayXXd& tensor,
                           const std::array<int, 3>& dims, int d, int ax) {
    const int c_in = static_cast<int>(M.cols());
    const int c_out = static_cast<int>(M.rows());
    if (dims[ax] != c_in) throw Error("apply_axis: extent mismatch");

    int outer = 1, inner = 1;
    for (int i = 0; i < ax; ++i) outer *= dims[i];
    for (int i = ax + 1; i < d; ++i) inner *= dims[i];

    const int cells_out = outer * c_out * inner;
    Eigen::ArrayXXd out(cells_out, tensor.cols());
    for (int comp = 0; comp < tensor.cols(); ++comp) {
        const double* src = tensor.col(comp).data();
        double* dst = out.col(comp).data();
        for (int o = 0; o < outer; ++o) {
            for (int i = 0; i < inner; ++i) {
                Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<>> line_in(
                    src + (o * c_in) * inner + i, c_in, Eigen::InnerStride<>(inner));
                Eigen::Map<Eigen::VectorXd, 0, Eigen::InnerStride<>> line_out(
                    dst + (o * c_out) * inner + i, c_out, Eigen::InnerStride<>(inner));
                line_out.noalias() = M * line_in;
            }
        }
    }
    return out;
}

CosineTransform::CosineTransform(const Grid& grid)
    : grid_(make_grid(grid.d, grid.n)),
      syn_(cosine_synthesis_matrix(grid.n, grid.n)),
      ana_(cosine_analysis_matrix(grid.n, grid.n)) {}

Eigen::ArrayXXd CosineTransform::analyze(const Eigen::ArrayXXd& values) const {
    if (values.rows() != grid_.num_cells())
        throw Error("analyze: value count does not match grid");
    std::array<int, 3> dims{grid_.n, grid_.n, grid_.n};
    Eigen::ArrayXXd t = values;
    for (int ax = 0; ax < grid_.d; ++ax) t = apply_axis(ana_, t, dims, grid_.d, ax);
    return t;
}

Eigen::ArrayXXd CosineTransform::synthesize(const Eigen::ArrayXXd& coeffs) const {
    if (coeffs.rows() != grid_.num_cells())
        throw Error("synthesize: coefficient count does not match grid");
    std::array<int, 3> dims{grid_.n, grid_.n, grid_.n};
    Eigen::ArrayXXd t = coeffs;
    for (int ax = 0; ax < grid_.d; ++ax) t = apply_axis(syn_, t, dims, grid_.d, ax);
    return t;
}

SpectralField field_from_coeffs(const CosineTransform& tf, Eigen::ArrayXXd coeffs) {
    SpectralField f;
    f.grid = tf.grid();
    f.values = tf.synthesize(coeffs);
    f.coeffs = std::move(coeffs);
    return f;
}

SpectralField field_from_values(const CosineTransform& tf, Eigen::ArrayXXd values) {
    SpectralField f;
    f.grid = tf.grid();
    f.coeffs = tf.analyze(values);
    f.values = std::move(values);
    return f;
}

int flat_index(const Grid& grid, const ModeIndex& q) {
    if (q.d != grid.d) throw Error("flat_index: dimension mismatch");
    int idx = 0;
    for (int i = 0; i < grid.d; ++i) {
        if (q.q[i] < 0 || q.q[i] >= grid.n) throw Error("flat_index: mode out of band");
        idx = idx * grid.n + q.q[i];
    }
    return idx;
}

ModeIndex mode_at(const Grid& grid, int flat) {
    std::vector<int> qs(grid.d, 0);
    for (int i = grid.d - 1; i >= 0; --i) {
        qs[i] = flat % grid.n;
        flat /= grid.n;
    }
    return make_mode(qs);
}

Eigen::VectorXd mode_weights(const Grid& grid) {
    const int cells = grid.num_cells();
    Eigen::VectorXd w(cells);
    for (int idx = 0; idx < cells; ++idx) {
        int rest = idx;
        double mu = 1.0;
        for (int i = grid.d - 1; i >= 0; --i) {
            const int qi = rest % grid.n;
            rest /= grid.n;
            mu *= (qi == 0 ? kPi : kPi / 2.0);
        }
        w[idx] = mu;
    }
    return w;
}

Eigen::VectorXi mode_q2(const Grid& grid) {
    const int cells = grid.num_cells();
    Eigen::VectorXi q2(cells);
    for (int idx = 0; idx < cells; ++idx) {
        int rest = idx;
        int s = 0;
        for (int i = grid.d - 1; i >= 0; --i) {
            const int qi = rest % grid.n;
            rest /= grid.n;
            s += qi * qi;
        }
        q2[idx] = s;
    }
    return q2;
}

double l2_norm(const Grid& grid, const Eigen::ArrayXXd& coeffs) {
    const Eigen::VectorXd mu = mode_weights(grid);
    double s = 0.0;
    for (int i = 0; i < coeffs.rows(); ++i)
        s += mu[i] * (coeffs(i, 0) * coeffs(i, 0) + coeffs(i, 1) * coeffs(i, 1));
    return std::sqrt(s);
}

double h2_norm(const Grid& grid, const Eigen::ArrayXXd& coeffs) {
    const Eigen::VectorXd mu = mode_weights(grid);
    const Eigen::VectorXi q2 = mode_q2(grid);
    double s = 0.0;
    for (int i = 0; i < coeffs.rows(); ++i) {
        const double k = q2[i];
        const double w = mu[i] * (1.0 + k + k * k);
        s += w * (coeffs(i, 0) * coeffs(i, 0) + coeffs(i, 1) * coeffs(i, 1));
    }
    return std::sqrt(s);
}

double quadrature_l2_norm(const Grid& grid, const Eigen::ArrayXXd& values) {
    double cell = 1.0;
    for (int i = 0; i < grid.d; ++i) cell *= kPi / grid.n;
    return std::sqrt(cell * (values.col(0).square().sum() + values.col(1).square().sum()));
}

ModeSpectrum build_mode_spectrum(const Linearization& lin, const Grid& grid) {
    ModeSpectrum s;
    s.grid = grid;
    s.lin = lin;
    const Eigen::VectorXi q2 = mode_q2(grid);
    s.modes.reserve(grid.num_cells());
    // The eigen-structure depends on q only through q^2; cache by value.
    std::map<int, ModeEigenData> cache;
    for (int i = 0; i < grid.num_cells(); ++i) {
        auto it = cache.find(q2[i]);
        if (it == cache.end())
            it = cache.emplace(q2[i], mode_eigen_from_k(lin, double(q2[i]))).first;
        s.modes.push_back(it->second);
    }
    return s;
}

Eigen::Vector2d mode_coordinates(const ModeEigenData& e, const Eigen::Vector2d& w) {
    // Basis columns: (r-, r+) generic, (r, r') defective, (Re r, Im r) complex.
    const Eigen::Vector2d& b0 = (e.cls == ModeClass::generic) ? e.r_minus : e.r_plus;
    const Eigen::Vector2d& b1 = (e.cls == ModeClass::generic) ? e.r_plus : e.r_minus;
    const double det = b0[0] * b1[1] - b1[0] * b0[1];
    if (std::abs(det) < 1e-14)
        throw DegenerateBasisError("mode_coordinates: basis determinant below 1e-14");
    return {(w[0] * b1[1] - b1[0] * w[1]) / det, (b0[0] * w[1] - w[0] * b0[1]) / det};
}

Eigen::Vector2d mode_recompose(const ModeEigenData& e, const Eigen::Vector2d& ab) {
    if (e.cls == ModeClass::generic) return ab[0] * e.r_minus + ab[1] * e.r_plus;
    return ab[0] * e.r_plus + ab[1] * e.r_minus;
}

Eigen::Vector2d mode_evolve(const ModeEigenData& e, const Eigen::Vector2d& ab, double t) {
    switch (e.cls) {
        case ModeClass::generic:
            return ab[0] * e.r_minus * std::exp(e.lambda_minus * t) +
                   ab[1] * e.r_plus * std::exp(e.lambda_plus * t);
        case ModeClass::defective: {
            // (w r + w' r') + w' r t, all scaled by exp(lambda t).
            const Eigen::Vector2d base =
                ab[0] * e.r_plus + ab[1] * e.r_minus + ab[1] * t * e.r_plus;
            return std::exp(e.lambda_plus * t) * base;
        }
        default: {
            const double ct = std::cos(e.lambda_minus * t);
            const double st = std::sin(e.lambda_minus * t);
            const Eigen::Vector2d base = ab[0] * (ct * e.r_plus - st * e.r_minus) +
                                         ab[1] * (st * e.r_plus + ct * e.r_minus);
            return std::exp(e.lambda_plus * t) * base;
        }
    }
}

EigenCoordinates eigen_decompose(const Eigen::ArrayXXd& coeffs,
                                 const ModeSpectrum& spectrum) {
    if (coeffs.rows() != static_cast<Eigen::Index>(spectrum.modes.size()))
        throw Error("eigen_decompose: spectrum does not cover the coefficient band");
    EigenCoordinates c;
    c.coords.resize(coeffs.rows(), 2);
    for (int i = 0; i < coeffs.rows(); ++i) {
        const Eigen::Vector2d ab =
            mode_coordinates(spectrum.modes[i], Eigen::Vector2d(coeffs(i, 0), coeffs(i, 1)));
        c.coords(i, 0) = ab[0];
        c.coords(i, 1) = ab[1];
    }
    return c;
}

Eigen::ArrayXXd recompose(const EigenCoordinates& coords, const ModeSpectrum& spectrum) {
    Eigen::ArrayXXd out(coords.coords.rows(), 2);
    for (int i = 0; i < coords.coords.rows(); ++i) {
        const Eigen::Vector2d w = mode_recompose(
            spectrum.modes[i], Eigen::Vector2d(coords.coords(i, 0), coords.coords(i, 1)));
        out(i, 0) = w[0];
        out(i, 1) = w[1];
    }
    return out;
}

Eigen::ArrayXXd linear_propagate(const EigenCoordinates& coords,
                                 const ModeSpectrum& spectrum, double t) {
    Eigen::ArrayXXd out(coords.coords.rows(), 2);
    for (int i = 0; i < coords.coords.rows(); ++i) {
        const Eigen::Vector2d w = mode_evolve(
            spectrum.modes[i], Eigen::Vector2d(coords.coords(i, 0), coords.coords(i, 1)), t);
        out(i, 0) = w[0];
        out(i, 1) = w[1];
    }
    return out;
}

}  // namespace turinglab
