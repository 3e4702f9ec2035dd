#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fracsym/field.hpp"
#include "fracsym/grid.hpp"

namespace fracsym {

class IncompatibleData : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// -gamma * Laplacian on a grid, as a sparse matrix acting on cell values.
struct Laplacian {
    GridPtr grid;
    double diffusion{1.0};
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;

    ScalarField apply(const ScalarField& u) const {
        require_grid(u, grid, "Laplacian::apply");
        const Eigen::Map<const Eigen::VectorXd> x(u.values.data(), static_cast<Eigen::Index>(u.size()));
        const Eigen::VectorXd y = matrix * x;
        return ScalarField(grid, std::vector<double>(y.data(), y.data() + y.size()));
    }
};

namespace detail {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Cell-centered second difference on n uniform cells of width h. Neumann closes
// with a reflecting ghost (zero flux), Dirichlet with an antisymmetric ghost
// (zero value at the wall).
inline void laplacian_1d_triplets(std::size_t n, double h, Boundary bc, double gamma, Triplets& out,
                                  std::size_t stride = 1, std::size_t offset = 0) {
    const double k = gamma / (h * h);
    const double wall = bc == Boundary::neumann ? 0.0 : 2.0 * k;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<int>(offset + i * stride);
        double diag = 0.0;
        if (i > 0) {
            out.emplace_back(row, static_cast<int>(offset + (i - 1) * stride), -k);
            diag += k;
        } else {
            diag += wall;
        }
        if (i + 1 < n) {
            out.emplace_back(row, static_cast<int>(offset + (i + 1) * stride), -k);
            diag += k;
        } else {
            diag += wall;
        }
        out.emplace_back(row, row, diag);
    }
}

inline Eigen::MatrixXd laplacian_1d_dense(std::size_t n, double h, Boundary bc, double gamma) {
    Triplets t;
    laplacian_1d_triplets(n, h, bc, gamma, t);
    Eigen::SparseMatrix<double> s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    s.setFromTriplets(t.begin(), t.end());
    return Eigen::MatrixXd(s);
}

struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // columns, orthonormal in sum(u v w)
};

inline void fix_signs(Eigen::MatrixXd& v) {
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        const double scale = v.col(k).cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            if (std::abs(v(i, k)) > 1e-8 * scale) {
                if (v(i, k) < 0.0) v.col(k) = -v.col(k);
                break;
            }
        }
    }
}

/// Eigenpairs of A with W A symmetric (W = diag(weights)), via the similarity W^{1/2} A W^{-1/2}.
inline EigenPairs weighted_eigensolve(const Eigen::MatrixXd& a, const Eigen::VectorXd& weights, Boundary bc,
                                      double total_measure) {
    const Eigen::VectorXd sw = weights.cwiseSqrt();
    Eigen::MatrixXd m = sw.asDiagonal() * a * sw.cwiseInverse().asDiagonal();
    m = 0.5 * (m + m.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw NumericalFailure("eigendecompose: eigensolver did not converge");
    EigenPairs p;
    p.values = solver.eigenvalues();
    p.vectors = sw.cwiseInverse().asDiagonal() * solver.eigenvectors();
    fix_signs(p.vectors);
    if (bc == Boundary::neumann) {
        const double scale = std::max(1.0, std::abs(p.values(p.values.size() - 1)));
        if (std::abs(p.values(0)) > 1e-9 * scale)
            throw NumericalFailure("eigendecompose: Neumann operator has no zero eigenvalue");
        p.values(0) = 0.0;
        p.vectors.col(0).setConstant(1.0 / std::sqrt(total_measure));
    }
    return p;
}

inline double weighted_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& w) {
    return std::sqrt((r.array().square() * w.array()).sum());
}

/// Residuals are measured relative to the spectral radius (floored at 1) so fine grids are not penalized.
inline void check_residuals(const Eigen::MatrixXd& a, const EigenPairs& p, const Eigen::VectorXd& w,
                            double tol = 1e-8) {
    const Eigen::MatrixXd r = a * p.vectors - p.vectors * p.values.asDiagonal();
    const double scale = std::max(1.0, p.values.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < r.cols(); ++k) {
        const double res = weighted_norm(r.col(k), w) / scale;
        if (!(res <= tol)) {
            std::ostringstream msg;
            msg << "eigendecompose: relative residual " << std::scientific << res << " for eigenpair " << k;
            throw NumericalFailure(msg.str());
        }
    }
}

}  // namespace detail

/**
 * Assembles -gamma * Delta on the grid.
 *
 * Interval and rectangle use the five/three-point cell-centered stencil with the
 * grid's boundary tag. Radial balls use the flux form
 * -gamma r^{1-N} (r^{N-1} v')' on shells: zero flux through r = 0 and v = 0 at
 * r = R (half-cell distance to the wall). Every variant is symmetric in the
 * measure-weighted inner product.
 */
inline Laplacian assemble_laplacian(const GridPtr& grid, double gamma = 1.0) {
    if (!(gamma > 0.0)) throw std::invalid_argument("assemble_laplacian: diffusion must be positive");
    const auto n = static_cast<Eigen::Index>(grid->size());
    detail::Triplets t;
    switch (grid->kind()) {
        case GridKind::interval:
            detail::laplacian_1d_triplets(grid->nx(), grid->lx() / grid->nx(), grid->boundary(), gamma, t);
            break;
        case GridKind::rectangle: {
            const std::size_t nx = grid->nx(), ny = grid->ny();
            const double hx = grid->lx() / nx, hy = grid->ly() / ny;
            for (std::size_t j = 0; j < ny; ++j)
                detail::laplacian_1d_triplets(nx, hx, grid->boundary(), gamma, t, 1, j * nx);
            for (std::size_t i = 0; i < nx; ++i)
                detail::laplacian_1d_triplets(ny, hy, grid->boundary(), gamma, t, nx, i);
            break;
        }
        case GridKind::radial_ball: {
            const std::size_t ns = grid->nx();
            const int dim = grid->dimension();
            const auto& r = grid->radii();
            const auto& vol = grid->measures();
            const double dr = r[1] - r[0];
            const double surface = dim * unit_ball_measure(dim);
            auto area = [&](double radius) { return surface * std::pow(radius, dim - 1); };
            for (std::size_t i = 0; i < ns; ++i) {
                const auto row = static_cast<int>(i);
                double diag = 0.0;
                if (i > 0) {
                    const double k = gamma * area(r[i]) / dr / vol[i];
                    t.emplace_back(row, row - 1, -k);
                    diag += k;
                }
                if (i + 1 < ns) {
                    const double k = gamma * area(r[i + 1]) / dr / vol[i];
                    t.emplace_back(row, row + 1, -k);
                    diag += k;
                } else {
                    diag += gamma * area(r[ns]) / (0.5 * dr) / vol[i];
                }
                t.emplace_back(row, row, diag);
            }
            break;
        }
    }
    Laplacian op;
    op.grid = grid;
    op.diffusion = gamma;
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(t.begin(), t.end());
    return op;
}

/**
 * Eigendecomposition of a discrete Laplacian, orthonormal in the
 * measure-weighted inner product, eigenvalues ascending.
 *
 * Two storage layouts: a dense basis (n x n), or for rectangles a tensor
 * basis phi_{ij}(x, y) = phi^x_i(x) phi^y_j(y) with lambda_{ij} = lambda^x_i + lambda^y_j.
 */
class SpectralOperator {
public:
    const GridPtr& grid() const { return grid_; }
    double diffusion() const { return diffusion_; }
    Boundary boundary() const { return grid_->boundary(); }
    std::size_t size() const { return eigenvalues_.size(); }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    double eigenvalue(std::size_t k) const { return eigenvalues_.at(k); }
    bool is_tensor() const { return tensor_; }

    /// <u, phi_k> for every k.
    std::vector<double> coefficients(const ScalarField& u) const {
        require_grid(u, grid_, "SpectralOperator::coefficients");
        const auto n = static_cast<Eigen::Index>(u.size());
        std::vector<double> c(u.size());
        if (!tensor_) {
            const Eigen::Map<const Eigen::VectorXd> x(u.values.data(), n);
            const Eigen::Map<const Eigen::VectorXd> w(grid_->measures().data(), n);
            Eigen::Map<Eigen::VectorXd>(c.data(), n) = basis_.transpose() * x.cwiseProduct(w);
            return c;
        }
        const auto nx = basis_x_.rows(), ny = basis_y_.rows();
        const Eigen::Map<const Eigen::MatrixXd> um(u.values.data(), nx, ny);
        const Eigen::MatrixXd cm = (basis_x_.transpose() * um * basis_y_) * grid_->measures()[0];
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = cm(order_x_[k], order_y_[k]);
        return c;
    }

    /// sum_k c_k phi_k.
    ScalarField synthesize(std::span<const double> c) const {
        if (c.size() != size()) throw std::invalid_argument("synthesize: coefficient count mismatch");
        const auto n = static_cast<Eigen::Index>(c.size());
        std::vector<double> out(c.size());
        if (!tensor_) {
            const Eigen::Map<const Eigen::VectorXd> cv(c.data(), n);
            Eigen::Map<Eigen::VectorXd>(out.data(), n) = basis_ * cv;
            return ScalarField(grid_, std::move(out));
        }
        const auto nx = basis_x_.rows(), ny = basis_y_.rows();
        Eigen::MatrixXd cm(nx, ny);
        for (std::size_t k = 0; k < c.size(); ++k) cm(order_x_[k], order_y_[k]) = c[k];
        Eigen::Map<Eigen::MatrixXd>(out.data(), nx, ny) = basis_x_ * cm * basis_y_.transpose();
        return ScalarField(grid_, std::move(out));
    }

    ScalarField eigenvector(std::size_t k) const {
        std::vector<double> c(size(), 0.0);
        c.at(k) = 1.0;
        return synthesize(c);
    }

    /// sum_k m_k <u, phi_k> phi_k.
    ScalarField apply_multipliers(const ScalarField& u, std::span<const double> m) const {
        if (m.size() != size()) throw std::invalid_argument("apply_multipliers: multiplier count mismatch");
        auto c = coefficients(u);
        for (std::size_t k = 0; k < c.size(); ++k) c[k] *= m[k];
        return synthesize(c);
    }

    ScalarField apply_function(const ScalarField& u, const std::function<double(double)>& fn) const {
        std::vector<double> m(size());
        for (std::size_t k = 0; k < m.size(); ++k) m[k] = fn(eigenvalues_[k]);
        return apply_multipliers(u, m);
    }

    friend SpectralOperator eigendecompose(const Laplacian&);
    friend SpectralOperator eigendecompose_dense(const Laplacian&);

private:
    GridPtr grid_;
    double diffusion_{1.0};
    std::vector<double> eigenvalues_;
    bool tensor_{false};
    Eigen::MatrixXd basis_;
    Eigen::MatrixXd basis_x_, basis_y_;
    std::vector<Eigen::Index> order_x_, order_y_;
};

/// Generic dense path: one eigensolve of the full operator.
inline SpectralOperator eigendecompose_dense(const Laplacian& op) {
    const auto& g = op.grid;
    const Eigen::MatrixXd a(op.matrix);
    const Eigen::Map<const Eigen::VectorXd> w(g->measures().data(), static_cast<Eigen::Index>(g->size()));
    auto pairs = detail::weighted_eigensolve(a, w, g->boundary(), g->total_measure());
    detail::check_residuals(a, pairs, w);
    SpectralOperator s;
    s.grid_ = g;
    s.diffusion_ = op.diffusion;
    s.eigenvalues_.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());
    s.basis_ = std::move(pairs.vectors);
    return s;
}

/// Rectangles compose 1D eigenpairs; everything else goes through the dense path.
inline SpectralOperator eigendecompose(const Laplacian& op) {
    const auto& g = op.grid;
    if (g->kind() != GridKind::rectangle) return eigendecompose_dense(op);

    auto solve_1d = [&](std::size_t n, double length) {
        const double h = length / static_cast<double>(n);
        const Eigen::MatrixXd a = detail::laplacian_1d_dense(n, h, g->boundary(), op.diffusion);
        const Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), h);
        auto p = detail::weighted_eigensolve(a, w, g->boundary(), length);
        detail::check_residuals(a, p, w, 0.5e-8);
        return p;
    };
    const auto px = solve_1d(g->nx(), g->lx());
    const auto py = solve_1d(g->ny(), g->ly());

    const auto nx = static_cast<Eigen::Index>(g->nx()), ny = static_cast<Eigen::Index>(g->ny());
    std::vector<std::size_t> idx(static_cast<std::size_t>(nx * ny));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto lam = [&](std::size_t f) {
        return px.values(static_cast<Eigen::Index>(f) % nx) + py.values(static_cast<Eigen::Index>(f) / nx);
    };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return lam(a) < lam(b); });

    SpectralOperator s;
    s.grid_ = g;
    s.diffusion_ = op.diffusion;
    s.tensor_ = true;
    s.basis_x_ = px.vectors;
    s.basis_y_ = py.vectors;
    s.eigenvalues_.resize(idx.size());
    s.order_x_.resize(idx.size());
    s.order_y_.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        s.eigenvalues_[k] = lam(idx[k]);
        s.order_x_[k] = static_cast<Eigen::Index>(idx[k]) % nx;
        s.order_y_[k] = static_cast<Eigen::Index>(idx[k]) / nx;
    }
    return s;
}

inline SpectralOperator make_spectral(const GridPtr& grid, double gamma = 1.0) {
    return eigendecompose(assemble_laplacian(grid, gamma));
}

// ---------------------------------------------------------------------------
// functional calculus

inline void check_sigma(double sigma) {
    if (!(sigma >= 0.0 && sigma <= 1.0)) throw std::invalid_argument("sigma must lie in [0, 1]");
}

/// lambda^sigma, with the kernel (lambda = 0) mapped to 0.
inline double fractional_symbol(double lambda, double sigma) {
    return lambda > 0.0 ? std::pow(lambda, sigma) : 0.0;
}

inline std::vector<double> fractional_symbols(const SpectralOperator& op, double sigma) {
    check_sigma(sigma);
    std::vector<double> m(op.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = fractional_symbol(op.eigenvalue(k), sigma);
    return m;
}

inline ScalarField apply_fractional(const SpectralOperator& op, double sigma, const ScalarField& u) {
    return op.apply_multipliers(u, fractional_symbols(op, sigma));
}

/// Spectral inverse of (symbol + c) given per-mode symbols.
inline ScalarField solve_with_symbols(const SpectralOperator& op, std::span<const double> symbols, double c,
                                      const ScalarField& f) {
    if (!(c >= 0.0)) throw std::invalid_argument("solve_elliptic: c must be >= 0");
    auto coeffs = op.coefficients(f);
    if (c == 0.0 && op.boundary() == Boundary::neumann) {
        const double norm = l2_norm(f);
        if (std::abs(coeffs[0]) > 1e-10 * norm)
            throw IncompatibleData("solve_elliptic: source violates the compatibility condition (mean " +
                                   std::to_string(mean(f)) + ")");
    }
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double d = symbols[k] + c;
        coeffs[k] = d > 0.0 ? coeffs[k] / d : 0.0;
    }
    return op.synthesize(coeffs);
}

/**
 * Solves (-Delta)^sigma u + c u = f. For c = 0 with Neumann conditions the
 * zero-mean solution is returned and f must have (numerically) zero mean.
 */
inline ScalarField solve_elliptic(const SpectralOperator& op, double sigma, double c, const ScalarField& f) {
    return solve_with_symbols(op, fractional_symbols(op, sigma), c, f);
}

inline ScalarField heat_semigroup(const SpectralOperator& op, double t, const ScalarField& u) {
    if (!(t >= 0.0)) throw std::invalid_argument("heat_semigroup: t must be >= 0");
    return op.apply_function(u, [t](double lambda) { return std::exp(-lambda * t); });
}

}  // namespace fracsym
