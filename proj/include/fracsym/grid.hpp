#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fracsym {

enum class GridKind { interval, rectangle, radial_ball };
enum class Boundary { neumann, dirichlet };

inline std::string to_string(GridKind k) {
    switch (k) {
        case GridKind::interval: return "interval";
        case GridKind::rectangle: return "rectangle";
        case GridKind::radial_ball: return "radial_ball";
    }
    return "unknown";
}

inline std::string to_string(Boundary b) {
    return b == Boundary::neumann ? "neumann" : "dirichlet";
}

/// Lebesgue measure of the unit ball in R^N.
inline double unit_ball_measure(int dimension) {
    if (dimension < 1) throw std::invalid_argument("unit_ball_measure: dimension must be >= 1");
    const double n = dimension;
    return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

/**
 * Grid: an immutable, uniformly partitioned domain.
 *
 * Cells of an interval or rectangle carry their centroid; cells of a radial
 * ball are spherical shells r_i <= |x| < r_{i+1} whose "centroid" is the
 * midpoint radius (stored in coordinate 0). Rectangle cells are ordered with
 * x varying fastest: index = i + nx * j.
 */
class Grid {
public:
    GridKind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    Boundary boundary() const { return boundary_; }
    std::size_t size() const { return measures_.size(); }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double radius() const { return radius_; }
    double total_measure() const { return total_measure_; }

    const std::vector<double>& measures() const { return measures_; }
    const std::vector<std::array<double, 2>>& centroids() const { return centroids_; }

    /// Shell interface radii r_0 = 0 < ... < r_n = R (radial grids only).
    const std::vector<double>& radii() const { return radii_; }

    double max_cell_measure() const {
        double m = 0.0;
        for (double v : measures_) m = std::max(m, v);
        return m;
    }

    /// Largest cell width; the h in first-order discretization estimates.
    double cell_width() const {
        switch (kind_) {
            case GridKind::interval: return lx_ / static_cast<double>(nx_);
            case GridKind::rectangle:
                return std::max(lx_ / static_cast<double>(nx_), ly_ / static_cast<double>(ny_));
            case GridKind::radial_ball: return radius_ / static_cast<double>(nx_);
        }
        return 0.0;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["kind"] = to_string(kind_);
        j["N"] = dimension_;
        j["bc"] = to_string(boundary_);
        switch (kind_) {
            case GridKind::interval:
                j["n"] = nx_;
                j["lengths"] = {lx_};
                break;
            case GridKind::rectangle:
                j["n"] = {nx_, ny_};
                j["lengths"] = {lx_, ly_};
                break;
            case GridKind::radial_ball:
                j["n"] = nx_;
                j["radius"] = radius_;
                break;
        }
        j["total_measure"] = total_measure_;
        return j;
    }

    friend std::shared_ptr<const Grid> build_interval(std::size_t, double, Boundary);
    friend std::shared_ptr<const Grid> build_rectangle(std::size_t, std::size_t, double, double, Boundary);
    friend std::shared_ptr<const Grid> build_radial_ball(std::size_t, int, double);

private:
    Grid() = default;

    GridKind kind_{GridKind::interval};
    int dimension_{1};
    Boundary boundary_{Boundary::neumann};
    std::size_t nx_{0}, ny_{1};
    double lx_{0.0}, ly_{0.0}, radius_{0.0};
    double total_measure_{0.0};
    std::vector<double> measures_;
    std::vector<std::array<double, 2>> centroids_;
    std::vector<double> radii_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_interval(std::size_t n, double length, Boundary bc = Boundary::neumann) {
    if (n < 2) throw std::invalid_argument("build_interval: need at least 2 cells");
    if (!(length > 0.0)) throw std::invalid_argument("build_interval: length must be positive");
    auto g = std::shared_ptr<Grid>(new Grid());
    g->kind_ = GridKind::interval;
    g->dimension_ = 1;
    g->boundary_ = bc;
    g->nx_ = n;
    g->lx_ = length;
    const double h = length / static_cast<double>(n);
    g->measures_.assign(n, h);
    g->centroids_.resize(n);
    for (std::size_t i = 0; i < n; ++i) g->centroids_[i] = {(static_cast<double>(i) + 0.5) * h, 0.0};
    g->total_measure_ = length;
    return g;
}

inline GridPtr build_rectangle(std::size_t nx, std::size_t ny, double lx, double ly,
                               Boundary bc = Boundary::neumann) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("build_rectangle: need at least 2 cells per side");
    if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("build_rectangle: degenerate side length");
    auto g = std::shared_ptr<Grid>(new Grid());
    g->kind_ = GridKind::rectangle;
    g->dimension_ = 2;
    g->boundary_ = bc;
    g->nx_ = nx;
    g->ny_ = ny;
    g->lx_ = lx;
    g->ly_ = ly;
    const double hx = lx / static_cast<double>(nx);
    const double hy = ly / static_cast<double>(ny);
    g->measures_.assign(nx * ny, hx * hy);
    g->centroids_.resize(nx * ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            g->centroids_[i + nx * j] = {(static_cast<double>(i) + 0.5) * hx, (static_cast<double>(j) + 0.5) * hy};
    g->total_measure_ = lx * ly;
    return g;
}

/// Centered ball of the given measure, split into n uniform radial shells.
/// Always carries homogeneous Dirichlet conditions on |x| = R.
inline GridPtr build_radial_ball(std::size_t n, int dimension, double target_measure) {
    if (n < 2) throw std::invalid_argument("build_radial_ball: need at least 2 shells");
    if (dimension < 1) throw std::invalid_argument("build_radial_ball: dimension must be >= 1");
    if (!(target_measure > 0.0)) throw std::invalid_argument("build_radial_ball: target_measure must be positive");
    auto g = std::shared_ptr<Grid>(new Grid());
    g->kind_ = GridKind::radial_ball;
    g->dimension_ = dimension;
    g->boundary_ = Boundary::dirichlet;
    g->nx_ = n;
    const double omega = unit_ball_measure(dimension);
    const double R = std::pow(target_measure / omega, 1.0 / dimension);
    g->radius_ = R;
    g->lx_ = R;
    const double dr = R / static_cast<double>(n);
    g->radii_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g->radii_[i] = dr * static_cast<double>(i);
    g->radii_[n] = R;
    // Fractions (i/n)^N of the target measure telescope exactly to the total.
    g->measures_.resize(n);
    g->centroids_.resize(n);
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::pow(static_cast<double>(i) / nn, dimension);
        const double b = std::pow(static_cast<double>(i + 1) / nn, dimension);
        g->measures_[i] = target_measure * (b - a);
        g->centroids_[i] = {(static_cast<double>(i) + 0.5) * dr, 0.0};
    }
    double total = 0.0;
    for (double m : g->measures_) total += m;
    g->total_measure_ = total;
    return g;
}

}  // namespace fracsym
