#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracsym/grid.hpp"

namespace fracsym {

/// Real values attached to the cells of a grid.
struct ScalarField {
    GridPtr grid;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (!grid) throw std::invalid_argument("ScalarField: null grid");
        if (values.size() != grid->size()) throw std::invalid_argument("ScalarField: size mismatch with grid");
    }

    static ScalarField zeros(GridPtr g) { return constant(std::move(g), 0.0); }
    static ScalarField constant(GridPtr g, double c) {
        const auto n = g->size();
        return ScalarField(std::move(g), std::vector<double>(n, c));
    }
    /// Samples fn at cell centroids (radial grids pass the shell midpoint radius as x).
    static ScalarField sample(GridPtr g, const std::function<double(double, double)>& fn) {
        std::vector<double> v(g->size());
        const auto& c = g->centroids();
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(c[i][0], c[i][1]);
        return ScalarField(std::move(g), std::move(v));
    }

    std::size_t size() const { return values.size(); }
    std::span<const double> measures() const { return grid->measures(); }
};

inline void require_grid(const ScalarField& u, const GridPtr& g, const char* where) {
    if (u.grid != g && (u.size() != g->size() || u.grid->measures() != g->measures()))
        throw std::invalid_argument(std::string(where) + ": field does not live on the operator's grid");
}

inline void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where) {
    if (a.grid != b.grid && (a.grid->size() != b.grid->size() || a.grid->measures() != b.grid->measures()))
        throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

/// Measure-weighted inner product sum u v |cell|.
inline double inner(const ScalarField& u, const ScalarField& v) {
    require_same_grid(u, v, "inner");
    const auto m = u.measures();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u.values[i] * v.values[i] * m[i];
    return s;
}

inline double integral(const ScalarField& u) {
    const auto m = u.measures();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u.values[i] * m[i];
    return s;
}

inline double mean(const ScalarField& u) { return integral(u) / u.grid->total_measure(); }

/// L^p norm on the grid; p = infinity gives the max of |u|.
inline double lp_norm(const ScalarField& u, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : u.values) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    const auto m = u.measures();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::pow(std::abs(u.values[i]), p) * m[i];
    return std::pow(s, 1.0 / p);
}

inline double l2_norm(const ScalarField& u) { return std::sqrt(std::max(0.0, inner(u, u))); }

inline double max_value(const ScalarField& u) {
    return u.values.empty() ? 0.0 : *std::max_element(u.values.begin(), u.values.end());
}
inline double min_value(const ScalarField& u) {
    return u.values.empty() ? 0.0 : *std::min_element(u.values.begin(), u.values.end());
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "operator+");
    ScalarField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r.values[i] += b.values[i];
    return r;
}

inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "operator-");
    ScalarField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r.values[i] -= b.values[i];
    return r;
}

inline ScalarField operator*(double s, const ScalarField& a) {
    ScalarField r = a;
    for (double& v : r.values) v *= s;
    return r;
}

inline ScalarField operator+(const ScalarField& a, double c) {
    ScalarField r = a;
    for (double& v : r.values) v += c;
    return r;
}

inline ScalarField positive_part(const ScalarField& a) {
    ScalarField r = a;
    for (double& v : r.values) v = std::max(v, 0.0);
    return r;
}

inline ScalarField negative_part(const ScalarField& a) {
    ScalarField r = a;
    for (double& v : r.values) v = std::max(-v, 0.0);
    return r;
}

inline double max_abs_difference(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "max_abs_difference");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace fracsym
