#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracsym/field.hpp"
#include "fracsym/spectral.hpp"

namespace fracsym {

/**
 * Seeded generator for reproducible test data: std::mt19937_64 (fully specified
 * by the standard), with uniforms formed from the top 53 bits so results do not
 * depend on the standard library's distribution implementations.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

/// Independent uniform values in [lo, hi) per cell.
inline ScalarField random_cell_field(const GridPtr& grid, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(grid->size());
    for (double& x : v) x = rng.uniform(lo, hi);
    return ScalarField(grid, std::move(v));
}

/**
 * Smooth random field sum_{i,j < modes} a_ij cos(i pi x / lx) cos(j pi y / ly),
 * a_ij uniform in [-1, 1). It is a fixed function of (x, y), so the same seed
 * gives the same continuum datum at every resolution.
 */
inline ScalarField random_cosine_field(const GridPtr& grid, std::uint64_t seed, int modes = 4) {
    if (grid->kind() == GridKind::radial_ball) throw std::invalid_argument("random_cosine_field: needs interval or rectangle");
    Rng rng(seed);
    const int my = grid->kind() == GridKind::rectangle ? modes : 1;
    std::vector<double> a(static_cast<std::size_t>(modes * my));
    for (double& x : a) x = rng.uniform(-1.0, 1.0);
    const double lx = grid->lx();
    const double ly = grid->kind() == GridKind::rectangle ? grid->ly() : 1.0;
    return ScalarField::sample(grid, [&](double x, double y) {
        double s = 0.0;
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < modes; ++i)
                s += a[static_cast<std::size_t>(i + modes * j)] * std::cos(i * std::numbers::pi * x / lx) *
                     std::cos(j * std::numbers::pi * y / ly);
        return s;
    });
}

/// A positive and a negative Gaussian bump of width 0.1 (relative to the sides).
inline ScalarField two_bump_field(const GridPtr& grid, double amplitude = 1.0) {
    const double lx = grid->lx();
    const double ly = grid->kind() == GridKind::rectangle ? grid->ly() : 1.0;
    const bool two_d = grid->kind() == GridKind::rectangle;
    return ScalarField::sample(grid, [&](double x, double y) {
        auto bump = [&](double cx, double cy) {
            const double dx = (x - cx * lx) / (0.1 * lx);
            const double dy = two_d ? (y - cy * ly) / (0.1 * ly) : 0.0;
            return std::exp(-0.5 * (dx * dx + dy * dy));
        };
        return amplitude * (bump(0.25, 0.25) - bump(0.7, 0.6));
    });
}

/// The k-th eigenvector of the operator, scaled by amplitude.
inline ScalarField eigenmode_field(const SpectralOperator& op, std::size_t k, double amplitude = 1.0) {
    if (k >= op.size()) throw std::invalid_argument("eigenmode_field: mode index out of range");
    return amplitude * op.eigenvector(k);
}

/// Subtracts the mean (the compatibility projection for c = 0 Neumann problems).
inline ScalarField project_zero_mean(const ScalarField& f) { return f + (-mean(f)); }

}  // namespace fracsym
