#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracsym/field.hpp"
#include "fracsym/spectral.hpp"

namespace fracsym {

inline void check_open_sigma(double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("sigma must lie in (0, 1)");
}

/// kappa_sigma = 2^{1-2 sigma} Gamma(1 - sigma) / Gamma(sigma).
inline double kappa(double sigma) {
    check_open_sigma(sigma);
    return std::exp2(1.0 - 2.0 * sigma) * std::tgamma(1.0 - sigma) / std::tgamma(sigma);
}

/// Exponent of z in the transformed extension equation: (2 sigma - 1) / sigma.
inline double nu(double sigma) {
    check_open_sigma(sigma);
    return (2.0 * sigma - 1.0) / sigma;
}

/// (2 sigma)^{2 sigma - 1} kappa_sigma.
inline double beta(double sigma) { return std::pow(2.0 * sigma, 2.0 * sigma - 1.0) * kappa(sigma); }

/// z = (y / (2 sigma))^{2 sigma}.
inline double z_of_y(double sigma, double y) {
    check_open_sigma(sigma);
    if (!(y >= 0.0)) throw std::invalid_argument("z_of_y: y must be >= 0");
    return std::pow(y / (2.0 * sigma), 2.0 * sigma);
}

inline double y_of_z(double sigma, double z) {
    check_open_sigma(sigma);
    if (!(z >= 0.0)) throw std::invalid_argument("y_of_z: z must be >= 0");
    return 2.0 * sigma * std::pow(z, 1.0 / (2.0 * sigma));
}

namespace detail {

/**
 * log of I_a(t) = int_0^inf exp(-t^2/(4s) - s) s^{-1-a} ds for t > 0.
 *
 * With s = e^x the integrand exp(g(x)), g(x) = -(t^2/4) e^{-x} - e^x - a x, is
 * log-concave and decays doubly exponentially, so the trapezoid rule converges
 * geometrically; the step is halved until successive sums agree to 1e-12
 * (the error of the finer sum is then far below that).
 */
inline double log_subordination_integral(double a, double t) {
    const double t2 = t * t;
    auto g = [&](double x) { return -0.25 * t2 * std::exp(-x) - std::exp(x) - a * x; };
    const double root = std::sqrt(a * a + t2);
    const double q = a >= 0.0 ? t2 / (2.0 * (a + root)) : 0.5 * (root - a);
    const double x0 = std::log(q);
    const double g0 = g(x0);
    constexpr double drop = 80.0;
    double lo = x0, hi = x0, step = 0.25;
    while (g(lo) > g0 - drop) { lo -= step; step *= 1.5; }
    step = 0.25;
    while (g(hi) > g0 - drop) { hi += step; step *= 1.5; }

    auto f = [&](double x) { return std::exp(g(x) - g0); };
    int n = 64;
    double h = (hi - lo) / n;
    double sum = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < n; ++i) sum += f(lo + i * h);
    double estimate = sum * h;
    for (int iter = 0; iter < 12; ++iter) {
        double mid = 0.0;
        for (int i = 0; i < n; ++i) mid += f(lo + (i + 0.5) * h);
        sum += mid;
        n *= 2;
        h *= 0.5;
        const double next = sum * h;
        const bool done = std::abs(next - estimate) <= 1e-12 * next;
        estimate = next;
        if (done && iter >= 2) break;
    }
    return g0 + std::log(estimate);
}

}  // namespace detail

/**
 * Extension profile: rho'' + ((1 - 2 sigma)/t) rho' = rho, rho(0) = 1, rho -> 0.
 *
 * rho(t) = t^{2 sigma} / (4^sigma Gamma(sigma)) int_0^inf e^{-t^2/(4s)} e^{-s} s^{-1-sigma} ds
 *        = 2^{1-sigma} / Gamma(sigma) t^sigma K_sigma(t).
 */
inline double rho(double sigma, double t) {
    check_open_sigma(sigma);
    if (!(t >= 0.0)) throw std::invalid_argument("rho: t must be >= 0");
    if (t == 0.0) return 1.0;
    if (t < 1e-60) return 1.0 - std::tgamma(1.0 - sigma) / std::tgamma(1.0 + sigma) * std::pow(0.5 * t, 2.0 * sigma);
    const double log_rho = 2.0 * sigma * std::log(t) - sigma * std::log(4.0) - std::lgamma(sigma) +
                           detail::log_subordination_integral(sigma, t);
    return std::min(1.0, std::exp(log_rho));
}

/// rho'(t) = -t / (2 Gamma(sigma)) int_0^inf e^{-t^2/(4s)} e^{-s} s^{-2+sigma} ds, t > 0.
inline double rho_derivative(double sigma, double t) {
    check_open_sigma(sigma);
    if (!(t > 0.0)) throw std::invalid_argument("rho_derivative: t must be > 0");
    return -std::exp(std::log(t) - std::log(2.0) - std::lgamma(sigma) +
                     detail::log_subordination_integral(1.0 - sigma, t));
}

/// Weighted flux -t^{1-2 sigma} rho'(t); tends to kappa_sigma as t -> 0.
inline double rho_flux(double sigma, double t) {
    check_open_sigma(sigma);
    if (t == 0.0) return kappa(sigma);
    return std::exp((2.0 - 2.0 * sigma) * std::log(t) - std::log(2.0) - std::lgamma(sigma) +
                    detail::log_subordination_integral(1.0 - sigma, t));
}

// ---------------------------------------------------------------------------

/// w(x, y) sampled at a list of heights y.
struct ExtensionField {
    GridPtr grid;
    double sigma{0.5};
    std::vector<double> y_samples;
    std::vector<ScalarField> values;
    double mean_offset{0.0};

    const ScalarField& at(std::size_t j) const { return values.at(j); }
};

/// {0} followed by count heights y_min * ratio^j.
inline std::vector<double> geometric_y_samples(double y_min, double ratio, std::size_t count) {
    if (!(y_min > 0.0) || !(ratio > 1.0)) throw std::invalid_argument("geometric_y_samples: need y_min > 0, ratio > 1");
    std::vector<double> ys{0.0};
    double y = y_min;
    for (std::size_t j = 0; j < count; ++j, y *= ratio) ys.push_back(y);
    return ys;
}

inline std::vector<double> extension_multipliers(const SpectralOperator& op, double sigma, double y) {
    std::vector<double> m(op.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
        // Eigenvalues are sorted, so exact repeats (tensor spectra) sit next to each other.
        if (k > 0 && op.eigenvalue(k) == op.eigenvalue(k - 1)) {
            m[k] = m[k - 1];
            continue;
        }
        m[k] = rho(sigma, std::sqrt(std::max(op.eigenvalue(k), 0.0)) * y);
    }
    return m;
}

/**
 * Harmonic extension w(., y) = sum_k rho(sqrt(lambda_k) y) <u, phi_k> phi_k.
 *
 * For Neumann operators the kernel mode is the mean u_Omega, on which rho(0) = 1
 * acts trivially, so w = E(u - u_Omega) + u_Omega.
 */
inline ExtensionField extend(const SpectralOperator& op, double sigma, const ScalarField& u,
                             std::span<const double> y_samples) {
    check_open_sigma(sigma);
    ExtensionField ext;
    ext.grid = op.grid();
    ext.sigma = sigma;
    ext.y_samples.assign(y_samples.begin(), y_samples.end());
    ext.mean_offset = op.boundary() == Boundary::neumann ? mean(u) : 0.0;
    const auto coeffs = op.coefficients(u);
    std::vector<double> c(coeffs.size());
    for (double y : ext.y_samples) {
        if (!(y >= 0.0)) throw std::invalid_argument("extend: y samples must be >= 0");
        if (y == 0.0) {
            ext.values.push_back(u);
            continue;
        }
        const auto m = extension_multipliers(op, sigma, y);
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = coeffs[k] * m[k];
        ext.values.push_back(op.synthesize(c));
    }
    return ext;
}

struct DtnResidual {
    ScalarField residual;
    double norm{0.0};
};

/// -(1/kappa) y^{1-2 sigma} d_y w(., y) - (-Delta)^sigma u, using the exact series derivative.
inline DtnResidual dtn_residual(const SpectralOperator& op, double sigma, const ScalarField& u, double y) {
    check_open_sigma(sigma);
    if (!(y > 0.0)) throw std::invalid_argument("dtn_residual: y must be > 0");
    const double k_sigma = kappa(sigma);
    const double weight = std::pow(y, 1.0 - 2.0 * sigma);
    std::vector<double> m(op.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double lambda = op.eigenvalue(k);
        if (lambda <= 0.0) {
            m[k] = 0.0;
            continue;
        }
        const double root = std::sqrt(lambda);
        const double flux = -weight * rho_derivative(sigma, root * y) * root / k_sigma;
        m[k] = flux - std::pow(lambda, sigma);
    }
    DtnResidual r{op.apply_multipliers(u, m), 0.0};
    r.norm = l2_norm(r.residual);
    return r;
}

/// 0.5 kappa_sigma <(-Delta)^sigma u, u>: the minimum of the extension energy.
inline double exact_extension_energy(const SpectralOperator& op, double sigma, const ScalarField& u) {
    return 0.5 * kappa(sigma) * inner(apply_fractional(op, sigma, u), u);
}

/**
 * Diagnostic quadrature of 0.5 int int y^{1-2 sigma} (|grad_x w|^2 + |w_y|^2) over
 * the sampled heights: midpoint weights per interval, w_y by differences of
 * neighbouring samples, |grad_x w|^2 from <-Delta w, w>. Truncated at the last sample.
 */
inline double extension_energy(const SpectralOperator& op, const ExtensionField& ext) {
    double energy = 0.0;
    const double expo = 1.0 - 2.0 * ext.sigma;
    auto grad_x = [&](const ScalarField& w) {
        return inner(op.apply_function(w, [](double l) { return l; }), w);
    };
    for (std::size_t j = 0; j + 1 < ext.y_samples.size(); ++j) {
        const double y0 = ext.y_samples[j], y1 = ext.y_samples[j + 1];
        const double dy = y1 - y0;
        if (!(dy > 0.0)) throw std::invalid_argument("extension_energy: y samples must be increasing");
        const double ym = 0.5 * (y0 + y1);
        const ScalarField dw = (1.0 / dy) * (ext.at(j + 1) - ext.at(j));
        const double gx = 0.5 * (grad_x(ext.at(j)) + grad_x(ext.at(j + 1)));
        energy += std::pow(ym, expo) * (gx + inner(dw, dw)) * dy;
    }
    return 0.5 * energy;
}

}  // namespace fracsym
