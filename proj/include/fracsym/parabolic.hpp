#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracsym/compare.hpp"
#include "fracsym/field.hpp"
#include "fracsym/spectral.hpp"

namespace fracsym {

/// Reading of the B-side operator in the time-discrete symmetrized problem:
/// (gamma lambda)^sigma (sigma) or gamma^{1/2} lambda^sigma (half).
enum class GammaExponent { sigma, half };
enum class SourceSampling { midpoint, average };

/// Source term f(., t); an empty function means f = 0.
using TimeSource = std::function<ScalarField(double)>;

struct Trajectory {
    double step{0.0};
    std::vector<double> times;         // t_k = k h, k = 0..n
    std::vector<ScalarField> states;   // u_{h,k}, k = 0..n
    std::vector<ScalarField> sources;  // f_k^{(h)}, k = 1..n (stored at index k - 1)
    std::vector<double> residuals;     // discrete equation residual per step, k = 1..n

    std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

/// Per-mode symbols of the ball operator. The ball operator's eigenvalues already carry gamma.
inline std::vector<double> ball_symbols(const SpectralOperator& ball_op, double sigma, GammaExponent exponent) {
    auto s = fractional_symbols(ball_op, sigma);
    if (exponent == GammaExponent::half) {
        const double g = ball_op.diffusion();
        const double factor = std::sqrt(g) / std::pow(g, sigma);
        for (double& v : s) v *= factor;
    }
    return s;
}

/// Solves h A u + u = prev + h f_k for A with the given spectral symbols.
inline ScalarField implicit_step(const SpectralOperator& op, std::span<const double> symbols, double h,
                                 const ScalarField& prev, const ScalarField& f_k) {
    if (!(h > 0.0)) throw std::invalid_argument("implicit_step: h must be positive");
    const ScalarField rhs = prev + h * f_k;
    std::vector<double> m(symbols.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = 1.0 / (1.0 + h * symbols[k]);
    return op.apply_multipliers(rhs, m);
}

inline ScalarField implicit_step(const SpectralOperator& op, double sigma, double h, const ScalarField& prev,
                                 const ScalarField& f_k) {
    return implicit_step(op, fractional_symbols(op, sigma), h, prev, f_k);
}

/// || h A u_k + u_k - u_{k-1} - h f_k ||_2.
inline double step_residual(const SpectralOperator& op, std::span<const double> symbols, double h,
                            const ScalarField& prev, const ScalarField& next, const ScalarField& f_k) {
    const ScalarField a_next = op.apply_multipliers(next, symbols);
    return l2_norm(h * a_next + next - prev - h * f_k);
}

/// f_k^{(h)} for the interval (t0, t1]: midpoint sample or 3-point Gauss-Legendre average.
inline ScalarField sample_source(const TimeSource& f, const GridPtr& grid, double t0, double t1,
                                 SourceSampling sampling) {
    if (!f) return ScalarField::zeros(grid);
    if (sampling == SourceSampling::midpoint) return f(0.5 * (t0 + t1));
    constexpr std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
    constexpr std::array<double, 3> weights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    ScalarField acc = ScalarField::zeros(grid);
    for (std::size_t q = 0; q < 3; ++q) acc = acc + weights[q] * f(0.5 * (t0 + t1) + 0.5 * (t1 - t0) * nodes[q]);
    return acc;
}

/**
 * Implicit time discretization on [0, T] with n uniform steps. The mild solution
 * is the h -> 0 limit of the returned piecewise-constant trajectory.
 */
inline Trajectory mild_solve(const SpectralOperator& op, std::span<const double> symbols, const ScalarField& u0,
                             const TimeSource& f, double T, std::size_t n,
                             SourceSampling sampling = SourceSampling::midpoint) {
    if (n < 1) throw std::invalid_argument("mild_solve: need at least one step");
    if (!(T > 0.0)) throw std::invalid_argument("mild_solve: T must be positive");
    require_grid(u0, op.grid(), "mild_solve");
    Trajectory tr;
    tr.step = T / static_cast<double>(n);
    tr.times.push_back(0.0);
    tr.states.push_back(u0);
    for (std::size_t k = 1; k <= n; ++k) {
        const double t0 = tr.step * static_cast<double>(k - 1);
        const double t1 = k == n ? T : tr.step * static_cast<double>(k);
        ScalarField fk = sample_source(f, op.grid(), t0, t1, sampling);
        ScalarField next = implicit_step(op, symbols, tr.step, tr.states.back(), fk);
        const double res = step_residual(op, symbols, tr.step, tr.states.back(), next, fk);
        if (!(res <= 1e-8))
            throw NumericalFailure("mild_solve: step residual " + std::to_string(res) + " at step " +
                                   std::to_string(k));
        tr.residuals.push_back(res);
        tr.times.push_back(t1);
        tr.states.push_back(std::move(next));
        tr.sources.push_back(std::move(fk));
    }
    return tr;
}

inline Trajectory mild_solve(const SpectralOperator& op, double sigma, const ScalarField& u0, const TimeSource& f,
                             double T, std::size_t n, SourceSampling sampling = SourceSampling::midpoint) {
    return mild_solve(op, fractional_symbols(op, sigma), u0, f, T, n, sampling);
}

struct SymmetrizedParabolic {
    ScalarField v0;                  // (u0 - m(u0))^+# + (u0 - m(u0))^-#
    std::vector<ScalarField> sources;  // (f_k^+)# + (f_k^-)#
};

inline SymmetrizedParabolic symmetrized_parabolic_problem(const ScalarField& u0,
                                                          std::span<const ScalarField> f_samples,
                                                          const GridPtr& ball) {
    SymmetrizedParabolic p;
    p.v0 = symmetrized_data(u0, ball, DataMode::with_c);
    p.sources.reserve(f_samples.size());
    for (const auto& fk : f_samples) p.sources.push_back(symmetrized_data(fk, ball, DataMode::zero_mean));
    return p;
}

struct ParabolicOptions {
    double tolerance{-1.0};  // negative: c_tol * h_grid * (||u0||_2 + T max_k ||f_k||_2)
    double c_tol{10.0};
    GammaExponent exponent{GammaExponent::sigma};
    SourceSampling sampling{SourceSampling::midpoint};
    /// Heights for extension-level checks; {0} compares traces only.
    std::vector<double> y_samples{0.0};
    std::optional<double> q{};
};

struct StepComparison {
    std::size_t k{0};
    double t{0.0};
    ComparisonReport report;
};

struct ParabolicComparison {
    nlohmann::json params;
    std::vector<StepComparison> steps;
    double worst_gap{0.0};
    std::size_t worst_step{0};
    double tolerance{0.0};
    bool holds{true};
    Trajectory omega;
    Trajectory ball;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["params"] = params;
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : steps) {
            nlohmann::json r = s.report.to_json();
            r.erase("params");
            r["k"] = s.k;
            r["t"] = s.t;
            arr.push_back(std::move(r));
        }
        j["steps"] = std::move(arr);
        j["worst_gap"] = worst_gap;
        j["worst_step"] = worst_step;
        j["tolerance"] = tolerance;
        j["verdict"] = holds ? "holds" : "violated";
        return j;
    }
};

/**
 * Runs the implicit scheme on Omega (Neumann) and on B with the symmetrized
 * data, then checks ((u_k - m)^+)# + ((u_k - m)^-)# < v_k at every step k = 0..n.
 */
inline ParabolicComparison parabolic_compare(const SpectralOperator& omega_op, const SpectralOperator& ball_op,
                                             double sigma, const ScalarField& u0, const TimeSource& f, double T,
                                             std::size_t n, const ParabolicOptions& opts = {}) {
    check_open_sigma(sigma);
    detail::check_operators(omega_op, ball_op);
    ParabolicComparison out;
    out.omega = mild_solve(omega_op, sigma, u0, f, T, n, opts.sampling);
    const auto sym = symmetrized_parabolic_problem(u0, out.omega.sources, ball_op.grid());
    const auto symbols = ball_symbols(ball_op, sigma, opts.exponent);

    Trajectory& b = out.ball;
    b.step = out.omega.step;
    b.times = out.omega.times;
    b.states.push_back(sym.v0);
    for (std::size_t k = 1; k <= n; ++k) {
        const auto& gk = sym.sources[k - 1];
        ScalarField next = implicit_step(ball_op, symbols, b.step, b.states.back(), gk);
        b.residuals.push_back(step_residual(ball_op, symbols, b.step, b.states.back(), next, gk));
        b.states.push_back(std::move(next));
        b.sources.push_back(gk);
    }

    double tol = opts.tolerance;
    if (tol < 0.0) {
        double fmax = 0.0;
        for (const auto& fk : out.omega.sources) fmax = std::max(fmax, l2_norm(fk));
        tol = default_tolerance(*omega_op.grid(), l2_norm(u0) + T * fmax, opts.c_tol);
    }
    out.tolerance = tol;
    out.worst_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= n; ++k) {
        StepComparison sc{k, out.omega.times[k],
                          compare_extensions(omega_op, ball_op, sigma, out.omega.states[k], b.states[k],
                                             opts.y_samples, tol)};
        if (sc.report.worst_gap > out.worst_gap) {
            out.worst_gap = sc.report.worst_gap;
            out.worst_step = k;
        }
        out.steps.push_back(std::move(sc));
    }
    out.holds = out.worst_gap <= tol;

    CompareOptions copts;
    copts.c_tol = opts.c_tol;
    copts.q = opts.q;
    out.params = comparison_params(omega_op, ball_op, sigma, 0.0, copts);
    out.params.erase("c");
    out.params["T"] = T;
    out.params["n"] = n;
    out.params["h"] = out.omega.step;
    out.params["gamma_exponent"] = opts.exponent == GammaExponent::sigma ? "sigma" : "half";
    out.params["sampling"] = opts.sampling == SourceSampling::midpoint ? "midpoint" : "average";
    return out;
}

}  // namespace fracsym
