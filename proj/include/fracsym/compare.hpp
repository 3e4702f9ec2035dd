#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracsym/extension.hpp"
#include "fracsym/field.hpp"
#include "fracsym/grid.hpp"
#include "fracsym/rearrange.hpp"
#include "fracsym/spectral.hpp"

namespace fracsym {

class DominanceViolated : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// How the data on the ball is built from f: parts of f itself, or parts of f - m(f).
enum class DataMode { zero_mean, with_c };

/// gamma = 1 / (N omega_N^{1/N} Q)^2.
inline double gamma_constant(int dimension, double q) {
    if (dimension < 1) throw std::invalid_argument("gamma_constant: dimension must be >= 1");
    if (!(q > 0.0)) throw std::invalid_argument("gamma_constant: Q must be positive");
    const double iso = dimension * std::pow(unit_ball_measure(dimension), 1.0 / dimension);
    return 1.0 / ((iso * q) * (iso * q));
}

/// Conjectural relative isoperimetric constants: 1 on an interval; the straight
/// half-cut value sqrt(|Omega|/2) / min(lx, ly) on a rectangle (1/sqrt 2 for the unit square).
inline double default_isoperimetric_constant(const Grid& omega) {
    switch (omega.kind()) {
        case GridKind::interval: return 1.0;
        case GridKind::rectangle:
            return std::sqrt(0.5 * omega.total_measure()) / std::min(omega.lx(), omega.ly());
        case GridKind::radial_ball: break;
    }
    throw std::invalid_argument("default_isoperimetric_constant: not defined for radial grids");
}

/// Centered ball with |B| = |Omega| / 2 in the dimension of Omega.
inline GridPtr half_measure_ball(const Grid& omega, std::size_t shells) {
    return build_radial_ball(shells, omega.dimension(), 0.5 * omega.total_measure());
}

/// C_tol * h * ||f||_2: discretization tolerance, first order in the cell width.
inline double default_tolerance(const Grid& omega, double data_norm, double c_tol = 10.0) {
    return c_tol * omega.cell_width() * data_norm;
}

inline void check_half_ball(const Grid& omega, const Grid& ball) {
    if (ball.kind() != GridKind::radial_ball) throw std::invalid_argument("comparison: B must be a radial ball grid");
    if (std::abs(ball.total_measure() - 0.5 * omega.total_measure()) > 1e-10 * std::max(1.0, omega.total_measure()))
        throw std::invalid_argument("comparison: |B| must equal |Omega|/2");
}

/// f1# + f2# on the ball. Parts are truncated to [0, |B|] in the s variable.
inline ScalarField symmetrized_data(const ScalarField& f, const GridPtr& ball, DataMode mode) {
    check_half_ball(*f.grid, *ball);
    std::pair<ScalarField, ScalarField> parts =
        mode == DataMode::with_c ? median_split(f) : std::pair{positive_part(f), negative_part(f)};
    constexpr double unlimited = std::numeric_limits<double>::infinity();
    return schwarz_rearrangement(decreasing_rearrangement(parts.first), ball, unlimited) +
           schwarz_rearrangement(decreasing_rearrangement(parts.second), ball, unlimited);
}

inline bool radially_nonincreasing(const ScalarField& g, double rel_tol = 1e-12) {
    const double scale = std::max(1.0, lp_norm(g, std::numeric_limits<double>::infinity()));
    for (std::size_t i = 1; i < g.size(); ++i)
        if (g.values[i] > g.values[i - 1] + rel_tol * scale) return false;
    return true;
}

// ---------------------------------------------------------------------------

struct YComparison {
    double y{0.0};
    double median{0.0};
    ConcentrationGap gap;
};

struct ComparisonReport {
    nlohmann::json params;
    std::vector<YComparison> per_y;
    double worst_gap{0.0};
    double tolerance{0.0};
    bool holds{true};
    // Separate comparisons w_i* vs xi_i* when the median curve is constant in y.
    bool split_applied{false};
    std::vector<YComparison> split_first, split_second;

    nlohmann::json to_json() const {
        auto dump_y = [](const std::vector<YComparison>& list) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& yc : list) {
                arr.push_back({{"y", yc.y},
                               {"median", yc.median},
                               {"s", yc.gap.s},
                               {"U", yc.gap.f},
                               {"V", yc.gap.g},
                               {"chi", yc.gap.gap},
                               {"worst_gap", yc.gap.worst_gap}});
            }
            return arr;
        };
        nlohmann::json j;
        j["params"] = params;
        j["per_y"] = dump_y(per_y);
        j["worst_gap"] = worst_gap;
        j["tolerance"] = tolerance;
        j["verdict"] = holds ? "holds" : "violated";
        if (split_applied) {
            j["split"] = {{"first", dump_y(split_first)}, {"second", dump_y(split_second)}};
        }
        return j;
    }
};

struct CompareOptions {
    std::vector<double> y_samples{0.0, 0.1, 1.0};
    /// Negative means: use default_tolerance with c_tol.
    double tolerance{-1.0};
    double c_tol{10.0};
    bool split_mode{false};
    std::optional<DataMode> mode{};
    /// Recorded in the report; gamma itself is carried by the ball operator.
    std::optional<double> q{};
    /// Slack for the f1# + f2# < g precondition of dominated comparisons.
    double dominance_tolerance{1e-10};
};

struct EllipticComparison {
    ComparisonReport report;
    ScalarField u;     // solution on Omega
    ScalarField v;     // solution on B
    ScalarField data;  // right-hand side used on B
};

namespace detail {

inline std::vector<double> with_trace(std::vector<double> ys) {
    if (std::find(ys.begin(), ys.end(), 0.0) == ys.end()) ys.insert(ys.begin(), 0.0);
    return ys;
}

inline void finalize(ComparisonReport& r) {
    r.worst_gap = -std::numeric_limits<double>::infinity();
    for (const auto& yc : r.per_y) r.worst_gap = std::max(r.worst_gap, yc.gap.worst_gap);
    for (const auto& list : {&r.split_first, &r.split_second})
        for (const auto& yc : *list) r.worst_gap = std::max(r.worst_gap, yc.gap.worst_gap);
    if (r.per_y.empty()) r.worst_gap = 0.0;
    r.holds = r.worst_gap <= r.tolerance;
}

}  // namespace detail

/**
 * Concentration comparison of w = E(u) on Omega against xi = E(v) on B.
 *
 * At each height y: lambda(y) = m(w(., y)), w1/w2 = (w - lambda)^+-,
 * U(s, y) = int_0^s (w1* + w2*), V(s, y) = int_0^s xi*, compared for s in [0, |Omega|/2].
 */
inline ComparisonReport compare_extensions(const SpectralOperator& omega_op, const SpectralOperator& ball_op,
                                           double sigma, const ScalarField& u, const ScalarField& v,
                                           const std::vector<double>& y_samples, double tol) {
    const auto ys = detail::with_trace(y_samples);
    const ExtensionField w = extend(omega_op, sigma, u, ys);
    const ExtensionField xi = extend(ball_op, sigma, v, ys);
    const double s_max = 0.5 * omega_op.grid()->total_measure();
    ComparisonReport r;
    r.tolerance = tol;
    for (std::size_t j = 0; j < ys.size(); ++j) {
        YComparison yc;
        yc.y = ys[j];
        yc.median = median(w.at(j));
        const auto [w1, w2] = median_split(w.at(j), yc.median);
        const ConcentrationCurve big_u = add_curves(concentration(w1), concentration(w2));
        const ConcentrationCurve big_v = concentration(xi.at(j));
        yc.gap = less_concentrated(big_u, big_v, tol, s_max);
        r.per_y.push_back(std::move(yc));
    }
    detail::finalize(r);
    return r;
}

inline nlohmann::json comparison_params(const SpectralOperator& omega_op, const SpectralOperator& ball_op,
                                        double sigma, double c, const CompareOptions& opts) {
    nlohmann::json p;
    p["sigma"] = sigma;
    p["c"] = c;
    p["gamma"] = ball_op.diffusion();
    if (opts.q) p["Q"] = *opts.q;
    p["omega"] = omega_op.grid()->to_json();
    p["ball"] = ball_op.grid()->to_json();
    p["c_tol"] = opts.c_tol;
    return p;
}

namespace detail {

inline void check_operators(const SpectralOperator& omega_op, const SpectralOperator& ball_op) {
    if (omega_op.boundary() != Boundary::neumann)
        throw std::invalid_argument("comparison: Omega operator must carry Neumann conditions");
    if (ball_op.grid()->kind() != GridKind::radial_ball)
        throw std::invalid_argument("comparison: B operator must live on a radial ball");
    check_half_ball(*omega_op.grid(), *ball_op.grid());
}

inline DataMode resolve_mode(const CompareOptions& opts, double c) {
    return opts.mode.value_or(c > 0.0 ? DataMode::with_c : DataMode::zero_mean);
}

}  // namespace detail

/**
 * Solves (-Delta_N)^sigma u + c u = f on Omega and (-gamma Delta)^sigma v + c v = f1# + f2#
 * on B (gamma is the ball operator's diffusion), then compares their extensions.
 * c = 0 requires a compatible f (IncompatibleData otherwise).
 */
inline EllipticComparison elliptic_compare(const SpectralOperator& omega_op, const SpectralOperator& ball_op,
                                           double sigma, double c, const ScalarField& f,
                                           const CompareOptions& opts = {}) {
    check_open_sigma(sigma);
    detail::check_operators(omega_op, ball_op);
    const DataMode mode = detail::resolve_mode(opts, c);
    EllipticComparison out;
    out.u = solve_elliptic(omega_op, sigma, c, f);
    out.data = symmetrized_data(f, ball_op.grid(), mode);
    out.v = solve_elliptic(ball_op, sigma, c, out.data);
    const double tol = opts.tolerance >= 0.0 ? opts.tolerance
                                             : default_tolerance(*omega_op.grid(), l2_norm(f), opts.c_tol);
    out.report = compare_extensions(omega_op, ball_op, sigma, out.u, out.v, opts.y_samples, tol);
    out.report.params = comparison_params(omega_op, ball_op, sigma, c, opts);
    out.report.params["mode"] = mode == DataMode::with_c ? "with_c" : "zero_mean";

    if (opts.split_mode) {
        // Split comparisons are meaningful only when lambda(y) does not move.
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& yc : out.report.per_y) {
            lo = std::min(lo, yc.median);
            hi = std::max(hi, yc.median);
        }
        if (hi - lo <= tol) {
            auto parts = mode == DataMode::with_c ? median_split(f) : std::pair{positive_part(f), negative_part(f)};
            constexpr double unlimited = std::numeric_limits<double>::infinity();
            const ScalarField g1 = schwarz_rearrangement(decreasing_rearrangement(parts.first), ball_op.grid(), unlimited);
            const ScalarField g2 = schwarz_rearrangement(decreasing_rearrangement(parts.second), ball_op.grid(), unlimited);
            const ScalarField v1 = solve_elliptic(ball_op, sigma, c, g1);
            const ScalarField v2 = solve_elliptic(ball_op, sigma, c, g2);
            const auto ys = detail::with_trace(opts.y_samples);
            const ExtensionField w = extend(omega_op, sigma, out.u, ys);
            const ExtensionField xi1 = extend(ball_op, sigma, v1, ys);
            const ExtensionField xi2 = extend(ball_op, sigma, v2, ys);
            const double s_max = 0.5 * omega_op.grid()->total_measure();
            for (std::size_t j = 0; j < ys.size(); ++j) {
                const double lambda = out.report.per_y[j].median;
                const auto [w1, w2] = median_split(w.at(j), lambda);
                YComparison a{ys[j], lambda, less_concentrated(concentration(w1), concentration(xi1.at(j)), tol, s_max)};
                YComparison b{ys[j], lambda, less_concentrated(concentration(w2), concentration(xi2.at(j)), tol, s_max)};
                out.report.split_first.push_back(std::move(a));
                out.report.split_second.push_back(std::move(b));
            }
            out.report.split_applied = true;
            detail::finalize(out.report);
        }
    }
    return out;
}

/**
 * Comparison against a dominating radial datum: requires f1# + f2# < g1 (and,
 * when an extra source h is given, (h+)# + (h-)# < g2). Omega solves with f + h,
 * B with g1 + g2. Throws DominanceViolated when a precondition fails.
 */
inline EllipticComparison dominated_compare(const SpectralOperator& omega_op, const SpectralOperator& ball_op,
                                            double sigma, double c, const ScalarField& f, const ScalarField& g1,
                                            const CompareOptions& opts = {},
                                            const std::optional<ScalarField>& h = std::nullopt,
                                            const std::optional<ScalarField>& g2 = std::nullopt) {
    check_open_sigma(sigma);
    detail::check_operators(omega_op, ball_op);
    if (h.has_value() != g2.has_value())
        throw std::invalid_argument("dominated_compare: h and g2 must be given together");
    const DataMode mode = detail::resolve_mode(opts, c);
    const GridPtr& ball = ball_op.grid();

    auto check_dominance = [&](const ScalarField& rearranged, const ScalarField& g, const char* what) {
        require_grid(g, ball, "dominated_compare");
        if (!radially_nonincreasing(g))
            throw std::invalid_argument(std::string("dominated_compare: ") + what + " is not radially non-increasing");
        const double scale = std::max(1.0, integral(g));
        const auto gap = less_concentrated(concentration(rearranged), concentration(g), opts.dominance_tolerance * scale);
        if (!gap.holds)
            throw DominanceViolated(std::string("dominated_compare: ") + what + " does not dominate (gap " +
                                    std::to_string(gap.worst_gap) + " at s = " + std::to_string(gap.worst_s) + ")");
    };
    check_dominance(symmetrized_data(f, ball, mode), g1, "g1");

    ScalarField rhs = f;
    ScalarField data = g1;
    if (h) {
        check_dominance(symmetrized_data(*h, ball, DataMode::zero_mean), *g2, "g2");
        rhs = rhs + *h;
        data = data + *g2;
    }

    EllipticComparison out;
    out.u = solve_elliptic(omega_op, sigma, c, rhs);
    out.data = data;
    out.v = solve_elliptic(ball_op, sigma, c, data);
    const double tol = opts.tolerance >= 0.0 ? opts.tolerance
                                             : default_tolerance(*omega_op.grid(), l2_norm(rhs), opts.c_tol);
    out.report = compare_extensions(omega_op, ball_op, sigma, out.u, out.v, opts.y_samples, tol);
    out.report.params = comparison_params(omega_op, ball_op, sigma, c, opts);
    out.report.params["mode"] = mode == DataMode::with_c ? "with_c" : "zero_mean";
    out.report.params["dominated"] = true;
    return out;
}

// ---------------------------------------------------------------------------
// consequences

struct OscillationCheck {
    bool holds{true};
    double slack{0.0};  // max v - (max u - min u)
};

/// max v >= osc u - tol.
inline OscillationCheck oscillation_check(const ScalarField& u, const ScalarField& v, double tol) {
    OscillationCheck r;
    r.slack = max_value(v) - (max_value(u) - min_value(u));
    r.holds = r.slack >= -tol;
    return r;
}

struct LpCheck {
    double p{1.0};
    double lhs{0.0};  // ||u - m(u)||_p on Omega
    double rhs{0.0};  // ||v||_p on B
    bool holds{true};
};

inline std::vector<LpCheck> lp_check(const ScalarField& u, const ScalarField& v, const std::vector<double>& ps,
                                     double tol) {
    const ScalarField centered = u + (-median(u));
    std::vector<LpCheck> out;
    for (double p : ps) {
        LpCheck c{p, lp_norm(centered, p), lp_norm(v, p), true};
        c.holds = c.lhs <= c.rhs + tol;
        out.push_back(c);
    }
    return out;
}

}  // namespace fracsym
