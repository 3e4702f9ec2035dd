#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracsym/field.hpp"
#include "fracsym/grid.hpp"

namespace fracsym {

class SupportExceeded : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * One dimensional decreasing rearrangement f* of |f|.
 *
 * Stored as a step function: f*(s) = values[i] for breaks[i] <= s < breaks[i+1],
 * and f*(s) = 0 for s >= total_measure. Values are non-increasing.
 */
struct RearrangedProfile {
    std::vector<double> breaks;  // size n + 1, breaks[0] = 0
    std::vector<double> values;  // size n
    double total_measure{0.0};

    double value_at(double s) const {
        if (values.empty() || s >= breaks.back()) return 0.0;
        if (s <= 0.0) return values.front();
        const auto it = std::upper_bound(breaks.begin(), breaks.end(), s);
        return values[static_cast<std::size_t>(it - breaks.begin()) - 1];
    }
};

/// Piecewise-linear running integral s -> int_0^s f*(t) dt.
struct ConcentrationCurve {
    std::vector<double> breaks;      // s_0 = 0 < s_1 <= ...
    std::vector<double> cumulative;  // curve values at breaks, cumulative[0] = 0

    double total_measure() const { return breaks.empty() ? 0.0 : breaks.back(); }

    double value_at(double s) const {
        if (breaks.empty() || s <= 0.0) return 0.0;
        if (s >= breaks.back()) return cumulative.back();
        const auto it = std::upper_bound(breaks.begin(), breaks.end(), s);
        const auto i = static_cast<std::size_t>(it - breaks.begin());
        const double s0 = breaks[i - 1], s1 = breaks[i];
        if (s1 <= s0) return cumulative[i];
        const double t = (s - s0) / (s1 - s0);
        return cumulative[i - 1] + t * (cumulative[i] - cumulative[i - 1]);
    }
};

/// Pointwise concentration gap f_curve - g_curve sampled on the union of breakpoints.
struct ConcentrationGap {
    std::vector<double> s;
    std::vector<double> f;
    std::vector<double> g;
    std::vector<double> gap;
    double worst_gap{0.0};
    double worst_s{0.0};
    double tolerance{0.0};
    bool holds{true};
};

// ---------------------------------------------------------------------------
// distribution function and rearrangements

inline double distribution_function(std::span<const double> values, std::span<const double> measures, double k) {
    double mu = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (std::abs(values[i]) > k) mu += measures[i];
    return mu;
}

inline double distribution_function(const ScalarField& field, double k) {
    return distribution_function(field.values, field.measures(), k);
}

inline RearrangedProfile decreasing_rearrangement(std::span<const double> values, std::span<const double> measures) {
    if (values.size() != measures.size())
        throw std::invalid_argument("decreasing_rearrangement: values/measures size mismatch");
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(values[a]) > std::abs(values[b]); });
    RearrangedProfile p;
    p.breaks.resize(n + 1);
    p.values.resize(n);
    p.breaks[0] = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += measures[order[i]];
        p.breaks[i + 1] = s;
        p.values[i] = std::abs(values[order[i]]);
    }
    p.total_measure = s;
    return p;
}

inline RearrangedProfile decreasing_rearrangement(const ScalarField& field) {
    return decreasing_rearrangement(field.values, field.measures());
}

inline ConcentrationCurve concentration(const RearrangedProfile& profile) {
    ConcentrationCurve c;
    c.breaks = profile.breaks;
    if (c.breaks.empty()) c.breaks = {0.0};
    c.cumulative.assign(c.breaks.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < profile.values.size(); ++i) {
        acc += profile.values[i] * (profile.breaks[i + 1] - profile.breaks[i]);
        c.cumulative[i + 1] = acc;
    }
    return c;
}

inline ConcentrationCurve concentration(const ScalarField& field) {
    return concentration(decreasing_rearrangement(field));
}

/// Pointwise sum of two concentration curves (exact, breakpoints merged).
inline ConcentrationCurve add_curves(const ConcentrationCurve& a, const ConcentrationCurve& b) {
    std::vector<double> s;
    s.reserve(a.breaks.size() + b.breaks.size());
    std::merge(a.breaks.begin(), a.breaks.end(), b.breaks.begin(), b.breaks.end(), std::back_inserter(s));
    s.erase(std::unique(s.begin(), s.end()), s.end());
    ConcentrationCurve c;
    c.breaks = s;
    c.cumulative.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) c.cumulative[i] = a.value_at(s[i]) + b.value_at(s[i]);
    return c;
}

/**
 * Schwarz rearrangement of |f| onto a radial ball grid.
 *
 * Each shell receives the average of f* over the measure interval it occupies,
 * so the result is radially non-increasing, keeps the integral of f* over
 * [0, |B|] and reproduces the concentration curve exactly at shell boundaries.
 */
inline ScalarField schwarz_rearrangement(const RearrangedProfile& profile, const GridPtr& ball,
                                         double support_slack = 0.0) {
    if (ball->kind() != GridKind::radial_ball)
        throw std::invalid_argument("schwarz_rearrangement: target grid must be a radial ball");
    double support = 0.0;
    for (std::size_t i = 0; i < profile.values.size(); ++i)
        if (profile.values[i] > 0.0) support = profile.breaks[i + 1];
    if (support > ball->total_measure() + support_slack)
        throw SupportExceeded("schwarz_rearrangement: support measure " + std::to_string(support) +
                              " exceeds ball measure " + std::to_string(ball->total_measure()));
    const ConcentrationCurve curve = concentration(profile);
    const auto& m = ball->measures();
    std::vector<double> out(m.size());
    double s0 = 0.0, c0 = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double s1 = s0 + m[i];
        const double c1 = curve.value_at(s1);
        out[i] = std::max(0.0, (c1 - c0) / m[i]);
        s0 = s1;
        c0 = c1;
    }
    // Averages of a non-increasing function are non-increasing up to rounding.
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::min(out[i], out[i - 1]);
    return ScalarField(ball, std::move(out));
}

inline ScalarField schwarz_rearrangement(const ScalarField& field, const GridPtr& ball) {
    return schwarz_rearrangement(decreasing_rearrangement(field), ball, field.grid->max_cell_measure());
}

// ---------------------------------------------------------------------------
// median

/// inf{k : |{u > k}| <= |Omega|/2}, evaluated exactly over the value set.
inline double median(std::span<const double> values, std::span<const double> measures) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    double total = 0.0;
    for (double m : measures) total += m;
    const double half = 0.5 * total * (1.0 + 1e-12);
    // Walk groups of equal values from the top; the median is the first value
    // whose inclusion pushes the superlevel measure above half.
    double acc = 0.0;
    std::size_t i = 0;
    while (i < n) {
        const double v = values[order[i]];
        double group = 0.0;
        std::size_t j = i;
        while (j < n && values[order[j]] == v) group += measures[order[j++]];
        if (acc + group > half) return v;
        acc += group;
        i = j;
    }
    return values[order.back()];
}

inline double median(const ScalarField& field) { return median(field.values, field.measures()); }

inline std::pair<ScalarField, ScalarField> median_split(const ScalarField& field, double m) {
    ScalarField u1 = field, u2 = field;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double d = field.values[i] - m;
        u1.values[i] = d > 0.0 ? d : 0.0;
        u2.values[i] = d < 0.0 ? -d : 0.0;
    }
    return {std::move(u1), std::move(u2)};
}

inline std::pair<ScalarField, ScalarField> median_split(const ScalarField& field) {
    return median_split(field, median(field));
}

inline double support_measure(const ScalarField& field) { return distribution_function(field, 0.0); }

// ---------------------------------------------------------------------------
// concentration order

/**
 * Checks f_curve <= g_curve + tol on [0, min(total measures, s_max)].
 * Both curves are piecewise linear, so sampling at the merged breakpoints is exact.
 */
inline ConcentrationGap less_concentrated(const ConcentrationCurve& f_curve, const ConcentrationCurve& g_curve,
                                          double tol, double s_max = std::numeric_limits<double>::infinity()) {
    const double end = std::min({f_curve.total_measure(), g_curve.total_measure(), s_max});
    std::vector<double> s;
    s.reserve(f_curve.breaks.size() + g_curve.breaks.size() + 1);
    for (double b : f_curve.breaks)
        if (b < end) s.push_back(b);
    for (double b : g_curve.breaks)
        if (b < end) s.push_back(b);
    s.push_back(std::max(end, 0.0));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());

    ConcentrationGap r;
    r.tolerance = tol;
    r.s = std::move(s);
    r.f.resize(r.s.size());
    r.g.resize(r.s.size());
    r.gap.resize(r.s.size());
    r.worst_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.s.size(); ++i) {
        r.f[i] = f_curve.value_at(r.s[i]);
        r.g[i] = g_curve.value_at(r.s[i]);
        r.gap[i] = r.f[i] - r.g[i];
        if (r.gap[i] > r.worst_gap) {
            r.worst_gap = r.gap[i];
            r.worst_s = r.s[i];
        }
    }
    r.holds = r.worst_gap <= tol;
    return r;
}

/// int_0^L f*(s) g*(s) ds with L the smaller total measure (exact for step profiles).
inline double integrate_product(const RearrangedProfile& a, const RearrangedProfile& b) {
    const double end = std::min(a.total_measure, b.total_measure);
    std::size_t i = 0, j = 0;
    double s = 0.0, acc = 0.0;
    while (i < a.values.size() && j < b.values.size() && s < end) {
        const double next = std::min({a.breaks[i + 1], b.breaks[j + 1], end});
        acc += a.values[i] * b.values[j] * (next - s);
        s = next;
        if (a.breaks[i + 1] <= s) ++i;
        if (b.breaks[j + 1] <= s) ++j;
    }
    return acc;
}

/// L^p norm of f* on (0, total_measure).
inline double lp_norm(const RearrangedProfile& p, double exponent) {
    if (std::isinf(exponent)) return p.values.empty() ? 0.0 : p.values.front();
    double s = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i)
        s += std::pow(p.values[i], exponent) * (p.breaks[i + 1] - p.breaks[i]);
    return std::pow(s, 1.0 / exponent);
}

// ---------------------------------------------------------------------------
// convex-function characterization of the concentration order

struct ConvexFunction {
    std::string name;
    std::function<double(double)> phi;
};

struct ConvexCheck {
    std::string name;
    double lhs{0.0};
    double rhs{0.0};
    bool holds{true};
};

/// t^p for p = 1, 2, 4; (t - a)^+ at `hinges` evenly spaced a in (0, max_value); exp(t) - 1.
inline std::vector<ConvexFunction> standard_convex_family(double max_value, int hinges = 5) {
    std::vector<ConvexFunction> fam;
    for (double p : {1.0, 2.0, 4.0})
        fam.push_back({"t^" + std::to_string(static_cast<int>(p)), [p](double t) { return std::pow(t, p); }});
    for (int k = 1; k <= hinges; ++k) {
        const double a = max_value * k / (hinges + 1.0);
        fam.push_back({"(t-" + std::to_string(a) + ")+", [a](double t) { return std::max(t - a, 0.0); }});
    }
    fam.push_back({"exp(t)-1", [](double t) { return std::expm1(t); }});
    return fam;
}

inline double integrate_phi(const ScalarField& f, const std::function<double(double)>& phi) {
    const auto m = f.measures();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += phi(std::abs(f.values[i])) * m[i];
    return s;
}

/// Verifies int Phi(f) <= int Phi(g) + tol for each member of the family.
inline std::vector<ConvexCheck> convex_comparison_check(const ScalarField& f, const ScalarField& g,
                                                        const std::vector<ConvexFunction>& family, double tol) {
    std::vector<ConvexCheck> out;
    out.reserve(family.size());
    for (const auto& fn : family) {
        ConvexCheck c{fn.name, integrate_phi(f, fn.phi), integrate_phi(g, fn.phi), true};
        c.holds = c.lhs <= c.rhs + tol;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace fracsym
