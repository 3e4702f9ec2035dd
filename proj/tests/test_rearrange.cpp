#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fracsym/presets.hpp"
#include "fracsym/rearrange.hpp"

using namespace fracsym;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

ScalarField identity_field(std::size_t n) {
    return ScalarField::sample(build_interval(n, 1.0), [](double x, double) { return x; });
}

/// {3 on the first 4 cells, 1 on the last 6} on a 10-cell unit interval.
ScalarField two_valued() {
    auto g = build_interval(10, 1.0);
    std::vector<double> v(10, 1.0);
    for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = 3.0;
    std::reverse(v.begin(), v.end());  // rearrangement must not depend on cell order
    return ScalarField(g, v);
}

ScalarField indicator(const GridPtr& g, double height, std::size_t cells) {
    std::vector<double> v(g->size(), 0.0);
    for (std::size_t i = 0; i < cells; ++i) v[i] = height;
    return ScalarField(g, v);
}

}  // namespace

// ---------------------------------------------------------------------------
// distribution function

TEST(DistributionFunction, ConstantField) {
    auto f = ScalarField::constant(build_interval(8, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(distribution_function(f, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(distribution_function(f, 2.0), 0.0);
}

TEST(DistributionFunction, LinearField) {
    const std::size_t n = 1000;
    auto f = identity_field(n);
    // analytic mu(k) = 1 - k
    EXPECT_NEAR(distribution_function(f, 0.3), 0.7, 1.0 / n);
}

TEST(DistributionFunction, UsesAbsoluteValue) {
    auto g = build_interval(4, 1.0);
    ScalarField f(g, {-3.0, 1.0, -0.5, 2.0});
    EXPECT_DOUBLE_EQ(distribution_function(f, 1.5), 0.5);
}

// ---------------------------------------------------------------------------
// decreasing rearrangement

TEST(DecreasingRearrangement, LinearField) {
    const std::size_t n = 256;
    const auto p = decreasing_rearrangement(identity_field(n));
    double err = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double s = i / 1000.0 * (1.0 - 1e-12);
        err = std::max(err, std::abs(p.value_at(s) - (1.0 - s)));
    }
    EXPECT_LE(err, 1.0 / n);
}

TEST(DecreasingRearrangement, ConstantField) {
    const auto p = decreasing_rearrangement(ScalarField::constant(build_interval(5, 2.0), 1.5));
    for (double v : p.values) EXPECT_DOUBLE_EQ(v, 1.5);
    EXPECT_DOUBLE_EQ(p.total_measure, 2.0);
    EXPECT_DOUBLE_EQ(p.value_at(2.0), 0.0);
}

TEST(DecreasingRearrangement, TwoValuedField) {
    const auto p = decreasing_rearrangement(two_valued());
    EXPECT_DOUBLE_EQ(p.value_at(0.0), 3.0);
    EXPECT_DOUBLE_EQ(p.value_at(0.39), 3.0);
    EXPECT_DOUBLE_EQ(p.value_at(0.41), 1.0);
    EXPECT_DOUBLE_EQ(p.value_at(0.99), 1.0);
    EXPECT_NEAR(p.breaks[4], 0.4, 1e-15);
}

TEST(DecreasingRearrangement, NonIncreasing) {
    Rng rng(3);
    const auto p = decreasing_rearrangement(random_cell_field(build_rectangle(12, 9, 1.0, 2.0), rng));
    for (std::size_t i = 1; i < p.values.size(); ++i) EXPECT_LE(p.values[i], p.values[i - 1]);
}

// ---------------------------------------------------------------------------
// Schwarz rearrangement

TEST(SchwarzRearrangement, IndicatorBecomesCenteredBall) {
    auto omega = build_interval(100, 1.0);
    auto ball = build_radial_ball(50, 1, 1.0);
    auto f = indicator(omega, 1.0, 30);
    std::reverse(f.values.begin(), f.values.end());
    const auto fs = schwarz_rearrangement(f, ball);
    for (std::size_t i = 0; i < 15; ++i) EXPECT_NEAR(fs.values[i], 1.0, 1e-12);
    for (std::size_t i = 15; i < 50; ++i) EXPECT_NEAR(fs.values[i], 0.0, 1e-12);
}

TEST(SchwarzRearrangement, IndicatorInTwoDimensionsKeepsMass) {
    auto omega = build_rectangle(16, 16, 1.0, 1.0);
    auto ball = build_radial_ball(20, 2, 0.5);
    auto f = indicator(omega, 2.0, 60);
    const auto fs = schwarz_rearrangement(f, ball);
    EXPECT_NEAR(integral(fs), integral(f), 1e-12);
    EXPECT_NEAR(fs.values[0], 2.0, 1e-12);
    for (std::size_t i = 1; i < fs.size(); ++i) EXPECT_LE(fs.values[i], fs.values[i - 1]);
}

TEST(SchwarzRearrangement, ConstantFillsBall) {
    auto omega = build_interval(10, 1.0);
    auto ball = build_radial_ball(8, 2, 0.5);
    const auto fs = schwarz_rearrangement(indicator(omega, 0.7, 5), ball);
    for (double v : fs.values) EXPECT_NEAR(v, 0.7, 1e-12);
}

TEST(SchwarzRearrangement, LinearFieldOnSymmetricInterval) {
    const std::size_t n = 400;
    auto ball = build_radial_ball(100, 1, 1.0);
    const auto fs = schwarz_rearrangement(identity_field(n), ball);
    // f*(s) = 1 - s composed with s = 2|x|
    for (std::size_t i = 0; i < ball->size(); ++i) {
        const double r = ball->centroids()[i][0];
        EXPECT_NEAR(fs.values[i], 1.0 - 2.0 * r, 2.0 / n);
    }
}

TEST(SchwarzRearrangement, RejectsOversizedSupport) {
    auto omega = build_interval(10, 1.0);
    auto ball = build_radial_ball(8, 1, 0.5);
    EXPECT_THROW(schwarz_rearrangement(indicator(omega, 1.0, 7), ball), SupportExceeded);
    // one cell of slack is tolerated
    EXPECT_NO_THROW(schwarz_rearrangement(indicator(omega, 1.0, 6), ball));
}

// ---------------------------------------------------------------------------
// median

TEST(Median, ConstantField) { EXPECT_DOUBLE_EQ(median(ScalarField::constant(build_interval(7, 1.0), 4.2)), 4.2); }

TEST(Median, InfimumDefinition) {
    auto g = build_interval(10, 1.0);
    ScalarField f(g, {0, 1, 0, 1, 0, 1, 0, 0, 1, 0});  // 1 on 0.4, 0 on 0.6
    EXPECT_DOUBLE_EQ(median(f), 0.0);
}

TEST(Median, LinearField) {
    const std::size_t n = 501;
    EXPECT_NEAR(median(identity_field(n)), 0.5, 1.0 / n);
}

TEST(Median, AsymmetricTwoValued) {
    auto g = build_interval(4, 1.0);
    ScalarField f(g, {1.0, -1.0, -1.0, 1.0});
    // |{u > -1}| = 1/2 <= 1/2, so the infimum is -1
    EXPECT_DOUBLE_EQ(median(f), -1.0);
    const auto [u1, u2] = median_split(f);
    EXPECT_EQ(u1.values, (std::vector<double>{2.0, 0.0, 0.0, 2.0}));
    EXPECT_EQ(u2.values, (std::vector<double>{0.0, 0.0, 0.0, 0.0}));
}

TEST(MedianSplit, ConstantGivesZeros) {
    const auto [u1, u2] = median_split(ScalarField::constant(build_interval(6, 1.0), 3.0));
    for (double v : u1.values) EXPECT_EQ(v, 0.0);
    for (double v : u2.values) EXPECT_EQ(v, 0.0);
}

TEST(MedianSplit, LinearField) {
    const std::size_t n = 200;
    const auto [u1, u2] = median_split(identity_field(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (i + 0.5) / n;
        EXPECT_NEAR(u1.values[i], std::max(x - 0.5, 0.0), 1.0 / n);
        EXPECT_NEAR(u2.values[i], std::max(0.5 - x, 0.0), 1.0 / n);
    }
}

// ---------------------------------------------------------------------------
// concentration curves and order

TEST(Concentration, ConstantProfileIsLinear) {
    const auto c = concentration(ScalarField::constant(build_interval(4, 2.0), 1.5));
    EXPECT_NEAR(c.value_at(0.3), 0.45, 1e-15);
    EXPECT_NEAR(c.value_at(2.0), 3.0, 1e-15);
}

TEST(Concentration, TwoValued) { EXPECT_NEAR(concentration(two_valued()).value_at(0.5), 1.3, 1e-14); }

TEST(Concentration, ZeroField) {
    const auto c = concentration(ScalarField::zeros(build_interval(4, 1.0)));
    for (double v : c.cumulative) EXPECT_EQ(v, 0.0);
}

TEST(LessConcentrated, Reflexive) {
    Rng rng(5);
    const auto c = concentration(random_cell_field(build_interval(32, 1.0), rng));
    const auto r = less_concentrated(c, c, 0.0);
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.worst_gap, 0.0);
}

TEST(LessConcentrated, SpreadVersusPeaked) {
    auto g = build_interval(10, 1.0);
    const auto f = concentration(ScalarField::constant(g, 1.0));
    const auto peaked = concentration(indicator(g, 2.0, 5));
    EXPECT_TRUE(less_concentrated(f, peaked, 0.0).holds);
    const auto rev = less_concentrated(peaked, f, 0.0);
    EXPECT_FALSE(rev.holds);
    EXPECT_NEAR(rev.worst_gap, 0.5, 1e-14);
    EXPECT_NEAR(rev.worst_s, 0.5, 1e-14);
}

TEST(LessConcentrated, RespectsSMax) {
    auto g = build_interval(10, 1.0);
    const auto peaked = concentration(indicator(g, 2.0, 5));
    const auto f = concentration(ScalarField::constant(g, 1.0));
    const auto r = less_concentrated(peaked, f, 0.0, 0.2);
    EXPECT_NEAR(r.s.back(), 0.2, 1e-15);
    EXPECT_NEAR(r.worst_gap, 0.2, 1e-14);
}

TEST(ConvexComparison, EqualFields) {
    Rng rng(9);
    const auto f = random_cell_field(build_interval(16, 1.0), rng, 0.0, 1.0);
    for (const auto& c : convex_comparison_check(f, f, standard_convex_family(1.0), 0.0)) {
        EXPECT_TRUE(c.holds) << c.name;
        EXPECT_EQ(c.lhs, c.rhs);
    }
}

TEST(ConvexComparison, SpreadVersusPeaked) {
    auto g = build_interval(10, 1.0);
    const auto f = ScalarField::constant(g, 1.0);
    const auto peaked = indicator(g, 2.0, 5);
    const auto checks = convex_comparison_check(f, peaked, standard_convex_family(2.0), 1e-14);
    for (const auto& c : checks) EXPECT_TRUE(c.holds) << c.name;
    EXPECT_NEAR(checks[0].lhs, checks[0].rhs, 1e-14);  // t^1: equal totals
    EXPECT_NEAR(checks[1].lhs, 1.0, 1e-14);            // t^2
    EXPECT_NEAR(checks[1].rhs, 2.0, 1e-14);
}

// ---------------------------------------------------------------------------
// properties over seeded random fields

TEST(RearrangeProperty, NormPreservation) {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = trial % 2 ? build_interval(64, 1.7) : build_rectangle(9, 7, 1.0, 0.5);
        const auto f = random_cell_field(g, rng);
        const auto p = decreasing_rearrangement(f);
        for (double q : {1.0, 2.0, inf}) EXPECT_NEAR(lp_norm(p, q), lp_norm(f, q), 1e-12 * lp_norm(f, q));
    }
}

TEST(RearrangeProperty, HardyLittlewood) {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = build_interval(40, 1.0);
        const auto f = random_cell_field(g, rng);
        const auto h = random_cell_field(g, rng);
        double lhs = 0.0;
        for (std::size_t i = 0; i < g->size(); ++i) lhs += std::abs(f.values[i] * h.values[i]) * g->measures()[i];
        EXPECT_LE(lhs, integrate_product(decreasing_rearrangement(f), decreasing_rearrangement(h)) + 1e-12);
    }
}

TEST(RearrangeProperty, Equidistribution) {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = build_rectangle(8, 8, 1.0, 1.0);
        auto f = random_cell_field(g, rng);
        for (std::size_t i = 0; i < f.size(); i += 3) f.values[i] = std::round(4.0 * f.values[i]) / 4.0;  // ties
        const auto p = decreasing_rearrangement(f);
        for (double v : f.values) {
            const double k = std::abs(v);
            double mu_star = 0.0;
            for (std::size_t i = 0; i < p.values.size(); ++i)
                if (p.values[i] > k) mu_star += p.breaks[i + 1] - p.breaks[i];
            EXPECT_NEAR(distribution_function(f, k), mu_star, 1e-14);
        }
    }
}

TEST(RearrangeProperty, MedianSplitSupportBound) {
    Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = build_interval(33 + trial, 1.0);
        auto f = random_cell_field(g, rng);
        if (trial % 3 == 0)
            for (double& v : f.values) v = std::round(3.0 * v);  // heavy ties
        const auto [u1, u2] = median_split(f);
        const double bound = 0.5 * g->total_measure() + g->max_cell_measure() + 1e-14;
        EXPECT_LE(support_measure(u1), 0.5 * g->total_measure() + 1e-14);
        EXPECT_LE(support_measure(u2), bound);
    }
}

TEST(RearrangeProperty, CurvesConcaveNonDecreasing) {
    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = concentration(random_cell_field(build_interval(50, 1.0), rng));
        for (std::size_t i = 1; i < c.breaks.size(); ++i) {
            EXPECT_GE(c.cumulative[i], c.cumulative[i - 1]);
            if (i + 1 < c.breaks.size()) {
                const double s0 = (c.cumulative[i] - c.cumulative[i - 1]) / (c.breaks[i] - c.breaks[i - 1]);
                const double s1 = (c.cumulative[i + 1] - c.cumulative[i]) / (c.breaks[i + 1] - c.breaks[i]);
                EXPECT_LE(s1, s0 + 1e-12);
            }
        }
    }
}

TEST(RearrangeProperty, OrderIsTransitive) {
    // Averaging neighbouring cells is doubly stochastic, so it only lowers concentration.
    auto smooth = [](ScalarField f, std::size_t offset) {
        for (std::size_t i = offset; i + 1 < f.size(); i += 2) {
            const double a = 0.5 * (f.values[i] + f.values[i + 1]);
            f.values[i] = f.values[i + 1] = a;
        }
        return f;
    };
    Rng rng(16);
    for (int trial = 0; trial < 30; ++trial) {
        const auto h = random_cell_field(build_interval(64, 1.0), rng, 0.0, 1.0);
        const auto g = smooth(h, 0);
        const auto f = smooth(g, 1);
        const auto cf = concentration(f), cg = concentration(g), ch = concentration(h);
        ASSERT_TRUE(less_concentrated(cf, cg, 1e-13).holds);
        ASSERT_TRUE(less_concentrated(cg, ch, 1e-13).holds);
        EXPECT_TRUE(less_concentrated(cf, ch, 1e-13).holds);
    }
}

TEST(RearrangeProperty, AddCurvesIsPointwiseSum) {
    Rng rng(17);
    const auto a = concentration(random_cell_field(build_interval(13, 1.0), rng));
    const auto b = concentration(random_cell_field(build_interval(7, 1.0), rng));
    const auto c = add_curves(a, b);
    for (int i = 0; i <= 100; ++i) {
        const double s = i / 100.0;
        EXPECT_NEAR(c.value_at(s), a.value_at(s) + b.value_at(s), 1e-14);
    }
}
