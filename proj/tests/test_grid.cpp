#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracsym/grid.hpp"
#include "fracsym/presets.hpp"

using namespace fracsym;

namespace {

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST(Grid, IntervalUniformCells) {
    auto g = build_interval(4, 1.0);
    ASSERT_EQ(g->size(), 4u);
    for (double m : g->measures()) EXPECT_DOUBLE_EQ(m, 0.25);
    EXPECT_EQ(g->dimension(), 1);
    EXPECT_EQ(g->boundary(), Boundary::neumann);
    EXPECT_DOUBLE_EQ(g->centroids()[0][0], 0.125);
}

TEST(Grid, IntervalTotals) {
    EXPECT_DOUBLE_EQ(build_interval(2, 2.0)->total_measure(), 2.0);
    auto g = build_interval(100, 1.0);
    EXPECT_NEAR(sum(g->measures()), 1.0, 1e-12);
}

TEST(Grid, IntervalRejectsBadInput) {
    EXPECT_THROW(build_interval(1, 1.0), std::invalid_argument);
    EXPECT_THROW(build_interval(4, 0.0), std::invalid_argument);
    EXPECT_THROW(build_interval(4, -1.0), std::invalid_argument);
}

TEST(Grid, RectangleCells) {
    auto g = build_rectangle(2, 2, 1.0, 1.0);
    ASSERT_EQ(g->size(), 4u);
    for (double m : g->measures()) EXPECT_DOUBLE_EQ(m, 0.25);
    EXPECT_EQ(g->dimension(), 2);
    // x varies fastest
    EXPECT_DOUBLE_EQ(g->centroids()[1][0], 0.75);
    EXPECT_DOUBLE_EQ(g->centroids()[1][1], 0.25);

    EXPECT_NEAR(sum(build_rectangle(3, 2, 3.0, 2.0)->measures()), 6.0, 1e-12);
    EXPECT_NEAR(sum(build_rectangle(64, 64, 1.0, 1.0)->measures()), 1.0, 1e-12);
}

TEST(Grid, RectangleRejectsDegenerate) {
    EXPECT_THROW(build_rectangle(1, 4, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(build_rectangle(4, 4, 1.0, 0.0), std::invalid_argument);
}

TEST(Grid, UnitBallMeasure) {
    EXPECT_NEAR(unit_ball_measure(1), 2.0, 1e-15);
    EXPECT_NEAR(unit_ball_measure(2), std::numbers::pi, 1e-15);
    EXPECT_NEAR(unit_ball_measure(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
}

TEST(Grid, RadialBallRadius) {
    EXPECT_NEAR(build_radial_ball(7, 1, 1.0)->radius(), 0.5, 1e-15);
    EXPECT_NEAR(build_radial_ball(7, 2, std::numbers::pi)->radius(), 1.0, 1e-15);
    auto g = build_radial_ball(50, 2, 0.5);
    // closed form sqrt(0.5 / pi)
    EXPECT_NEAR(g->radius(), 0.398942280401432677939946, 1e-15);
    EXPECT_NEAR(sum(g->measures()), 0.5, 1e-12);
    EXPECT_EQ(g->boundary(), Boundary::dirichlet);
}

TEST(Grid, RadialShellMeasuresMatchFormula) {
    auto g = build_radial_ball(10, 3, 2.0);
    const double omega = unit_ball_measure(3);
    const auto& r = g->radii();
    for (std::size_t i = 0; i < g->size(); ++i)
        EXPECT_NEAR(g->measures()[i], omega * (std::pow(r[i + 1], 3) - std::pow(r[i], 3)), 1e-13);
}

TEST(Grid, RadialRejectsBadMeasure) {
    EXPECT_THROW(build_radial_ball(10, 2, 0.0), std::invalid_argument);
    EXPECT_THROW(build_radial_ball(1, 2, 1.0), std::invalid_argument);
}

TEST(GridProperty, RadialMeasuresSumToTarget) {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const double m = rng.uniform(1e-6, 10.0);
        const int dim = 1 + trial % 3;
        const auto n = static_cast<std::size_t>(2 + trial % 97);
        auto g = build_radial_ball(n, dim, m);
        EXPECT_NEAR(sum(g->measures()) / m, 1.0, 1e-12) << "m=" << m << " N=" << dim;
        for (double v : g->measures()) EXPECT_GT(v, 0.0);
    }
}

TEST(GridProperty, DeterministicConstruction) {
    auto a = build_rectangle(17, 9, 1.3, 0.7);
    auto b = build_rectangle(17, 9, 1.3, 0.7);
    EXPECT_EQ(a->measures(), b->measures());
    EXPECT_EQ(a->centroids(), b->centroids());
    auto c = build_radial_ball(33, 2, 0.5);
    auto d = build_radial_ball(33, 2, 0.5);
    EXPECT_EQ(c->measures(), d->measures());
}

TEST(Grid, JsonFields) {
    auto j = build_rectangle(3, 2, 3.0, 2.0)->to_json();
    EXPECT_EQ(j["kind"], "rectangle");
    EXPECT_EQ(j["N"], 2);
    EXPECT_EQ(j["n"][0], 3);
    EXPECT_DOUBLE_EQ(j["total_measure"].get<double>(), 6.0);
    auto r = build_radial_ball(5, 2, std::numbers::pi)->to_json();
    EXPECT_EQ(r["kind"], "radial_ball");
    EXPECT_NEAR(r["radius"].get<double>(), 1.0, 1e-15);
}
