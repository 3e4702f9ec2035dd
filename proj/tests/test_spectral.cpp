#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracsym/presets.hpp"
#include "fracsym/spectral.hpp"

using namespace fracsym;

namespace {

constexpr double pi = std::numbers::pi;

double fd_eigenvalue(std::size_t n, std::size_t k) {
    const double s = std::sin(k * pi / (2.0 * n));
    return 4.0 * n * n * s * s;
}

double weighted_inner(const Laplacian& a, const ScalarField& u, const ScalarField& v) {
    return inner(a.apply(u), v);
}

}  // namespace

// ---------------------------------------------------------------------------
// assembly

TEST(AssembleLaplacian, NeumannRowSumsVanish) {
    for (const auto& g : {build_interval(17, 1.3), build_rectangle(6, 5, 1.0, 2.0)}) {
        const auto a = assemble_laplacian(g);
        const auto r = a.apply(ScalarField::constant(g, 1.0));
        for (double v : r.values) EXPECT_NEAR(v, 0.0, 1e-10);
    }
}

TEST(AssembleLaplacian, DirichletIntervalMatchesClosedForm) {
    for (std::size_t n : {8u, 33u}) {
        const auto op = make_spectral(build_interval(n, 1.0, Boundary::dirichlet));
        for (std::size_t k = 0; k < n; ++k)
            EXPECT_NEAR(op.eigenvalue(k), fd_eigenvalue(n, k + 1), 1e-9 * fd_eigenvalue(n, n)) << k;
    }
}

TEST(AssembleLaplacian, DiffusionScalesEigenvalues) {
    auto g = build_rectangle(7, 5, 1.0, 0.8);
    const auto a = make_spectral(g, 1.0);
    const auto b = make_spectral(g, 2.0);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(b.eigenvalue(k), 2.0 * a.eigenvalue(k), 1e-9);
    auto ball = build_radial_ball(20, 2, 0.5);
    const auto c = make_spectral(ball, 1.0);
    const auto d = make_spectral(ball, 2.0);
    for (std::size_t k = 0; k < c.size(); ++k)
        EXPECT_NEAR(d.eigenvalue(k), 2.0 * c.eigenvalue(k), 1e-10 * c.eigenvalue(k));
}

TEST(AssembleLaplacian, RejectsNonPositiveDiffusion) {
    EXPECT_THROW(assemble_laplacian(build_interval(4, 1.0), 0.0), std::invalid_argument);
}

TEST(AssembleLaplacian, RadialBallLowestModeConverges) {
    // Dirichlet ball: lambda_1 = (j_{N/2-1,1} / R)^2
    const double r1 = 0.5;
    const double j0 = 2.404825557695772768621632;  // first zero of J_0
    double prev = INFINITY;
    for (std::size_t n : {50u, 100u, 200u}) {
        auto ball = build_radial_ball(n, 2, pi * r1 * r1);
        const double err = std::abs(make_spectral(ball).eigenvalue(0) - (j0 / r1) * (j0 / r1));
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-3 * (j0 / r1) * (j0 / r1));
    // N = 1 is an interval (-R, R) with Dirichlet walls: (pi / 2R)^2
    auto seg = build_radial_ball(400, 1, 1.0);
    EXPECT_NEAR(make_spectral(seg).eigenvalue(0), pi * pi, 1e-4 * pi * pi);
}

// ---------------------------------------------------------------------------
// eigendecomposition

TEST(Eigendecompose, NeumannZeroMode) {
    auto g = build_interval(24, 2.0);
    const auto op = make_spectral(g);
    EXPECT_EQ(op.eigenvalue(0), 0.0);
    for (double v : op.eigenvector(0).values) EXPECT_NEAR(v, 1.0 / std::sqrt(2.0), 1e-12);
    for (std::size_t k = 1; k < op.size(); ++k) EXPECT_GT(op.eigenvalue(k), 0.0);
    const auto r = make_spectral(build_rectangle(6, 4, 1.0, 0.5));
    EXPECT_EQ(r.eigenvalue(0), 0.0);
    for (double v : r.eigenvector(0).values) EXPECT_NEAR(v, std::sqrt(2.0), 1e-12);
}

TEST(Eigendecompose, NeumannSpectrumConverges) {
    for (std::size_t k = 1; k <= 3; ++k) {
        double prev = INFINITY;
        for (std::size_t n : {32u, 64u, 128u}) {
            const auto op = make_spectral(build_interval(n, 1.0));
            EXPECT_NEAR(op.eigenvalue(k), fd_eigenvalue(n, k), 1e-9 * n * n);
            const double err = std::abs(op.eigenvalue(k) - (k * pi) * (k * pi));
            EXPECT_LT(err, prev);
            prev = err;
        }
    }
}

TEST(Eigendecompose, DirichletSpectrumConvergesQuadratically) {
    std::vector<double> errs;
    for (std::size_t n : {32u, 64u, 128u}) {
        const auto op = make_spectral(build_interval(n, 1.0, Boundary::dirichlet));
        errs.push_back(std::abs(op.eigenvalue(0) - pi * pi));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) EXPECT_NEAR(errs[i - 1] / errs[i], 4.0, 0.05);
}

TEST(Eigendecompose, OrthonormalAndComplete) {
    Rng rng(21);
    for (const auto& g : {build_interval(30, 1.5), build_interval(20, 1.0, Boundary::dirichlet),
                          build_rectangle(7, 6, 1.0, 1.4), build_rectangle(5, 5, 1.0, 1.0, Boundary::dirichlet),
                          build_radial_ball(25, 2, 0.5), build_radial_ball(25, 3, 1.0)}) {
        const auto op = make_spectral(g);
        for (std::size_t j = 0; j < op.size(); ++j) {
            const auto pj = op.eigenvector(j);
            for (std::size_t k = j; k < op.size(); ++k)
                EXPECT_NEAR(inner(pj, op.eigenvector(k)), j == k ? 1.0 : 0.0, 1e-10);
        }
        const auto u = random_cell_field(g, rng);
        EXPECT_LE(max_abs_difference(op.synthesize(op.coefficients(u)), u), 1e-10);
        for (std::size_t k = 1; k < op.size(); ++k) EXPECT_LE(op.eigenvalue(k - 1), op.eigenvalue(k));
    }
}

TEST(Eigendecompose, SignConvention) {
    const auto op = make_spectral(build_rectangle(5, 4, 1.0, 1.0, Boundary::dirichlet));
    for (std::size_t k = 0; k < op.size(); ++k) {
        const auto v = op.eigenvector(k).values;
        double scale = 0.0;
        for (double x : v) scale = std::max(scale, std::abs(x));
        for (double x : v)
            if (std::abs(x) > 1e-8 * scale) {
                EXPECT_GT(x, 0.0);
                break;
            }
    }
}

TEST(Eigendecompose, TensorMatchesDense) {
    for (auto bc : {Boundary::neumann, Boundary::dirichlet}) {
        auto g = build_rectangle(6, 5, 1.0, 0.7, bc);
        const auto lap = assemble_laplacian(g, 1.5);
        const auto t = eigendecompose(lap);
        const auto d = eigendecompose_dense(lap);
        ASSERT_TRUE(t.is_tensor());
        ASSERT_FALSE(d.is_tensor());
        for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(t.eigenvalue(k), d.eigenvalue(k), 1e-9);
        Rng rng(22);
        const auto u = random_cell_field(g, rng);
        EXPECT_LE(max_abs_difference(apply_fractional(t, 0.4, u), apply_fractional(d, 0.4, u)), 1e-9);
        EXPECT_LE(max_abs_difference(solve_elliptic(t, 0.6, 1.0, u), solve_elliptic(d, 0.6, 1.0, u)), 1e-10);
    }
}

TEST(Eigendecompose, Symmetry) {
    Rng rng(23);
    for (const auto& g : {build_rectangle(8, 6, 1.0, 1.0), build_radial_ball(30, 2, 0.5),
                          build_interval(40, 1.0, Boundary::dirichlet)}) {
        const auto a = assemble_laplacian(g, 0.7);
        for (int trial = 0; trial < 10; ++trial) {
            const auto u = random_cell_field(g, rng);
            const auto v = random_cell_field(g, rng);
            const double uv = weighted_inner(a, u, v), vu = weighted_inner(a, v, u);
            EXPECT_NEAR(uv, vu, 1e-10 * std::max(1.0, std::abs(uv)));
        }
    }
}

// ---------------------------------------------------------------------------
// fractional calculus

TEST(ApplyFractional, ConstantsAreKernel) {
    const auto op = make_spectral(build_rectangle(6, 6, 1.0, 1.0));
    const auto r = apply_fractional(op, 0.5, ScalarField::constant(op.grid(), 3.0));
    for (double v : r.values) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(ApplyFractional, Eigenvector) {
    const auto op = make_spectral(build_interval(20, 1.0));
    const auto phi = op.eigenvector(3);
    const auto r = apply_fractional(op, 0.3, phi);
    EXPECT_LE(max_abs_difference(r, std::pow(op.eigenvalue(3), 0.3) * phi), 1e-10);
}

TEST(ApplyFractional, FullPowerMatchesMatrix) {
    Rng rng(24);
    for (const auto& g : {build_interval(30, 1.0), build_rectangle(6, 7, 1.0, 1.0, Boundary::dirichlet),
                          build_radial_ball(20, 2, 0.5)}) {
        const auto lap = assemble_laplacian(g);
        const auto op = eigendecompose(lap);
        const auto u = random_cell_field(g, rng);
        const auto direct = lap.apply(u);
        EXPECT_LE(max_abs_difference(apply_fractional(op, 1.0, u), direct), 1e-10 * lp_norm(direct, INFINITY) + 1e-10);
    }
}

TEST(ApplyFractional, RejectsSigmaOutOfRange) {
    const auto op = make_spectral(build_interval(4, 1.0));
    EXPECT_THROW(apply_fractional(op, 1.5, ScalarField::zeros(op.grid())), std::invalid_argument);
}

TEST(SolveElliptic, EigenvectorSource) {
    const auto op = make_spectral(build_interval(25, 1.0));
    const auto u = solve_elliptic(op, 0.4, 0.0, op.eigenvector(2));
    EXPECT_LE(max_abs_difference(u, std::pow(op.eigenvalue(2), -0.4) * op.eigenvector(2)), 1e-12);
}

TEST(SolveElliptic, ConstantSourceWithAbsorption) {
    const auto op = make_spectral(build_rectangle(5, 4, 1.0, 1.0));
    const auto u = solve_elliptic(op, 0.5, 2.0, ScalarField::constant(op.grid(), 1.0));
    for (double v : u.values) EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(SolveElliptic, RoundTripAndZeroMean) {
    Rng rng(25);
    const auto op = make_spectral(build_rectangle(10, 8, 1.0, 1.0));
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = project_zero_mean(random_cell_field(op.grid(), rng));
        const auto u = solve_elliptic(op, 0.35, 0.0, f);
        EXPECT_NEAR(mean(u), 0.0, 1e-12);
        EXPECT_LE(max_abs_difference(apply_fractional(op, 0.35, u), f), 1e-8);
    }
}

TEST(SolveElliptic, IncompatibleData) {
    const auto op = make_spectral(build_interval(10, 1.0));
    EXPECT_THROW(solve_elliptic(op, 0.5, 0.0, ScalarField::constant(op.grid(), 1.0)), IncompatibleData);
    EXPECT_THROW(solve_elliptic(op, 0.5, -1.0, ScalarField::zeros(op.grid())), std::invalid_argument);
    // Dirichlet has no kernel, so any source is admissible.
    const auto d = make_spectral(build_interval(10, 1.0, Boundary::dirichlet));
    EXPECT_NO_THROW(solve_elliptic(d, 0.5, 0.0, ScalarField::constant(d.grid(), 1.0)));
}

TEST(SolveElliptic, ResolventContracts) {
    Rng rng(26);
    const auto op = make_spectral(build_rectangle(9, 9, 1.0, 1.0));
    for (double c : {0.1, 1.0, 7.0}) {
        const auto f = random_cell_field(op.grid(), rng);
        EXPECT_LE(l2_norm(solve_elliptic(op, 0.5, c, f)), l2_norm(f) / c + 1e-12);
    }
}

TEST(SolveElliptic, PositiveSourceGivesPositiveSolutionOnBall) {
    // Dirichlet resolvent of a nonnegative source stays nonnegative for sigma = 1.
    const auto op = make_spectral(build_radial_ball(40, 2, 0.5));
    const auto u = solve_elliptic(op, 1.0, 0.5, ScalarField::constant(op.grid(), 1.0));
    for (double v : u.values) EXPECT_GT(v, 0.0);
}

// ---------------------------------------------------------------------------
// heat semigroup

TEST(HeatSemigroup, Identity) {
    Rng rng(27);
    const auto op = make_spectral(build_interval(16, 1.0));
    const auto u = random_cell_field(op.grid(), rng);
    EXPECT_LE(max_abs_difference(heat_semigroup(op, 0.0, u), u), 1e-12);
}

TEST(HeatSemigroup, ConstantsInvariant) {
    const auto op = make_spectral(build_rectangle(6, 5, 1.0, 1.0));
    const auto c = ScalarField::constant(op.grid(), 2.5);
    for (double t : {0.1, 1.0, 10.0}) EXPECT_LE(max_abs_difference(heat_semigroup(op, t, c), c), 1e-12);
}

TEST(HeatSemigroup, EigenvectorDecay) {
    const auto op = make_spectral(build_interval(12, 1.0));
    const auto phi = op.eigenvector(1);
    EXPECT_LE(max_abs_difference(heat_semigroup(op, 1.0, phi), std::exp(-op.eigenvalue(1)) * phi), 1e-12);
}

TEST(HeatSemigroup, SemigroupProperty) {
    Rng rng(28);
    const auto op = make_spectral(build_rectangle(8, 7, 1.0, 1.0));
    for (int trial = 0; trial < 5; ++trial) {
        const auto u = random_cell_field(op.grid(), rng);
        const double t = 0.01 * (trial + 1), s = 0.003 * (trial + 2);
        EXPECT_LE(max_abs_difference(heat_semigroup(op, t, heat_semigroup(op, s, u)), heat_semigroup(op, t + s, u)),
                  1e-10);
    }
    EXPECT_THROW(heat_semigroup(op, -1.0, ScalarField::zeros(op.grid())), std::invalid_argument);
}
