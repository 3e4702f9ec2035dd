#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracsym/compare.hpp"
#include "fracsym/config.hpp"
#include "fracsym/extension.hpp"
#include "fracsym/io.hpp"
#include "fracsym/parabolic.hpp"
#include "fracsym/presets.hpp"
#include "fracsym/rearrange.hpp"

namespace fracsym::cli {

enum ExitCode : int { holds = 0, violated = 1, config_error = 2, numerical_failure = 3 };

// ---------------------------------------------------------------------------
// experiment setup

inline GridPtr build_omega(const DomainSpec& d) {
    if (d.kind == "interval") return build_interval(d.nx, d.lx);
    return build_rectangle(d.nx, d.ny, d.lx, d.ly);
}

/// Shell count for B: one shell per cell measure on intervals, max(nx, ny) on rectangles.
inline std::size_t ball_shells(const DomainSpec& d) {
    if (d.shells > 0) return d.shells;
    if (d.kind == "interval") return std::max<std::size_t>(2, d.nx / 2);
    return std::max(d.nx, d.ny);
}

struct Problem {
    SpectralOperator omega;
    SpectralOperator ball;
    double q{1.0};
    double gamma{1.0};
};

inline Problem build_problem(const ExperimentConfig& cfg) {
    const GridPtr omega = build_omega(cfg.domain);
    Problem p;
    p.q = cfg.q.value_or(default_isoperimetric_constant(*omega));
    p.gamma = cfg.gamma.value_or(gamma_constant(omega->dimension(), p.q));
    p.omega = make_spectral(omega);
    p.ball = make_spectral(half_measure_ball(*omega, ball_shells(cfg.domain)), p.gamma);
    return p;
}

inline ScalarField make_field(const FieldSpec& spec, const SpectralOperator& op, std::uint64_t seed,
                              const char* key) {
    const GridPtr& g = op.grid();
    if (spec.kind == "zero") return ScalarField::zeros(g);
    if (spec.kind == "constant") return ScalarField::constant(g, spec.value);
    if (spec.kind == "eigenmode") {
        if (spec.k >= op.size())
            throw ConfigError(std::string(key) + "_k", "mode index " + std::to_string(spec.k) + " exceeds the grid");
        return eigenmode_field(op, spec.k, spec.value);
    }
    if (spec.kind == "two-bump") return two_bump_field(g, spec.value);
    if (spec.kind == "random") return spec.value * random_cosine_field(g, seed);
    throw ConfigError(key, "unknown preset '" + spec.kind + "'");
}

inline TimeSource make_time_source(const ExperimentConfig& cfg, const ScalarField& spatial) {
    if (cfg.f.kind == "zero") return {};
    const double period = cfg.T;
    std::function<double(double)> shape;
    if (cfg.f_time == "constant") shape = [](double) { return 1.0; };
    else if (cfg.f_time == "sin") shape = [period](double t) { return std::sin(2.0 * std::numbers::pi * t / period); };
    else if (cfg.f_time == "cos") shape = [period](double t) { return std::cos(2.0 * std::numbers::pi * t / period); };
    else shape = [](double t) { return std::exp(-t); };
    return [spatial, shape](double t) { return shape(t) * spatial; };
}

inline std::filesystem::path out_dir(const ExperimentConfig& cfg) { return std::filesystem::path(cfg.out); }

inline const char* verdict(bool ok) { return ok ? "holds" : "violated"; }

// ---------------------------------------------------------------------------
// subcommands

inline int run_elliptic_compare(const ExperimentConfig& cfg, std::ostream& log) {
    const Problem p = build_problem(cfg);
    ScalarField f = make_field(cfg.source, p.omega, cfg.seed, "source");
    if (cfg.c == 0.0 && cfg.project) f = project_zero_mean(f);

    CompareOptions opts;
    opts.y_samples = cfg.y_samples;
    opts.tolerance = cfg.tol.value_or(-1.0);
    opts.c_tol = cfg.c_tol;
    opts.split_mode = cfg.split_mode;
    opts.q = p.q;
    const auto r = elliptic_compare(p.omega, p.ball, cfg.sigma, cfg.c, f, opts);

    const double tol = r.report.tolerance;
    const auto osc = oscillation_check(r.u, r.v, tol);
    const auto lps = lp_check(r.u, r.v, {1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()}, tol);
    bool consequences_hold = osc.holds;
    nlohmann::json lp = nlohmann::json::array();
    for (const auto& c : lps) {
        consequences_hold = consequences_hold && c.holds;
        lp.push_back({{"p", std::isinf(c.p) ? nlohmann::json("inf") : nlohmann::json(c.p)},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"holds", c.holds}});
    }

    nlohmann::json j = r.report.to_json();
    j["params"]["source"] = cfg.source.kind;
    j["params"]["seed"] = cfg.seed;
    j["consequences"] = {{"oscillation", {{"slack", osc.slack}, {"holds", osc.holds}}}, {"lp", lp}};
    const auto dir = out_dir(cfg);
    io::write_file(dir / "report.json", io::dump(j));
    io::write_file(dir / "comparison.csv", io::comparison_csv(r.report));

    const bool ok = r.report.holds && consequences_hold;
    log << "elliptic-compare: worst_gap=" << r.report.worst_gap << " tol=" << tol << " verdict=" << verdict(ok)
        << "\n";
    return ok ? holds : violated;
}

inline int run_parabolic_compare(const ExperimentConfig& cfg, std::ostream& log) {
    const Problem p = build_problem(cfg);
    const ScalarField u0 = make_field(cfg.u0, p.omega, cfg.seed, "u0");
    const ScalarField f_spatial = make_field(cfg.f, p.omega, cfg.seed + 1, "f");
    ParabolicOptions opts;
    opts.tolerance = cfg.tol.value_or(-1.0);
    opts.c_tol = cfg.c_tol;
    opts.exponent = cfg.gamma_exponent;
    opts.sampling = cfg.sampling;
    opts.q = p.q;
    const auto r = parabolic_compare(p.omega, p.ball, cfg.sigma, u0, make_time_source(cfg, f_spatial), cfg.T,
                                     cfg.steps, opts);
    nlohmann::json j = r.to_json();
    j["params"]["u0"] = cfg.u0.kind;
    j["params"]["f"] = cfg.f.kind;
    j["params"]["f_time"] = cfg.f_time;
    j["params"]["seed"] = cfg.seed;
    const auto dir = out_dir(cfg);
    io::write_file(dir / "report.json", io::dump(j));
    io::write_file(dir / "parabolic.csv", io::parabolic_csv(r));
    io::write_file(dir / "trajectory_omega.csv", io::trajectory_csv(r.omega));
    io::write_file(dir / "trajectory_ball.csv", io::trajectory_csv(r.ball));
    log << "parabolic-compare: worst_gap=" << r.worst_gap << " (step " << r.worst_step << ") tol=" << r.tolerance
        << " verdict=" << verdict(r.holds) << "\n";
    return r.holds ? holds : violated;
}

/// Mode-wise flux limit, D-to-N residual sweep and the sigma = 1/2 closed form.
inline int run_extension_check(const ExperimentConfig& cfg, std::ostream& log) {
    const SpectralOperator op = make_spectral(build_omega(cfg.domain));
    if (op.boundary() != Boundary::neumann || op.size() <= cfg.modes)
        throw ConfigError("modes", "grid has too few nonzero modes");
    const ScalarField u = make_field(cfg.source, op, cfg.seed, "source");
    const std::vector<double> ys{1e-1, 1e-2, 1e-3};

    nlohmann::json per_sigma = nlohmann::json::array();
    std::ostringstream flux_csv, dtn_csv;
    io::full_precision(flux_csv) << "sigma,k,lambda,y,flux,target,rel_error\n";
    io::full_precision(dtn_csv) << "sigma,y,residual\n";
    bool all_ok = true;
    for (double sigma : cfg.sigmas) {
        nlohmann::json flux = nlohmann::json::array();
        double worst = 0.0;
        for (std::size_t k = 1; k <= cfg.modes; ++k) {
            const double lambda = op.eigenvalue(k);
            const double root = std::sqrt(lambda);
            const double y = 1e-3 / root;
            const double value = -std::pow(y, 1.0 - 2.0 * sigma) * rho_derivative(sigma, root * y) * root / kappa(sigma);
            const double target = std::pow(lambda, sigma);
            const double rel = std::abs(value / target - 1.0);
            worst = std::max(worst, rel);
            flux.push_back({{"k", k}, {"lambda", lambda}, {"y", y}, {"flux", value}, {"target", target}, {"rel_error", rel}});
            flux_csv << sigma << ',' << k << ',' << lambda << ',' << y << ',' << value << ',' << target << ',' << rel
                     << '\n';
        }
        nlohmann::json residuals = nlohmann::json::array();
        bool monotone = true;
        double prev = std::numeric_limits<double>::infinity();
        for (double y : ys) {
            const double n = dtn_residual(op, sigma, u, y).norm;
            // A vanishing residual (e.g. constant data) counts as converged.
            monotone = monotone && (n < prev || n == 0.0);
            prev = n;
            residuals.push_back({{"y", y}, {"norm", n}});
            dtn_csv << sigma << ',' << y << ',' << n << '\n';
        }
        const bool flux_ok = worst <= cfg.flux_tol;
        all_ok = all_ok && flux_ok && monotone;
        per_sigma.push_back({{"sigma", sigma},
                             {"kappa", kappa(sigma)},
                             {"flux", flux},
                             {"flux_worst_rel_error", worst},
                             {"flux_holds", flux_ok},
                             {"residuals", residuals},
                             {"residual_monotone", monotone}});
        log << "extension-check: sigma=" << sigma << " flux_rel_error=" << worst << (flux_ok ? " ok" : " FAIL")
            << " residual_monotone=" << (monotone ? "ok" : "FAIL") << "\n";
    }

    double rho_err = 0.0;
    for (int i = 0; i <= 500; ++i) {
        const double t = 5.0 * i / 500.0;
        rho_err = std::max(rho_err, std::abs(rho(0.5, t) - std::exp(-t)));
    }
    const bool rho_ok = rho_err <= 1e-8;
    all_ok = all_ok && rho_ok;
    log << "extension-check: rho(1/2, t) vs exp(-t) max error=" << rho_err << (rho_ok ? " ok" : " FAIL") << "\n";

    nlohmann::json j{{"params",
                      {{"omega", op.grid()->to_json()}, {"modes", cfg.modes}, {"flux_tol", cfg.flux_tol},
                       {"source", cfg.source.kind}, {"seed", cfg.seed}}},
                     {"per_sigma", per_sigma},
                     {"rho_half_max_error", rho_err},
                     {"verdict", verdict(all_ok)}};
    const auto dir = out_dir(cfg);
    io::write_file(dir / "extension.json", io::dump(j));
    io::write_file(dir / "flux.csv", flux_csv.str());
    io::write_file(dir / "dtn.csv", dtn_csv.str());
    return all_ok ? holds : violated;
}

/// Rearranges a field read from CSV (one value per line, or value,measure).
inline int run_rearrange(const ExperimentConfig& cfg, std::ostream& log) {
    if (cfg.input.empty()) throw ConfigError("input", "path to a CSV field is required");
    std::ifstream in(cfg.input);
    if (!in) throw ConfigError("input", "cannot open '" + cfg.input + "'");
    io::CsvField field;
    try {
        field = io::read_field_csv(in);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("input", e.what());
    }
    if (field.values.empty()) throw ConfigError("input", "no values found");
    const double total = cfg.domain.kind == "interval" ? cfg.domain.lx : cfg.domain.lx * cfg.domain.ly;
    if (field.measures.empty()) field.measures.assign(field.values.size(), total / static_cast<double>(field.values.size()));
    double measure = 0.0;
    for (double m : field.measures) measure += m;

    const auto profile = decreasing_rearrangement(field.values, field.measures);
    const auto curve = concentration(profile);
    const int dim = cfg.domain.kind == "interval" ? 1 : 2;
    const auto ball = build_radial_ball(cfg.domain.shells > 0 ? cfg.domain.shells : field.values.size(), dim, measure);
    const auto sharp = schwarz_rearrangement(profile, ball, std::numeric_limits<double>::infinity());

    std::ostringstream schwarz;
    io::full_precision(schwarz) << "shell,r_inner,r_outer,value\n";
    for (std::size_t i = 0; i < sharp.size(); ++i)
        schwarz << i << ',' << ball->radii()[i] << ',' << ball->radii()[i + 1] << ',' << sharp.values[i] << '\n';

    nlohmann::json j{{"cells", field.values.size()},
                     {"total_measure", measure},
                     {"median", median(field.values, field.measures)},
                     {"L1", lp_norm(profile, 1.0)},
                     {"L2", lp_norm(profile, 2.0)},
                     {"Linf", lp_norm(profile, std::numeric_limits<double>::infinity())},
                     {"ball", ball->to_json()}};
    const auto dir = out_dir(cfg);
    io::write_file(dir / "rearrange.json", io::dump(j));
    io::write_file(dir / "rearranged.csv", io::profile_csv(profile));
    io::write_file(dir / "concentration.csv", io::curve_csv(curve));
    io::write_file(dir / "schwarz.csv", schwarz.str());
    log << "rearrange: " << field.values.size() << " cells, median=" << j["median"].get<double>()
        << " L2=" << j["L2"].get<double>() << "\n";
    return holds;
}

// ---------------------------------------------------------------------------
// selftest

struct SuiteResult {
    std::string name;
    bool pass{false};
    std::string detail;
};

inline std::vector<SuiteResult> selftest_suites(const ExperimentConfig& cfg) {
    std::vector<SuiteResult> out;
    auto run = [&](const std::string& name, const std::function<std::string(bool&)>& body) {
        SuiteResult r{name, true, {}};
        try {
            r.detail = body(r.pass);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = e.what();
        }
        out.push_back(std::move(r));
    };

    run("grid", [&](bool& ok) {
        const auto b = build_radial_ball(40, 2, 0.5);
        double sum = 0.0;
        for (double m : b->measures()) sum += m;
        ok = std::abs(sum - 0.5) <= 1e-12 && std::abs(b->radius() - std::sqrt(0.5 / std::numbers::pi)) <= 1e-12;
        return "radial measures sum to |B|";
    });
    run("rearrange", [&](bool& ok) {
        Rng rng(cfg.seed);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const auto f = random_cell_field(build_rectangle(8, 8, 1.0, 1.0), rng);
            const auto p = decreasing_rearrangement(f);
            for (double q : {1.0, 2.0, std::numeric_limits<double>::infinity()})
                worst = std::max(worst, std::abs(lp_norm(p, q) - lp_norm(f, q)) / lp_norm(f, q));
        }
        ok = worst <= 1e-12;
        return "norm preservation, worst relative error " + std::to_string(worst);
    });
    run("spectral", [&](bool& ok) {
        const auto op = make_spectral(build_rectangle(6, 5, 1.0, 1.0));
        double worst = 0.0;
        for (std::size_t j = 0; j < op.size(); ++j)
            for (std::size_t k = 0; k < op.size(); ++k)
                worst = std::max(worst, std::abs(inner(op.eigenvector(j), op.eigenvector(k)) - (j == k ? 1.0 : 0.0)));
        ok = worst <= 1e-10 && op.eigenvalue(0) == 0.0;
        return "orthonormality defect " + std::to_string(worst);
    });
    run("extension", [&](bool& ok) {
        double worst = 0.0;
        for (double t = 0.0; t <= 5.0; t += 0.05) worst = std::max(worst, std::abs(rho(0.5, t) - std::exp(-t)));
        ok = worst <= 1e-8 && std::abs(kappa(0.5) - 1.0) <= 1e-14;
        return "rho(1/2, t) = exp(-t), max error " + std::to_string(worst);
    });
    run("compare", [&](bool& ok) {
        auto omega = build_rectangle(12, 12, 1.0, 1.0);
        const auto om = make_spectral(omega);
        const auto bl = make_spectral(half_measure_ball(*omega, 12), gamma_constant(2, default_isoperimetric_constant(*omega)));
        const auto f = project_zero_mean(random_cosine_field(omega, cfg.seed));
        const auto r = elliptic_compare(om, bl, 0.5, 0.0, f);
        ok = r.report.holds;
        return "elliptic comparison worst_gap " + std::to_string(r.report.worst_gap);
    });
    run("parabolic", [&](bool& ok) {
        auto omega = build_interval(32, 1.0);
        const auto om = make_spectral(omega);
        const auto bl = make_spectral(half_measure_ball(*omega, 16), gamma_constant(1, 1.0));
        const auto u0 = random_cosine_field(omega, cfg.seed);
        const auto r = parabolic_compare(om, bl, 0.5, u0, {}, 1.0, 4);
        double worst_res = 0.0;
        for (double x : r.omega.residuals) worst_res = std::max(worst_res, x);
        ok = r.holds && worst_res <= 1e-8;
        return "per-step comparison worst_gap " + std::to_string(r.worst_gap);
    });
    run("determinism", [&](bool& ok) {
        auto omega = build_interval(24, 1.0);
        const auto om = make_spectral(omega);
        const auto bl = make_spectral(half_measure_ball(*omega, 12), 0.25);
        auto report = [&] {
            const auto f = project_zero_mean(random_cosine_field(omega, cfg.seed));
            return io::dump(elliptic_compare(om, bl, 0.4, 0.0, f).report.to_json());
        };
        ok = report() == report();
        return "identical reports from identical seeds";
    });
    return out;
}

inline int run_selftest(const ExperimentConfig& cfg, std::ostream& log) {
    const auto results = selftest_suites(cfg);
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        log << std::left << std::setw(12) << r.name << (r.pass ? "PASS  " : "FAIL  ") << r.detail << "\n";
    }
    return all ? holds : violated;
}

// ---------------------------------------------------------------------------

/// Runs a subcommand body and maps exceptions onto the exit-code contract.
inline int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const IncompatibleData& e) {
        err << "config error: " << e.what() << " (set project = true or c > 0)\n";
        return config_error;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return numerical_failure;
    }
}

}  // namespace fracsym::cli
