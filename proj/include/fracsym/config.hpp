#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracsym/parabolic.hpp"

namespace fracsym {

/// Invalid configuration; field() names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct DomainSpec {
    std::string kind{"square"};  // interval | square | rectangle
    std::size_t nx{32};
    std::size_t ny{32};
    double lx{1.0};
    double ly{1.0};
    std::size_t shells{0};  // 0: derived from the resolution
};

/// Named field presets: zero, constant, eigenmode, two-bump, random.
struct FieldSpec {
    std::string kind{"zero"};
    std::size_t k{1};
    double value{1.0};
};

struct ExperimentConfig {
    DomainSpec domain;
    double sigma{0.5};
    double c{0.0};
    std::optional<double> q;
    std::optional<double> gamma;
    FieldSpec source{"eigenmode", 1, 1.0};
    bool project{true};
    std::uint64_t seed{1};
    std::vector<double> y_samples{0.0, 0.1, 1.0};

    double T{1.0};
    std::size_t steps{16};
    FieldSpec u0{"eigenmode", 1, 1.0};
    FieldSpec f{"zero", 1, 1.0};
    std::string f_time{"constant"};  // constant | sin | cos | exp

    double c_tol{10.0};
    std::optional<double> tol;
    std::string out{"out"};
    GammaExponent gamma_exponent{GammaExponent::sigma};
    bool split_mode{false};
    SourceSampling sampling{SourceSampling::midpoint};

    std::vector<double> sigmas{0.25, 0.5, 0.75};
    std::size_t modes{5};
    double flux_tol{0.01};
    std::string input;
};

using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError(key, "expected a number, got '" + text + "'");
    return v;
}

inline long long parse_integer(const std::string& key, const std::string& text) {
    long long v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError(key, "expected an integer, got '" + text + "'");
    return v;
}

inline std::size_t parse_count(const std::string& key, const std::string& text, long long min) {
    const long long v = parse_integer(key, text);
    if (v < min) throw ConfigError(key, "must be >= " + std::to_string(min) + ", got " + text);
    return static_cast<std::size_t>(v);
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError(key, "expected a comma separated list of numbers");
    return out;
}

inline void check_field_kind(const std::string& key, const std::string& kind) {
    static const char* kinds[] = {"zero", "constant", "eigenmode", "two-bump", "random"};
    for (const char* k : kinds)
        if (kind == k) return;
    throw ConfigError(key, "unknown preset '" + kind + "' (zero, constant, eigenmode, two-bump, random)");
}

}  // namespace detail

/// Reads "key = value" lines; '#' starts a comment. Later keys override earlier ones.
inline ConfigMap read_config_map(std::istream& in) {
    ConfigMap map;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected key = value, got '" + line + "'");
        map[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }
    return map;
}

inline ConfigMap read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    return read_config_map(in);
}

/// Applies "--key=value" (or "key=value") overrides. Dashes in keys become underscores.
inline void apply_overrides(ConfigMap& map, const std::vector<std::string>& args) {
    for (std::string a : args) {
        if (a.rfind("--", 0) == 0) a.erase(0, 2);
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw ConfigError(a, "override must look like --key=value");
        std::string key = a.substr(0, eq);
        for (char& ch : key)
            if (ch == '-') ch = '_';
        map[key] = a.substr(eq + 1);
    }
}

inline ExperimentConfig parse_config(const ConfigMap& map) {
    using namespace detail;
    ExperimentConfig cfg;
    bool ny_set = false;
    for (const auto& [key, value] : map) {
        if (key == "domain") {
            if (value != "interval" && value != "square" && value != "rectangle")
                throw ConfigError(key, "expected interval, square or rectangle, got '" + value + "'");
            cfg.domain.kind = value;
        } else if (key == "n") {
            cfg.domain.nx = parse_count(key, value, 2);
        } else if (key == "ny") {
            cfg.domain.ny = parse_count(key, value, 2);
            ny_set = true;
        } else if (key == "lx") {
            cfg.domain.lx = parse_double(key, value);
        } else if (key == "ly") {
            cfg.domain.ly = parse_double(key, value);
        } else if (key == "shells") {
            cfg.domain.shells = parse_count(key, value, 2);
        } else if (key == "sigma") {
            cfg.sigma = parse_double(key, value);
        } else if (key == "c") {
            cfg.c = parse_double(key, value);
        } else if (key == "Q" || key == "q") {
            cfg.q = parse_double(key, value);
        } else if (key == "gamma") {
            cfg.gamma = parse_double(key, value);
        } else if (key == "source") {
            check_field_kind(key, value);
            cfg.source.kind = value;
        } else if (key == "source_k") {
            cfg.source.k = parse_count(key, value, 0);
        } else if (key == "source_value") {
            cfg.source.value = parse_double(key, value);
        } else if (key == "project") {
            cfg.project = parse_bool(key, value);
        } else if (key == "seed") {
            const long long s = parse_integer(key, value);
            if (s < 0) throw ConfigError(key, "must be >= 0");
            cfg.seed = static_cast<std::uint64_t>(s);
        } else if (key == "y_samples") {
            cfg.y_samples = parse_list(key, value);
        } else if (key == "T") {
            cfg.T = parse_double(key, value);
        } else if (key == "steps") {
            cfg.steps = parse_count(key, value, 1);
        } else if (key == "u0") {
            check_field_kind(key, value);
            cfg.u0.kind = value;
        } else if (key == "u0_k") {
            cfg.u0.k = parse_count(key, value, 0);
        } else if (key == "u0_value") {
            cfg.u0.value = parse_double(key, value);
        } else if (key == "f") {
            check_field_kind(key, value);
            cfg.f.kind = value;
        } else if (key == "f_k") {
            cfg.f.k = parse_count(key, value, 0);
        } else if (key == "f_value") {
            cfg.f.value = parse_double(key, value);
        } else if (key == "f_time") {
            if (value != "constant" && value != "sin" && value != "cos" && value != "exp")
                throw ConfigError(key, "expected constant, sin, cos or exp, got '" + value + "'");
            cfg.f_time = value;
        } else if (key == "c_tol") {
            cfg.c_tol = parse_double(key, value);
        } else if (key == "tol") {
            cfg.tol = parse_double(key, value);
        } else if (key == "out") {
            cfg.out = value;
        } else if (key == "gamma_exponent") {
            if (value == "sigma") cfg.gamma_exponent = GammaExponent::sigma;
            else if (value == "half") cfg.gamma_exponent = GammaExponent::half;
            else throw ConfigError(key, "expected sigma or half, got '" + value + "'");
        } else if (key == "split_mode") {
            cfg.split_mode = parse_bool(key, value);
        } else if (key == "sampling") {
            if (value == "midpoint") cfg.sampling = SourceSampling::midpoint;
            else if (value == "average") cfg.sampling = SourceSampling::average;
            else throw ConfigError(key, "expected midpoint or average, got '" + value + "'");
        } else if (key == "sigmas") {
            cfg.sigmas = parse_list(key, value);
        } else if (key == "modes") {
            cfg.modes = parse_count(key, value, 1);
        } else if (key == "flux_tol") {
            cfg.flux_tol = parse_double(key, value);
        } else if (key == "input") {
            cfg.input = value;
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    if (!ny_set) cfg.domain.ny = cfg.domain.nx;
    if (cfg.domain.kind == "square") {
        cfg.domain.ny = cfg.domain.nx;
        cfg.domain.ly = cfg.domain.lx;
    }

    auto in_open_unit = [](double s) { return s > 0.0 && s < 1.0; };
    if (!in_open_unit(cfg.sigma)) throw ConfigError("sigma", "must lie in (0, 1), got " + std::to_string(cfg.sigma));
    for (double s : cfg.sigmas)
        if (!in_open_unit(s)) throw ConfigError("sigmas", "entries must lie in (0, 1), got " + std::to_string(s));
    if (!(cfg.c >= 0.0)) throw ConfigError("c", "must be >= 0");
    if (cfg.q && !(*cfg.q > 0.0)) throw ConfigError("Q", "must be > 0");
    if (cfg.gamma && !(*cfg.gamma > 0.0)) throw ConfigError("gamma", "must be > 0");
    if (!(cfg.domain.lx > 0.0)) throw ConfigError("lx", "must be > 0");
    if (!(cfg.domain.ly > 0.0)) throw ConfigError("ly", "must be > 0");
    if (!(cfg.T > 0.0)) throw ConfigError("T", "must be > 0");
    if (!(cfg.c_tol > 0.0)) throw ConfigError("c_tol", "must be > 0");
    if (cfg.tol && !(*cfg.tol >= 0.0)) throw ConfigError("tol", "must be >= 0");
    if (!(cfg.flux_tol > 0.0)) throw ConfigError("flux_tol", "must be > 0");
    for (double y : cfg.y_samples)
        if (!(y >= 0.0)) throw ConfigError("y_samples", "heights must be >= 0");
    if (cfg.out.empty()) throw ConfigError("out", "must not be empty");
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
    ConfigMap map = path.empty() ? ConfigMap{} : read_config_file(path);
    apply_overrides(map, overrides);
    return parse_config(map);
}

}  // namespace fracsym
