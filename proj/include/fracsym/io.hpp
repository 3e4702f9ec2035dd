#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracsym/compare.hpp"
#include "fracsym/extension.hpp"
#include "fracsym/parabolic.hpp"
#include "fracsym/rearrange.hpp"
#include "fracsym/spectral.hpp"

namespace fracsym::io {

inline std::ostream& full_precision(std::ostream& os) { return os << std::setprecision(17); }

inline std::string profile_csv(const RearrangedProfile& p) {
    std::ostringstream os;
    full_precision(os) << "s,value\n";
    for (std::size_t i = 0; i < p.values.size(); ++i) os << p.breaks[i] << ',' << p.values[i] << '\n';
    return os.str();
}

inline std::string curve_csv(const ConcentrationCurve& c) {
    std::ostringstream os;
    full_precision(os) << "s,value\n";
    for (std::size_t i = 0; i < c.breaks.size(); ++i) os << c.breaks[i] << ',' << c.cumulative[i] << '\n';
    return os.str();
}

inline std::string spectrum_csv(const SpectralOperator& op) {
    std::ostringstream os;
    full_precision(os) << "k,lambda\n";
    for (std::size_t k = 0; k < op.size(); ++k) os << k << ',' << op.eigenvalue(k) << '\n';
    return os.str();
}

inline std::string extension_csv(const ExtensionField& ext) {
    std::ostringstream os;
    full_precision(os) << "y,cell,value\n";
    for (std::size_t j = 0; j < ext.y_samples.size(); ++j)
        for (std::size_t i = 0; i < ext.values[j].size(); ++i)
            os << ext.y_samples[j] << ',' << i << ',' << ext.values[j].values[i] << '\n';
    return os.str();
}

inline std::string trajectory_csv(const Trajectory& tr) {
    std::ostringstream os;
    full_precision(os) << "k,t,cell,value\n";
    for (std::size_t k = 0; k < tr.states.size(); ++k)
        for (std::size_t i = 0; i < tr.states[k].size(); ++i)
            os << k << ',' << tr.times[k] << ',' << i << ',' << tr.states[k].values[i] << '\n';
    return os.str();
}

/// One row per (y, s) sample: y,s,U,V,chi.
inline std::string comparison_csv(const ComparisonReport& r) {
    std::ostringstream os;
    full_precision(os) << "y,s,U,V,chi\n";
    for (const auto& yc : r.per_y)
        for (std::size_t i = 0; i < yc.gap.s.size(); ++i)
            os << yc.y << ',' << yc.gap.s[i] << ',' << yc.gap.f[i] << ',' << yc.gap.g[i] << ',' << yc.gap.gap[i]
               << '\n';
    return os.str();
}

inline std::string parabolic_csv(const ParabolicComparison& pc) {
    std::ostringstream os;
    full_precision(os) << "k,t,y,s,U,V,chi\n";
    for (const auto& st : pc.steps)
        for (const auto& yc : st.report.per_y)
            for (std::size_t i = 0; i < yc.gap.s.size(); ++i)
                os << st.k << ',' << st.t << ',' << yc.y << ',' << yc.gap.s[i] << ',' << yc.gap.f[i] << ','
                   << yc.gap.g[i] << ',' << yc.gap.gap[i] << '\n';
    return os.str();
}

/// Canonical serialization: sorted keys, two-space indent, shortest round-trip doubles.
inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

struct CsvField {
    std::vector<double> values;
    std::vector<double> measures;  // empty when the file has no measure column
};

/**
 * Reads a field from CSV: one value per line, or "value,measure" pairs.
 * A first line that does not parse as numbers is treated as a header.
 */
inline CsvField read_field_csv(std::istream& in) {
    CsvField f;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> cols;
        std::stringstream ss(line);
        std::string cell;
        bool ok = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                cols.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            if (first) {
                first = false;
                continue;
            }
            throw std::invalid_argument("read_field_csv: cannot parse line '" + line + "'");
        }
        first = false;
        if (cols.empty() || cols.size() > 2) throw std::invalid_argument("read_field_csv: expected 1 or 2 columns");
        f.values.push_back(cols[0]);
        if (cols.size() == 2) f.measures.push_back(cols[1]);
    }
    if (!f.measures.empty() && f.measures.size() != f.values.size())
        throw std::invalid_argument("read_field_csv: measure column must be present on every row");
    for (double m : f.measures)
        if (!(m > 0.0)) throw std::invalid_argument("read_field_csv: measures must be positive");
    return f;
}

}  // namespace fracsym::io
