#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lploc/localization.hpp"
#include "lploc/potential.hpp"
#include "lploc/spectral.hpp"
#include "lploc/version.hpp"

namespace lploc {

using Json = nlohmann::ordered_json;

// All floating point output goes through one format so files are
// reproducible byte for byte.
inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline Json to_json(const Rational& x) {
    return Json{{"fraction", fraction_string(x)}, {"decimal", to_double(x)}};
}

inline Json to_json(const LatticePoint& p) {
    Json a = Json::array();
    for (std::size_t i = 0; i < p.dim(); ++i) a.push_back(p[i]);
    return a;
}

inline Json to_json(const Box& b) {
    return Json{{"lo", to_json(b.lo())}, {"hi", to_json(b.hi())}};
}

inline Json to_json(const CertifiedValue& v) {
    return Json{{"center", to_json(v.center)}, {"radius", to_json(v.radius)}};
}

inline Json to_json(const DistalityCertificate& cert) {
    Json shifts = Json::array();
    for (const auto& s : cert.shifts)
        shifts.push_back(Json{{"shift", to_json(s.shift)},
                              {"certified_min", to_json(s.certified_min)},
                              {"required", to_json(s.required)},
                              {"margin", to_json(s.margin)},
                              {"argmin_site", to_json(s.argmin_site)},
                              {"pass", s.pass}});
    return Json{{"dimension", cert.dim},
                {"level", cert.level},
                {"shift_bound", cert.shift_bound},
                {"tail", to_json(cert.tail)},
                {"all_pass", cert.all_pass},
                {"shifts", std::move(shifts)}};
}

inline Json to_json(const MatchReport& rep) {
    return Json{{"max_deviation", rep.max_deviation},
                {"bound", rep.bound},
                {"solver_slack", rep.solver_slack},
                {"worst_index", rep.worst_index},
                {"pass", rep.pass}};
}

inline Json to_json(const UleReport& rep) {
    Json vectors = Json::array();
    for (const auto& v : rep.per_vector)
        vectors.push_back(Json{{"index", v.index},
                               {"center", to_json(v.center)},
                               {"rate", v.rate},
                               {"prefactor", v.prefactor},
                               {"boundary", v.boundary},
                               {"capped", v.capped},
                               {"gap", v.gap}});
    return Json{{"uniform_rate", rep.uniform_rate},
                {"uniform_prefactor", rep.uniform_prefactor},
                {"boundary_margin", rep.boundary_margin},
                {"floor", rep.floor},
                {"localized", rep.localized},
                {"per_vector", std::move(vectors)}};
}

inline Json to_json(const RateSweepReport& rep) {
    Json rows = Json::array();
    for (const auto& r : rep.rows)
        rows.push_back(Json{{"epsilon", r.epsilon}, {"rate", r.rate}, {"prefactor", r.prefactor}});
    return Json{{"rows", std::move(rows)}, {"slope", rep.slope}};
}

inline Json to_json(const DynamicalReport& rep) {
    Json pairs = Json::array();
    for (const auto& p : rep.pairs)
        pairs.push_back(Json{{"from", to_json(p.from)},
                             {"to", to_json(p.to)},
                             {"distance", p.distance},
                             {"kernel", p.kernel}});
    return Json{{"rate", rep.rate},
                {"prefactor", rep.prefactor},
                {"time_checks", rep.time_checks},
                {"amplitude_violations", rep.amplitude_violations},
                {"pairs", std::move(pairs)}};
}

inline Json to_json(const HullPoint& w) {
    Json levels = Json::array();
    Json residues = Json::array();
    for (std::size_t v = 1; v <= w.depth(); ++v) {
        Json lv = Json::array(), rv = Json::array();
        for (std::size_t i = 0; i < w.dim(); ++i) {
            lv.push_back(w.hierarchy().scale(v, i).str());
            rv.push_back(w.residue_at(v, i).str());
        }
        levels.push_back(std::move(lv));
        residues.push_back(std::move(rv));
    }
    return Json{{"levels", std::move(levels)}, {"residues", std::move(residues)}};
}

inline Json to_json(const PhaseStabilityReport& rep) {
    Json translates = Json::array();
    for (const auto& t : rep.translates) translates.push_back(to_json(t));
    Json table = Json::array();
    for (const auto& row : rep.ule_table)
        table.push_back(Json{{"epsilon", row.epsilon}, {"rate", row.rate},
                             {"prefactor", row.prefactor}});
    return Json{{"translates", std::move(translates)},
                {"spectra_deviation", rep.spectra_deviation},
                {"kernel_deviation", rep.kernel_deviation},
                {"rate_spread", rep.rate_spread},
                {"ule_table", std::move(table)}};
}

inline Json to_json(const SurveyReport& rep) {
    Json entries = Json::array();
    for (const auto& e : rep.entries)
        entries.push_back(Json{{"point", to_json(e.point)},
                               {"rate", e.rate},
                               {"prefactor", e.prefactor}});
    Json j{{"rate_spread", rep.rate_spread},
           {"pooled_rate", rep.pooled_rate},
           {"pooled_prefactor", rep.pooled_prefactor},
           {"pooled_violations", rep.pooled_violations},
           {"entries", std::move(entries)}};
    if (rep.truncation_tail) j["truncation_tail"] = *rep.truncation_tail;
    return j;
}

// One canonical serialization, used everywhere a report is written or
// round-tripped.
inline std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// CSV with RFC-style quoting: fields holding commas, quotes or newlines
/// get quoted, embedded quotes double.
class CsvWriter {
public:
    CsvWriter& field(const std::string& s) {
        if (!first_) row_ += ',';
        first_ = false;
        if (s.find_first_of(",\"\n") != std::string::npos) {
            row_ += '"';
            for (const char c : s) {
                if (c == '"') row_ += '"';
                row_ += c;
            }
            row_ += '"';
        } else {
            row_ += s;
        }
        return *this;
    }

    CsvWriter& field(double x) { return field(format_double(x)); }
    CsvWriter& field(std::int64_t x) { return field(std::to_string(x)); }

    void end_row() {
        out_ += row_;
        out_ += '\n';
        row_.clear();
        first_ = true;
    }

    const std::string& str() const { return out_; }

private:
    std::string out_;
    std::string row_;
    bool first_ = true;
};

// Minimal strict parser for the writer above; enough to prove files
// round-trip byte for byte.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
        } else {
            field += c;
        }
    }
    if (!field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string serialize_csv(const std::vector<std::vector<std::string>>& rows) {
    CsvWriter w;
    for (const auto& row : rows) {
        for (const auto& f : row) w.field(f);
        w.end_row();
    }
    return w.str();
}

// Two-column plot data.
inline std::string plot_data(const std::vector<std::pair<double, double>>& points) {
    std::string out;
    for (const auto& [x, y] : points) {
        out += format_double(x);
        out += ' ';
        out += format_double(y);
        out += '\n';
    }
    return out;
}

// Coordinate-list text export of a band matrix view for external checks.
inline std::string coordinate_list(const BandMatrix& m) {
    std::string out;
    const Box& box = m.box();
    for (std::size_t i = 0; i < box.site_count(); ++i)
        for (std::size_t j = 0; j < box.site_count(); ++j) {
            const double v = m.at(box.site_at(i), box.site_at(j));
            if (v == 0.0) continue;
            out += std::to_string(i);
            out += ' ';
            out += std::to_string(j);
            out += ' ';
            out += format_double(v);
            out += '\n';
        }
    return out;
}

// Eigenvector block: text header, then site-major 64-bit floats (each row
// holds one site's coefficient across all vectors).
inline void write_eigenvectors_binary(const std::string& path, const EigenSystem& sys) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    std::string header = "lploc eigenvectors v1\n";
    header += "dimension " + std::to_string(sys.box.dim()) + "\n";
    header += "box_lo";
    for (std::size_t i = 0; i < sys.box.dim(); ++i)
        header += " " + std::to_string(sys.box.lo()[i]);
    header += "\nbox_hi";
    for (std::size_t i = 0; i < sys.box.dim(); ++i)
        header += " " + std::to_string(sys.box.hi()[i]);
    header += "\nsites " + std::to_string(sys.box.site_count());
    header += "\nvectors " + std::to_string(sys.eigenvalues.size());
    header += "\nlayout site-major; sites lexicographic; vectors by ascending eigenvalue; "
              "sign fixed by first nonzero component positive\nend\n";
    out << header;
    for (std::size_t i = 0; i < sys.box.site_count(); ++i)
        for (std::size_t j = 0; j < sys.eigenvalues.size(); ++j) {
            const double v = sys.vectors(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lploc
