#pragma once

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lploc/hull.hpp"
#include "lploc/operator.hpp"
#include "lploc/report.hpp"

namespace lploc {

/// Raised for anything wrong with the run configuration; the command line
/// maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HierarchySpec {
    std::string kind = "tower";  // "tower" | "explicit"
    unsigned base = 2;
    std::size_t depth = 5;
    int growth_exponent = 1;
    std::string comparability = "1";
    std::vector<std::vector<std::string>> levels;  // explicit only
};

struct HullPointSpec {
    std::string kind = "identity";  // "identity" | "translate" | "random"
    std::vector<Coord> translate;
    std::uint64_t seed = 1;
    std::size_t count = 1;
};

struct DistalitySpec {
    std::optional<std::size_t> level;  // default: shallowest admissible
    std::int64_t shift_bound = 8;
};

struct PhaseSpec {
    std::optional<std::size_t> level;
    std::vector<std::vector<Coord>> translates;  // empty: every translate in the cell
};

struct DynamicsSpec {
    std::size_t pairs = 200;
    std::size_t times = 100;
    std::uint64_t seed = 1;
    Coord margin = -1;  // interior margin for pair sampling; -1: boundary_margin
};

struct RunConfig {
    std::size_t dimension = 1;
    HierarchySpec hierarchy;
    std::optional<double> epsilon;
    std::vector<double> epsilon_list;
    std::optional<std::vector<Coord>> box_lo;
    std::optional<std::vector<Coord>> box_hi;
    Boundary boundary = Boundary::dirichlet;
    std::optional<std::size_t> truncation_depth;
    HullPointSpec hull_points;
    double floor = kDefaultFloor;
    std::optional<Coord> boundary_margin;
    std::string output_dir = "out";
    std::vector<std::string> formats = {"json", "csv"};
    bool write_eigenvectors = false;
    bool write_operator = false;
    DistalitySpec distality;
    PhaseSpec phase;
    DynamicsSpec dynamics;
};

namespace detail {

template <typename T>
T get_or(const Json& j, const std::string& key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw ConfigError("config: bad value for '" + key + "'");
    }
}

inline std::vector<Coord> coord_list(const Json& j, const std::string& key) {
    try {
        return j.get<std::vector<Coord>>();
    } catch (const Json::exception&) {
        throw ConfigError("config: '" + key + "' must be an array of integers");
    }
}

}  // namespace detail

inline RunConfig parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    RunConfig cfg;
    cfg.dimension = detail::get_or<std::size_t>(j, "dimension", 1);
    if (cfg.dimension < 1) throw ConfigError("config: dimension must be >= 1");

    if (j.contains("hierarchy")) {
        const Json& h = j.at("hierarchy");
        cfg.hierarchy.kind = detail::get_or<std::string>(h, "kind", "tower");
        if (cfg.hierarchy.kind == "tower") {
            cfg.hierarchy.base = detail::get_or<unsigned>(h, "base", 2);
            cfg.hierarchy.depth = detail::get_or<std::size_t>(h, "depth", 5);
        } else if (cfg.hierarchy.kind == "explicit") {
            cfg.hierarchy.growth_exponent = detail::get_or<int>(h, "m", 1);
            cfg.hierarchy.comparability = detail::get_or<std::string>(h, "C", "1");
            if (!h.contains("levels")) throw ConfigError("config: explicit hierarchy needs levels");
            for (const Json& lv : h.at("levels")) {
                std::vector<std::string> level;
                for (const Json& x : lv)
                    level.push_back(x.is_string() ? x.get<std::string>()
                                                  : std::to_string(x.get<std::int64_t>()));
                cfg.hierarchy.levels.push_back(std::move(level));
            }
            cfg.hierarchy.depth = cfg.hierarchy.levels.size();
        } else {
            throw ConfigError("config: hierarchy.kind must be 'tower' or 'explicit'");
        }
    }

    if (j.contains("epsilon")) cfg.epsilon = detail::get_or<double>(j, "epsilon", 0.0);
    if (cfg.epsilon && *cfg.epsilon < 0) throw ConfigError("config: epsilon must be >= 0");
    cfg.epsilon_list = detail::get_or<std::vector<double>>(j, "epsilon_list", {});

    if (j.contains("box")) {
        const Json& b = j.at("box");
        if (!b.contains("lo") || !b.contains("hi"))
            throw ConfigError("config: box needs lo and hi");
        cfg.box_lo = detail::coord_list(b.at("lo"), "box.lo");
        cfg.box_hi = detail::coord_list(b.at("hi"), "box.hi");
    }

    const std::string bc = detail::get_or<std::string>(j, "boundary", "dirichlet");
    if (bc == "dirichlet") cfg.boundary = Boundary::dirichlet;
    else if (bc == "periodic") cfg.boundary = Boundary::periodic;
    else throw ConfigError("config: boundary must be 'dirichlet' or 'periodic'");

    if (j.contains("truncation_depth"))
        cfg.truncation_depth = detail::get_or<std::size_t>(j, "truncation_depth", 0);

    if (j.contains("hull_points")) {
        const Json& hp = j.at("hull_points");
        cfg.hull_points.kind = detail::get_or<std::string>(hp, "kind", "identity");
        if (cfg.hull_points.kind == "translate") {
            if (!hp.contains("t")) throw ConfigError("config: hull_points.translate needs t");
            cfg.hull_points.translate = detail::coord_list(hp.at("t"), "hull_points.t");
        } else if (cfg.hull_points.kind == "random") {
            cfg.hull_points.seed = detail::get_or<std::uint64_t>(hp, "seed", 1);
            cfg.hull_points.count = detail::get_or<std::size_t>(hp, "count", 1);
        } else if (cfg.hull_points.kind != "identity") {
            throw ConfigError("config: hull_points.kind must be identity, translate or random");
        }
    }

    cfg.floor = detail::get_or<double>(j, "floor", kDefaultFloor);
    if (!(cfg.floor > 0)) throw ConfigError("config: floor must be positive");
    if (j.contains("boundary_margin"))
        cfg.boundary_margin = detail::get_or<Coord>(j, "boundary_margin", 0);
    cfg.output_dir = detail::get_or<std::string>(j, "output_dir", "out");
    cfg.formats = detail::get_or<std::vector<std::string>>(j, "formats", {"json", "csv"});
    cfg.write_eigenvectors = detail::get_or<bool>(j, "write_eigenvectors", false);
    cfg.write_operator = detail::get_or<bool>(j, "write_operator", false);

    if (j.contains("distality")) {
        const Json& d = j.at("distality");
        if (d.contains("level"))
            cfg.distality.level = detail::get_or<std::size_t>(d, "level", 0);
        cfg.distality.shift_bound = detail::get_or<std::int64_t>(d, "shift_bound", 8);
    }
    if (j.contains("phase")) {
        const Json& p = j.at("phase");
        if (p.contains("level")) cfg.phase.level = detail::get_or<std::size_t>(p, "level", 0);
        if (p.contains("translates"))
            for (const Json& t : p.at("translates"))
                cfg.phase.translates.push_back(detail::coord_list(t, "phase.translates"));
    }
    if (j.contains("dynamics")) {
        const Json& dy = j.at("dynamics");
        cfg.dynamics.pairs = detail::get_or<std::size_t>(dy, "pairs", 200);
        cfg.dynamics.times = detail::get_or<std::size_t>(dy, "times", 100);
        cfg.dynamics.seed = detail::get_or<std::uint64_t>(dy, "seed", 1);
        cfg.dynamics.margin = detail::get_or<Coord>(dy, "margin", -1);
    }
    return cfg;
}

// Effective configuration back to JSON; embedded into every report.
inline Json to_json(const RunConfig& cfg) {
    Json h;
    h["kind"] = cfg.hierarchy.kind;
    if (cfg.hierarchy.kind == "tower") {
        h["base"] = cfg.hierarchy.base;
        h["depth"] = cfg.hierarchy.depth;
    } else {
        h["m"] = cfg.hierarchy.growth_exponent;
        h["C"] = cfg.hierarchy.comparability;
        h["levels"] = cfg.hierarchy.levels;
    }
    Json j;
    j["dimension"] = cfg.dimension;
    j["hierarchy"] = std::move(h);
    if (cfg.epsilon) j["epsilon"] = *cfg.epsilon;
    if (!cfg.epsilon_list.empty()) j["epsilon_list"] = cfg.epsilon_list;
    if (cfg.box_lo && cfg.box_hi) j["box"] = Json{{"lo", *cfg.box_lo}, {"hi", *cfg.box_hi}};
    j["boundary"] = to_string(cfg.boundary);
    if (cfg.truncation_depth) j["truncation_depth"] = *cfg.truncation_depth;
    Json hp;
    hp["kind"] = cfg.hull_points.kind;
    if (cfg.hull_points.kind == "translate") hp["t"] = cfg.hull_points.translate;
    if (cfg.hull_points.kind == "random") {
        hp["seed"] = cfg.hull_points.seed;
        hp["count"] = cfg.hull_points.count;
    }
    j["hull_points"] = std::move(hp);
    j["floor"] = cfg.floor;
    if (cfg.boundary_margin) j["boundary_margin"] = *cfg.boundary_margin;
    j["output_dir"] = cfg.output_dir;
    j["formats"] = cfg.formats;
    j["write_eigenvectors"] = cfg.write_eigenvectors;
    j["write_operator"] = cfg.write_operator;
    Json d;
    if (cfg.distality.level) d["level"] = *cfg.distality.level;
    d["shift_bound"] = cfg.distality.shift_bound;
    j["distality"] = std::move(d);
    if (cfg.phase.level || !cfg.phase.translates.empty()) {
        Json p;
        if (cfg.phase.level) p["level"] = *cfg.phase.level;
        if (!cfg.phase.translates.empty()) p["translates"] = cfg.phase.translates;
        j["phase"] = std::move(p);
    }
    j["dynamics"] = Json{{"pairs", cfg.dynamics.pairs},
                         {"times", cfg.dynamics.times},
                         {"seed", cfg.dynamics.seed},
                         {"margin", cfg.dynamics.margin}};
    return j;
}

inline std::shared_ptr<const ScaleHierarchy> make_hierarchy(const RunConfig& cfg) {
    try {
        if (cfg.hierarchy.kind == "tower")
            return std::make_shared<const ScaleHierarchy>(
                tower_hierarchy(cfg.dimension, cfg.hierarchy.base, cfg.hierarchy.depth));
        std::vector<std::vector<BigInt>> levels;
        for (const auto& lv : cfg.hierarchy.levels) {
            std::vector<BigInt> level;
            for (const auto& s : lv) level.emplace_back(s);
            levels.push_back(std::move(level));
        }
        return std::make_shared<const ScaleHierarchy>(cfg.dimension,
                                                      cfg.hierarchy.growth_exponent,
                                                      BigInt(cfg.hierarchy.comparability),
                                                      std::move(levels));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: invalid hierarchy: ") + e.what());
    }
}

inline Box make_box(const RunConfig& cfg) {
    if (!cfg.box_lo || !cfg.box_hi) throw ConfigError("config: this command needs a box");
    if (cfg.box_lo->size() != cfg.dimension || cfg.box_hi->size() != cfg.dimension)
        throw ConfigError("config: box corners must match the dimension");
    try {
        return Box(LatticePoint(*cfg.box_lo), LatticePoint(*cfg.box_hi));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid box: ") + e.what());
    }
}

inline std::size_t effective_depth(const RunConfig& cfg, const ScaleHierarchy& h) {
    const std::size_t depth = cfg.truncation_depth ? *cfg.truncation_depth
                                                   : (h.depth() > 1 ? h.depth() - 1 : 1);
    if (depth < 1 || depth > h.depth())
        throw ConfigError("config: truncation_depth out of range");
    return depth;
}

inline Coord effective_margin(const RunConfig& cfg, const Box& box) {
    if (cfg.boundary_margin) return *cfg.boundary_margin;
    Coord side = box.side(0);
    for (std::size_t i = 1; i < box.dim(); ++i) side = std::min(side, box.side(i));
    return side / 16;
}

inline std::vector<HullPoint> make_hull_points(const RunConfig& cfg,
                                               std::shared_ptr<const ScaleHierarchy> h,
                                               std::size_t depth) {
    const HullPointSpec& spec = cfg.hull_points;
    std::vector<HullPoint> pts;
    if (spec.kind == "identity") {
        pts.push_back(hull_identity(h, depth));
    } else if (spec.kind == "translate") {
        if (spec.translate.size() != cfg.dimension)
            throw ConfigError("config: hull point translate must match the dimension");
        pts.push_back(hull_translate(hull_identity(h, depth), LatticePoint(spec.translate)));
    } else {
        for (std::size_t i = 0; i < spec.count; ++i)
            pts.push_back(random_hull_point(spec.seed + i, h, depth));
    }
    return pts;
}

}  // namespace lploc
