#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "lploc/config.hpp"
#include "lploc/localization.hpp"
#include "lploc/report.hpp"
#include "lploc/version.hpp"

namespace fs = std::filesystem;
using namespace lploc;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration (JSON)")->required();
    cmd->add_option("--set", args.overrides,
                    "override a config entry, dotted path (e.g. --set epsilon=0.05)");
    cmd->add_option("--output-dir", args.output_dir, "override the output directory");
}

Json load_config_json(const CommonArgs& args) {
    Json j;
    try {
        j = Json::parse(read_text_file(args.config_path));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: cannot read ") + args.config_path + ": " + e.what());
    }
    for (const std::string& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: --set expects key=value, got '" + kv + "'");
        const std::string path = kv.substr(0, eq);
        const std::string raw = kv.substr(eq + 1);
        Json value;
        try {
            value = Json::parse(raw);
        } catch (const Json::exception&) {
            value = raw;  // bare strings are fine
        }
        Json* node = &j;
        std::size_t start = 0;
        while (true) {
            const auto dot = path.find('.', start);
            const std::string key = path.substr(start, dot - start);
            if (key.empty()) throw ConfigError("config: empty key in --set path '" + path + "'");
            if (dot == std::string::npos) {
                (*node)[key] = value;
                break;
            }
            node = &(*node)[key];
            start = dot + 1;
        }
    }
    if (!args.output_dir.empty()) j["output_dir"] = args.output_dir;
    return j;
}

fs::path prepare_output_dir(const RunConfig& cfg) {
    fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("config: cannot create output directory " + cfg.output_dir);
    return dir;
}

Json report_envelope(const std::string& command, const RunConfig& cfg) {
    Json j;
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = to_json(cfg);
    return j;
}

bool wants_format(const RunConfig& cfg, const std::string& fmt) {
    for (const auto& f : cfg.formats)
        if (f == fmt) return true;
    return false;
}

std::vector<double> potential_on_box(const HullPoint& w, const Box& box, std::size_t depth) {
    std::vector<double> pot(box.site_count());
    for (std::size_t i = 0; i < pot.size(); ++i)
        pot[i] = to_double(sample_truncated(w, box.site_at(i), depth));
    return pot;
}

int cmd_potential(const RunConfig& cfg) {
    const auto h = make_hierarchy(cfg);
    const Box box = make_box(cfg);
    const std::size_t depth = effective_depth(cfg, *h);
    if (depth >= h->depth())
        throw ConfigError("config: certified output needs truncation_depth < hierarchy depth");
    const HullPoint w = make_hull_points(cfg, h, h->depth()).front();
    const Rational tail = tail_bound(*h, depth);
    const fs::path dir = prepare_output_dir(cfg);

    CsvWriter csv;
    for (std::size_t i = 0; i < box.dim(); ++i) csv.field("c" + std::to_string(i + 1));
    csv.field(std::string("center")).field(std::string("center_decimal"));
    csv.field(std::string("radius")).field(std::string("radius_decimal"));
    csv.end_row();
    for (std::size_t i = 0; i < box.site_count(); ++i) {
        const LatticePoint site = box.site_at(i);
        const Rational center = sample_truncated(w, site, depth);
        for (std::size_t c = 0; c < box.dim(); ++c) csv.field(site[c]);
        csv.field(fraction_string(center)).field(to_double(center));
        csv.field(fraction_string(tail)).field(to_double(tail));
        csv.end_row();
    }
    if (wants_format(cfg, "csv")) write_text_file((dir / "potential.csv").string(), csv.str());

    Json rep = report_envelope("potential", cfg);
    rep["results"] = Json{{"sites", box.site_count()},
                          {"depth", depth},
                          {"tail", to_json(tail)},
                          {"files", Json::array({"potential.csv"})}};
    write_text_file((dir / "potential_report.json").string(), canonical_dump(rep));
    return kExitPass;
}

int cmd_distality(const RunConfig& cfg) {
    const auto h = make_hierarchy(cfg);
    std::size_t level;
    if (cfg.distality.level) {
        level = *cfg.distality.level;
    } else {
        // shallowest level whose period exceeds twice the shift bound
        std::size_t k = 0;
        for (std::size_t v = 1; v < h->depth() && k == 0; ++v) {
            bool ok = true;
            for (std::size_t i = 0; i < h->dim(); ++i)
                if (h->scale(v, i) <= 2 * BigInt(cfg.distality.shift_bound)) ok = false;
            if (ok) k = v;
        }
        if (k == 0)
            throw ConfigError("config: no hierarchy level can resolve this shift bound; "
                              "deepen the hierarchy or lower distality.shift_bound");
        level = k;
    }
    DistalityCertificate cert;
    try {
        cert = certify_distality(*h, level, cfg.distality.shift_bound);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    const fs::path dir = prepare_output_dir(cfg);
    Json rep = report_envelope("distality", cfg);
    rep["results"] = to_json(cert);
    write_text_file((dir / "distality_report.json").string(), canonical_dump(rep));
    std::cout << (cert.all_pass ? "distality: PASS (" : "distality: FAIL (")
              << cert.shifts.size() << " shifts)\n";
    return cert.all_pass ? kExitPass : kExitFail;
}

int cmd_spectrum(const RunConfig& cfg) {
    if (!cfg.epsilon) throw ConfigError("config: spectrum needs epsilon");
    const auto h = make_hierarchy(cfg);
    const Box box = make_box(cfg);
    const std::size_t depth = effective_depth(cfg, *h);
    const HullPoint w = make_hull_points(cfg, h, h->depth()).front();
    const std::vector<double> pot = potential_on_box(w, box, depth);
    const FiniteOperator op = assemble(pot, box, *cfg.epsilon, cfg.boundary);
    const EigenSystem sys = eig_sym(op);
    const MatchReport match = match_eigenvalues(sys, pot, *cfg.epsilon);

    const fs::path dir = prepare_output_dir(cfg);
    if (wants_format(cfg, "csv")) {
        CsvWriter csv;
        csv.field(std::string("index")).field(std::string("eigenvalue"));
        csv.end_row();
        for (std::size_t j = 0; j < sys.eigenvalues.size(); ++j) {
            csv.field(static_cast<std::int64_t>(j)).field(sys.eigenvalues[j]);
            csv.end_row();
        }
        write_text_file((dir / "eigenvalues.csv").string(), csv.str());
    }
    if (cfg.write_eigenvectors)
        write_eigenvectors_binary((dir / "eigenvectors.bin").string(), sys);
    if (cfg.write_operator)
        write_text_file((dir / "operator_coo.txt").string(), coordinate_list(band_view(op)));

    Json rep = report_envelope("spectrum", cfg);
    rep["results"] = Json{{"sites", box.site_count()},
                          {"depth", depth},
                          {"match", to_json(match)}};
    if (depth < h->depth()) rep["results"]["truncation_tail"] = to_double(tail_bound(*h, depth));
    write_text_file((dir / "spectrum_report.json").string(), canonical_dump(rep));
    std::cout << "spectrum: max |lambda_j - V_j| = " << format_double(match.max_deviation)
              << " (bound " << format_double(match.bound) << ")\n";
    return match.pass ? kExitPass : kExitFail;
}

int cmd_ule(const RunConfig& cfg) {
    if (!cfg.epsilon) throw ConfigError("config: ule needs epsilon");
    const auto h = make_hierarchy(cfg);
    const Box box = make_box(cfg);
    const std::size_t depth = effective_depth(cfg, *h);
    const HullPoint w = make_hull_points(cfg, h, h->depth()).front();
    const EigenSystem sys =
        eig_sym(assemble(potential_on_box(w, box, depth), box, *cfg.epsilon, cfg.boundary));
    const UleReport ule = uniform_fit(sys, effective_margin(cfg, box), cfg.floor);
    const std::size_t violations = count_ule_violations(sys, ule);

    const fs::path dir = prepare_output_dir(cfg);
    if (wants_format(cfg, "csv")) {
        CsvWriter csv;
        csv.field(std::string("index"));
        for (std::size_t c = 0; c < box.dim(); ++c) csv.field("center_c" + std::to_string(c + 1));
        csv.field(std::string("rate")).field(std::string("prefactor"));
        csv.field(std::string("boundary")).field(std::string("capped")).field(std::string("gap"));
        csv.end_row();
        for (const auto& v : ule.per_vector) {
            csv.field(static_cast<std::int64_t>(v.index));
            for (std::size_t c = 0; c < box.dim(); ++c) csv.field(v.center[c]);
            csv.field(v.rate).field(v.prefactor);
            csv.field(std::string(v.boundary ? "1" : "0"));
            csv.field(std::string(v.capped ? "1" : "0"));
            csv.field(v.gap);
            csv.end_row();
        }
        write_text_file((dir / "ule_vectors.csv").string(), csv.str());
    }
    Json rep = report_envelope("ule", cfg);
    rep["results"] = to_json(ule);
    rep["results"]["bound_violations"] = violations;
    if (depth < h->depth()) rep["results"]["truncation_tail"] = to_double(tail_bound(*h, depth));
    write_text_file((dir / "ule_report.json").string(), canonical_dump(rep));
    std::cout << "ule: rate " << format_double(ule.uniform_rate) << ", prefactor "
              << format_double(ule.uniform_prefactor) << ", violations " << violations << "\n";
    return (violations == 0 && ule.localized) ? kExitPass : kExitFail;
}

int cmd_dynamics(const RunConfig& cfg) {
    if (!cfg.epsilon) throw ConfigError("config: dynamics needs epsilon");
    const auto h = make_hierarchy(cfg);
    const Box box = make_box(cfg);
    const std::size_t depth = effective_depth(cfg, *h);
    const HullPoint w = make_hull_points(cfg, h, h->depth()).front();
    const EigenSystem sys =
        eig_sym(assemble(potential_on_box(w, box, depth), box, *cfg.epsilon, cfg.boundary));

    const Coord margin =
        cfg.dynamics.margin >= 0 ? cfg.dynamics.margin : effective_margin(cfg, box);
    std::vector<std::size_t> interior;
    for (std::size_t i = 0; i < box.site_count(); ++i) {
        const LatticePoint site = box.site_at(i);
        Coord dist = std::numeric_limits<Coord>::max();
        for (std::size_t c = 0; c < box.dim(); ++c)
            dist = std::min({dist, site[c] - box.lo()[c], box.hi()[c] - site[c]});
        if (dist > margin) interior.push_back(i);
    }
    if (interior.size() < 2) throw ConfigError("config: dynamics margin leaves no interior sites");
    std::mt19937_64 rng(cfg.dynamics.seed);
    std::vector<std::pair<LatticePoint, LatticePoint>> pairs;
    for (std::size_t p = 0; p < cfg.dynamics.pairs; ++p)
        pairs.emplace_back(box.site_at(interior[rng() % interior.size()]),
                           box.site_at(interior[rng() % interior.size()]));
    const DynamicalReport dyn = dynamical_decay(sys, pairs, cfg.dynamics.times, rng());

    const fs::path dir = prepare_output_dir(cfg);
    if (wants_format(cfg, "csv")) {
        std::vector<std::pair<double, double>> points;
        for (const auto& row : dyn.pairs)
            if (row.kernel > 0.0) points.emplace_back(row.distance, std::log(row.kernel));
        write_text_file((dir / "dynamics_kernel.dat").string(), plot_data(points));
    }
    Json rep = report_envelope("dynamics", cfg);
    rep["results"] = to_json(dyn);
    if (depth < h->depth()) rep["results"]["truncation_tail"] = to_double(tail_bound(*h, depth));
    write_text_file((dir / "dynamics_report.json").string(), canonical_dump(rep));
    std::cout << "dynamics: rate " << format_double(dyn.rate) << ", violations "
              << dyn.amplitude_violations << "/" << dyn.time_checks << "\n";
    return dyn.amplitude_violations == 0 ? kExitPass : kExitFail;
}

int cmd_hull(const RunConfig& cfg) {
    if (!cfg.epsilon) throw ConfigError("config: hull needs epsilon");
    const auto h = make_hierarchy(cfg);
    const Box box = make_box(cfg);
    const std::size_t depth = effective_depth(cfg, *h);
    const std::vector<HullPoint> pts = make_hull_points(cfg, h, h->depth());
    const SurveyReport survey =
        hull_ule_survey(pts, box, *cfg.epsilon, depth, effective_margin(cfg, box), cfg.floor);

    const fs::path dir = prepare_output_dir(cfg);
    Json rep = report_envelope("hull", cfg);
    rep["results"] = to_json(survey);
    write_text_file((dir / "hull_report.json").string(), canonical_dump(rep));
    std::cout << "hull: " << pts.size() << " points, pooled rate "
              << format_double(survey.pooled_rate) << ", spread "
              << format_double(survey.rate_spread) << "\n";
    return survey.pooled_violations == 0 ? kExitPass : kExitFail;
}

int cmd_sweep(const RunConfig& cfg) {
    if (cfg.epsilon_list.size() < 2)
        throw ConfigError("config: sweep needs epsilon_list with at least two entries");
    const auto h = make_hierarchy(cfg);
    const Box box = make_box(cfg);
    const std::size_t depth = effective_depth(cfg, *h);
    const HullPoint w = make_hull_points(cfg, h, h->depth()).front();
    RateSweepReport sweep;
    try {
        sweep = rate_vs_epsilon(potential_on_box(w, box, depth), box, cfg.epsilon_list,
                                effective_margin(cfg, box), cfg.floor);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    const fs::path dir = prepare_output_dir(cfg);
    if (wants_format(cfg, "csv")) {
        std::vector<std::pair<double, double>> points;
        for (const auto& row : sweep.rows)
            points.emplace_back(std::log(1.0 / row.epsilon), row.rate);
        write_text_file((dir / "rate_vs_epsilon.dat").string(), plot_data(points));
    }
    Json rep = report_envelope("sweep", cfg);
    rep["results"] = to_json(sweep);
    write_text_file((dir / "sweep_report.json").string(), canonical_dump(rep));
    std::cout << "sweep: slope " << format_double(sweep.slope) << " over "
              << sweep.rows.size() << " couplings\n";
    return kExitPass;
}

int cmd_report(const std::string& input, const std::string& output) {
    Json parsed;
    try {
        parsed = Json::parse(read_text_file(input));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: cannot parse ") + input + ": " + e.what());
    }
    const std::string dumped = canonical_dump(parsed);
    if (canonical_dump(Json::parse(dumped)) != dumped) {
        std::cerr << "report: round-trip mismatch\n";
        return kExitFail;
    }
    if (!output.empty())
        write_text_file(output, dumped);
    else
        std::cout << dumped;
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-volume localization pipelines for limit-periodic potentials"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonArgs args;
    std::string report_input, report_output;

    CLI::App* potential = app.add_subcommand("potential", "certified potential values on a box");
    CLI::App* distality = app.add_subcommand("distality", "exact separation certificate");
    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues and potential matching");
    CLI::App* ule = app.add_subcommand("ule", "uniform localization constants");
    CLI::App* dynamics = app.add_subcommand("dynamics", "time-uniform kernel decay");
    CLI::App* hull = app.add_subcommand("hull", "localization survey over hull points");
    CLI::App* sweep = app.add_subcommand("sweep", "decay rate against the coupling");
    for (CLI::App* cmd : {potential, distality, spectrum, ule, dynamics, hull, sweep})
        add_common(cmd, args);

    CLI::App* report = app.add_subcommand("report", "canonicalize and round-trip a report");
    report->add_option("--input", report_input, "report file (JSON)")->required();
    report->add_option("--output", report_output, "where to write the canonical form");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }

    try {
        if (report->parsed()) return cmd_report(report_input, report_output);
        const RunConfig cfg = parse_config(load_config_json(args));
        if (potential->parsed()) return cmd_potential(cfg);
        if (distality->parsed()) return cmd_distality(cfg);
        if (spectrum->parsed()) return cmd_spectrum(cfg);
        if (ule->parsed()) return cmd_ule(cfg);
        if (dynamics->parsed()) return cmd_dynamics(cfg);
        if (hull->parsed()) return cmd_hull(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
}
