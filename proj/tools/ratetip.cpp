// ratetip: config-driven frontend for the tipping toolkit.
//
// Subcommands: equilibria, bifdiag, basin, simulate, tipdiag, partition, nf.
// Every run writes its artifacts plus a manifest JSON carrying the config
// hash, solver tolerances and wall time; grid sweeps checkpoint into their
// output CSV and can resume with --resume. Exit codes: 0 success, 2 config
// error, 3 numerical failure (more than 1% unclassifiable cells).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <tuple>
#include <variant>

#include <CLI11.hpp>

#include "ratetip/ratetip.hpp"

namespace fs = std::filesystem;
using namespace ratetip;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr double kMaxUnclassifiableFraction = 0.01;

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = ".";
    int jobs = 1;
    bool resume = false;
    std::string format = "csv";
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

Config load_config(const GlobalArgs& g) {
    if (g.config_path.empty()) throw ConfigError("missing --config");
    return Config::parse(read_file(g.config_path));
}

fs::path out_path(const GlobalArgs& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / name;
}

void write_artifact(const GlobalArgs& g, const std::string& stem, const std::string& csv,
                    const nlohmann::json& json_mirror) {
    atomic_write_file(out_path(g, stem + ".csv"), csv);
    if (g.format == "json")
        atomic_write_file(out_path(g, stem + ".json"), json_mirror.dump(2) + "\n");
}

nlohmann::json csv_as_json(const std::string& csv) {
    // Structured mirror: comment lines verbatim, data rows split on commas.
    nlohmann::json rows = nlohmann::json::array();
    nlohmann::json comments = nlohmann::json::array();
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            comments.push_back(line);
            continue;
        }
        nlohmann::json row = nlohmann::json::array();
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(row);
    }
    return {{"comments", comments}, {"rows", rows}};
}

// -- equilibria --------------------------------------------------------------

int cmd_equilibria(const GlobalArgs& g) {
    Timer timer;
    const Config cfg = load_config(g);
    const ModelParams p = load_ecosystem_params(cfg);
    cfg.reject_unconsumed();

    std::string csv = "kind,P,H,re1,im1,re2,im2,stability\n";
    for (const auto& e : equilibria(p)) {
        csv += std::string(equilibrium_name(e.kind)) + "," + format_double(e.state[0]) + "," +
               format_double(e.state[1]) + "," + format_double(e.eigs.l1.real()) + "," +
               format_double(e.eigs.l1.imag()) + "," + format_double(e.eigs.l2.real()) + "," +
               format_double(e.eigs.l2.imag()) + "," + stability_name(e.stability) + "\n";
    }
    write_artifact(g, "equilibria", csv, csv_as_json(csv));
    write_manifest(out_path(g, "equilibria.manifest.json"),
                   {"equilibria", fnv1a_hex(cfg.raw()), {}}, {}, timer.seconds());
    return kExitOk;
}

// -- bifdiag -----------------------------------------------------------------

int cmd_bifdiag(const GlobalArgs& g) {
    Timer timer;
    const Config cfg = load_config(g);
    const ModelParams p = load_ecosystem_params(cfg);
    GridAxis raxis{0.1, 2.5, 121, false};
    raxis = load_axis(cfg, "bifdiag", "r", raxis);
    cfg.reject_unconsumed();

    std::string curves = "label,r,m,criticality\n";
    const auto T = transcritical_curve(p, raxis.lo, raxis.hi, static_cast<int>(raxis.n));
    for (const auto& pt : T.points)
        curves += "T," + format_double(pt.r) + "," + format_double(pt.m) + "," +
                  (pt.crit == Criticality::supercritical ? "supercritical" : "subcritical") +
                  std::string("\n");

    std::string points = "label,r,m,bt_type\n";
    if (p.nonlinearity() > 0.0) {
        const auto sn = saddle_node_halfline(p);
        for (std::size_t i = 0; i < raxis.n; ++i) {
            const double r = raxis.at(i);
            if (r < sn.r_min) continue;
            curves += "S_e," + format_double(r) + "," + format_double(sn.m_sn) +
                      ",supercritical\n";
        }
        const auto He = hopf_curve(p, std::max(raxis.lo, sn.r_min + 1e-6), raxis.hi,
                                   static_cast<int>(raxis.n));
        for (const auto& pt : He.points)
            curves += "H_e," + format_double(pt.r) + "," + format_double(pt.m) + "," +
                      (pt.crit == Criticality::supercritical ? "supercritical" : "subcritical") +
                      std::string("\n");

        const auto st = st_point(p);
        points += "ST," + format_double(st.r) + "," + format_double(st.m) + ",\n";
        try {
            const auto bt = bt_point(p, raxis.hi);
            points += "BT," + format_double(bt.r) + "," + format_double(bt.m) + "," +
                      (bt.bt_type ? std::to_string(*bt.bt_type) : std::string()) + "\n";
        } catch (const std::runtime_error&) {
            // no BT inside the scanned range; points file simply omits it
        }
    }
    write_artifact(g, "bifdiag_curves", curves, csv_as_json(curves));
    write_artifact(g, "bifdiag_points", points, csv_as_json(points));
    write_manifest(out_path(g, "bifdiag.manifest.json"), {"bifdiag", fnv1a_hex(cfg.raw()), {}},
                   {}, timer.seconds());
    return kExitOk;
}

// -- basin -------------------------------------------------------------------

int cmd_basin(const GlobalArgs& g) {
    Timer timer;
    const Config cfg = load_config(g);
    const ModelParams p1 = load_ecosystem_params(cfg);
    GridAxis raxis{0.5, 1.5, 21, false}, maxis{0.05, 0.13, 17, false};
    raxis = load_axis(cfg, "basin", "r", raxis);
    maxis = load_axis(cfg, "basin", "m", maxis);
    const IntegratorConfig solver = load_solver(cfg, grid_integrator_config());
    cfg.reject_unconsumed();

    const auto map = bi_region(p1, raxis, maxis, {}, solver);
    const std::string csv = basin_map_csv(map);
    write_artifact(g, "basin", csv, csv_as_json(csv));
    ManifestInfo info{"basin", fnv1a_hex(cfg.raw()),
                      {{"mask", "e3 and e2 both attracting (bistable-region proxy; near the "
                                "homoclinic boundary this can differ from cycle-based masks "
                                "within a thin strip)"}}};
    write_manifest(out_path(g, "basin.manifest.json"), info, solver, timer.seconds());
    return kExitOk;
}

// -- models ------------------------------------------------------------------

using AnyModel = std::variant<EcosystemShiftModel, HopfNfShiftModel, SnNfShiftModel>;

struct NfArgs {
    std::string model; // "", "hopf" or "sn"
    double s = 0.0;
    bool s_set = false;
};

AnyModel load_nf_model(const Config& cfg, const NfArgs& nf) {
    const std::string cfg_type = cfg.get_string_or("model", "type", "");
    const std::string type = nf.model.empty() ? cfg_type : nf.model;
    if (type.empty()) throw ConfigError("nf: set model.type or pass --model");
    const double cfg_s = cfg.get_double_or("model", "s", 0.0);
    const double s = nf.s_set ? nf.s : cfg_s;
    if (type == "hopf") {
        HopfNfShiftModel m;
        m.omega = cfg.get_double_or("model", "omega", 1.0);
        m.alpha = cfg.get_double_or("model", "alpha", 1.0);
        m.s = s;
        return m;
    }
    if (type == "sn") {
        SnNfShiftModel m;
        m.s = s;
        return m;
    }
    throw ConfigError("model.type must be 'hopf' or 'sn' (got '" + type + "')");
}

// -- simulate ----------------------------------------------------------------

template <class Model>
int run_simulate(const GlobalArgs& g, const Config& cfg, const Model& model,
                 const ShiftConfig& sc, const IntegratorConfig& solver) {
    Timer timer;
    SimulateOptions opts;
    opts.delta_rel = sc.delta_rel;
    opts.keep_trajectory = true;
    const auto out = simulate_shift(model, sc.spec, solver, opts);

    std::string csv = "# model=" + model.name() + " shape=" + shift_shape_name(sc.spec.shape) +
                      " class=" + tip_class_name(out.classification) + "\n";
    csv += Model::dim == 1 ? "t,mu,x\n" : "t,mu,x1,x2\n";
    const auto& traj = *out.trajectory;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        csv += format_double(traj.times[i]) + "," +
               format_double(evaluate(sc.spec, traj.times[i]));
        for (std::size_t d = 0; d < Model::dim; ++d)
            csv += "," + format_double(traj.states[i][d]);
        csv += "\n";
    }
    write_artifact(g, "trajectory", csv, csv_as_json(csv));

    ManifestInfo info{"simulate", fnv1a_hex(cfg.raw()),
                      {{"classification", tip_class_name(out.classification)},
                       {"final_distance_base", out.final_distance_base},
                       {"final_distance_alt", out.final_distance_alt}}};
    write_manifest(out_path(g, "simulate.manifest.json"), info, solver, timer.seconds());
    if (out.classification == TipClass::unclassifiable) {
        std::fprintf(stderr, "simulate: unclassifiable run: %s\n", out.diagnostic.c_str());
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_simulate(const GlobalArgs& g) {
    const Config cfg = load_config(g);
    const ModelParams p1 = load_ecosystem_params(cfg);
    const ShiftConfig sc = load_shift(cfg, p1.r, p1.m);
    const IntegratorConfig solver = load_solver(cfg, bisection_integrator_config());
    cfg.reject_unconsumed();
    EcosystemShiftModel model{p1, sc.spec.target};
    return run_simulate(g, cfg, model, sc, solver);
}

// -- tipdiag / partition -----------------------------------------------------

struct SweepNames {
    std::string diagram;
    std::string transitions;
    std::string manifest;
};

template <class Model>
TippingDiagram sweep_diagram(const GlobalArgs& g, const Config& cfg, const Model& model,
                             ShiftSpec shift, double delta_rel, const DiagramGrid& grid,
                             const IntegratorConfig& solver, const SweepNames& names) {
    TippingDiagram d;
    d.deltas = grid.delta.values();
    d.epsilons = grid.eps.values();
    d.cells.assign(d.cell_count(), TipClass::unclassifiable);
    d.model_name = model.name();
    d.shape = shift.shape;
    d.target = shift.target;
    d.base = shift.base;
    std::tie(d.p1_r, d.p1_m) = model.base_point(shift);
    d.delta_rel = delta_rel;
    SimulateOptions opts;
    opts.delta_rel = delta_rel;
    d.horizon = opts.classify.horizon;
    d.shift_c = shift.c;
    d.shift_tau = shift.tau;

    const std::string header = diagram_csv_header(d);
    const fs::path diagram_path = out_path(g, names.diagram);
    const fs::path manifest_path = out_path(g, names.manifest);
    const std::string config_hash = fnv1a_hex(cfg.raw());

    std::size_t resume_rows = 0;
    std::string existing;
    if (g.resume && fs::exists(diagram_path)) {
        if (!fs::exists(manifest_path))
            throw ConfigError("--resume: missing manifest " + manifest_path.string());
        const auto manifest = read_manifest(manifest_path);
        if (manifest.at("config_hash").get<std::string>() != config_hash)
            throw ConfigError("--resume: config hash mismatch against " + manifest_path.string());
        const auto st = load_checkpoint(diagram_path, header);
        resume_rows = std::min(st.rows, d.cell_count());
        existing = st.content;
        std::fprintf(stderr, "resuming %s at cell %zu/%zu\n", names.diagram.c_str(), resume_rows,
                     d.cell_count());
    }

    Timer timer;
    const std::string command = fs::path(names.diagram).stem().string();
    ManifestInfo info{command, config_hash,
                      {{"deltas", d.deltas.size()},
                       {"epsilons", d.epsilons.size()},
                       {"shape", shift_shape_name(shift.shape)},
                       {"horizon", d.horizon},
                       {"delta_rel", delta_rel}}};
    write_manifest(manifest_path, info, solver, 0.0, false);

    // Cells land in the vector as they finish; rows flush in prefix order.
    SweepOptions sw;
    sw.jobs = g.jobs;
    checkpointed_sweep(
        diagram_path, header, d.cell_count(), resume_rows, existing,
        [&](std::size_t flat) {
            const std::size_t id = flat / d.epsilons.size();
            const std::size_t ie = flat % d.epsilons.size();
            d.cells[flat] =
                diagram_cell(model, shift, d.deltas[id], d.epsilons[ie], solver, opts);
            return diagram_cell_row(d, flat);
        },
        sw);

    // Cells skipped by resume are re-read from the checkpoint text.
    if (resume_rows > 0) {
        std::istringstream in(existing);
        std::string line;
        std::getline(in, line); // comment
        std::getline(in, line); // column header
        for (std::size_t k = 0; k < resume_rows && std::getline(in, line); ++k) {
            const auto last = line.rfind(',');
            const std::string label = line.substr(last + 1);
            d.cells[k] = label == "track"  ? TipClass::tracking
                         : label == "tip" ? TipClass::tipped
                                          : TipClass::unclassifiable;
        }
    }

    extract_transitions(d, model, shift, false, solver, opts);
    atomic_write_file(out_path(g, names.transitions), transitions_csv(d));
    if (g.format == "json") {
        atomic_write_file(out_path(g, fs::path(names.diagram).stem().string() + ".json"),
                          csv_as_json(diagram_csv(d)).dump(2) + "\n");
    }
    info.extra["unclassifiable"] = d.unclassifiable_count();
    write_manifest(manifest_path, info, solver, timer.seconds(), true);
    return d;
}

DiagramGrid load_grid(const Config& cfg) {
    DiagramGrid grid;
    grid.delta = {0.05, 1.0, 60, false};
    grid.eps = {1e-3, 10.0, 161, true};
    grid.delta = load_axis(cfg, "grid", "delta", grid.delta);
    grid.eps = load_axis(cfg, "grid", "eps", grid.eps);
    return grid;
}

template <class Model>
int run_tipdiag(const GlobalArgs& g, const Config& cfg, const Model& model,
                const ShiftConfig& sc, const IntegratorConfig& solver) {
    const DiagramGrid grid = load_grid(cfg);
    cfg.reject_unconsumed();
    const auto d = sweep_diagram(g, cfg, model, sc.spec, sc.delta_rel, grid, solver,
                                 {"tipdiag.csv", "tipdiag_transitions.csv",
                                  "tipdiag.manifest.json"});
    const double frac =
        static_cast<double>(d.unclassifiable_count()) / static_cast<double>(d.cell_count());
    if (frac > kMaxUnclassifiableFraction) {
        std::fprintf(stderr, "tipdiag: %.2f%% unclassifiable cells\n", 100.0 * frac);
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_tipdiag(const GlobalArgs& g) {
    const Config cfg = load_config(g);
    const ModelParams p1 = load_ecosystem_params(cfg);
    const ShiftConfig sc = load_shift(cfg, p1.r, p1.m, false);
    const IntegratorConfig solver = load_solver(cfg, grid_integrator_config());
    EcosystemShiftModel model{p1, sc.spec.target};
    return run_tipdiag(g, cfg, model, sc, solver);
}

template <class Model>
int run_partition(const GlobalArgs& g, const Config& cfg, const Model& model,
                  const ShiftConfig& sc, const IntegratorConfig& solver) {
    if (sc.spec.shape != ShiftShape::sech_pulse && sc.spec.shape != ShiftShape::sech_plateau)
        throw ConfigError("partition: shift.shape must be sech_pulse or sech_plateau "
                          "(the monotone counterpart is derived)");
    const DiagramGrid grid = load_grid(cfg);
    cfg.reject_unconsumed();

    ShiftSpec mono = sc.spec;
    mono.shape = ShiftShape::sech_mono;
    const auto dmono = sweep_diagram(g, cfg, model, mono, sc.delta_rel, grid, solver,
                                     {"partition_mono.csv", "partition_mono_transitions.csv",
                                      "partition_mono.manifest.json"});
    const auto dnon = sweep_diagram(g, cfg, model, sc.spec, sc.delta_rel, grid, solver,
                                    {"partition_nonmono.csv",
                                     "partition_nonmono_transitions.csv",
                                     "partition_nonmono.manifest.json"});
    const auto part = return_partition(dmono, dnon);
    const std::string csv = partition_csv(part);
    write_artifact(g, "partition", csv, csv_as_json(csv));

    Timer timer;
    ManifestInfo info{"partition", fnv1a_hex(cfg.raw()),
                      {{"track", part.count(ReturnRegion::track)},
                       {"return", part.count(ReturnRegion::ret)},
                       {"no_return", part.count(ReturnRegion::no_return)},
                       {"return_tipping", part.count(ReturnRegion::return_tipping)},
                       {"undecided", part.count(ReturnRegion::undecided)}}};
    write_manifest(out_path(g, "partition.manifest.json"), info, solver, timer.seconds());

    const double frac = static_cast<double>(part.count(ReturnRegion::undecided)) /
                        static_cast<double>(part.cells.size());
    if (frac > kMaxUnclassifiableFraction) {
        std::fprintf(stderr, "partition: %.2f%% undecided cells\n", 100.0 * frac);
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_partition(const GlobalArgs& g) {
    const Config cfg = load_config(g);
    const ModelParams p1 = load_ecosystem_params(cfg);
    const ShiftConfig sc = load_shift(cfg, p1.r, p1.m, false);
    const IntegratorConfig solver = load_solver(cfg, grid_integrator_config());
    EcosystemShiftModel model{p1, sc.spec.target};
    return run_partition(g, cfg, model, sc, solver);
}

// -- nf ----------------------------------------------------------------------

int cmd_nf(const GlobalArgs& g, const NfArgs& nf, const std::string& analysis) {
    const Config cfg = load_config(g);
    AnyModel model = load_nf_model(cfg, nf);
    if (!cfg.has("shift", "base"))
        throw ConfigError("nf: shift.base (mu_-) is required");
    ShiftConfig sc = load_shift(cfg, 0.0, 0.0, analysis == "simulate", "mu");

    return std::visit(
        [&](const auto& m) -> int {
            const IntegratorConfig solver = load_solver(
                cfg, analysis == "simulate" ? bisection_integrator_config()
                                            : grid_integrator_config());
            if (analysis == "simulate") {
                cfg.reject_unconsumed();
                return run_simulate(g, cfg, m, sc, solver);
            }
            if (analysis == "tipdiag") return run_tipdiag(g, cfg, m, sc, solver);
            if (analysis == "partition") return run_partition(g, cfg, m, sc, solver);
            throw ConfigError("nf: unknown analysis '" + analysis + "'");
        },
        model);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tipping analysis toolkit: bifurcation structure, basin instability, "
                 "critical rates and tipping diagrams"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand name

    GlobalArgs g;
    app.add_option("--config", g.config_path, "experiment config (INI)")->required(false);
    app.add_option("--out", g.out_dir, "output directory (default .)");
    app.add_option("--jobs", g.jobs, "worker threads for grid sweeps")->check(CLI::PositiveNumber);
    app.add_flag("--resume", g.resume, "resume an interrupted sweep from its checkpoint");
    app.add_option("--format", g.format, "csv (default) or json (adds a json mirror)")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* eq = app.add_subcommand("equilibria", "equilibria with eigenvalues and stability");
    auto* bif = app.add_subcommand("bifdiag", "bifurcation curves T, S_e, H_e and ST/BT points");
    auto* bas = app.add_subcommand("basin", "basin-instability region over an (r, m) grid");
    auto* sim = app.add_subcommand("simulate", "one non-autonomous run under a shift");
    auto* tip = app.add_subcommand("tipdiag", "(delta, eps) tipping diagram with transitions");
    auto* par = app.add_subcommand("partition", "return/no-return partition of mono vs non-mono");
    auto* nfc = app.add_subcommand("nf", "normal-form analyses (tilted hopf / saddle-node)");

    NfArgs nf;
    std::string nf_analysis = "tipdiag";
    nfc->add_option("--model", nf.model, "hopf or sn (overrides model.type)");
    auto* sopt = nfc->add_option("--s", nf.s, "tilt parameter (overrides model.s)");
    nfc->add_option("--analysis", nf_analysis, "simulate | tipdiag | partition")
        ->check(CLI::IsMember({"simulate", "tipdiag", "partition"}));

    CLI11_PARSE(app, argc, argv);
    nf.s_set = sopt->count() > 0;

    try {
        if (eq->parsed()) return cmd_equilibria(g);
        if (bif->parsed()) return cmd_bifdiag(g);
        if (bas->parsed()) return cmd_basin(g);
        if (sim->parsed()) return cmd_simulate(g);
        if (tip->parsed()) return cmd_tipdiag(g);
        if (par->parsed()) return cmd_partition(g);
        if (nfc->parsed()) return cmd_nf(g, nf, nf_analysis);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitOk;
}
