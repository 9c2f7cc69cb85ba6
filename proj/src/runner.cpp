#include "morseid/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "morseid/svg.hpp"

namespace morseid {

using json = nlohmann::ordered_json;

namespace {

json box_to_json(const Box& box) {
    json j;
    j["lower"] = std::vector<double>(box.lower.data(), box.lower.data() + box.lower.size());
    j["upper"] = std::vector<double>(box.upper.data(), box.upper.data() + box.upper.size());
    return j;
}

Box box_from_json(const json& j) {
    const auto lo = j.at("lower").get<std::vector<double>>();
    const auto up = j.at("upper").get<std::vector<double>>();
    Vector l = Eigen::Map<const Vector>(lo.data(), static_cast<int>(lo.size()));
    Vector u = Eigen::Map<const Vector>(up.data(), static_cast<int>(up.size()));
    return make_box(l, u);
}

json config_to_json_obj(const RunConfig& c) {
    json j;
    j["system"] = c.system;
    j["model_file"] = c.model_file;
    j["domain"] = box_to_json(c.domain);
    j["grid"] = c.subdivisions;
    j["tau"] = c.tau;
    j["step"] = c.step;
    j["method"] = c.method;
    json mp;
    mp["inflation"] = c.method_params.inflation;
    mp["include_center"] = c.method_params.include_center;
    mp["delta"] = c.method_params.delta;
    mp["lipschitz_pairs"] = c.method_params.lipschitz_pairs;
    mp["confidence"] = c.method_params.confidence;
    mp["gp_max_train"] = c.method_params.gp_max_train;
    mp["dataset_file"] = c.method_params.dataset_file;
    j["method_params"] = std::move(mp);
    json sp;
    sp["modes"] = c.sysid.modes;
    sp["degree"] = c.sysid.degree;
    sp["eta"] = c.sysid.eta;
    sp["max_outer_iters"] = c.sysid.max_outer_iters;
    sp["objective_tol"] = c.sysid.objective_tol;
    sp["solver_tol"] = c.sysid.solver_tol;
    sp["classifier_degree"] = c.sysid.classifier_degree;
    sp["classifier_reg"] = c.sysid.classifier_reg;
    j["sysid"] = std::move(sp);
    json sim;
    sim["trajectories"] = c.simulate.trajectories;
    sim["horizon"] = c.simulate.horizon;
    sim["sample_dt"] = c.simulate.sample_dt;
    j["simulate"] = std::move(sim);
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    return j;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

RunConfig config_from_json_obj(const json& j) {
    RunConfig c;
    maybe(j, "system", c.system);
    maybe(j, "model_file", c.model_file);
    if (j.contains("domain")) c.domain = box_from_json(j.at("domain"));
    if (j.contains("grid")) c.subdivisions = j.at("grid").get<std::vector<int>>();
    maybe(j, "tau", c.tau);
    maybe(j, "step", c.step);
    maybe(j, "method", c.method);
    if (j.contains("method_params")) {
        const json& mp = j.at("method_params");
        maybe(mp, "inflation", c.method_params.inflation);
        maybe(mp, "include_center", c.method_params.include_center);
        maybe(mp, "delta", c.method_params.delta);
        maybe(mp, "lipschitz_pairs", c.method_params.lipschitz_pairs);
        maybe(mp, "confidence", c.method_params.confidence);
        maybe(mp, "gp_max_train", c.method_params.gp_max_train);
        maybe(mp, "dataset_file", c.method_params.dataset_file);
    }
    if (j.contains("sysid")) {
        const json& sp = j.at("sysid");
        maybe(sp, "modes", c.sysid.modes);
        maybe(sp, "degree", c.sysid.degree);
        maybe(sp, "eta", c.sysid.eta);
        maybe(sp, "max_outer_iters", c.sysid.max_outer_iters);
        maybe(sp, "objective_tol", c.sysid.objective_tol);
        maybe(sp, "solver_tol", c.sysid.solver_tol);
        maybe(sp, "classifier_degree", c.sysid.classifier_degree);
        maybe(sp, "classifier_reg", c.sysid.classifier_reg);
    }
    if (j.contains("simulate")) {
        const json& sim = j.at("simulate");
        maybe(sim, "trajectories", c.simulate.trajectories);
        maybe(sim, "horizon", c.simulate.horizon);
        maybe(sim, "sample_dt", c.simulate.sample_dt);
    }
    maybe(j, "seed", c.seed);
    maybe(j, "out_dir", c.out_dir);
    return c;
}

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError(std::string("malformed JSON in ") + what);
    return j;
}

std::string out_path(const RunConfig& config, const std::string& name) {
    return (std::filesystem::path(config.out_dir) / name).string();
}

void validate(const RunConfig& c) {
    if (!(c.tau > 0.0)) throw ConfigError("config: tau must be positive");
    if (!(c.step > 0.0)) throw ConfigError("config: step must be positive");
    if (c.domain.dim() == 0) throw ConfigError("config: domain is required");
    if (c.subdivisions.empty()) throw ConfigError("config: grid subdivisions are required");
    static const char* methods[] = {"ground_truth", "identified", "lipschitz", "gp"};
    if (std::find(std::begin(methods), std::end(methods), c.method) == std::end(methods))
        throw ConfigError("config: unknown method '" + c.method + "'");
    if (c.system != "toggle_switch" && c.system != "piecewise_van_der_pol" && c.model_file.empty())
        throw ConfigError("config: unknown system '" + c.system + "'");
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
    return config_from_json_obj(parse_json(text, "run config"));
}

std::string config_to_json(const RunConfig& config) {
    return config_to_json_obj(config).dump(2) + "\n";
}

RunConfig load_config(const std::string& path) { return config_from_json(read_file(path)); }

void apply_overrides(RunConfig& config, const CliOverrides& overrides) {
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.method) config.method = *overrides.method;
    if (overrides.out_dir) config.out_dir = *overrides.out_dir;
    if (overrides.tau) config.tau = *overrides.tau;
    if (overrides.grid_k) {
        if (*overrides.grid_k < 0 || *overrides.grid_k > 20)
            throw ConfigError("--grid exponent out of range");
        const int cells = 1 << *overrides.grid_k;
        config.subdivisions.assign(std::max(config.domain.dim(), 1), cells);
    }
}

RunConfig default_config(const std::string& system) {
    RunConfig c;
    c.system = system;
    Vector lo(2), hi(2);
    if (system == "toggle_switch") {
        lo << 0, 0;
        hi << 6, 6;
        c.sysid.modes = 4;
        c.sysid.degree = 1;
        c.sysid.classifier_degree = 1;
    } else if (system == "piecewise_van_der_pol") {
        lo << -3, -3;
        hi << 3, 3;
        c.sysid.modes = 2;
        c.sysid.degree = 3;
        c.sysid.classifier_degree = 2;
    } else {
        throw ConfigError("unknown system '" + system + "'");
    }
    c.domain = make_box(lo, hi);
    c.subdivisions = {128, 128};
    return c;
}

VectorField build_field(const RunConfig& config) {
    if (config.method == "identified" || !config.model_file.empty()) {
        if (config.model_file.empty())
            throw ConfigError("method 'identified' requires model_file");
        return read_model_json(config.model_file);
    }
    if (config.system == "toggle_switch") return ToggleSwitch{};
    if (config.system == "piecewise_van_der_pol") return PiecewiseVanDerPol{};
    throw ConfigError("unknown system '" + config.system + "'");
}

CubicalGrid build_grid(const RunConfig& config) {
    return make_grid(config.domain, config.subdivisions);
}

SimulateArtifacts cmd_simulate(const RunConfig& config) {
    validate(config);
    const VectorField field = build_field(config);
    SimulateArtifacts art;
    art.dataset =
        simulate_trajectories(field, config.simulate.trajectories, config.simulate.horizon,
                              config.simulate.sample_dt, config.domain, config.seed, config.step);
    art.dataset_path = out_path(config, "dataset.csv");
    art.meta_path = out_path(config, "dataset_meta.json");
    write_dataset_csv(art.dataset_path, art.dataset);
    json meta;
    meta["version"] = kToolVersion;
    meta["run_config"] = config_to_json_obj(config);
    meta["rows"] = art.dataset.size();
    meta["dataset"] = "dataset.csv";
    write_file_atomic(art.meta_path, meta.dump(2) + "\n");
    return art;
}

IdentifyArtifacts cmd_identify(const RunConfig& config, const std::string& dataset_path) {
    validate(config);
    if (config.sysid.modes < 1) throw ConfigError("identify: modes must be >= 1");
    const TrajectoryDataset data = read_dataset_csv(dataset_path);

    IdentConfig ic;
    ic.K = config.sysid.modes;
    ic.degree = config.sysid.degree;
    ic.eta = config.sysid.eta;
    ic.max_outer_iters = config.sysid.max_outer_iters;
    ic.objective_tol = config.sysid.objective_tol;
    ic.solver_tol = config.sysid.solver_tol;
    ic.seed = config.seed;

    IdentifyArtifacts art;
    art.result = alternate(data, ic);
    art.model = art.result.model;

    std::vector<Vector> points;
    points.reserve(data.size());
    for (const auto& s : data.samples) points.push_back(s.x);
    art.model.classifier =
        fit_classifier(points, art.result.assignment.hard, ic.K, config.sysid.classifier_degree,
                       config.sysid.classifier_reg, ic.solver_tol);

    json prov;
    prov["version"] = kToolVersion;
    prov["run_config"] = config_to_json_obj(config);
    prov["dataset"] = dataset_path;
    prov["objective"] = art.result.objective_history.empty()
                            ? 0.0
                            : art.result.objective_history.back();
    prov["iterations"] = art.result.objective_history.size();
    prov["converged"] = art.result.converged;
    prov["classifier_accuracy"] = art.model.classifier->train_accuracy;
    art.model.provenance = prov.dump();

    art.model_path = out_path(config, "model.json");
    art.history_path = out_path(config, "objective_history.csv");
    write_model_json(art.model_path, art.model);
    std::ostringstream hist;
    hist << "iteration,objective\n";
    for (std::size_t i = 0; i < art.result.objective_history.size(); ++i)
        hist << i << "," << format_double(art.result.objective_history[i]) << "\n";
    write_file_atomic(art.history_path, hist.str());
    return art;
}

std::string cellmap_to_json(const CellMap& map, const RunConfig& config) {
    json j;
    j["version"] = kToolVersion;
    j["run_config"] = config_to_json_obj(config);
    json grid;
    grid["domain"] = box_to_json(map.grid.domain);
    grid["subdivisions"] = map.grid.subdivisions;
    j["grid"] = std::move(grid);
    j["method"] = map.method;
    json params;
    params["tau"] = config.tau;
    params["step"] = config.step;
    params["inflation"] = config.method_params.inflation;
    params["include_center"] = config.method_params.include_center;
    params["confidence"] = config.method_params.confidence;
    j["params"] = std::move(params);
    json rows = json::array();
    for (std::int64_t idx = 0; idx < map.cell_count(); ++idx)
        rows.push_back(json::array({idx, map.images[idx]}));
    j["rows"] = std::move(rows);
    json esc = json::array();
    for (std::int64_t idx = 0; idx < map.cell_count(); ++idx)
        if (map.escapes[idx]) esc.push_back(idx);
    j["escapes"] = std::move(esc);
    return j.dump() + "\n";
}

CellMap cellmap_from_json(const std::string& text) {
    const json j = parse_json(text, "cell map");
    CellMap map;
    const json& grid = j.at("grid");
    map.grid = make_grid(box_from_json(grid.at("domain")),
                         grid.at("subdivisions").get<std::vector<int>>());
    map.method = j.at("method").get<std::string>();
    map.images.assign(map.cell_count(), {});
    map.escapes.assign(map.cell_count(), false);
    for (const auto& row : j.at("rows")) {
        const std::int64_t idx = row.at(0).get<std::int64_t>();
        map.images.at(idx) = row.at(1).get<std::vector<std::int32_t>>();
    }
    for (const auto& idx : j.at("escapes")) map.escapes.at(idx.get<std::int64_t>()) = true;
    return map;
}

std::string morse_to_json(const MorseGraph& mg, const std::vector<std::vector<std::int32_t>>& roa,
                          const CubicalGrid& grid, const RunConfig& config) {
    json j;
    j["version"] = kToolVersion;
    j["run_config"] = config_to_json_obj(config);
    json g;
    g["domain"] = box_to_json(grid.domain);
    g["subdivisions"] = grid.subdivisions;
    j["grid"] = std::move(g);
    json nodes = json::array();
    for (int p = 0; p < mg.size(); ++p) {
        json node;
        node["id"] = p;
        node["cells"] = mg.node_cells[p];
        node["minimal"] = static_cast<bool>(mg.minimal[p]);
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const auto& [up, lo] : mg.hasse_edges) edges.push_back(json::array({up, lo}));
    j["hasse_edges"] = std::move(edges);
    json jroa;
    for (int p = 0; p < mg.size(); ++p)
        jroa[std::to_string(p)] = p < static_cast<int>(roa.size()) ? roa[p]
                                                                   : std::vector<std::int32_t>{};
    j["roa"] = std::move(jroa);
    return j.dump() + "\n";
}

MorseGraph morse_from_json(const std::string& text) {
    const json j = parse_json(text, "morse graph");
    MorseGraph mg;
    for (const auto& node : j.at("nodes")) {
        mg.node_cells.push_back(node.at("cells").get<std::vector<std::int32_t>>());
        mg.minimal.push_back(node.at("minimal").get<bool>());
    }
    for (const auto& e : j.at("hasse_edges"))
        mg.hasse_edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    // Rebuild the order matrix as the reflexive-transitive closure of Hasse.
    const int m = mg.size();
    mg.reaches.assign(m, std::vector<bool>(m, false));
    for (int i = 0; i < m; ++i) mg.reaches[i][i] = true;
    for (const auto& [up, lo] : mg.hasse_edges) mg.reaches[up][lo] = true;
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            if (mg.reaches[i][k])
                for (int jx = 0; jx < m; ++jx)
                    if (mg.reaches[k][jx]) mg.reaches[i][jx] = true;
    return mg;
}

MorseArtifacts cmd_morse(const RunConfig& config, bool write_artifacts) {
    validate(config);
    const CubicalGrid grid = build_grid(config);

    MorseArtifacts art;
    if (config.method == "ground_truth" || config.method == "identified") {
        const VectorField field = build_field(config);
        art.map = bounding_box_map(grid, field, config.tau, config.step,
                                   config.method_params.inflation,
                                   config.method_params.include_center);
        art.map.method = config.method;
    } else if (config.method == "lipschitz") {
        const VectorField field = build_field(config);
        const LipschitzEstimate est =
            estimate_lipschitz(field, config.domain, config.tau, config.step,
                               config.method_params.lipschitz_pairs, config.seed);
        art.map = lipschitz_map(grid, field, config.tau, config.step, est.L);
    } else if (config.method == "gp") {
        if (config.method_params.dataset_file.empty())
            throw ConfigError("method 'gp' requires method_params.dataset_file");
        const TrajectoryDataset data = read_dataset_csv(config.method_params.dataset_file);
        const auto pairs = make_flow_pairs(data, config.tau);
        GpFitOptions opt;
        opt.max_train = config.method_params.gp_max_train;
        const GpModel gp = fit_gp(pairs, opt);
        art.map = gp_map(grid, gp, config.method_params.confidence);
    } else {
        throw ConfigError("unknown method '" + config.method + "'");
    }

    art.mg = morse_graph(art.map);
    for (int p = 0; p < art.mg.size(); ++p)
        art.roa.push_back(region_of_attraction(art.map, art.mg, p));

    if (write_artifacts) {
        art.cellmap_path = out_path(config, "cellmap.json");
        art.morse_path = out_path(config, "morse.json");
        write_file_atomic(art.cellmap_path, cellmap_to_json(art.map, config));
        write_file_atomic(art.morse_path, morse_to_json(art.mg, art.roa, grid, config));
        if (grid.dim() == 2) {
            art.svg_path = out_path(config, "figure.svg");
            write_file_atomic(art.svg_path, render_morse_svg(grid, art.mg, art.roa));
        }
    }
    return art;
}

CompareConfig compare_config_from_json(const std::string& text) {
    const json j = parse_json(text, "compare config");
    CompareConfig c;
    maybe(j, "benchmark", c.benchmark);
    maybe(j, "radius_cells", c.radius_cells);
    maybe(j, "out_dir", c.out_dir);
    if (!j.contains("runs")) throw ConfigError("compare config: runs are required");
    for (const auto& r : j.at("runs")) {
        CompareRunSpec spec;
        spec.method = r.at("method").get<std::string>();
        spec.cellmap_path = r.at("cellmap").get<std::string>();
        spec.morse_path = r.at("morse").get<std::string>();
        c.runs.push_back(std::move(spec));
    }
    return c;
}

AggTarget benchmark_target(const std::string& benchmark) {
    if (benchmark == "toggle") return toggle_target();
    if (benchmark == "van_der_pol") return van_der_pol_target();
    throw ConfigError("unknown benchmark '" + benchmark + "'");
}

CompareArtifacts cmd_compare(const CompareConfig& config) {
    if (config.runs.empty()) throw ConfigError("compare: no runs configured");
    std::vector<CellMap> maps;
    std::vector<MorseGraph> graphs;
    std::vector<double> taus;
    for (const auto& spec : config.runs) {
        if (!std::filesystem::exists(spec.cellmap_path))
            throw IoError("compare: missing cell-map artifact: " + spec.cellmap_path);
        if (!std::filesystem::exists(spec.morse_path))
            throw IoError("compare: missing morse-graph artifact: " + spec.morse_path);
        const std::string cm_text = read_file(spec.cellmap_path);
        maps.push_back(cellmap_from_json(cm_text));
        graphs.push_back(morse_from_json(read_file(spec.morse_path)));
        const json j = parse_json(cm_text, "cell map");
        taus.push_back(j.at("run_config").at("tau").get<double>());
    }
    for (std::size_t r = 1; r < taus.size(); ++r)
        if (std::abs(taus[r] - taus[0]) > 1e-12)
            throw ConfigError("compare: runs use different tau values");

    std::vector<MethodRun> runs;
    for (std::size_t r = 0; r < config.runs.size(); ++r)
        runs.push_back({config.runs[r].method, &maps[r], &graphs[r]});

    CompareArtifacts art;
    art.result = compare(runs, benchmark_target(config.benchmark), config.radius_cells);
    art.csv_path = (std::filesystem::path(config.out_dir) / "metrics.csv").string();
    write_file_atomic(art.csv_path, art.result.csv);
    json meta;
    meta["version"] = kToolVersion;
    meta["benchmark"] = config.benchmark;
    meta["radius_cells"] = config.radius_cells;
    json jruns = json::array();
    for (const auto& r : config.runs) {
        json jr;
        jr["method"] = r.method;
        jr["cellmap"] = r.cellmap_path;
        jr["morse"] = r.morse_path;
        jruns.push_back(std::move(jr));
    }
    meta["runs"] = std::move(jruns);
    write_file_atomic((std::filesystem::path(config.out_dir) / "metrics_meta.json").string(),
                      meta.dump(2) + "\n");
    return art;
}

}  // namespace morseid
