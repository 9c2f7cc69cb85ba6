#pragma once

#include <optional>
#include <string>
#include <vector>

#include "morseid/eval.hpp"
#include "morseid/morse.hpp"
#include "morseid/outer.hpp"
#include "morseid/sysid.hpp"

namespace morseid {

struct MethodParams {
    double inflation = 0.0;
    bool include_center = true;
    double delta = 0.0;
    int lipschitz_pairs = 4096;
    double confidence = 0.95;
    int gp_max_train = 1200;
    std::string dataset_file;
};

struct SimulateParams {
    int trajectories = 50;
    double horizon = 10.0;
    double sample_dt = 0.2;
};

struct SysidParams {
    int modes = 1;
    int degree = 1;
    double eta = 10.0;
    int max_outer_iters = 30;
    double objective_tol = 1e-6;
    double solver_tol = 1e-7;
    int classifier_degree = 1;
    double classifier_reg = 10.0;
};

/// One reproducible run record; every artifact embeds its serialized form.
struct RunConfig {
    std::string system = "toggle_switch";  // builtin name
    std::string model_file;                // identified-model runs
    Box domain;
    std::vector<int> subdivisions;
    double tau = 1.0;
    double step = 0.01;
    std::string method = "ground_truth";
    MethodParams method_params;
    SysidParams sysid;
    SimulateParams simulate;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
};

RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> method;
    std::optional<std::string> out_dir;
    std::optional<int> grid_k;  // 2^k cells per axis
    std::optional<double> tau;
};

void apply_overrides(RunConfig& config, const CliOverrides& overrides);

/// Default benchmark configs (toggle switch / piecewise Van der Pol).
RunConfig default_config(const std::string& system);

/// Field selected by the run: the identified model when method=identified
/// (or a model_file is given), the named builtin otherwise.
VectorField build_field(const RunConfig& config);
CubicalGrid build_grid(const RunConfig& config);

struct SimulateArtifacts {
    TrajectoryDataset dataset;
    std::string dataset_path;
    std::string meta_path;
};
SimulateArtifacts cmd_simulate(const RunConfig& config);

struct IdentifyArtifacts {
    SwitchingModel model;
    IdentResult result;
    std::string model_path;
    std::string history_path;
};
IdentifyArtifacts cmd_identify(const RunConfig& config, const std::string& dataset_path);

struct MorseArtifacts {
    CellMap map;
    MorseGraph mg;
    std::vector<std::vector<std::int32_t>> roa;  // per Morse node
    std::string cellmap_path;
    std::string morse_path;
    std::string svg_path;  // empty when the state dimension is not 2
};
MorseArtifacts cmd_morse(const RunConfig& config, bool write_artifacts = true);

struct CompareRunSpec {
    std::string method;
    std::string cellmap_path;
    std::string morse_path;
};
struct CompareConfig {
    std::string benchmark = "toggle";  // "toggle" or "van_der_pol"
    double radius_cells = 10.0;
    std::vector<CompareRunSpec> runs;  // first entry is the reference
    std::string out_dir = "out";
};
CompareConfig compare_config_from_json(const std::string& text);

struct CompareArtifacts {
    CompareResult result;
    std::string csv_path;
};
CompareArtifacts cmd_compare(const CompareConfig& config);

// Artifact (de)serialization used by cmd_morse / cmd_compare.
std::string cellmap_to_json(const CellMap& map, const RunConfig& config);
CellMap cellmap_from_json(const std::string& text);
std::string morse_to_json(const MorseGraph& mg, const std::vector<std::vector<std::int32_t>>& roa,
                          const CubicalGrid& grid, const RunConfig& config);
MorseGraph morse_from_json(const std::string& text);

AggTarget benchmark_target(const std::string& benchmark);

}  // namespace morseid
