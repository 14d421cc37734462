#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "advtrain/data_io.hpp"
#include "advtrain/metrics.hpp"
#include "advtrain/types.hpp"

namespace advtrain {

enum class Algorithm { AGd, ASgd, APerceptron, SlowGd, ErmGame };
enum class StepMode { Explicit, Tune, TheoryCap };
enum class InitMode { Zero, E2, Gaussian };

struct DatasetConfig {
    enum class Kind { Synthetic, Iris, TwoPoint } kind = Kind::Synthetic;
    SyntheticSpec synth;
    IrisSpec iris;
    double gamma = 0.5;  // two-point
    std::size_t d = 2;   // two-point
};

struct GameConfig {
    double alpha = 0.4;
    double epsilon = 0.1;
    double c = 1.0;  // universal constant for the lower-bound calculator
};

struct SlowGdConfig {
    double c = 5.0;
    double alpha = 0.5;
};

struct BoundTableConfig {
    BoundInputs inputs;
    std::vector<std::size_t> t_grid;
};

struct ExperimentConfig {
    std::optional<DatasetConfig> dataset;
    Algorithm algorithm = Algorithm::AGd;
    std::vector<double> alphas = {0.0, 0.25, 0.5, 0.75};
    std::size_t iterations = 1000;
    StepMode step_mode = StepMode::TheoryCap;
    double step_size = 0.0;  // Explicit mode only
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    bool normalize = false;
    std::string output_dir = "out";
    InitMode init = InitMode::Zero;
    bool emit_svg = true;
    std::optional<GameConfig> game;
    std::optional<SlowGdConfig> slow_gd;
    std::optional<BoundTableConfig> bounds;
};

// Strict parse: unknown keys anywhere in the document are errors.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

// Build the configured dataset (before any normalization).
Dataset build_dataset(const DatasetConfig& dc);

struct TuningResult {
    double alpha = 0.0;
    double chosen_eta = 0.0;
    std::vector<std::pair<double, double>> grid;  // (eta, mean final robust risk)
};

// The step-size grid {0.1/2^k | 0 <= k < 10} at 500 iterations; full-batch
// runs are scored by the final robust risk, single-sample runs by its mean
// over 5 trials. Ties break toward the smaller step. Diverged grid points are
// skipped; if every point diverges this is an error.
TuningResult tune_step_size(const ExperimentConfig& cfg, const Dataset& S, double alpha);

struct ExperimentResult {
    std::vector<std::string> files;
    nlohmann::json summary;
};

// Runs the configured experiment and writes all artifacts (trace CSVs,
// aggregates, optional SVG charts, summary.json) under output_dir. Partial
// outputs are removed when a run fails.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// One row per t with the closed-form envelopes; corollary iteration
// thresholds and the constants used go in the footer.
void emit_bound_table(const BoundInputs& in, const std::vector<std::size_t>& t_grid,
                      const std::string& path);

}  // namespace advtrain
