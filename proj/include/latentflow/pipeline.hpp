#pragma once
// Experiment orchestration behind the CLI: one validated configuration type
// shared by all four commands, a sectioned key-value config-file reader, and
// the command bodies themselves. Commands print human-readable progress to
// the given stream and throw on failure: std::invalid_argument for bad
// configuration or incompatible inputs (CLI exit 2), std::runtime_error for
// integration/training/IO failures (CLI exit 1).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "latentflow/dataset.hpp"
#include "latentflow/training.hpp"

namespace latentflow {

struct ExperimentConfig {
    Equation equation = Equation::ks;
    SimulationConfig sim;
    InitialCondition ic;

    std::string model = "nif";  // nif | deeponet
    TrainConfig train;

    std::string out_dir = "out";
    std::string data_path;        // empty: <out_dir>/dataset_<equation>.lfd
    std::string checkpoint_path;  // empty: <out_dir>/<model>.ckpt
    bool fourier = false;         // analyze/pipeline: also emit the Fourier pair

    // Pipeline sweep: which (equation, model) cells to run.
    std::vector<Equation> equations = {Equation::fkdv, Equation::ks, Equation::sg};
    std::vector<std::string> models = {"nif", "deeponet"};

    std::string resolved_data_path() const;
    std::string resolved_checkpoint_path() const;
};

// Applies one key to the config; `context` (e.g. "run.cfg:12") prefixes any
// error so problems point at the offending line. Keys are unique across
// sections, so the section header is organizational only.
void apply_config_kv(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                     const std::string& context);

// Reads a sectioned key-value file: blank lines and #-comments ignored,
// [experiment]/[simulate]/[train]/[analyze]/[pipeline] headers allowed,
// every other line is "key value". Errors carry file:line context.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

// Generate + save the dataset, printing shape and conservation diagnostics
// (mean drift for fKdV/KS, amplitude bounds for sine-Gordon).
void cmd_simulate(const ExperimentConfig& cfg, std::ostream& out);

// Train the configured model on the dataset; writes checkpoint, loss CSV and
// a key-value summary, printing the final reconstruction error. On
// divergence the partial loss history is still written before the throw.
void cmd_train(const ExperimentConfig& cfg, std::ostream& out);

// Evaluate a checkpoint against a dataset: the four-plot bundle with CSV
// siblings, plus the Fourier baseline pair when requested.
void cmd_analyze(const ExperimentConfig& cfg, std::ostream& out);

// simulate -> train -> analyze over every (equation, model) cell, one shared
// dataset per equation, each cell in its own subdirectory. Cells run
// serially (training already parallelizes internally); a failing cell is
// recorded in the summary and the sweep continues. Returns the number of
// failed cells.
int cmd_pipeline(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace latentflow
