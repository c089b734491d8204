// Command-line driver: simulate | train | analyze | pipeline.
//
// Configuration precedence, lowest to highest: built-in defaults, the
// LATENTFLOW_SEED environment variable, --config file, explicit flags.
// Every value funnels through the same validated setter, so a bad flag and a
// bad config line produce the same style of message. Exit codes: 0 success,
// 1 runtime failure (integration, training, IO), 2 usage/config error.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latentflow/pipeline.hpp"

using latentflow::ExperimentConfig;

namespace {

// A flag bound to a config key; applied through apply_config_kv after
// parsing so flags always override the config file.
struct FlagBinding {
    CLI::Option* opt;
    std::string key;
    std::shared_ptr<std::string> value;
};

struct CommandSpec {
    CLI::App* cmd = nullptr;
    std::vector<FlagBinding> bindings;
    std::shared_ptr<std::string> config_path = std::make_shared<std::string>();
    std::shared_ptr<bool> fourier = std::make_shared<bool>(false);
};

void bind(CommandSpec& spec, const std::string& flag, const std::string& key,
          const std::string& help) {
    auto store = std::make_shared<std::string>();
    spec.bindings.push_back({spec.cmd->add_option(flag, *store, help), key, store});
}

void add_simulation_flags(CommandSpec& spec) {
    bind(spec, "--equation", "equation", "Equation: fkdv, ks, or sg");
    bind(spec, "--points", "n_points", "Grid points (power of two)");
    bind(spec, "--transient", "transient", "Time discarded before sampling");
    bind(spec, "--window", "window", "Sampled window length");
    bind(spec, "--interval", "snapshot_interval", "Snapshot spacing");
    bind(spec, "--rel-tol", "rel_tol", "Integrator relative tolerance");
    bind(spec, "--abs-tol", "abs_tol", "Integrator absolute tolerance");
    bind(spec, "--froude", "froude", "fKdV Froude number");
    bind(spec, "--viscosity", "viscosity", "KS viscosity");
    bind(spec, "--ic-amplitude", "ic_amplitude", "Initial profile amplitude");
    bind(spec, "--ic-wavenumber", "ic_wavenumber", "Initial profile wavenumber");
    bind(spec, "--ic-phase", "ic_phase", "Initial profile phase");
}

void add_training_flags(CommandSpec& spec) {
    bind(spec, "--model", "model", "Model kind: nif or deeponet");
    bind(spec, "--latent-dim", "latent_dim", "Latent dimension");
    bind(spec, "--epochs", "epochs", "Training epochs");
    bind(spec, "--lr", "learning_rate", "Learning rate (0 = model default)");
    bind(spec, "--batch", "batch_size", "Minibatch size");
    bind(spec, "--hidden", "hidden_widths", "Hidden widths, comma separated");
    bind(spec, "--activation", "activation", "Activation override");
}

CommandSpec make_command(CLI::App& app, const std::string& name, const std::string& help) {
    CommandSpec spec;
    spec.cmd = app.add_subcommand(name, help);
    spec.cmd->add_option("--config", *spec.config_path, "Key-value config file");
    bind(spec, "--out", "out_dir", "Output directory");
    bind(spec, "--data", "data", "Dataset file path");
    bind(spec, "--seed", "seed", "RNG seed");
    return spec;
}

// defaults -> environment -> config file -> flags.
ExperimentConfig build_config(const CommandSpec& spec) {
    ExperimentConfig cfg;
    if (const char* env = std::getenv("LATENTFLOW_SEED")) {
        latentflow::apply_config_kv(cfg, "seed", env, "LATENTFLOW_SEED");
    }
    if (!spec.config_path->empty()) latentflow::apply_config_file(cfg, *spec.config_path);
    for (const FlagBinding& b : spec.bindings) {
        if (b.opt->count() > 0) {
            latentflow::apply_config_kv(cfg, b.key, *b.value, b.opt->get_name());
        }
    }
    cfg.fourier = cfg.fourier || *spec.fourier;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Latent-dynamics experiments: pseudo-spectral PDE datasets, hypernetwork and "
                 "operator-network training, and analysis reports"};
    app.require_subcommand(1);

    CommandSpec simulate = make_command(app, "simulate", "Generate a snapshot dataset");
    add_simulation_flags(simulate);

    CommandSpec train = make_command(app, "train", "Train a model on a dataset");
    add_training_flags(train);
    bind(train, "--checkpoint", "checkpoint", "Checkpoint output path");

    CommandSpec analyze = make_command(app, "analyze", "Evaluate a checkpoint against a dataset");
    bind(analyze, "--checkpoint", "checkpoint", "Checkpoint to evaluate");
    bind(analyze, "--model", "model", "Kind used for the default checkpoint name");
    analyze.cmd->add_flag("--fourier", *analyze.fourier, "Also emit the Fourier projection pair");

    CommandSpec pipeline =
        make_command(app, "pipeline", "Run simulate/train/analyze over every equation and model");
    add_simulation_flags(pipeline);
    add_training_flags(pipeline);
    bind(pipeline, "--equations", "equations", "Equation subset, comma separated");
    bind(pipeline, "--models", "models", "Model subset, comma separated");
    pipeline.cmd->add_flag("--fourier", *pipeline.fourier,
                           "Also emit the Fourier projection pair per cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
        return 2;
    }

    try {
        if (simulate.cmd->parsed()) {
            latentflow::cmd_simulate(build_config(simulate), std::cout);
        } else if (train.cmd->parsed()) {
            latentflow::cmd_train(build_config(train), std::cout);
        } else if (analyze.cmd->parsed()) {
            latentflow::cmd_analyze(build_config(analyze), std::cout);
        } else if (pipeline.cmd->parsed()) {
            if (latentflow::cmd_pipeline(build_config(pipeline), std::cout) > 0) return 1;
        }
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
