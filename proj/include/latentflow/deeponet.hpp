#pragma once
// DeepONet in its factored form: a branch network encodes time into p latent
// weights, a trunk network encodes position into p basis values, and the
// field is their inner product plus a trainable scalar bias.  The branch
// output over the snapshot times is the model's latent trajectory.

#include <string>
#include <vector>

#include "latentflow/dataset.hpp"
#include "latentflow/nn.hpp"
#include "latentflow/training.hpp"
#include "latentflow/trajectory.hpp"

namespace latentflow {

struct DeepONetModel {
    MLPParams branch;  // normalized time -> p latent weights
    MLPParams trunk;   // normalized position -> p basis values
    double output_bias = 0.0;
    CoordNormalizer normalizer;  // u channel stays identity: the nets fit raw field values
    int latent_dim = 0;
};

// u(x, t) = sum_k branch_k(t_norm) * trunk_k(x_norm) + output_bias.
// Raw coordinates; normalization is applied internally.
double deeponet_eval(const DeepONetModel& model, double x, double t);

// Flat parameter order: branch (layer order), trunk, then the scalar bias.
std::size_t deeponet_param_count(const DeepONetModel& model);
void deeponet_params_to(const DeepONetModel& model, double* out);
void deeponet_params_from(DeepONetModel& model, const double* in);

// Mean squared error over the samples and its gradient in flat layout
// (resized as needed).  Shares the per-sample kernel with training, so this
// is also the hook for finite-difference gradient checks.
double deeponet_loss_gradient(const DeepONetModel& model, const std::vector<SamplePoint>& samples,
                              std::vector<double>& grad_out);

struct DeepONetTraining {
    DeepONetModel model;
    std::vector<double> loss_history;  // one MSE entry per epoch
};

// Defaults when the config leaves fields at their zero values: three hidden
// layers of 20 sine units and learning rate 1e-3.  Throws TrainingError on
// divergence.
DeepONetTraining train_deeponet(const SnapshotDataset& ds, const TrainConfig& cfg);

// Branch outputs over the given times (raw units), one row per time.
LatentTrajectory deeponet_latent_series(const DeepONetModel& model,
                                        const std::vector<double>& times);

void save_deeponet(const DeepONetModel& model, const std::string& path);
DeepONetModel load_deeponet(const std::string& path);

}  // namespace latentflow
