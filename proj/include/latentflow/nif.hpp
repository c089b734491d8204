#pragma once
// Neural implicit flow: a ParameterNet maps time to an r-dimensional latent
// vector, a linear expansion turns the latent into the full weight/bias
// vector of a ShapeNet, and the ShapeNet maps position to the field value.
// The ParameterNet output over the snapshot times is the latent trajectory.

#include <string>
#include <vector>

#include "latentflow/dataset.hpp"
#include "latentflow/nn.hpp"
#include "latentflow/training.hpp"
#include "latentflow/trajectory.hpp"

namespace latentflow {

struct ShapeNetArch {
    int input_dim = 1;
    std::vector<int> hidden = {30, 30};
    int output_dim = 1;
    Activation activation = Activation::swish;
};

// {input_dim, hidden..., output_dim}
std::vector<int> shape_net_dims(const ShapeNetArch& arch);

// Total weight+bias count of a ShapeNet: sum over layers of in*out + out.
int shape_param_count(const ShapeNetArch& arch);

// Materializes the ShapeNet whose flat parameters (layer order, weights
// row-major then biases) are theta[0 .. shape_param_count).
MLPParams make_shape_net(const ShapeNetArch& arch, const double* theta);

struct NIFModel {
    MLPParams parameter_net;               // normalized time -> r latent
    Matrix expansion_weights;              // n_shape x r
    std::vector<double> expansion_biases;  // n_shape
    ShapeNetArch shape_arch;
    CoordNormalizer normalizer;  // u channel stays identity: the nets fit raw field values
    int latent_dim = 0;
};

// ParameterNet of 1 -> param_hidden -> r, near-zero expansion weights, and
// expansion biases holding an independently initialized ShapeNet parameter
// vector (so training starts from a sensible static decoder).
NIFModel init_nif(const ShapeNetArch& arch, const std::vector<int>& param_hidden, int latent_dim,
                  RngSeed seed);

struct NifEval {
    double u = 0.0;
    std::vector<double> latent;
};

// z = parameter_net(t_norm); theta = expansion(z); u = shapenet_theta(x_norm).
// Raw coordinates; normalization applied internally.
NifEval nif_eval(const NIFModel& model, double x, double t);

// Flat parameter order: parameter_net (layer order), expansion weights
// row-major, expansion biases.
std::size_t nif_param_count(const NIFModel& model);
void nif_params_to(const NIFModel& model, double* out);
void nif_params_from(NIFModel& model, const double* in);

struct NifGradients {
    MLPParams parameter_net;
    Matrix expansion_weights;
    std::vector<double> expansion_biases;
};

// Chain rule through the hypernetwork, summed over the batch: ShapeNet
// backward treats the generated weights as inputs, dL/dz = expansion^T dL/dtheta,
// expansion gradients are the outer products dL/dtheta * z^T.  loss_grads[i]
// is dL/du for batch point i (the .u members of `batch` are ignored).
NifGradients nif_backward(const NIFModel& model, const std::vector<SamplePoint>& batch,
                          const std::vector<double>& loss_grads);

// Mean squared error over the samples and its gradient in flat layout.
double nif_loss_gradient(const NIFModel& model, const std::vector<SamplePoint>& samples,
                         std::vector<double>& grad_out);

struct NifTraining {
    NIFModel model;
    std::vector<double> loss_history;  // one MSE entry per epoch
};

// Defaults when the config leaves fields at their zero values: hidden stacks
// {30, 30} (both subnetworks), swish activation, learning rate 5e-3.  Batches
// are re-grouped by snapshot so each distinct time in a batch costs one
// ParameterNet pass and one expansion.  Throws TrainingError on divergence.
NifTraining train_nif(const SnapshotDataset& ds, const TrainConfig& cfg);

// ParameterNet outputs over the given times (raw units), one row per time.
LatentTrajectory nif_latent_series(const NIFModel& model, const std::vector<double>& times);

void save_nif(const NIFModel& model, const std::string& path);
NIFModel load_nif(const std::string& path);

}  // namespace latentflow
