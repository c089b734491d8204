#pragma once
// Low-dimensional latent time series: produced by the trained models (branch
// outputs / ParameterNet outputs) and by the Fourier two-mode projection
// baseline, consumed by the analysis and plotting layers.

#include <string>
#include <vector>

#include "latentflow/core.hpp"

namespace latentflow {

enum class LatentSource { nif, deeponet, fourier };

inline std::string latent_source_name(LatentSource s) {
    switch (s) {
        case LatentSource::nif: return "nif";
        case LatentSource::deeponet: return "deeponet";
        case LatentSource::fourier: return "fourier";
    }
    return "unknown";
}

struct LatentTrajectory {
    std::vector<double> times;
    Matrix coords;  // times.size() x dim, row i = latent coordinates at times[i]
    LatentSource source = LatentSource::nif;
    std::vector<std::string> labels;  // one axis name per latent dimension

    int dim() const { return coords.cols; }
};

}  // namespace latentflow
