#pragma once
// The three model equations, written as semi-linear spectral systems:
//
//   forced KdV    u_t = -(1/6) u_xxx + (F-1) u_x - (3/4)(u^2)_x
//   KS            u_t = -u_xx - nu u_xxxx - (1/2)(u^2)_x
//   sine-Gordon   u_tt = u_xx - sin u   (first-order in (u, v = u_t))
//
// plus the conserved functionals used to validate trajectories: the spatial
// mean (exact invariant of the first two) and the sine-Gordon energy.

#include <vector>

#include "latentflow/fourier.hpp"
#include "latentflow/integrators.hpp"

namespace latentflow {

struct FkdvParams {
    double froude = 1.5;
};

struct KsParams {
    double viscosity = 16.0 / 71.0;
};

// The common initial profile u(x, 0) = amplitude * cos(wavenumber * x + phase).
struct InitialCondition {
    double amplitude = 0.5;
    int wavenumber = 1;
    double phase = 1.0;
};

Field make_initial_condition(const PeriodicGrid& grid, const InitialCondition& ic);

SemiLinearSystem fkdv_system(const FkdvParams& params, const PeriodicGrid& grid);
SemiLinearSystem ks_system(const KsParams& params, const PeriodicGrid& grid);
// Two-field system (u, v): u_t = v, v_t = u_xx - sin u.
SemiLinearSystem sg_system(const PeriodicGrid& grid);

// Spatial mean (dx/L) * sum(values); conserved by fKdV and KS because every
// term of their right-hand sides is a total derivative.
double conserved_mean(const Field& field);

// Sine-Gordon energy  E = integral of (v^2/2 + u_x^2/2 + 1 - cos u) dx,
// with u_x taken spectrally.
double sg_energy(const Field& u, const Field& v);

// Full tendency L u + N(u, t) of a system, evaluated on a real-space state
// (all fields back to back). Used to check right-hand sides against
// finite-difference oracles.
std::vector<double> full_tendency(const SemiLinearSystem& system, const std::vector<double>& state,
                                  double t = 0.0);

}  // namespace latentflow
