#pragma once
// Adaptive time integration for semi-linear spectral systems
//
//     u_t = L u + N(u, t)
//
// where L acts per wavenumber (a complex multiplier for scalar equations, a
// small coupling block for first-order wave systems) and N is evaluated
// pseudo-spectrally.  Two schemes are provided:
//
//  - integrate_if_rk45: Dormand-Prince 5(4) applied in the integrating-factor
//    frame, so the stiff linear part is propagated exactly and the embedded
//    pair controls only the nonlinear remainder.
//  - integrate_etdrk4: the Cox-Matthews ETDRK4 scheme with step-doubling
//    error control, suited to oscillatory wave operators.

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latentflow/core.hpp"
#include "latentflow/fourier.hpp"

namespace latentflow {

// Spectral right-hand side of the nonlinear part.  `y` and `out` hold
// state_dim half-spectra back to back (field c occupies [c*m, (c+1)*m) where
// m = grid.num_modes()).  `out` is zero-filled before every call; the callee
// assigns the tendency of each mode it touches.
using SpectralRhs =
    std::function<void(double t, const std::vector<Complex>& y, std::vector<Complex>& out)>;

// A semi-linear evolution equation in spectral form.  For a scalar equation
// each mode evolves by one complex multiplier; coupled two-field systems
// (e.g. a wave equation written in first-order form) carry a dense
// state_dim x state_dim block per mode instead.
struct SemiLinearSystem {
    PeriodicGrid grid;
    int state_dim = 1;
    // grid.num_modes() blocks of state_dim^2 entries, row-major in each block.
    // For state_dim == 1 this is simply the multiplier L(k).
    std::vector<Complex> linear_symbol;
    SpectralRhs nonlinear_rhs;

    const Complex* block(int k) const {
        return linear_symbol.data() +
               static_cast<std::size_t>(k) * state_dim * state_dim;
    }
};

struct IntegrationConfig {
    double rel_tol = 1e-6;
    double abs_tol = 1e-6;
    double t_start = 0.0;
    double t_end = 0.0;
    double initial_step = 1e-3;
    long max_steps = 2'000'000;
    double snapshot_interval = 0.1;
    // Testing hook: when positive, march with exactly this step size and no
    // error control.  Used to measure convergence order.
    double fixed_step = 0.0;
};

// Real-space snapshots of one integration run.  Row i of `states` holds the
// solution at times[i]; for multi-field systems the fields are stored back to
// back (field c at columns [c*n_points, (c+1)*n_points)).
struct Trajectory {
    PeriodicGrid grid;
    int state_dim = 1;
    std::vector<double> times;
    Matrix states;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

// Integration failure (step budget exhausted, step size underflow, or a
// non-finite state).  Carries the snapshots completed so far and the time at
// which the run died.
class IntegrationError : public std::runtime_error {
  public:
    IntegrationError(const std::string& what, Trajectory partial, double failure_time)
        : std::runtime_error(what),
          partial_(std::move(partial)),
          failure_time_(failure_time) {}

    const Trajectory& partial() const { return partial_; }
    double failure_time() const { return failure_time_; }

  private:
    Trajectory partial_;
    double failure_time_;
};

// phi_0(z) = e^z and phi_{j+1}(z) = (phi_j(z) - 1/j!)/z, evaluated by Taylor
// series for |z| < 0.5 and by the closed form otherwise (avoids cancellation
// near the origin).  j must lie in 0..3.
Complex phi_function(int j, Complex z);

// phi_j of a dim x dim matrix (dim 1 or 2), row-major in `a` and `out`.
// The 2x2 case goes through the eigenvalues, falling back to the
// derivative form when they (nearly) coincide.
void phi_matrix(int j, const Complex* a, int dim, Complex* out);

Trajectory integrate_if_rk45(const SemiLinearSystem& system, const std::vector<double>& u0,
                             const IntegrationConfig& cfg);
Trajectory integrate_etdrk4(const SemiLinearSystem& system, const std::vector<double>& u0,
                            const IntegrationConfig& cfg);

}  // namespace latentflow
