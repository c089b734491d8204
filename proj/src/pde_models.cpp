#include "latentflow/pde_models.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace latentflow {
namespace {

// out[k] = prefactor * i*kappa_k * dealias(FFT(u^2))[k] — the pseudo-spectral
// advection term shared by fKdV (prefactor -3/4) and KS (prefactor -1/2).
SpectralRhs advection_rhs(const PeriodicGrid& grid, double prefactor) {
    const int n = grid.n_points;
    const int cutoff = dealias_cutoff(n);
    std::vector<double> u(n);
    std::vector<Complex> sq(grid.num_modes());
    return [grid, prefactor, cutoff, u, sq](double, const std::vector<Complex>& y,
                                            std::vector<Complex>& out) mutable {
        half_spectrum_to_real(y.data(), u.data(), grid.n_points);
        for (double& v : u) v = v * v;
        real_to_half_spectrum(u.data(), sq.data(), grid.n_points);
        for (int k = 0; k <= cutoff; ++k)
            out[k] = Complex(0.0, prefactor * grid.wavenumber(k)) * sq[k];
    };
}

}  // namespace

Field make_initial_condition(const PeriodicGrid& grid, const InitialCondition& ic) {
    if (std::abs(ic.wavenumber) >= grid.n_points / 2)
        throw std::invalid_argument("make_initial_condition: wavenumber " +
                                    std::to_string(ic.wavenumber) + " not resolvable on " +
                                    std::to_string(grid.n_points) + " points");
    Field f{grid, std::vector<double>(grid.n_points)};
    for (int j = 0; j < grid.n_points; ++j)
        f.values[j] = ic.amplitude * std::cos(ic.wavenumber * grid.node(j) + ic.phase);
    return f;
}

SemiLinearSystem fkdv_system(const FkdvParams& params, const PeriodicGrid& grid) {
    if (!(params.froude > 0.0))
        throw std::invalid_argument("fkdv_system: froude must be positive");
    SemiLinearSystem sys;
    sys.grid = grid;
    sys.state_dim = 1;
    sys.linear_symbol.resize(grid.num_modes());
    for (int k = 0; k < grid.num_modes(); ++k) {
        const double kap = grid.wavenumber(k);
        sys.linear_symbol[k] = Complex(0.0, kap * kap * kap / 6.0 + kap * (params.froude - 1.0));
    }
    // The Nyquist mode has no well-defined odd derivative; zero its phase
    // velocity, matching the spectral_derivative convention.
    sys.linear_symbol[grid.n_points / 2] = Complex(0.0, 0.0);
    sys.nonlinear_rhs = advection_rhs(grid, -0.75);
    return sys;
}

SemiLinearSystem ks_system(const KsParams& params, const PeriodicGrid& grid) {
    if (!(params.viscosity > 0.0))
        throw std::invalid_argument("ks_system: viscosity must be positive");
    SemiLinearSystem sys;
    sys.grid = grid;
    sys.state_dim = 1;
    sys.linear_symbol.resize(grid.num_modes());
    for (int k = 0; k < grid.num_modes(); ++k) {
        const double k2 = grid.wavenumber(k) * grid.wavenumber(k);
        sys.linear_symbol[k] = Complex(k2 - params.viscosity * k2 * k2, 0.0);
    }
    sys.nonlinear_rhs = advection_rhs(grid, -0.5);
    return sys;
}

SemiLinearSystem sg_system(const PeriodicGrid& grid) {
    SemiLinearSystem sys;
    sys.grid = grid;
    sys.state_dim = 2;
    sys.linear_symbol.resize(static_cast<std::size_t>(grid.num_modes()) * 4);
    for (int k = 0; k < grid.num_modes(); ++k) {
        const double kap = grid.wavenumber(k);
        Complex* b = sys.linear_symbol.data() + static_cast<std::size_t>(k) * 4;
        b[0] = Complex(0.0, 0.0);
        b[1] = Complex(1.0, 0.0);
        b[2] = Complex(-kap * kap, 0.0);
        b[3] = Complex(0.0, 0.0);
    }
    const int n = grid.n_points;
    const int cutoff = dealias_cutoff(n);
    std::vector<double> u(n);
    std::vector<Complex> s(grid.num_modes());
    sys.nonlinear_rhs = [grid, cutoff, u, s](double, const std::vector<Complex>& y,
                                             std::vector<Complex>& out) mutable {
        const int m = grid.num_modes();
        half_spectrum_to_real(y.data(), u.data(), grid.n_points);
        for (double& v : u) v = std::sin(v);
        real_to_half_spectrum(u.data(), s.data(), grid.n_points);
        for (int k = 0; k <= cutoff; ++k) out[m + k] = -s[k];
    };
    return sys;
}

double conserved_mean(const Field& field) {
    double sum = 0.0;
    for (double v : field.values) sum += v;
    return sum / field.grid.n_points;
}

double sg_energy(const Field& u, const Field& v) {
    if (!(u.grid == v.grid)) throw std::invalid_argument("sg_energy: grids differ");
    const Field ux = inverse_transform(spectral_derivative(forward_transform(u), 1));
    double density = 0.0;
    for (int j = 0; j < u.grid.n_points; ++j) {
        density += 0.5 * v.values[j] * v.values[j] + 0.5 * ux.values[j] * ux.values[j] +
                   (1.0 - std::cos(u.values[j]));
    }
    return density * u.grid.dx();
}

std::vector<double> full_tendency(const SemiLinearSystem& system, const std::vector<double>& state,
                                  double t) {
    const int n = system.grid.n_points;
    const int m = system.grid.num_modes();
    const int dim = system.state_dim;
    if (static_cast<int>(state.size()) != dim * n)
        throw std::invalid_argument("full_tendency: state has " + std::to_string(state.size()) +
                                    " values, expected " + std::to_string(dim * n));
    std::vector<Complex> y(static_cast<std::size_t>(dim) * m);
    for (int c = 0; c < dim; ++c)
        real_to_half_spectrum(state.data() + static_cast<std::size_t>(c) * n,
                              y.data() + static_cast<std::size_t>(c) * m, n);
    std::vector<Complex> dydt(y.size(), Complex(0.0, 0.0));
    system.nonlinear_rhs(t, y, dydt);
    for (int k = 0; k < m; ++k) {
        const Complex* b = system.block(k);
        for (int r = 0; r < dim; ++r) {
            Complex acc(0.0, 0.0);
            for (int c = 0; c < dim; ++c) acc += b[r * dim + c] * y[static_cast<std::size_t>(c) * m + k];
            dydt[static_cast<std::size_t>(r) * m + k] += acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(dim) * n);
    for (int c = 0; c < dim; ++c)
        half_spectrum_to_real(dydt.data() + static_cast<std::size_t>(c) * m,
                              out.data() + static_cast<std::size_t>(c) * n, n);
    return out;
}

}  // namespace latentflow
