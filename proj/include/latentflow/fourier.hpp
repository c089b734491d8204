#pragma once

#include <complex>
#include <vector>

#include "latentflow/core.hpp"

namespace latentflow {

using Complex = std::complex<double>;

// Uniform periodic grid on [x_min, x_max), node j at x_min + j*dx. The right
// endpoint is excluded (periodic wrap). n_points must be a power of two.
struct PeriodicGrid {
    int n_points = 0;
    double x_min = 0.0;
    double x_max = 0.0;

    double length() const { return x_max - x_min; }
    double dx() const { return length() / n_points; }
    double node(int j) const { return x_min + j * dx(); }
    std::vector<double> nodes() const;

    // Half-complex layout: modes k = 0 .. n_points/2, k = 0 first.
    int num_modes() const { return n_points / 2 + 1; }
    // Physical wavenumber of integer mode k (2*pi*k / L; equals k on [-pi, pi)).
    double wavenumber(int k) const { return 2.0 * 3.14159265358979323846 * k / length(); }

    bool operator==(const PeriodicGrid&) const = default;
};

PeriodicGrid make_grid(int n_points, double x_min = -3.14159265358979323846,
                       double x_max = 3.14159265358979323846);

struct Field {
    PeriodicGrid grid;
    std::vector<double> values;  // length grid.n_points
};

// Fourier-space counterpart of a real Field in real-transform (half-complex)
// layout. Convention: forward is the unscaled DFT sum, inverse divides by
// n_points. The k = 0 coefficient of a constant field c is therefore
// n_points * c; amplitude() gives the 1/n-scaled view.
struct SpectralField {
    PeriodicGrid grid;
    std::vector<Complex> coef;  // length grid.num_modes()

    Complex amplitude(int k) const { return coef[k] / static_cast<double>(grid.n_points); }
};

SpectralField forward_transform(const Field& field);
Field inverse_transform(const SpectralField& spec);

// Multiplies mode k by (i*kappa)^order, kappa the physical wavenumber.
// order must be in 1..4; the Nyquist mode of odd orders is zeroed.
SpectralField spectral_derivative(const SpectralField& spec, int order);

// 2/3-rule dealiasing: zero every mode with k > floor(n/3).
SpectralField dealias(const SpectralField& spec);
int dealias_cutoff(int n_points);

// Low-level transforms used by the integrator inner loops. `half` has
// n/2 + 1 entries, `vals` has n entries; forward is unscaled, inverse
// divides by n. n must be a power of two.
void real_to_half_spectrum(const double* vals, Complex* half, int n);
void half_spectrum_to_real(const Complex* half, double* vals, int n);

// One dominant spatial mode of a snapshot stack: its integer wavenumber and
// the 1/n-scaled complex amplitude at every snapshot time.
struct DominantMode {
    int wavenumber = 0;
    std::vector<Complex> amplitude;
};

// The `count` wavenumbers k >= 1 with the largest time-averaged |amplitude|^2,
// most energetic first, ties broken toward smaller k. `snapshots` is
// time-major with grid.n_points columns.
std::vector<DominantMode> dominant_modes(const Matrix& snapshots, const PeriodicGrid& grid,
                                         int count);

}  // namespace latentflow
