#include "latentflow/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace latentflow {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 DIT transform. sign = -1 forward, +1 inverse
// (unscaled in both directions).
void fft_inplace(Complex* a, int n, int sign) {
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / len;
        const Complex wlen(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (int j = 0; j < len / 2; ++j) {
                Complex u = a[i + j];
                Complex v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace

std::vector<double> PeriodicGrid::nodes() const {
    std::vector<double> xs(n_points);
    for (int j = 0; j < n_points; ++j) xs[j] = node(j);
    return xs;
}

PeriodicGrid make_grid(int n_points, double x_min, double x_max) {
    if (!is_power_of_two(n_points))
        throw std::invalid_argument("make_grid: n_points must be a power of two, got " +
                                    std::to_string(n_points));
    if (!(x_max > x_min))
        throw std::invalid_argument("make_grid: x_max must exceed x_min");
    return PeriodicGrid{n_points, x_min, x_max};
}

void real_to_half_spectrum(const double* vals, Complex* half, int n) {
    std::vector<Complex> buf(n);
    for (int j = 0; j < n; ++j) buf[j] = Complex(vals[j], 0.0);
    fft_inplace(buf.data(), n, -1);
    std::copy(buf.begin(), buf.begin() + n / 2 + 1, half);
}

void half_spectrum_to_real(const Complex* half, double* vals, int n) {
    std::vector<Complex> buf(n);
    buf[0] = half[0];
    for (int k = 1; k < n / 2; ++k) {
        buf[k] = half[k];
        buf[n - k] = std::conj(half[k]);
    }
    buf[n / 2] = half[n / 2];
    fft_inplace(buf.data(), n, +1);
    const double inv_n = 1.0 / n;
    for (int j = 0; j < n; ++j) vals[j] = buf[j].real() * inv_n;
}

SpectralField forward_transform(const Field& field) {
    const int n = field.grid.n_points;
    if (static_cast<int>(field.values.size()) != n)
        throw std::invalid_argument("forward_transform: field has " +
                                    std::to_string(field.values.size()) + " values, grid has " +
                                    std::to_string(n) + " points");
    if (!is_power_of_two(n))
        throw std::invalid_argument("forward_transform: n_points must be a power of two");
    for (int j = 0; j < n; ++j)
        if (!std::isfinite(field.values[j]))
            throw std::invalid_argument("forward_transform: non-finite value " +
                                        std::to_string(field.values[j]) + " at node " +
                                        std::to_string(j));
    SpectralField out{field.grid, std::vector<Complex>(field.grid.num_modes())};
    real_to_half_spectrum(field.values.data(), out.coef.data(), n);
    return out;
}

Field inverse_transform(const SpectralField& spec) {
    const int n = spec.grid.n_points;
    if (static_cast<int>(spec.coef.size()) != spec.grid.num_modes())
        throw std::invalid_argument("inverse_transform: coefficient count " +
                                    std::to_string(spec.coef.size()) + " does not match grid");
    Field out{spec.grid, std::vector<double>(n)};
    half_spectrum_to_real(spec.coef.data(), out.values.data(), n);
    return out;
}

SpectralField spectral_derivative(const SpectralField& spec, int order) {
    if (order < 1 || order > 4)
        throw std::invalid_argument("spectral_derivative: order must be in 1..4, got " +
                                    std::to_string(order));
    SpectralField out = spec;
    const int nk = spec.grid.num_modes();
    for (int k = 0; k < nk; ++k) {
        Complex ik(0.0, spec.grid.wavenumber(k));
        Complex mult(1.0, 0.0);
        for (int p = 0; p < order; ++p) mult *= ik;
        out.coef[k] *= mult;
    }
    if (order % 2 == 1) out.coef[nk - 1] = Complex(0.0, 0.0);  // Nyquist
    return out;
}

int dealias_cutoff(int n_points) { return n_points / 3; }

SpectralField dealias(const SpectralField& spec) {
    SpectralField out = spec;
    const int cutoff = dealias_cutoff(spec.grid.n_points);
    for (int k = cutoff + 1; k < static_cast<int>(out.coef.size()); ++k)
        out.coef[k] = Complex(0.0, 0.0);
    return out;
}

std::vector<DominantMode> dominant_modes(const Matrix& snapshots, const PeriodicGrid& grid,
                                         int count) {
    if (snapshots.rows < 1) throw std::invalid_argument("dominant_modes: empty snapshot stack");
    if (snapshots.cols != grid.n_points)
        throw std::invalid_argument("dominant_modes: snapshot width " +
                                    std::to_string(snapshots.cols) + " does not match grid size " +
                                    std::to_string(grid.n_points));
    const int n = grid.n_points;
    const int nk = grid.num_modes();
    const int available = nk - 1;  // k >= 1
    if (count < 1 || count > available)
        throw std::invalid_argument("dominant_modes: count " + std::to_string(count) +
                                    " outside 1.." + std::to_string(available));

    // Amplitude series for every mode, then rank by time-averaged energy.
    Matrix re(snapshots.rows, nk), im(snapshots.rows, nk);
    std::vector<Complex> half(nk);
    for (int i = 0; i < snapshots.rows; ++i) {
        real_to_half_spectrum(snapshots.row(i), half.data(), n);
        for (int k = 0; k < nk; ++k) {
            re(i, k) = half[k].real() / n;
            im(i, k) = half[k].imag() / n;
        }
    }
    std::vector<std::pair<double, int>> ranking;  // (-energy, k) so sort puts big first
    for (int k = 1; k < nk; ++k) {
        double e = 0.0;
        for (int i = 0; i < snapshots.rows; ++i)
            e += re(i, k) * re(i, k) + im(i, k) * im(i, k);
        ranking.emplace_back(-e / snapshots.rows, k);
    }
    std::sort(ranking.begin(), ranking.end());

    std::vector<DominantMode> out;
    out.reserve(count);
    for (int m = 0; m < count; ++m) {
        const int k = ranking[m].second;
        DominantMode mode;
        mode.wavenumber = k;
        mode.amplitude.resize(snapshots.rows);
        for (int i = 0; i < snapshots.rows; ++i) mode.amplitude[i] = Complex(re(i, k), im(i, k));
        out.push_back(std::move(mode));
    }
    return out;
}

}  // namespace latentflow
