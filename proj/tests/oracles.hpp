#pragma once

// Independent oracles used by the test suites. These deliberately avoid the
// library's own code paths: the DFT is the O(n^2) sum, derivatives come from
// high-resolution central differences, gradients from central finite
// differences on the loss.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracles {

// Unscaled forward DFT by direct summation.
inline std::vector<std::complex<double>> dft(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<std::complex<double>> out(n);
    for (int k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
            double ang = -2.0 * std::numbers::pi * k * j / n;
            acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

// Periodic 4th-order central difference of f sampled on n_fine points over
// [x_min, x_max), restricted to every (n_fine / n_coarse)-th node. Orders 1-4
// via repeated application.
inline std::vector<double> fd_derivative(const std::function<double(double)>& f, int order,
                                         int n_coarse, int n_fine, double x_min, double x_max) {
    const double h = (x_max - x_min) / n_fine;
    std::vector<double> u(n_fine);
    for (int j = 0; j < n_fine; ++j) u[j] = f(x_min + j * h);
    auto wrap = [n_fine](int j) { return ((j % n_fine) + n_fine) % n_fine; };
    for (int pass = 0; pass < order; ++pass) {
        std::vector<double> d(n_fine);
        for (int j = 0; j < n_fine; ++j) {
            d[j] = (-u[wrap(j + 2)] + 8.0 * u[wrap(j + 1)] - 8.0 * u[wrap(j - 1)] + u[wrap(j - 2)]) /
                   (12.0 * h);
        }
        u = d;
    }
    const int stride = n_fine / n_coarse;
    std::vector<double> out(n_coarse);
    for (int j = 0; j < n_coarse; ++j) out[j] = u[j * stride];
    return out;
}

// phi_j(z) for j >= 1 from the integral representation
//   phi_j(z) = \int_0^1 e^{z(1-s)} s^{j-1} / (j-1)! ds,
// evaluated by composite Simpson in extended precision. Independent of the
// Taylor/closed-form split used by the library.
inline std::complex<double> phi_integral(int j, std::complex<double> z) {
    using CL = std::complex<long double>;
    const int n = 1 << 16;  // intervals; Simpson error ~ (|z|/n)^4
    const CL zl(static_cast<long double>(z.real()), static_cast<long double>(z.imag()));
    long double fact = 1.0L;
    for (int i = 2; i < j; ++i) fact *= i;
    auto integrand = [&](long double s) -> CL {
        long double pw = 1.0L;
        for (int i = 0; i < j - 1; ++i) pw *= s;
        return std::exp(zl * (1.0L - s)) * (pw / fact);
    };
    CL acc = integrand(0.0L) + integrand(1.0L);
    for (int i = 1; i < n; ++i) {
        const long double s = static_cast<long double>(i) / n;
        acc += integrand(s) * (i % 2 == 1 ? 4.0L : 2.0L);
    }
    acc /= 3.0L * n;
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

// Singular values of an m x n matrix (rows as flat vectors) by one-sided
// Jacobi: rotate row pairs until mutually orthogonal, then the singular
// values are the row norms.  Unlike a Gram-matrix eigendecomposition this
// resolves tiny singular values down to ~||A|| * machine epsilon.
inline std::vector<double> jacobi_singular_values(std::vector<std::vector<double>> rows) {
    const std::size_t m = rows.size();
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t k = 0; k < rows[p].size(); ++k) {
                    app += rows[p][k] * rows[p][k];
                    aqq += rows[q][k] * rows[q][k];
                    apq += rows[p][k] * rows[q][k];
                }
                if (std::abs(apq) <= 1e-30 + 1e-18 * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double theta = 0.5 * std::atan2(2.0 * apq, app - aqq);
                const double c = std::cos(theta), s = std::sin(theta);
                for (std::size_t k = 0; k < rows[p].size(); ++k) {
                    const double rp = rows[p][k], rq = rows[q][k];
                    rows[p][k] = c * rp + s * rq;
                    rows[q][k] = -s * rp + c * rq;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sigma(m);
    for (std::size_t p = 0; p < m; ++p) {
        double norm2 = 0.0;
        for (double v : rows[p]) norm2 += v * v;
        sigma[p] = std::sqrt(norm2);
    }
    std::sort(sigma.begin(), sigma.end(), std::greater<double>());
    return sigma;
}

// Central finite difference of a scalar function of one packed parameter.
inline double central_diff(const std::function<double()>& eval, double& param, double h) {
    const double saved = param;
    param = saved + h;
    double fp = eval();
    param = saved - h;
    double fm = eval();
    param = saved;
    return (fp - fm) / (2.0 * h);
}

}  // namespace oracles
