#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "latentflow/pde_models.hpp"
#include "oracles.hpp"

using namespace latentflow;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Mode-k complex amplitude (1/n-scaled) of one trajectory row.
Complex mode_amplitude(const Trajectory& traj, int row, int k) {
    Field f{traj.grid, std::vector<double>(traj.grid.n_points)};
    for (int j = 0; j < traj.grid.n_points; ++j) f.values[j] = traj.states(row, j);
    return forward_transform(f).amplitude(k);
}

}  // namespace

TEST_CASE("initial condition is A cos(kx + phi) and validates the wavenumber") {
    auto g = make_grid(64);
    InitialCondition ic;  // 0.5 cos(x + 1)
    auto f = make_initial_condition(g, ic);
    for (int j = 0; j < 64; ++j)
        CHECK(f.values[j] == doctest::Approx(0.5 * std::cos(g.node(j) + 1.0)).epsilon(1e-15));

    InitialCondition bad;
    bad.wavenumber = 32;
    CHECK_THROWS_AS(make_initial_condition(g, bad), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    auto g = make_grid(64);
    CHECK_THROWS_AS(fkdv_system(FkdvParams{0.0}, g), std::invalid_argument);
    CHECK_THROWS_AS(fkdv_system(FkdvParams{-1.0}, g), std::invalid_argument);
    CHECK_THROWS_AS(ks_system(KsParams{0.0}, g), std::invalid_argument);
}

TEST_CASE("zero state is a fixed point of all three systems") {
    auto g = make_grid(64);
    std::vector<double> zero1(64, 0.0), zero2(128, 0.0);
    CHECK(max_abs(full_tendency(fkdv_system({}, g), zero1)) == 0.0);
    CHECK(max_abs(full_tendency(ks_system({}, g), zero1)) == 0.0);
    CHECK(max_abs(full_tendency(sg_system(g), zero2)) == 0.0);
}

TEST_CASE("constant states: fKdV is stationary, sin(pi) kills the SG forcing") {
    auto g = make_grid(64);
    std::vector<double> c(64, 1.3);
    CHECK(max_abs(full_tendency(fkdv_system({}, g), c)) < 1e-12);

    std::vector<double> pi_rest(128, 0.0);
    for (int j = 0; j < 64; ++j) pi_rest[j] = kPi;
    CHECK(max_abs(full_tendency(sg_system(g), pi_rest)) < 1e-12);
}

TEST_CASE("fKdV tendency of 0.5 cos x matches the finite-difference oracle") {
    auto g = make_grid(64);
    const double F = 1.5;
    auto f = [](double x) { return 0.5 * std::cos(x); };
    auto d1 = oracles::fd_derivative(f, 1, 64, 4096, g.x_min, g.x_max);
    auto d3 = oracles::fd_derivative(f, 3, 64, 4096, g.x_min, g.x_max);
    auto got = full_tendency(fkdv_system({}, g), [&] {
        std::vector<double> u(64);
        for (int j = 0; j < 64; ++j) u[j] = f(g.node(j));
        return u;
    }());
    for (int j = 0; j < 64; ++j) {
        const double u = f(g.node(j));
        const double want = -d3[j] / 6.0 + (F - 1.0) * d1[j] - 1.5 * u * d1[j];
        CHECK(got[j] == doctest::Approx(want).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("KS tendency of 0.5 cos x matches the finite-difference oracle") {
    auto g = make_grid(64);
    const double nu = 16.0 / 71.0;
    auto f = [](double x) { return 0.5 * std::cos(x); };
    auto d1 = oracles::fd_derivative(f, 1, 64, 4096, g.x_min, g.x_max);
    auto d2 = oracles::fd_derivative(f, 2, 64, 4096, g.x_min, g.x_max);
    auto d4 = oracles::fd_derivative(f, 4, 64, 4096, g.x_min, g.x_max);
    std::vector<double> u(64);
    for (int j = 0; j < 64; ++j) u[j] = f(g.node(j));
    auto got = full_tendency(ks_system({}, g), u);
    for (int j = 0; j < 64; ++j) {
        const double want = -u[j] * d1[j] - d2[j] - nu * d4[j];
        CHECK(got[j] == doctest::Approx(want).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("SG tendency matches (v, u_xx - sin u) with FD second derivative") {
    auto g = make_grid(64);
    auto fu = [](double x) { return 0.5 * std::cos(x + 1.0); };
    auto d2 = oracles::fd_derivative(fu, 2, 64, 4096, g.x_min, g.x_max);
    std::vector<double> state(128);
    for (int j = 0; j < 64; ++j) {
        state[j] = fu(g.node(j));
        state[64 + j] = 0.3 * std::sin(2.0 * g.node(j));  // v
    }
    auto got = full_tendency(sg_system(g), state);
    for (int j = 0; j < 64; ++j) {
        CHECK(got[j] == doctest::Approx(state[64 + j]).epsilon(1e-12).scale(1.0));
        const double want = d2[j] - std::sin(state[j]);
        CHECK(got[64 + j] == doctest::Approx(want).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("KS dispersion: mode-1 growth rate is 1 - nu = 55/71") {
    auto g = make_grid(64);
    auto sys = ks_system({}, g);
    CHECK(sys.linear_symbol[1].real() == doctest::Approx(55.0 / 71.0).epsilon(1e-15));
    CHECK(sys.linear_symbol[1].imag() == 0.0);

    // Dynamic check: a tiny mode-1 seed grows like e^{sigma t}.
    std::vector<double> u0(64);
    for (int j = 0; j < 64; ++j) u0[j] = 1e-6 * std::cos(g.node(j));
    IntegrationConfig cfg;
    cfg.t_end = 1.0;
    cfg.snapshot_interval = 1.0;
    auto traj = integrate_if_rk45(sys, u0, cfg);
    const double ratio =
        std::abs(mode_amplitude(traj, 1, 1)) / std::abs(mode_amplitude(traj, 0, 1));
    CHECK(std::log(ratio) == doctest::Approx(55.0 / 71.0).epsilon(1e-5));
}

TEST_CASE("fKdV dispersion: purely imaginary symbol, zero Nyquist phase") {
    auto g = make_grid(64);
    auto sys = fkdv_system({}, g);  // F = 1.5
    for (int k = 0; k < g.num_modes(); ++k) CHECK(sys.linear_symbol[k].real() == 0.0);
    CHECK(sys.linear_symbol[1].imag() == doctest::Approx(1.0 / 6.0 + 0.5).epsilon(1e-15));
    CHECK(sys.linear_symbol[32] == Complex(0.0, 0.0));
}

TEST_CASE("SG linearized oscillation frequency of mode 1 is sqrt(2)") {
    auto g = make_grid(64);
    auto sys = sg_system(g);
    std::vector<double> u0(128, 0.0);
    for (int j = 0; j < 64; ++j) u0[j] = 1e-4 * std::cos(g.node(j));
    IntegrationConfig cfg;
    cfg.t_end = 2.0;
    cfg.snapshot_interval = 0.01;
    auto traj = integrate_etdrk4(sys, u0, cfg);
    // a(t) ~ a0 cos(omega t): locate the first sign change of the mode-1 real
    // part and interpolate the crossing, omega = (pi/2) / t_cross.
    double prev = mode_amplitude(traj, 0, 1).real();
    double t_cross = -1.0;
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        const double cur = mode_amplitude(traj, static_cast<int>(i), 1).real();
        if ((prev > 0.0) != (cur > 0.0)) {
            const double frac = prev / (prev - cur);
            t_cross = traj.times[i - 1] + frac * (traj.times[i] - traj.times[i - 1]);
            break;
        }
        prev = cur;
    }
    REQUIRE(t_cross > 0.0);
    CHECK((kPi / 2.0) / t_cross == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("conserved_mean and sg_energy functionals") {
    auto g = make_grid(64);
    Field c{g, std::vector<double>(64, 2.75)};
    CHECK(conserved_mean(c) == doctest::Approx(2.75).epsilon(1e-15));

    Field zero{g, std::vector<double>(64, 0.0)};
    CHECK(sg_energy(zero, zero) == 0.0);

    Field pi_field{g, std::vector<double>(64, kPi)};
    CHECK(sg_energy(pi_field, zero) == doctest::Approx(4.0 * kPi).epsilon(1e-12));
}

TEST_CASE("fKdV and KS conserve the spatial mean over the full window") {
    auto g = make_grid(64);
    auto ic = make_initial_condition(g, {});
    IntegrationConfig cfg;
    cfg.t_end = 400.0;
    cfg.snapshot_interval = 2.0;

    for (auto* build : {+[](const PeriodicGrid& gr) { return fkdv_system({}, gr); },
                        +[](const PeriodicGrid& gr) { return ks_system({}, gr); }}) {
        auto traj = integrate_if_rk45(build(g), ic.values, cfg);
        Field f0{g, std::vector<double>(64)};
        for (int j = 0; j < 64; ++j) f0.values[j] = traj.states(0, j);
        const double m0 = conserved_mean(f0);
        double worst = 0.0;
        for (int i = 0; i < traj.states.rows; ++i) {
            Field f{g, std::vector<double>(64)};
            for (int j = 0; j < 64; ++j) f.values[j] = traj.states(i, j);
            worst = std::max(worst, std::abs(conserved_mean(f) - m0));
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("SG energy drifts less than 1e-4 relative over 50 time units") {
    auto g = make_grid(64);
    auto sys = sg_system(g);
    auto icu = make_initial_condition(g, {});
    std::vector<double> u0(128, 0.0);
    for (int j = 0; j < 64; ++j) u0[j] = icu.values[j];
    IntegrationConfig cfg;
    cfg.t_end = 50.0;
    cfg.snapshot_interval = 0.5;
    auto traj = integrate_etdrk4(sys, u0, cfg);

    auto energy_at = [&](int row) {
        Field u{g, std::vector<double>(64)}, v{g, std::vector<double>(64)};
        for (int j = 0; j < 64; ++j) {
            u.values[j] = traj.states(row, j);
            v.values[j] = traj.states(row, 64 + j);
        }
        return sg_energy(u, v);
    };
    const double e0 = energy_at(0);
    REQUIRE(e0 > 0.0);
    double worst = 0.0;
    for (int i = 0; i < traj.states.rows; ++i)
        worst = std::max(worst, std::abs(energy_at(i) - e0) / e0);
    CHECK(worst < 1e-4);
}
