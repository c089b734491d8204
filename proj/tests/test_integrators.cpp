#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>
#include "latentflow/integrators.hpp"
#include "oracles.hpp"

using namespace latentflow;

namespace {

// Scalar system carried on the k = 0 mode of a small grid: every mode decays
// with multiplier `lambda`, and the nonlinearity acts on the mean only.
// mean value v = y[0]/n, spectral coefficient of a mean tendency w is n*w.
SemiLinearSystem mean_ode_system(const PeriodicGrid& g, double lambda,
                                 std::function<double(double t, double v)> mean_rhs) {
    SemiLinearSystem sys;
    sys.grid = g;
    sys.state_dim = 1;
    sys.linear_symbol.assign(g.num_modes(), Complex(lambda, 0.0));
    const int n = g.n_points;
    sys.nonlinear_rhs = [n, mean_rhs](double t, const std::vector<Complex>& y,
                                      std::vector<Complex>& out) {
        const double v = y[0].real() / n;
        out[0] = Complex(n * mean_rhs(t, v), 0.0);
    };
    return sys;
}

SemiLinearSystem zero_nonlinearity(const PeriodicGrid& g, std::vector<Complex> symbol) {
    SemiLinearSystem sys;
    sys.grid = g;
    sys.state_dim = 1;
    sys.linear_symbol = std::move(symbol);
    sys.nonlinear_rhs = [](double, const std::vector<Complex>&, std::vector<Complex>&) {};
    return sys;
}

double final_mean(const Trajectory& traj) {
    double s = 0.0;
    const int n = traj.grid.n_points;
    for (int j = 0; j < n; ++j) s += traj.states(traj.states.rows - 1, j);
    return s / n;
}

using Integrator = Trajectory (*)(const SemiLinearSystem&, const std::vector<double>&,
                                  const IntegrationConfig&);
const Integrator kIntegrators[] = {&integrate_if_rk45, &integrate_etdrk4};
const char* kNames[] = {"if_rk45", "etdrk4"};

}  // namespace

// ---------------------------------------------------------------------------
// phi functions
// ---------------------------------------------------------------------------

TEST_CASE("phi_0 is the exponential") {
    for (Complex z : {Complex(0.3, 0.0), Complex(-2.0, 1.5), Complex(0.0, 40.0)})
        CHECK(std::abs(phi_function(0, z) - std::exp(z)) <= 1e-14 * std::abs(std::exp(z)));
}

TEST_CASE("phi_1..phi_3 match the integral representation on both branches") {
    // Magnitudes straddle the |z| = 0.5 Taylor/closed-form boundary and cover
    // the damped and oscillatory directions the schemes actually use.
    const Complex zs[] = {{0.03, 0.0},  {-0.3, 0.2},  {0.49, 0.1},   {-0.51, 0.0},
                          {0.0, 0.49},  {0.0, 0.51},  {-2.0, 0.0},   {0.0, 3.0},
                          {-30.0, 0.0}, {0.0, 20.0},  {-200.0, 0.0}, {1.0, 1.0}};
    for (int j = 1; j <= 3; ++j) {
        for (Complex z : zs) {
            const Complex want = oracles::phi_integral(j, z);
            const Complex got = phi_function(j, z);
            CHECK(std::abs(got - want) <= 1e-9 * std::abs(want) + 1e-15);
        }
    }
}

TEST_CASE("phi recurrence phi_{j+1}(z) = (phi_j(z) - 1/j!)/z") {
    const double fact[] = {1.0, 1.0, 2.0};
    for (Complex z : {Complex(0.02, 0.01), Complex(-0.4, 0.0), Complex(3.0, -2.0),
                      Complex(0.0, 25.0), Complex(-40.0, 0.0)}) {
        for (int j = 0; j <= 2; ++j) {
            const Complex lhs = phi_function(j + 1, z);
            const Complex rhs = (phi_function(j, z) - 1.0 / fact[j]) / z;
            CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + 1.0 / std::abs(z) * 1e-16 + 1e-300) + 1e-13);
        }
    }
}

TEST_CASE("phi_matrix: 1x1 agrees with the scalar path") {
    Complex a = {-1.7, 0.9}, out;
    for (int j = 0; j <= 3; ++j) {
        phi_matrix(j, &a, 1, &out);
        CHECK(out == phi_function(j, a));
    }
}

TEST_CASE("phi_matrix: wave-operator block has the analytic exponential") {
    // A = [[0, 1], [-kappa^2, 0]] with eigenvalues +-i kappa:
    // exp(A) = [[cos k, sin k / k], [-k sin k, cos k]].
    const double kappa = 3.0;
    const Complex a[4] = {{0, 0}, {1, 0}, {-kappa * kappa, 0}, {0, 0}};
    Complex e[4];
    phi_matrix(0, a, 2, e);
    CHECK(e[0].real() == doctest::Approx(std::cos(kappa)).epsilon(1e-13));
    CHECK(e[1].real() == doctest::Approx(std::sin(kappa) / kappa).epsilon(1e-13));
    CHECK(e[2].real() == doctest::Approx(-kappa * std::sin(kappa)).epsilon(1e-13));
    CHECK(e[3].real() == doctest::Approx(std::cos(kappa)).epsilon(1e-13));
    for (int i = 0; i < 4; ++i) CHECK(std::abs(e[i].imag()) < 1e-13);
}

TEST_CASE("phi_matrix: nilpotent (confluent) block") {
    // A = [[0, 1], [0, 0]]: exp(A) = I + A, phi_1(A) = I + A/2,
    // phi_2(A) = I/2 + A/6, phi_3(A) = I/6 + A/24.
    const Complex a[4] = {{0, 0}, {1, 0}, {0, 0}, {0, 0}};
    const double diag[] = {1.0, 1.0, 0.5, 1.0 / 6.0};
    const double off[] = {1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0};
    for (int j = 0; j <= 3; ++j) {
        Complex f[4];
        phi_matrix(j, a, 2, f);
        CHECK(std::abs(f[0] - diag[j]) < 1e-14);
        CHECK(std::abs(f[1] - off[j]) < 1e-14);
        CHECK(std::abs(f[2]) < 1e-14);
        CHECK(std::abs(f[3] - diag[j]) < 1e-14);
    }
}

TEST_CASE("phi_matrix: near-confluent block stays close to the nilpotent limit") {
    const Complex a[4] = {{0, 0}, {1, 0}, {-1e-16, 0}, {0, 0}};
    Complex f[4];
    phi_matrix(0, a, 2, f);
    CHECK(std::abs(f[0] - 1.0) < 1e-12);
    CHECK(std::abs(f[1] - 1.0) < 1e-12);
}

// ---------------------------------------------------------------------------
// Exact linear behaviour
// ---------------------------------------------------------------------------

TEST_CASE("uniform decay: L = -1, no nonlinearity, u0 = 1 -> e^{-1}") {
    auto g = make_grid(16);
    auto sys = zero_nonlinearity(g, std::vector<Complex>(g.num_modes(), Complex(-1.0, 0.0)));
    IntegrationConfig cfg;
    cfg.t_start = 0.0;
    cfg.t_end = 1.0;
    cfg.snapshot_interval = 1.0;
    cfg.initial_step = 0.05;
    std::vector<double> u0(16, 1.0);
    for (int w = 0; w < 2; ++w) {
        CAPTURE(kNames[w]);
        auto traj = kIntegrators[w](sys, u0, cfg);
        REQUIRE(traj.times.size() == 2);
        CHECK(traj.times[0] == 0.0);
        CHECK(traj.times[1] == 1.0);
        for (int j = 0; j < 16; ++j)
            CHECK(traj.states(1, j) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
        CHECK(traj.accepted_steps >= 1);
    }
}

TEST_CASE("zero system: trajectory is constant, bit for bit") {
    auto g = make_grid(16);
    auto sys = zero_nonlinearity(g, std::vector<Complex>(g.num_modes(), Complex(0.0, 0.0)));
    IntegrationConfig cfg;
    cfg.t_end = 2.0;
    cfg.snapshot_interval = 0.25;
    cfg.initial_step = 0.1;
    std::vector<double> u0(16);
    for (int j = 0; j < 16; ++j) u0[j] = std::sin(0.37 * j) + 0.2;
    for (int w = 0; w < 2; ++w) {
        CAPTURE(kNames[w]);
        auto traj = kIntegrators[w](sys, u0, cfg);
        REQUIRE(traj.times.size() == 9);
        for (int i = 1; i < traj.states.rows; ++i)
            for (int j = 0; j < 16; ++j) CHECK(traj.states(i, j) == traj.states(0, j));
    }
}

TEST_CASE("heat-kernel decay of mode 1 under ETDRK4") {
    auto g = make_grid(64);
    std::vector<Complex> symbol(g.num_modes());
    for (int k = 0; k < g.num_modes(); ++k) {
        const double kap = g.wavenumber(k);
        symbol[k] = Complex(-kap * kap, 0.0);
    }
    auto sys = zero_nonlinearity(g, std::move(symbol));
    std::vector<double> u0(64);
    for (int j = 0; j < 64; ++j) u0[j] = std::cos(g.node(j));
    IntegrationConfig cfg;
    cfg.t_end = 1.0;
    cfg.snapshot_interval = 1.0;
    cfg.initial_step = 0.02;
    auto traj = integrate_etdrk4(sys, u0, cfg);
    for (int j = 0; j < 64; ++j)
        CHECK(traj.states(1, j) ==
              doctest::Approx(std::exp(-1.0) * std::cos(g.node(j))).epsilon(1e-6).scale(1.0));
}

// ---------------------------------------------------------------------------
// Accuracy on a forced linear problem with a closed-form solution
// ---------------------------------------------------------------------------

TEST_CASE("forced decay tracks the closed-form solution within tolerance") {
    // v' = -v + sin t, v(0) = 1  =>  v(t) = e^{-t}*3/2 + (sin t - cos t)/2.
    auto g = make_grid(8);
    auto sys = mean_ode_system(g, -1.0, [](double t, double) { return std::sin(t); });
    IntegrationConfig cfg;
    cfg.t_end = 4.0;
    cfg.snapshot_interval = 4.0;
    cfg.initial_step = 0.2;
    std::vector<double> u0(8, 1.0);
    const double exact = std::exp(-4.0) * 1.5 + 0.5 * (std::sin(4.0) - std::cos(4.0));
    for (int w = 0; w < 2; ++w) {
        CAPTURE(kNames[w]);
        auto traj = kIntegrators[w](sys, u0, cfg);
        CHECK(std::abs(final_mean(traj) - exact) < 1e-5);
    }
}

TEST_CASE("tightening the tolerance 100x never increases the final error") {
    auto g = make_grid(8);
    auto sys = mean_ode_system(g, -1.0, [](double t, double) { return std::sin(t); });
    std::vector<double> u0(8, 1.0);
    const double exact = std::exp(-4.0) * 1.5 + 0.5 * (std::sin(4.0) - std::cos(4.0));
    for (int w = 0; w < 2; ++w) {
        CAPTURE(kNames[w]);
        double prev = -1.0;
        for (double tol : {1e-3, 1e-5, 1e-7}) {
            IntegrationConfig cfg;
            cfg.rel_tol = cfg.abs_tol = tol;
            cfg.t_end = 4.0;
            cfg.snapshot_interval = 4.0;
            cfg.initial_step = 0.2;
            const double err = std::abs(final_mean(kIntegrators[w](sys, u0, cfg)) - exact);
            if (prev >= 0.0) CHECK(err <= prev + 1e-15);
            prev = err;
        }
    }
}

// ---------------------------------------------------------------------------
// Convergence order on a nonlinear problem with a closed-form solution
// ---------------------------------------------------------------------------

TEST_CASE("fixed-step convergence slopes match the nominal orders") {
    // v' = -v + v^2/4, v(0) = 1: Bernoulli equation, w = 1/v gives
    // w' = w - 1/4, so v(t) = 1 / (1/4 + 3/4 e^t).
    auto g = make_grid(8);
    auto sys = mean_ode_system(g, -1.0, [](double, double v) { return 0.25 * v * v; });
    std::vector<double> u0(8, 1.0);
    const double exact = 1.0 / (0.25 + 0.75 * std::exp(1.0));

    auto measure = [&](Integrator integrate, double h) {
        IntegrationConfig cfg;
        cfg.t_end = 1.0;
        cfg.snapshot_interval = 1.0;
        cfg.fixed_step = h;
        return std::abs(final_mean(integrate(sys, u0, cfg)) - exact);
    };

    SUBCASE("Dormand-Prince pair is 5th order") {
        std::vector<double> errs;
        for (double h : {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32}) errs.push_back(measure(&integrate_if_rk45, h));
        for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
            const double slope = std::log2(errs[i] / errs[i + 1]);
            CHECK(slope == doctest::Approx(5.0).epsilon(0.08));
        }
    }
    SUBCASE("ETDRK4 is 4th order") {
        std::vector<double> errs;
        for (double h : {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32}) errs.push_back(measure(&integrate_etdrk4, h));
        for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
            const double slope = std::log2(errs[i] / errs[i + 1]);
            CHECK(slope == doctest::Approx(4.0).epsilon(0.1));
        }
    }
}

// ---------------------------------------------------------------------------
// Failure modes
// ---------------------------------------------------------------------------

TEST_CASE("step budget exhaustion raises and carries the partial trajectory") {
    auto g = make_grid(8);
    auto sys = mean_ode_system(g, -1.0, [](double t, double) { return std::sin(t); });
    IntegrationConfig cfg;
    cfg.t_end = 10.0;
    cfg.snapshot_interval = 0.5;
    cfg.initial_step = 1e-4;
    cfg.max_steps = 5;
    std::vector<double> u0(8, 1.0);
    for (int w = 0; w < 2; ++w) {
        CAPTURE(kNames[w]);
        try {
            kIntegrators[w](sys, u0, cfg);
            FAIL("expected IntegrationError");
        } catch (const IntegrationError& e) {
            CHECK(std::string(e.what()).find("budget") != std::string::npos);
            CHECK(e.partial().times.size() >= 1);
            CHECK(e.partial().times[0] == 0.0);
            CHECK(e.failure_time() >= 0.0);
        }
    }
}

TEST_CASE("finite-time blow-up is reported near the singular time") {
    // v' = v^2, v(0) = 5 blows up at t = 0.2.
    auto g = make_grid(8);
    auto sys = mean_ode_system(g, 0.0, [](double, double v) { return v * v; });
    // Mode 0 has multiplier 0; keep all modes at 0 for a pure quadrature test.
    std::vector<double> u0(8, 5.0);
    IntegrationConfig cfg;
    cfg.t_end = 1.0;
    cfg.snapshot_interval = 1.0;
    cfg.initial_step = 1e-3;
    for (int w = 0; w < 2; ++w) {
        CAPTURE(kNames[w]);
        try {
            kIntegrators[w](sys, u0, cfg);
            FAIL("expected IntegrationError");
        } catch (const IntegrationError& e) {
            CHECK(e.failure_time() > 0.1);
            CHECK(e.failure_time() < 0.45);
            for (double v : e.partial().states.data) CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("huge tolerances let the state overflow and trip the finite check") {
    auto g = make_grid(8);
    auto sys = mean_ode_system(g, 0.0, [](double, double v) { return v * v; });
    std::vector<double> u0(8, 5.0);
    IntegrationConfig cfg;
    cfg.rel_tol = cfg.abs_tol = 1e12;
    cfg.t_end = 1.0;
    cfg.snapshot_interval = 1.0;
    cfg.initial_step = 0.05;
    try {
        integrate_if_rk45(sys, u0, cfg);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
    }
}

// ---------------------------------------------------------------------------
// Input validation and determinism
// ---------------------------------------------------------------------------

TEST_CASE("invalid configurations and malformed systems are rejected") {
    auto g = make_grid(16);
    auto sys = zero_nonlinearity(g, std::vector<Complex>(g.num_modes(), Complex(-1.0, 0.0)));
    std::vector<double> u0(16, 1.0);
    IntegrationConfig good;
    good.t_end = 1.0;
    good.snapshot_interval = 0.5;

    auto bad = good;
    bad.t_end = -1.0;
    CHECK_THROWS_AS(integrate_if_rk45(sys, u0, bad), std::invalid_argument);
    bad = good;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate_if_rk45(sys, u0, bad), std::invalid_argument);
    bad = good;
    bad.snapshot_interval = 0.0;
    CHECK_THROWS_AS(integrate_etdrk4(sys, u0, bad), std::invalid_argument);

    CHECK_THROWS_AS(integrate_if_rk45(sys, std::vector<double>(7, 1.0), good),
                    std::invalid_argument);

    auto short_symbol = sys;
    short_symbol.linear_symbol.pop_back();
    CHECK_THROWS_AS(integrate_if_rk45(short_symbol, u0, good), std::invalid_argument);

    auto no_rhs = sys;
    no_rhs.nonlinear_rhs = nullptr;
    CHECK_THROWS_AS(integrate_etdrk4(no_rhs, u0, good), std::invalid_argument);

    std::vector<double> u_nan(16, 1.0);
    u_nan[3] = std::nan("");
    CHECK_THROWS_AS(integrate_if_rk45(sys, u_nan, good), std::invalid_argument);
}

TEST_CASE("identical inputs give bit-identical trajectories") {
    // A genuinely nonlinear spectral system: mild damping plus the advection
    // product u*u_x computed pseudo-spectrally.
    auto g = make_grid(16);
    SemiLinearSystem sys;
    sys.grid = g;
    sys.state_dim = 1;
    sys.linear_symbol.resize(g.num_modes());
    for (int k = 0; k < g.num_modes(); ++k) {
        const double kap = g.wavenumber(k);
        sys.linear_symbol[k] = Complex(kap * kap - 0.3 * kap * kap * kap * kap, 0.0);
    }
    sys.nonlinear_rhs = [g](double, const std::vector<Complex>& y, std::vector<Complex>& out) {
        SpectralField spec{g, y};
        auto u = inverse_transform(spec);
        for (double& v : u.values) v = v * v;
        auto sq = dealias(forward_transform(u));
        for (int k = 0; k < g.num_modes(); ++k)
            out[k] = Complex(0.0, -0.5 * g.wavenumber(k)) * sq.coef[k];
    };
    std::vector<double> u0(16);
    for (int j = 0; j < 16; ++j) u0[j] = 0.5 * std::cos(g.node(j) + 1.0);
    IntegrationConfig cfg;
    cfg.t_end = 5.0;
    cfg.snapshot_interval = 0.5;
    cfg.initial_step = 0.01;
    for (int w = 0; w < 2; ++w) {
        CAPTURE(kNames[w]);
        auto a = kIntegrators[w](sys, u0, cfg);
        auto b = kIntegrators[w](sys, u0, cfg);
        CHECK(a.accepted_steps == b.accepted_steps);
        CHECK(a.rejected_steps == b.rejected_steps);
        REQUIRE(a.states.data.size() == b.states.data.size());
        for (std::size_t i = 0; i < a.states.data.size(); ++i)
            CHECK(a.states.data[i] == b.states.data[i]);
    }
}

TEST_CASE("snapshots land on exact multiples of the interval") {
    auto g = make_grid(8);
    auto sys = mean_ode_system(g, -0.2, [](double t, double) { return std::cos(t); });
    IntegrationConfig cfg;
    cfg.t_start = 3.0;
    cfg.t_end = 5.0;
    cfg.snapshot_interval = 0.1;
    cfg.initial_step = 0.37;  // deliberately incommensurate
    std::vector<double> u0(8, 0.3);
    for (int w = 0; w < 2; ++w) {
        CAPTURE(kNames[w]);
        auto traj = kIntegrators[w](sys, u0, cfg);
        REQUIRE(traj.times.size() == 21);
        CHECK(traj.times[0] == 3.0);
        for (int i = 0; i < 21; ++i) CHECK(traj.times[i] == 3.0 + i * 0.1);
        for (std::size_t i = 1; i < traj.times.size(); ++i)
            CHECK(traj.times[i] > traj.times[i - 1]);
    }
}
