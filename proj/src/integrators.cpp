#include "latentflow/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace latentflow {
namespace {

bool all_finite(const std::vector<Complex>& y) {
    for (const Complex& c : y)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// Taylor tail of phi_j about 0: sum_{m>=0} z^m / (m+j)!.  Converges fast for
// |z| < 0.5; 24 terms leave a remainder below 1e-40.
Complex phi_taylor(int j, Complex z) {
    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    Complex term = 1.0 / fact;  // m = 0 term, 1/j!
    Complex sum = term;
    for (int m = 1; m <= 24; ++m) {
        term *= z / static_cast<double>(m + j);
        sum += term;
    }
    return sum;
}

// d/dz phi_j(z) = sum_{m>=1} m z^{m-1} / (m+j)!  (Taylor branch).
Complex phi_deriv_taylor(int j, Complex z) {
    double fact = 1.0;
    for (int i = 2; i <= j + 1; ++i) fact *= i;
    Complex power = 1.0 / fact;  // z^{m-1}/(m+j)! at m = 1
    Complex sum = power;
    for (int m = 2; m <= 24; ++m) {
        power *= z / static_cast<double>(m + j);
        sum += static_cast<double>(m) * power;
    }
    return sum;
}

Complex phi_deriv(int j, Complex z) {
    if (j == 0) return std::exp(z);
    if (std::abs(z) < 0.5) return phi_deriv_taylor(j, z);
    // phi_j'(z) = (phi_{j-1}(z) - j*phi_j(z)) / z away from the origin.
    return (phi_function(j - 1, z) - static_cast<double>(j) * phi_function(j, z)) / z;
}

}  // namespace

Complex phi_function(int j, Complex z) {
    if (j < 0 || j > 3) throw std::invalid_argument("phi_function: j must be in 0..3");
    if (j == 0) return std::exp(z);
    if (std::abs(z) < 0.5) return phi_taylor(j, z);
    const Complex ez = std::exp(z);
    switch (j) {
        case 1: return (ez - 1.0) / z;
        case 2: return (ez - 1.0 - z) / (z * z);
        default: return (ez - 1.0 - z - 0.5 * z * z) / (z * z * z);
    }
}

void phi_matrix(int j, const Complex* a, int dim, Complex* out) {
    if (dim == 1) {
        out[0] = phi_function(j, a[0]);
        return;
    }
    if (dim != 2) throw std::invalid_argument("phi_matrix: dim must be 1 or 2");
    const Complex tr = a[0] + a[3];
    const Complex det = a[0] * a[3] - a[1] * a[2];
    Complex disc = std::sqrt(tr * tr - 4.0 * det);
    // Orient the root so tr + disc does not cancel.
    if ((conj(tr) * disc).real() < 0.0) disc = -disc;
    Complex l1 = 0.5 * (tr + disc);
    Complex l2 = (std::abs(l1) > 0.0) ? det / l1 : 0.5 * (tr - disc);

    const double scale = 1.0 + std::abs(l1) + std::abs(l2);
    if (std::abs(l1 - l2) > 1e-7 * scale) {
        // f(A) = f(l1) I + [f(l2) - f(l1)]/(l2 - l1) (A - l1 I).
        const Complex f1 = phi_function(j, l1);
        const Complex slope = (phi_function(j, l2) - f1) / (l2 - l1);
        out[0] = f1 + slope * (a[0] - l1);
        out[1] = slope * a[1];
        out[2] = slope * a[2];
        out[3] = f1 + slope * (a[3] - l1);
    } else {
        // Confluent pair: f(A) = f(l) I + f'(l) (A - l I).
        const Complex l = 0.5 * (l1 + l2);
        const Complex f = phi_function(j, l);
        const Complex fp = phi_deriv(j, l);
        out[0] = f + fp * (a[0] - l);
        out[1] = fp * a[1];
        out[2] = fp * a[2];
        out[3] = f + fp * (a[3] - l);
    }
}

namespace {

// ---------------------------------------------------------------------------
// Shared adaptive driver
// ---------------------------------------------------------------------------

// Trial step: advance `y` at time t by h into y_new and return the worst
// componentwise ratio of local-error estimate to tolerance (<= 1 accepts).
// `resume` tells the stepper whether `y` is the same state as on the previous
// call (a rejected retry may then reuse its first-stage evaluation).
enum class StepContext { Fresh, AfterAccept, AfterReject };
using TrialStep = std::function<double(const std::vector<Complex>& y, double t, double h,
                                       std::vector<Complex>& y_new, StepContext ctx)>;

void validate_inputs(const SemiLinearSystem& sys, const std::vector<double>& u0,
                     const IntegrationConfig& cfg) {
    const int m = sys.grid.num_modes();
    if (sys.state_dim < 1 || sys.state_dim > 2)
        throw std::invalid_argument("integrate: state_dim must be 1 or 2");
    const std::size_t want = static_cast<std::size_t>(m) * sys.state_dim * sys.state_dim;
    if (sys.linear_symbol.size() != want)
        throw std::invalid_argument("integrate: linear_symbol has " +
                                    std::to_string(sys.linear_symbol.size()) +
                                    " entries, spectral layout needs " + std::to_string(want));
    if (!sys.nonlinear_rhs) throw std::invalid_argument("integrate: nonlinear_rhs is empty");
    if (static_cast<int>(u0.size()) != sys.state_dim * sys.grid.n_points)
        throw std::invalid_argument("integrate: initial state has " + std::to_string(u0.size()) +
                                    " values, expected " +
                                    std::to_string(sys.state_dim * sys.grid.n_points));
    if (!(cfg.t_end > cfg.t_start))
        throw std::invalid_argument("integrate: t_end must exceed t_start");
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");
    if (!(cfg.snapshot_interval > 0.0))
        throw std::invalid_argument("integrate: snapshot_interval must be positive");
    if (!(cfg.initial_step > 0.0) && !(cfg.fixed_step > 0.0))
        throw std::invalid_argument("integrate: initial_step must be positive");
    if (cfg.max_steps <= 0) throw std::invalid_argument("integrate: max_steps must be positive");
}

class SnapshotRecorder {
  public:
    SnapshotRecorder(const SemiLinearSystem& sys, int reserve_rows)
        : grid_(sys.grid), dim_(sys.state_dim), row_(sys.state_dim * sys.grid.n_points) {
        rows_.reserve(static_cast<std::size_t>(reserve_rows) * row_.size());
        times_.reserve(reserve_rows);
    }

    void record(double t, const std::vector<Complex>& y) {
        const int m = grid_.num_modes();
        for (int c = 0; c < dim_; ++c)
            half_spectrum_to_real(y.data() + static_cast<std::size_t>(c) * m,
                                  row_.data() + static_cast<std::size_t>(c) * grid_.n_points,
                                  grid_.n_points);
        times_.push_back(t);
        rows_.insert(rows_.end(), row_.begin(), row_.end());
    }

    Trajectory finish(long accepted, long rejected) && {
        Trajectory traj;
        traj.grid = grid_;
        traj.state_dim = dim_;
        traj.times = std::move(times_);
        traj.states.rows = static_cast<int>(traj.times.size());
        traj.states.cols = static_cast<int>(row_.size());
        traj.states.data = std::move(rows_);
        traj.accepted_steps = accepted;
        traj.rejected_steps = rejected;
        return traj;
    }

  private:
    PeriodicGrid grid_;
    int dim_;
    std::vector<double> row_;
    std::vector<double> rows_;
    std::vector<double> times_;
};

Trajectory run_adaptive(const SemiLinearSystem& sys, const std::vector<double>& u0,
                        const IntegrationConfig& cfg, const TrialStep& trial) {
    validate_inputs(sys, u0, cfg);
    const int n = sys.grid.n_points;
    const int m = sys.grid.num_modes();
    const int dim = sys.state_dim;
    const double span = cfg.t_end - cfg.t_start;
    const bool fixed = cfg.fixed_step > 0.0;

    // Spectral state, field-major.
    std::vector<Complex> y(static_cast<std::size_t>(dim) * m);
    for (int c = 0; c < dim; ++c) {
        for (int j = 0; j < n; ++j)
            if (!std::isfinite(u0[static_cast<std::size_t>(c) * n + j]))
                throw std::invalid_argument("integrate: non-finite initial state");
        real_to_half_spectrum(u0.data() + static_cast<std::size_t>(c) * n,
                              y.data() + static_cast<std::size_t>(c) * m, n);
    }

    const int n_snaps = static_cast<int>(std::floor(span / cfg.snapshot_interval + 1e-9)) + 1;
    SnapshotRecorder rec(sys, n_snaps);
    rec.record(cfg.t_start, y);

    long accepted = 0, rejected = 0;
    double t = cfg.t_start;
    int snap = 1;
    double h_free = fixed ? cfg.fixed_step : cfg.initial_step;
    const double t_eps = 1e-12 * std::max(1.0, std::abs(cfg.t_end));
    const double h_min = 1e-14 * span;

    std::vector<Complex> y_new(y.size());
    StepContext ctx = StepContext::Fresh;

    auto fail = [&](const std::string& msg, double when) {
        throw IntegrationError(msg, std::move(rec).finish(accepted, rejected), when);
    };

    while (t < cfg.t_end - t_eps) {
        if (accepted + rejected >= cfg.max_steps)
            fail("integrate: step budget of " + std::to_string(cfg.max_steps) +
                     " exhausted at t = " + std::to_string(t),
                 t);

        const double snap_time =
            (snap < n_snaps) ? cfg.t_start + snap * cfg.snapshot_interval : cfg.t_end;
        const double t_stop = std::min(snap_time, cfg.t_end);
        bool clipped = false;
        double h = h_free;
        if (t + h >= t_stop - t_eps) {
            h = t_stop - t;
            clipped = true;
        }

        const double ratio = trial(y, t, h, y_new, ctx);
        if (!all_finite(y_new))
            fail("integrate: non-finite state (blow-up) near t = " + std::to_string(t + h), t + h);

        const bool accept = fixed || ratio <= 1.0;
        if (accept) {
            t = clipped ? t_stop : t + h;
            y.swap(y_new);
            ++accepted;
            ctx = StepContext::AfterAccept;
            if (clipped && snap < n_snaps && t_stop == snap_time) {
                rec.record(t, y);
                ++snap;
            }
        } else {
            ++rejected;
            ctx = StepContext::AfterReject;
        }

        if (!fixed) {
            const double factor =
                std::clamp(0.9 * std::pow(std::max(ratio, 1e-10), -0.2), 0.2, 5.0);
            if (clipped && accept)
                h_free = std::max(h_free, h * factor);
            else
                h_free = h * factor;
            if (h_free < h_min)
                fail("integrate: step size underflow at t = " + std::to_string(t), t);
        }
    }

    return std::move(rec).finish(accepted, rejected);
}

// ---------------------------------------------------------------------------
// Per-mode matrix-exponential tables
// ---------------------------------------------------------------------------

// exp(theta * A_k) for every mode block of a system, built on demand and
// cached per distinct theta within one trial step.
class ExpCache {
  public:
    explicit ExpCache(const SemiLinearSystem& sys)
        : sys_(sys), m_(sys.grid.num_modes()), dim_(sys.state_dim) {}

    void reset(double h) {
        h_ = h;
        entries_.clear();
    }

    // Table for exp(alpha * h * A), alpha in units of the current step.
    const std::vector<Complex>& table(double alpha) {
        for (const auto& e : entries_)
            if (std::abs(e.first - alpha) < 1e-14) return e.second;
        entries_.emplace_back(alpha, build(alpha));
        return entries_.back().second;
    }

    // out = table * y (block-diagonal apply, field-major state layout).
    void apply(const std::vector<Complex>& tab, const std::vector<Complex>& y,
               std::vector<Complex>& out) const {
        if (dim_ == 1) {
            for (int k = 0; k < m_; ++k) out[k] = tab[k] * y[k];
            return;
        }
        for (int k = 0; k < m_; ++k) {
            const Complex* b = tab.data() + static_cast<std::size_t>(k) * 4;
            const Complex u = y[k], v = y[m_ + k];
            out[k] = b[0] * u + b[1] * v;
            out[m_ + k] = b[2] * u + b[3] * v;
        }
    }

  private:
    std::vector<Complex> build(double alpha) const {
        const int bs = dim_ * dim_;
        std::vector<Complex> tab(static_cast<std::size_t>(m_) * bs);
        Complex scaled[4];
        for (int k = 0; k < m_; ++k) {
            const Complex* a = sys_.block(k);
            for (int e = 0; e < bs; ++e) scaled[e] = alpha * h_ * a[e];
            phi_matrix(0, scaled, dim_, tab.data() + static_cast<std::size_t>(k) * bs);
        }
        return tab;
    }

    const SemiLinearSystem& sys_;
    int m_;
    int dim_;
    double h_ = 0.0;
    std::vector<std::pair<double, std::vector<Complex>>> entries_;
};

// ---------------------------------------------------------------------------
// Integrating-factor Dormand-Prince 5(4)
// ---------------------------------------------------------------------------

constexpr int kStages = 7;
constexpr double kC[kStages] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[kStages][kStages - 1] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB[kStages] = {35.0 / 384,      0.0,       500.0 / 1113, 125.0 / 192,
                                -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kBhat[kStages] = {5179.0 / 57600, 0.0,          7571.0 / 16695, 393.0 / 640,
                                   -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

// One Dormand-Prince trial step in the integrating-factor (Lawson) frame:
//   Y_i   = E(c_i h) y + h sum_j a_ij E((c_i - c_j) h) N_j
//   y_new = E(h) y + h sum_j b_j E((1 - c_j) h) N_j
// All exponents are non-negative multiples of h, so strongly damped modes
// only ever see decaying factors.
class DormandPrinceStepper {
  public:
    explicit DormandPrinceStepper(const SemiLinearSystem& sys)
        : sys_(sys),
          cache_(sys),
          size_(static_cast<std::size_t>(sys.grid.num_modes()) * sys.state_dim),
          scratch_(size_),
          acc_(size_),
          err_(size_) {
        for (auto& s : stages_) s.assign(size_, Complex(0.0, 0.0));
    }

    double operator()(const std::vector<Complex>& y, double t, double h,
                      std::vector<Complex>& y_new, StepContext ctx) {
        cache_.reset(h);
        // First stage is FSAL: after an accepted step it equals the last
        // evaluation of the previous one.
        if (ctx == StepContext::Fresh)
            eval_rhs(t, y, stages_[0]);
        else if (ctx == StepContext::AfterAccept)
            stages_[0].swap(fsal_);

        for (int i = 1; i < kStages; ++i) {
            cache_.apply(cache_.table(kC[i]), y, acc_);
            for (int j = 0; j < i; ++j) {
                if (kA[i][j] == 0.0) continue;
                cache_.apply(cache_.table(kC[i] - kC[j]), stages_[j], scratch_);
                const double w = h * kA[i][j];
                for (std::size_t e = 0; e < size_; ++e) acc_[e] += w * scratch_[e];
            }
            if (i < kStages - 1) {
                eval_rhs(t + kC[i] * h, acc_, stages_[i]);
            } else {
                // Row 7 coincides with b: acc_ is the order-5 solution.
                y_new = acc_;
                eval_rhs(t + h, y_new, stages_[i]);
            }
        }

        std::fill(err_.begin(), err_.end(), Complex(0.0, 0.0));
        for (int j = 0; j < kStages; ++j) {
            const double d = kB[j] - kBhat[j];
            if (d == 0.0) continue;
            cache_.apply(cache_.table(1.0 - kC[j]), stages_[j], scratch_);
            const double w = h * d;
            for (std::size_t e = 0; e < size_; ++e) err_[e] += w * scratch_[e];
        }
        fsal_ = stages_[kStages - 1];
        return error_ratio(y, y_new);
    }

  private:
    void eval_rhs(double t, const std::vector<Complex>& y, std::vector<Complex>& out) {
        std::fill(out.begin(), out.end(), Complex(0.0, 0.0));
        sys_.nonlinear_rhs(t, y, out);
    }

    // Worst ratio of |error| to tolerance, both measured on 1/n-scaled
    // (physical) amplitudes so abs_tol reads in solution units.
    double error_ratio(const std::vector<Complex>& y, const std::vector<Complex>& y_new) const {
        const double inv_n = 1.0 / sys_.grid.n_points;
        double worst = 0.0;
        for (std::size_t e = 0; e < size_; ++e) {
            const double mag = std::max(std::abs(y[e]), std::abs(y_new[e])) * inv_n;
            const double tol = std::max(1e-300, std::max(err_tol_abs_, err_tol_rel_ * mag));
            worst = std::max(worst, std::abs(err_[e]) * inv_n / tol);
        }
        return worst;
    }

  public:
    double err_tol_rel_ = 1e-6;
    double err_tol_abs_ = 1e-6;

  private:
    const SemiLinearSystem& sys_;
    ExpCache cache_;
    std::size_t size_;
    std::vector<Complex> stages_[kStages];
    std::vector<Complex> fsal_;
    std::vector<Complex> scratch_;
    std::vector<Complex> acc_;
    std::vector<Complex> err_;
};

// ---------------------------------------------------------------------------
// ETDRK4 (Cox-Matthews) with step-doubling
// ---------------------------------------------------------------------------

// Tables for one ETDRK4 step of size s; all are per-mode blocks.
struct EtdTables {
    std::vector<Complex> E;   // exp(s A)
    std::vector<Complex> E2;  // exp(s A / 2)
    std::vector<Complex> Q;   // (s/2) phi1(s A / 2)
    std::vector<Complex> F1;  // s (phi1 - 3 phi2 + 4 phi3)(s A)
    std::vector<Complex> F2;  // s (phi2 - 2 phi3)(s A)
    std::vector<Complex> F3;  // s (4 phi3 - phi2)(s A)
};

class EtdStepper {
  public:
    explicit EtdStepper(const SemiLinearSystem& sys)
        : sys_(sys),
          m_(sys.grid.num_modes()),
          dim_(sys.state_dim),
          size_(static_cast<std::size_t>(m_) * dim_) {
        for (auto* v : {&nu_, &na_, &nb_, &nc_, &sa_, &sb_, &sc_, &big_, &mid_, &nmid_})
            v->assign(size_, Complex(0.0, 0.0));
    }

    double operator()(const std::vector<Complex>& y, double t, double h,
                      std::vector<Complex>& y_new, StepContext) {
        build_tables(h, tab_h_);
        build_tables(0.5 * h, tab_h2_);

        eval_rhs(t, y, nu_);
        step(y, t, h, tab_h_, nu_, big_);
        step(y, t, 0.5 * h, tab_h2_, nu_, mid_);
        eval_rhs(t + 0.5 * h, mid_, nmid_);
        step(mid_, t + 0.5 * h, 0.5 * h, tab_h2_, nmid_, y_new);

        // Richardson estimate for a 4th-order scheme: the h/2 pair is kept,
        // its local error is (big - small) / (2^4 - 1).
        const double inv_n = 1.0 / sys_.grid.n_points;
        double worst = 0.0;
        for (std::size_t e = 0; e < size_; ++e) {
            const double err = std::abs(big_[e] - y_new[e]) / 15.0 * inv_n;
            const double mag = std::max(std::abs(y[e]), std::abs(y_new[e])) * inv_n;
            const double tol = std::max(1e-300, std::max(err_tol_abs_, err_tol_rel_ * mag));
            worst = std::max(worst, err / tol);
        }
        return worst;
    }

  public:
    double err_tol_rel_ = 1e-6;
    double err_tol_abs_ = 1e-6;

  private:
    void eval_rhs(double t, const std::vector<Complex>& y, std::vector<Complex>& out) {
        std::fill(out.begin(), out.end(), Complex(0.0, 0.0));
        sys_.nonlinear_rhs(t, y, out);
    }

    void build_tables(double s, EtdTables& tab) const {
        const int bs = dim_ * dim_;
        const std::size_t total = static_cast<std::size_t>(m_) * bs;
        for (auto* v : {&tab.E, &tab.E2, &tab.Q, &tab.F1, &tab.F2, &tab.F3}) v->resize(total);
        Complex z[4], z2[4], p0[4], p1[4], p2[4], p3[4], q1[4];
        for (int k = 0; k < m_; ++k) {
            const Complex* a = sys_.block(k);
            for (int e = 0; e < bs; ++e) {
                z[e] = s * a[e];
                z2[e] = 0.5 * s * a[e];
            }
            phi_matrix(0, z, dim_, p0);
            phi_matrix(0, z2, dim_, q1);  // reuse: exp(sA/2)
            const std::size_t off = static_cast<std::size_t>(k) * bs;
            for (int e = 0; e < bs; ++e) {
                tab.E[off + e] = p0[e];
                tab.E2[off + e] = q1[e];
            }
            phi_matrix(1, z2, dim_, q1);
            for (int e = 0; e < bs; ++e) tab.Q[off + e] = 0.5 * s * q1[e];
            phi_matrix(1, z, dim_, p1);
            phi_matrix(2, z, dim_, p2);
            phi_matrix(3, z, dim_, p3);
            for (int e = 0; e < bs; ++e) {
                tab.F1[off + e] = s * (p1[e] - 3.0 * p2[e] + 4.0 * p3[e]);
                tab.F2[off + e] = s * (p2[e] - 2.0 * p3[e]);
                tab.F3[off + e] = s * (4.0 * p3[e] - p2[e]);
            }
        }
    }

    void apply(const std::vector<Complex>& tab, const std::vector<Complex>& y,
               std::vector<Complex>& out) const {
        if (dim_ == 1) {
            for (int k = 0; k < m_; ++k) out[k] = tab[k] * y[k];
            return;
        }
        for (int k = 0; k < m_; ++k) {
            const Complex* b = tab.data() + static_cast<std::size_t>(k) * 4;
            const Complex u = y[k], v = y[m_ + k];
            out[k] = b[0] * u + b[1] * v;
            out[m_ + k] = b[2] * u + b[3] * v;
        }
    }

    // One Cox-Matthews step of size s from (y, t); `nu` = N(y, t) precomputed.
    void step(const std::vector<Complex>& y, double t, double s, const EtdTables& tab,
              const std::vector<Complex>& nu, std::vector<Complex>& out) {
        apply(tab.E2, y, sa_);                       // sa = E2 y
        apply(tab.Q, nu, sc_);                       // sc = Q Nu
        for (std::size_t e = 0; e < size_; ++e) sa_[e] += sc_[e];  // a
        eval_rhs(t + 0.5 * s, sa_, na_);

        apply(tab.E2, y, sb_);
        apply(tab.Q, na_, sc_);
        for (std::size_t e = 0; e < size_; ++e) sb_[e] += sc_[e];  // b
        eval_rhs(t + 0.5 * s, sb_, nb_);

        apply(tab.E2, sa_, sc_);  // E2 a  (sa_ free afterwards)
        for (std::size_t e = 0; e < size_; ++e) sa_[e] = 2.0 * nb_[e] - nu[e];
        apply(tab.Q, sa_, sb_);
        for (std::size_t e = 0; e < size_; ++e) sc_[e] += sb_[e];  // c
        eval_rhs(t + s, sc_, nc_);

        apply(tab.E, y, out);
        apply(tab.F1, nu, sa_);
        for (std::size_t e = 0; e < size_; ++e) sb_[e] = 2.0 * (na_[e] + nb_[e]);
        apply(tab.F2, sb_, sc_);
        for (std::size_t e = 0; e < size_; ++e) out[e] += sa_[e] + sc_[e];
        apply(tab.F3, nc_, sa_);
        for (std::size_t e = 0; e < size_; ++e) out[e] += sa_[e];
    }

    const SemiLinearSystem& sys_;
    int m_;
    int dim_;
    std::size_t size_;
    EtdTables tab_h_, tab_h2_;
    std::vector<Complex> nu_, na_, nb_, nc_, sa_, sb_, sc_, big_, mid_, nmid_;
};

}  // namespace

Trajectory integrate_if_rk45(const SemiLinearSystem& system, const std::vector<double>& u0,
                             const IntegrationConfig& cfg) {
    validate_inputs(system, u0, cfg);
    DormandPrinceStepper stepper(system);
    stepper.err_tol_rel_ = cfg.rel_tol;
    stepper.err_tol_abs_ = cfg.abs_tol;
    return run_adaptive(system, u0, cfg, std::ref(stepper));
}

Trajectory integrate_etdrk4(const SemiLinearSystem& system, const std::vector<double>& u0,
                            const IntegrationConfig& cfg) {
    validate_inputs(system, u0, cfg);
    EtdStepper stepper(system);
    stepper.err_tol_rel_ = cfg.rel_tol;
    stepper.err_tol_abs_ = cfg.abs_tol;
    return run_adaptive(system, u0, cfg, std::ref(stepper));
}

}  // namespace latentflow
