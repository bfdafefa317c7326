#pragma once

// Reaction-diffusion information flow u_t = D u_xx + g(u) on a 1-D domain,
// front-speed measurement, homogeneous equilibria, and the fast-slow
// (singularly perturbed) SIR sweep.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "epifin/epi_sir.hpp"
#include "epifin/errors.hpp"

namespace epifin::rdwave {

enum class RateKind { Logistic, Allee };

/// Non-linear flow rate g with g(0) = g(K) = 0.
///   Logistic: g(u) = r u (1 - u/K)
///   Allee:    g(u) = r u (u - a)(1 - u/K)
struct RateLaw {
  RateKind kind = RateKind::Logistic;
  double r = 1.0;
  double k = 1.0;
  double allee = 0.0;

  double operator()(double u) const {
    const double logistic = r * u * (1.0 - u / k);
    return kind == RateKind::Logistic ? logistic : logistic * (u - allee);
  }

  double derivative(double u) const {
    if (kind == RateKind::Logistic) return r * (1.0 - 2.0 * u / k);
    // d/du [r u (u - a)(1 - u/K)]
    return r * ((2.0 * u - allee) * (1.0 - u / k) - u * (u - allee) / k);
  }
};

inline double logistic_rate(double u, double r, double k) { return r * u * (1.0 - u / k); }

struct ReactionDiffusionConfig {
  double d_coeff = 1.0;
  double r_rate = 1.0;
  double k_cap = 1.0;
  double dx = 0.1;
  double dt = 0.002;
  double length = 200.0;
  double horizon = 80.0;
  RateKind kind = RateKind::Logistic;
  double allee = 0.0;

  RateLaw rate() const { return {kind, r_rate, k_cap, allee}; }

  // Cells are centred at (j + 1/2) dx.
  std::size_t cells() const { return static_cast<std::size_t>(std::llround(length / dx)); }
  double x(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dx; }
  double courant() const { return d_coeff * dt / (dx * dx); }

  void validate() const {
    const auto positive = [](const char* name, double v) {
      if (!(v > 0.0) || !std::isfinite(v)) throw StabilityError(std::string(name) + " must be positive and finite");
    };
    positive("D", d_coeff);
    positive("K", k_cap);
    positive("dx", dx);
    positive("dt", dt);
    positive("length", length);
    positive("horizon", horizon);
    if (!(r_rate >= 0.0)) throw StabilityError("r must be >= 0");
    if (cells() < 2) throw StabilityError("domain must hold at least two cells");
    if (courant() > 0.5)
      throw StabilityError("D*dt/dx^2 = " + std::to_string(courant()) + " exceeds 0.5");
  }
};

struct FieldState {
  std::vector<double> u;
  double t = 0.0;
};

inline FieldState uniform_field(const ReactionDiffusionConfig& cfg, double value) {
  return {std::vector<double>(cfg.cells(), value), 0.0};
}

/// u = K left of `front`, 0 elsewhere.
inline FieldState step_field(const ReactionDiffusionConfig& cfg, double front) {
  FieldState f{std::vector<double>(cfg.cells(), 0.0), 0.0};
  for (std::size_t j = 0; j < f.u.size(); ++j)
    if (cfg.x(j) < front) f.u[j] = cfg.k_cap;
  return f;
}

/// One explicit FTCS step with zero-flux walls (ghost cell equals its
/// neighbour, so the discrete Laplacian sums to zero).
inline FieldState rd_step(const FieldState& field, const ReactionDiffusionConfig& cfg) {
  cfg.validate();
  const auto& u = field.u;
  const std::size_t n = u.size();
  if (n != cfg.cells())
    throw StabilityError("field has " + std::to_string(n) + " cells, grid has " + std::to_string(cfg.cells()));
  const RateLaw g = cfg.rate();
  const double inv_dx2 = 1.0 / (cfg.dx * cfg.dx);

  FieldState next{std::vector<double>(n), field.t + cfg.dt};
  for (std::size_t j = 0; j < n; ++j) {
    const double left = j == 0 ? u[0] : u[j - 1];
    const double right = j + 1 == n ? u[n - 1] : u[j + 1];
    const double lap = (left - 2.0 * u[j]) + right;
    next.u[j] = u[j] + cfg.dt * (cfg.d_coeff * lap * inv_dx2 + g(u[j]));
  }
  return next;
}

/// Steps to the horizon, keeping the initial field, every
/// `snapshot_every`-th step, and the final field.
inline std::vector<FieldState> rd_integrate(const ReactionDiffusionConfig& cfg, const FieldState& init,
                                            std::size_t snapshot_every) {
  cfg.validate();
  if (init.u.size() != cfg.cells())
    throw StabilityError("initial field has " + std::to_string(init.u.size()) + " cells, grid has " +
                         std::to_string(cfg.cells()));
  if (snapshot_every < 1) snapshot_every = 1;
  const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));

  std::vector<FieldState> series{init};
  FieldState cur = init;
  for (std::size_t k = 1; k <= steps; ++k) {
    cur = rd_step(cur, cfg);
    cur.t = init.t + static_cast<double>(k) * cfg.dt;
    for (std::size_t j = 0; j < cur.u.size(); ++j)
      if (!std::isfinite(cur.u[j]))
        throw NonFiniteError("non-finite u at t = " + std::to_string(cur.t) + ", cell " + std::to_string(j));
    if (k % snapshot_every == 0 || k == steps) series.push_back(cur);
  }
  return series;
}

struct FitWindow {
  double t_start = 0.0;
  double t_end = std::numeric_limits<double>::infinity();
};

struct WaveSpeedEstimate {
  double speed = 0.0;
  double level = 0.0;
  FitWindow fit_window;
  double residual = 0.0;    // sum of squared residuals of the linear fit
  std::size_t points = 0;   // snapshots that contributed a front position
};

/// Position of the rightmost downward crossing of `level`, linearly
/// interpolated between cell centres. Returns NaN when there is none.
inline double front_position(std::span<const double> u, double dx, double level) {
  for (std::size_t j = u.size() - 1; j-- > 0;) {
    if (u[j] >= level && u[j + 1] < level) {
      const double frac = (u[j] - level) / (u[j] - u[j + 1]);
      return (static_cast<double>(j) + 0.5 + frac) * dx;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// Least-squares slope of the front position over the snapshots inside the
/// fit window. Snapshots with no crossing (front not yet formed or already
/// at the wall) are skipped; NoCrossingError if fewer than two remain.
inline WaveSpeedEstimate estimate_wave_speed(std::span<const FieldState> series, double dx, double level,
                                             FitWindow window) {
  if (series.empty()) throw NoCrossingError("empty series");
  std::vector<double> ts, xs;
  for (const auto& f : series) {
    if (f.t < window.t_start || f.t > window.t_end || f.u.size() < 2) continue;
    const double xf = front_position(f.u, dx, level);
    if (std::isnan(xf)) continue;
    ts.push_back(f.t);
    xs.push_back(xf);
  }
  if (ts.size() < 2)
    throw NoCrossingError("level " + std::to_string(level) + " is crossed in " + std::to_string(ts.size()) +
                          " snapshot(s) of the fit window; need at least two");

  const double n = static_cast<double>(ts.size());
  double tbar = 0.0, xbar = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tbar += ts[i];
    xbar += xs[i];
  }
  tbar /= n;
  xbar /= n;
  double stt = 0.0, stx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tbar) * (ts[i] - tbar);
    stx += (ts[i] - tbar) * (xs[i] - xbar);
  }
  if (!(stt > 0.0)) throw NoCrossingError("fit window contains a single time point");
  WaveSpeedEstimate est;
  est.speed = stx / stt;
  est.level = level;
  est.fit_window = window;
  est.points = ts.size();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double e = xs[i] - (xbar + est.speed * (ts[i] - tbar));
    est.residual += e * e;
  }
  return est;
}

enum class EquilibriumKind { Stable, Unstable, NonHyperbolic };

inline const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Stable: return "stable";
    case EquilibriumKind::Unstable: return "unstable";
    case EquilibriumKind::NonHyperbolic: return "non-hyperbolic";
  }
  return "?";
}

struct RdEquilibrium {
  double u = 0.0;
  double slope = 0.0;  // g'(u), the 1x1 Jacobian of the homogeneous problem
  EquilibriumKind kind = EquilibriumKind::NonHyperbolic;
};

/// Spatially homogeneous steady states 0 = g(u) in [0, K], ascending.
inline std::vector<RdEquilibrium> rd_equilibria(const RateLaw& g) {
  if (!(g.k > 0.0)) throw StabilityError("K must be > 0");
  std::vector<double> roots{0.0, g.k};
  if (g.kind == RateKind::Allee && g.allee > 0.0 && g.allee < g.k) roots.insert(roots.begin() + 1, g.allee);
  std::vector<RdEquilibrium> out;
  for (double u : roots) {
    const double slope = g.derivative(u);
    const auto kind = slope < 0.0   ? EquilibriumKind::Stable
                      : slope > 0.0 ? EquilibriumKind::Unstable
                                    : EquilibriumKind::NonHyperbolic;
    out.push_back({u, slope, kind});
  }
  return out;
}

inline std::vector<RdEquilibrium> rd_equilibria(double r, double k) {
  return rd_equilibria(RateLaw{RateKind::Logistic, r, k, 0.0});
}

// ---------------------------------------------------------------------------
// Fast-slow SIR
//
// The susceptible equation carries the small multiplier:
//   eps S' = -b S I + m (N - S)
//       I' =  b S I - (a + m) I
//       R' =  a I - m R
// As eps -> 0, S collapses onto the attracting slow manifold
// S = m N / (b I + m) and I follows the reduced equation
//   I' = I (b m N / (b I + m) - a - m).

struct FastSlowConfig {
  sir::SirParams sir;
  double epsilon = 1.0;
  double h = 0.01;
  double horizon = 100.0;
  double layer_time = 5.0;
  sir::SirState init{0.99, 0.01, 0.0, 0.0};
};

struct FastSlowResult {
  sir::Trajectory trajectory;      // perturbed system, sampled every h
  sir::Trajectory qss_trajectory;  // reduced system on the slow manifold
  double sup_deviation = 0.0;      // sup |I_eps - I_qss| over t >= layer_time
};

inline double slow_manifold_s(const sir::SirParams& p, double i, double s_fallback) {
  const double denom = p.beta * i + p.mu;
  if (denom == 0.0) return s_fallback;  // mu = 0 and I = 0: S is frozen
  return p.mu * p.n_total / denom;
}

inline FastSlowResult fast_slow_integrate(const FastSlowConfig& cfg) {
  const auto& p = cfg.sir;
  p.validate();
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) throw StiffnessError("epsilon must be in (0, 1]");
  if (!(cfg.h > 0.0)) throw StepSizeError("step h must be > 0");
  if (!(cfg.horizon >= cfg.h)) throw StepSizeError("horizon must be >= h");
  if (!(cfg.layer_time < cfg.horizon)) throw StepSizeError("layer_time must be < horizon");

  const std::size_t steps = sir::step_count(cfg.h, cfg.horizon);
  // Sub-steps per output step, so h_eff = h / m <= eps h.
  const auto m = static_cast<std::size_t>(std::ceil(1.0 / cfg.epsilon - 1e-9));
  const double h_eff = cfg.h / static_cast<double>(m);
  const double eps = cfg.epsilon;

  const auto fast_rhs = [&](const sir::SirState& y) {
    sir::Derivatives d = sir::derivatives(y, p);
    d.ds /= eps;
    return d;
  };
  const auto reduced_rhs = [&](const sir::SirState& y) {
    const double s = slow_manifold_s(p, y.i, cfg.init.s);
    return sir::Derivatives{0.0, p.beta * s * y.i - p.alpha * y.i - p.mu * y.i, p.alpha * y.i - p.mu * y.r};
  };

  FastSlowResult res;
  res.trajectory.step = cfg.h;
  res.trajectory.params = p;
  res.qss_trajectory.step = cfg.h;
  res.qss_trajectory.params = p;
  res.trajectory.states.reserve(steps + 1);
  res.qss_trajectory.states.reserve(steps + 1);

  sir::SirState x = cfg.init;
  sir::SirState q = cfg.init;
  q.s = slow_manifold_s(p, q.i, cfg.init.s);
  res.trajectory.states.push_back(x);
  res.qss_trajectory.states.push_back(q);

  for (std::size_t k = 1; k <= steps; ++k) {
    for (std::size_t sub = 0; sub < m; ++sub) {
      // RK4 is stable for h |lambda| below ~2.78; the fast eigenvalue is
      // -(b I + m) / eps.
      if (h_eff * (p.beta * std::abs(x.i) + p.mu) / eps > 2.5)
        throw StiffnessError("fast layer unresolved at t = " + std::to_string(x.t) + "; reduce h");
      x = sir::rk4_advance(x, h_eff, fast_rhs);
    }
    x.t = cfg.init.t + static_cast<double>(k) * cfg.h;
    if (!std::isfinite(x.s) || !std::isfinite(x.i) || !std::isfinite(x.r))
      throw StiffnessError("fast-slow trajectory became non-finite at t = " + std::to_string(x.t));

    q = sir::rk4_advance(q, cfg.h, reduced_rhs);
    q.t = x.t;
    q.s = slow_manifold_s(p, q.i, cfg.init.s);

    res.trajectory.states.push_back(x);
    res.qss_trajectory.states.push_back(q);
    if (x.t >= cfg.layer_time) res.sup_deviation = std::max(res.sup_deviation, std::abs(x.i - q.i));
  }
  return res;
}

}  // namespace epifin::rdwave
