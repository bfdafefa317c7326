#pragma once

// SIR information-contagion model with market turnover:
//   S' = -b S I + m (N - S)
//   I' =  b S I - a I - m I
//   R' =  a I - m R

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "epifin/errors.hpp"

namespace epifin::sir {

struct SirParams {
  double beta = 0.0;   // mass-action transmission coefficient
  double alpha = 0.0;  // recovery rate
  double mu = 0.0;     // entry-exit (turnover) rate
  double n_total = 1.0;

  void validate() const {
    if (!(beta >= 0.0)) throw DegenerateParamsError("beta must be >= 0");
    if (!(alpha >= 0.0)) throw DegenerateParamsError("alpha must be >= 0");
    if (!(mu >= 0.0)) throw DegenerateParamsError("mu must be >= 0");
    if (!(n_total > 0.0)) throw DegenerateParamsError("n_total must be > 0");
  }
};

struct SirState {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;
  double t = 0.0;

  double total() const noexcept { return s + i + r; }
};

struct Derivatives {
  double ds = 0.0;
  double di = 0.0;
  double dr = 0.0;
};

struct Trajectory {
  std::vector<SirState> states;
  double step = 0.0;
  SirParams params;
};

enum class Stability { Stable, Unstable, NonHyperbolic };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::NonHyperbolic: return "non-hyperbolic";
  }
  return "?";
}

struct Equilibrium {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;
  std::complex<double> eig1, eig2;
  Stability stability = Stability::NonHyperbolic;
};

struct EquilibriumReport {
  Equilibrium disease_free;
  std::optional<Equilibrium> endemic;
  double r0 = 0.0;
};

/// Named (beta, gamma) presets, read with gamma as the recovery rate,
/// mu = 0 and N = 1.
struct Preset {
  const char* name;
  double beta;
  double gamma;
};
inline constexpr Preset kPresets[] = {
    {"fig6b", 0.20, 0.10},
    {"fig6c", 0.82, 0.18},
    {"fig6d", 0.61, 0.49},
};

inline std::optional<SirParams> preset(std::string_view name) {
  for (const auto& p : kPresets)
    if (name == p.name) return SirParams{p.beta, p.gamma, 0.0, 1.0};
  return std::nullopt;
}

inline Derivatives derivatives(const SirState& x, const SirParams& p) {
  const double infection = p.beta * x.s * x.i;
  return {-infection + p.mu * (p.n_total - x.s),
          infection - p.alpha * x.i - p.mu * x.i,
          p.alpha * x.i - p.mu * x.r};
}

/// Classical RK4 step of an (S, I, R) system with right-hand side `rhs`.
/// Shared by the plain and the fast-slow integrators so both follow the
/// same arithmetic.
template <typename Rhs>
SirState rk4_advance(const SirState& x, double h, Rhs&& rhs) {
  const auto shifted = [&](const Derivatives& k, double c) {
    return SirState{x.s + c * k.ds, x.i + c * k.di, x.r + c * k.dr, x.t + c};
  };
  const Derivatives k1 = rhs(x);
  const Derivatives k2 = rhs(shifted(k1, 0.5 * h));
  const Derivatives k3 = rhs(shifted(k2, 0.5 * h));
  const Derivatives k4 = rhs(shifted(k3, h));
  return {x.s + h / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds),
          x.i + h / 6.0 * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di),
          x.r + h / 6.0 * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr), x.t + h};
}

inline SirState rk4_step(const SirState& x, const SirParams& p, double h) {
  if (!(h > 0.0)) throw StepSizeError("step h must be > 0");
  return rk4_advance(x, h, [&](const SirState& y) { return derivatives(y, p); });
}

/// Number of fixed steps covering `horizon` at step h.
inline std::size_t step_count(double h, double horizon) {
  return static_cast<std::size_t>(std::llround(horizon / h));
}

/// Fixed-step RK4 trajectory. Records every step, with t = t0 + k h.
/// Throws ConservationError when |S + I + R - N| exceeds 1e-8 N, which only
/// happens when h is far too large.
inline Trajectory integrate(const SirParams& p, const SirState& init, double h, double horizon) {
  p.validate();
  if (!(h > 0.0)) throw StepSizeError("step h must be > 0");
  if (!(horizon >= h)) throw StepSizeError("horizon must be >= h");
  const double tol = 1e-8 * p.n_total;
  if (std::abs(init.total() - p.n_total) > tol)
    throw ConservationError("initial state does not satisfy S + I + R = N");

  const std::size_t steps = step_count(h, horizon);
  Trajectory traj;
  traj.step = h;
  traj.params = p;
  traj.states.reserve(steps + 1);
  traj.states.push_back(init);
  SirState x = init;
  for (std::size_t k = 1; k <= steps; ++k) {
    x = rk4_step(x, p, h);
    x.t = init.t + static_cast<double>(k) * h;
    if (!(std::abs(x.total() - p.n_total) <= tol))
      throw ConservationError("S + I + R drifted from N by " + std::to_string(x.total() - p.n_total) +
                              " at t = " + std::to_string(x.t) + "; reduce h");
    traj.states.push_back(x);
  }
  return traj;
}

inline double basic_reproduction_number(const SirParams& p) {
  const double removal = p.alpha + p.mu;
  if (!(removal > 0.0)) throw DegenerateParamsError("alpha + mu must be > 0");
  return p.beta * p.n_total / removal;
}

namespace detail {

// Eigenvalues of [[a, b], [c, d]].
inline std::pair<std::complex<double>, std::complex<double>> eig2x2(double a, double b, double c, double d) {
  const double tr = a + d;
  const double det = a * d - b * c;
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det));
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

inline Stability classify(std::complex<double> e1, std::complex<double> e2, double scale) {
  const double eps = 1e-12 * std::max(scale, 1e-300);
  const auto near_zero = [&](std::complex<double> e) { return std::abs(e.real()) <= eps; };
  if (near_zero(e1) || near_zero(e2)) return Stability::NonHyperbolic;
  if (e1.real() < 0.0 && e2.real() < 0.0) return Stability::Stable;
  return Stability::Unstable;
}

}  // namespace detail

/// Equilibria of the reduced (S, I) system with their Jacobian eigenvalues
/// J = [[-b I - m, -b S], [b I, b S - a - m]].
inline EquilibriumReport equilibria(const SirParams& p) {
  p.validate();
  EquilibriumReport rep;
  rep.r0 = basic_reproduction_number(p);
  const double n = p.n_total;
  const double removal = p.alpha + p.mu;
  const double scale = std::max({p.beta * n, removal, p.mu});

  auto& dfe = rep.disease_free;
  dfe.s = n;
  // Triangular at I = 0: eigenvalues are the diagonal entries.
  dfe.eig1 = -p.mu;
  dfe.eig2 = p.beta * n - removal;
  dfe.stability = detail::classify(dfe.eig1, dfe.eig2, scale);

  if (rep.r0 > 1.0) {
    if (p.mu == 0.0)
      throw EndemicUndefinedError(
          "mu = 0 with r0 = " + std::to_string(rep.r0) +
          " > 1: no interior equilibrium; the disease-free state is non-hyperbolic and the "
          "outbreak ends at the final-size root (see final_size)");
    Equilibrium e;
    e.s = removal / p.beta;
    e.i = p.mu * (n - e.s) / removal;
    e.r = p.alpha * e.i / p.mu;
    const auto [e1, e2] = detail::eig2x2(-p.beta * e.i - p.mu, -p.beta * e.s, p.beta * e.i,
                                         p.beta * e.s - removal);
    e.eig1 = e1;
    e.eig2 = e2;
    e.stability = detail::classify(e1, e2, scale);
    rep.endemic = e;
  }
  return rep;
}

/// Final susceptible level s_inf of the mu = 0 outbreak: the root in (0, s0]
/// of ln(s0 / s) = (b / a) (s0 + i0 - s), found by bisection to 1e-12.
/// r_init = N - s0 - i0 is the initially removed mass.
inline double final_size(const SirParams& p, double s0, double i0) {
  p.validate();
  if (p.mu != 0.0) throw DegenerateParamsError("final-size relation requires mu = 0");
  if (!(i0 > 0.0)) throw DegenerateParamsError("final-size relation requires i0 > 0");
  if (!(s0 > 0.0) || s0 + i0 > p.n_total * (1.0 + 1e-12))
    throw DegenerateParamsError("need 0 < s0 and s0 + i0 <= N");
  if (p.beta == 0.0) return s0;
  if (!(p.alpha > 0.0)) throw DegenerateParamsError("alpha must be > 0");

  const double k = p.beta / p.alpha;
  const auto f = [&](double s) { return std::log(s0 / s) - k * (s0 + i0 - s); };

  double hi = s0;
  double lo = s0 * std::exp(-k * (s0 + i0));
  if (lo <= 0.0) lo = std::numeric_limits<double>::min();
  const double flo = f(lo), fhi = f(hi);
  if (!(flo > 0.0 && fhi < 0.0) && !(flo < 0.0 && fhi > 0.0))
    throw BracketError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  const bool increasing = flo < 0.0;
  for (int it = 0; it < 2000 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm > 0.0) != increasing) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace epifin::sir
