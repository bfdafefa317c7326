#pragma once

// Manager contact networks: validation, connectivity, the Perron eigenpair,
// hearing matrices and diffusion centrality.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "epifin/errors.hpp"
#include "epifin/matrix.hpp"
#include "epifin/random.hpp"

namespace epifin::netdiff {

/// Weighted directed contact network. weight(i, j) is the relative
/// probability that manager i speaks to manager j; every entry is in [0, 1].
/// Only constructible through validate_network() or the generator.
class ManagerNetwork {
 public:
  std::size_t size() const noexcept { return w_.rows(); }
  double weight(std::size_t i, std::size_t j) const { return w_(i, j); }
  const Matrix& weights() const noexcept { return w_; }

  double out_weight(std::size_t i) const {
    const auto r = w_.row(i);
    return std::accumulate(r.begin(), r.end(), 0.0);
  }

 private:
  explicit ManagerNetwork(Matrix w) : w_(std::move(w)) {}
  friend ManagerNetwork validate_network(Matrix raw);

  Matrix w_;
};

struct EigenPair {
  double eigenvalue = 0.0;
  std::vector<double> eigenvector;  // unit 1-norm, nonnegative orientation
  std::size_t iterations = 0;
  double residual = 0.0;  // ||w v - lambda v||_inf
};

struct CentralityReport {
  int horizon = 0;
  Matrix hearing;
  std::vector<double> centrality;
};

inline ManagerNetwork validate_network(Matrix raw) {
  if (raw.rows() == 0 || !raw.square())
    throw DimensionError("network matrix must be square with n >= 1 (got " +
                         std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()) + ")");
  for (std::size_t i = 0; i < raw.rows(); ++i)
    for (std::size_t j = 0; j < raw.cols(); ++j) {
      const double v = raw(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw EntryRangeError("weight (" + std::to_string(i) + "," + std::to_string(j) +
                              ") = " + std::to_string(v) + " is outside [0,1]");
    }
  return ManagerNetwork(std::move(raw));
}

namespace detail {

inline std::vector<bool> reachable_from(const Matrix& w, std::size_t start, bool reverse) {
  const std::size_t n = w.rows();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < n; ++v) {
      const double edge = reverse ? w(v, u) : w(u, v);
      if (edge > 0.0 && !seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace detail

/// True iff every manager reaches every other along positive-weight edges.
inline bool strongly_connected(const ManagerNetwork& net) {
  const auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  return all(detail::reachable_from(net.weights(), 0, false)) &&
         all(detail::reachable_from(net.weights(), 0, true));
}

/// Leading (Perron) eigenpair by power iteration from the normalized
/// all-ones vector.
///
/// The iteration runs on w + I, which has the same eigenvectors and is
/// primitive whenever w is irreducible, so periodic networks converge too.
/// Gives up with ConvergenceError after max_iter iterations, or when the
/// residual has not improved for 50 consecutive iterations.
inline EigenPair leading_eigenpair(const ManagerNetwork& net, double tol = 1e-12,
                                   std::size_t max_iter = 100000) {
  const Matrix& w = net.weights();
  const std::size_t n = w.rows();
  if (std::all_of(w.data().begin(), w.data().end(), [](double x) { return x == 0.0; }))
    throw ZeroMatrixError("leading eigenpair of the zero matrix is undefined");
  if (!(tol > 0.0)) throw ParamRangeError("tolerance must be positive");

  constexpr double kShift = 1.0;
  constexpr std::size_t kStallWindow = 50;

  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  EigenPair best{0.0, v, 0, std::numeric_limits<double>::infinity()};
  std::size_t since_improvement = 0;

  for (std::size_t it = 1; it <= max_iter; ++it) {
    std::vector<double> wv = w * std::span<const double>(v);
    // v >= 0 with unit 1-norm, so the 1-norm of (w + I)v is its plain sum.
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += wv[i] + kShift * v[i];
    for (std::size_t i = 0; i < n; ++i) v[i] = (wv[i] + kShift * v[i]) / norm;

    wv = w * std::span<const double>(v);
    const double lambda = std::accumulate(wv.begin(), wv.end(), 0.0);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(wv[i] - lambda * v[i]));

    if (residual < best.residual) {
      best = EigenPair{lambda, v, it, residual};
      since_improvement = 0;
    } else if (++since_improvement >= kStallWindow) {
      throw ConvergenceError("power iteration stalled at residual " + std::to_string(best.residual),
                             best.eigenvalue, best.eigenvector, best.residual, it);
    }
    if (residual <= tol) return best;
  }
  throw ConvergenceError("power iteration did not converge in " + std::to_string(max_iter) +
                             " iterations (residual " + std::to_string(best.residual) + ")",
                         best.eigenvalue, best.eigenvector, best.residual, max_iter);
}

/// H(w, T) = w + w^2 + ... + w^T by repeated multiply-accumulate.
inline Matrix hearing_matrix(const ManagerNetwork& net, int horizon) {
  if (horizon < 1) throw HorizonError("horizon T must be >= 1 (got " + std::to_string(horizon) + ")");
  const Matrix& w = net.weights();
  Matrix power = w;
  Matrix h = w;
  for (int t = 2; t <= horizon; ++t) {
    power = power * w;
    for (std::size_t i = 0; i < h.rows(); ++i)
      for (std::size_t j = 0; j < h.cols(); ++j) {
        h(i, j) += power(i, j);
        if (!std::isfinite(h(i, j)))
          throw OverflowError("hearing matrix overflowed at t = " + std::to_string(t));
      }
  }
  return h;
}

inline std::vector<double> row_sums(const Matrix& m) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    out[i] = std::accumulate(r.begin(), r.end(), 0.0);
  }
  return out;
}

inline CentralityReport centrality_report(const ManagerNetwork& net, int horizon) {
  CentralityReport rep;
  rep.horizon = horizon;
  rep.hearing = hearing_matrix(net, horizon);
  rep.centrality = row_sums(rep.hearing);
  return rep;
}

/// DC(w, T) = H(w, T) 1. Entry i is the expected number of times news
/// originating at manager i is heard within T periods.
inline std::vector<double> diffusion_centrality(const ManagerNetwork& net, int horizon) {
  return row_sums(hearing_matrix(net, horizon));
}

/// Each off-diagonal entry is present with probability `density` and then
/// weighted uniformly on (0, 1]. The diagonal is zero. Draw order is fixed
/// (row-major, two draws per off-diagonal cell) so output depends only on
/// (n, density, seed).
inline ManagerNetwork generate_random_network(std::size_t n, double density, std::uint64_t seed) {
  if (n < 1) throw DimensionError("network size must be >= 1");
  if (!(density >= 0.0 && density <= 1.0)) throw ParamRangeError("density must be in [0,1]");
  Rng rng(seed);
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool present = rng.uniform() < density;
      const double weight = rng.uniform_open_closed();
      if (present) w(i, j) = weight;
    }
  return validate_network(std::move(w));
}

}  // namespace epifin::netdiff
