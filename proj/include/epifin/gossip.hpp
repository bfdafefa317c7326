#pragma once

// Lossy pair-wise gossip: the 4-state exchange chain, its stationary
// distribution, and a seeded population simulation over a contact network.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "epifin/errors.hpp"
#include "epifin/matrix.hpp"
#include "epifin/netdiff.hpp"
#include "epifin/random.hpp"

namespace epifin::gossip {

/// Exchange probabilities.
///
/// Event tree for one contact: the initiator selects the item (select), the
/// data message arrives (gain), the delivery confirmation arrives
/// (1 - loss), and only after a confirmed delivery does the sender lose
/// interest (drop). `ext` is exogenous acquisition, applied independently
/// to each party of an uninformed pair.
struct ExchangeParams {
  double p_select = 0.0;
  double p_drop = 0.0;
  double p_loss = 0.0;
  double p_gain = 1.0;
  double p_ext = 0.0;

  /// Default exogenous rate when none is given: ambient news behaves like
  /// one more lossy sender.
  static double default_ext(double p_select, double p_gain) { return p_select * p_gain; }

  void validate() const {
    const auto check = [](const char* name, double p) {
      if (!(p >= 0.0 && p <= 1.0))
        throw ParamRangeError(std::string(name) + " = " + std::to_string(p) + " is outside [0,1]");
    };
    check("p_select", p_select);
    check("p_drop", p_drop);
    check("p_loss", p_loss);
    check("p_gain", p_gain);
    check("p_ext", p_ext);
  }
};

/// Cache bits of initiator (a) and responder (b). Canonical index is
/// 2a + b: (0,0)=0, (0,1)=1, (1,0)=2, (1,1)=3.
struct PairState {
  bool a = false;
  bool b = false;

  constexpr int index() const noexcept { return (a ? 2 : 0) + (b ? 1 : 0); }
  static constexpr PairState from_index(int k) noexcept { return {(k & 2) != 0, (k & 1) != 0}; }
  friend constexpr bool operator==(PairState, PairState) = default;
};

inline constexpr int kNone = 0;    // (0,0)
inline constexpr int kB = 1;       // (0,1)
inline constexpr int kA = 2;       // (1,0)
inline constexpr int kBoth = 3;    // (1,1)

using PairTransitionMatrix = std::array<std::array<double, 4>, 4>;

struct ScenarioProbabilities {
  double no_attempt = 0.0;
  double forward_loss = 0.0;   // data message lost
  double feedback_loss = 0.0;  // data delivered, confirmation lost
  double complete = 0.0;
};

inline PairTransitionMatrix build_transition_matrix(const ExchangeParams& p) {
  p.validate();
  const double s = p.p_select, d = p.p_drop, l = p.p_loss, g = p.p_gain, e = p.p_ext;
  const double attempt = s * g;                  // item reaches the other side
  const double handoff = s * g * (1.0 - l) * d;  // confirmed, then sender drops

  PairTransitionMatrix m{};
  m[kNone][kNone] = (1.0 - e) * (1.0 - e);
  m[kNone][kB] = e * (1.0 - e);
  m[kNone][kA] = e * (1.0 - e);
  m[kNone][kBoth] = e * e;

  m[kA][kB] = handoff;
  m[kA][kBoth] = s * g * (1.0 - (1.0 - l) * d);
  m[kA][kA] = 1.0 - attempt;

  // Responder pushes back symmetrically.
  m[kB][kA] = handoff;
  m[kB][kBoth] = s * g * (1.0 - (1.0 - l) * d);
  m[kB][kB] = 1.0 - attempt;

  // Duplicate delivery: only the initiator may lose interest.
  m[kBoth][kB] = handoff;
  m[kBoth][kBoth] = 1.0 - handoff;
  return m;
}

inline ScenarioProbabilities classify_scenarios(const ExchangeParams& p) {
  p.validate();
  const double s = p.p_select, g = p.p_gain, l = p.p_loss;
  return {1.0 - s, s * (1.0 - g), s * g * l, s * g * (1.0 - l)};
}

/// Samples the successor of `from` given a uniform draw u in [0, 1).
inline int sample_row(const std::array<double, 4>& row, double u) {
  double cum = 0.0;
  int last_positive = 0;
  for (int k = 0; k < 4; ++k) {
    if (row[k] > 0.0) last_positive = k;
    cum += row[k];
    if (u < cum) return k;
  }
  return last_positive;  // u landed in the rounding gap below 1
}

inline PairState step_pair(PairState state, const PairTransitionMatrix& m, Rng& rng) {
  return PairState::from_index(sample_row(m[state.index()], rng.uniform()));
}

inline PairState step_pair(PairState state, const ExchangeParams& params, Rng& rng) {
  return step_pair(state, build_transition_matrix(params), rng);
}

namespace detail {

// Closed communicating classes of a chain given by its positive entries.
inline std::vector<std::vector<int>> closed_classes(const PairTransitionMatrix& m) {
  std::array<std::array<bool, 4>, 4> reach{};
  for (int i = 0; i < 4; ++i) {
    reach[i][i] = true;
    for (int j = 0; j < 4; ++j)
      if (m[i][j] > 0.0) reach[i][j] = true;
  }
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;

  std::vector<std::vector<int>> classes;
  std::array<bool, 4> assigned{};
  for (int i = 0; i < 4; ++i) {
    if (assigned[i]) continue;
    std::vector<int> cls;
    for (int j = 0; j < 4; ++j)
      if (reach[i][j] && reach[j][i]) cls.push_back(j);
    for (int j : cls) assigned[j] = true;
    // Closed: nothing outside the class is reachable.
    bool closed = true;
    for (int j = 0; j < 4; ++j)
      if (reach[i][j] && !(reach[j][i])) closed = false;
    if (closed) classes.push_back(std::move(cls));
  }
  return classes;
}

inline std::string state_label(int k) {
  const auto s = PairState::from_index(k);
  return std::string("(") + (s.a ? "1" : "0") + "," + (s.b ? "1" : "0") + ")";
}

}  // namespace detail

/// Unique stationary distribution pi with pi P = pi, sum(pi) = 1.
/// Solved by Gaussian elimination on (P^T - I) with the last equation
/// replaced by the normalization.
inline std::array<double, 4> stationary_distribution(const PairTransitionMatrix& m) {
  const auto classes = detail::closed_classes(m);
  if (classes.size() != 1) {
    std::string msg = "chain has " + std::to_string(classes.size()) + " closed classes:";
    for (const auto& c : classes) {
      msg += " {";
      for (std::size_t i = 0; i < c.size(); ++i) msg += (i ? "," : "") + detail::state_label(c[i]);
      msg += "}";
    }
    throw ReducibleChainError(msg, classes);
  }

  std::array<std::array<double, 5>, 4> a{};  // augmented [A | b]
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) a[i][j] = m[j][i] - (i == j ? 1.0 : 0.0);
    a[i][4] = 0.0;
  }
  for (int j = 0; j < 4; ++j) a[3][j] = 1.0;
  a[3][4] = 1.0;

  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    const double diag = a[col][col];
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / diag;
      for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, 4> pi{};
  for (int i = 3; i >= 0; --i) {
    double acc = a[i][4];
    for (int j = i + 1; j < 4; ++j) acc -= a[i][j] * pi[j];
    pi[i] = acc / a[i][i];
  }
  // Clean negative round-off on transient states.
  for (auto& x : pi) x = std::max(x, 0.0);
  const double total = pi[0] + pi[1] + pi[2] + pi[3];
  for (auto& x : pi) x /= total;
  return pi;
}

/// Empirical transition frequencies from `trials` samples per pre-state.
inline PairTransitionMatrix empirical_transition_estimate(const ExchangeParams& params,
                                                          std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw ParamRangeError("trials must be >= 1");
  const auto m = build_transition_matrix(params);
  Rng rng(seed);
  PairTransitionMatrix freq{};
  for (int from = 0; from < 4; ++from) {
    std::array<std::size_t, 4> counts{};
    for (std::size_t t = 0; t < trials; ++t)
      ++counts[step_pair(PairState::from_index(from), m, rng).index()];
    for (int to = 0; to < 4; ++to)
      freq[from][to] = static_cast<double>(counts[to]) / static_cast<double>(trials);
  }
  return freq;
}

struct GossipTrace {
  int rounds = 0;
  std::vector<int> informed_count;        // index 0 is the initial state
  std::vector<double> informed_fraction;
  std::uint64_t seed = 0;
  ExchangeParams params;
  std::size_t isolated_skips = 0;         // contacts skipped for zero out-weight
};

/// One simulation run. Each round every manager, in index order, initiates a
/// single contact with a partner drawn proportionally to its out-weights;
/// the (initiator, partner) bits take one chain step and are written back
/// immediately. Managers with zero out-weight are skipped and counted.
/// Self-contacts (from diagonal weights) exchange nothing.
inline GossipTrace simulate_population(const netdiff::ManagerNetwork& net, const ExchangeParams& params,
                                       const std::vector<std::size_t>& initially_informed, int rounds,
                                       std::uint64_t seed) {
  const std::size_t n = net.size();
  if (rounds < 1) throw ParamRangeError("rounds must be >= 1");
  for (auto idx : initially_informed)
    if (idx >= n) throw DimensionError("initially informed index " + std::to_string(idx) + " out of range");
  const auto m = build_transition_matrix(params);

  std::vector<char> informed(n, 0);
  for (auto idx : initially_informed) informed[idx] = 1;
  std::vector<double> out_weight(n);
  for (std::size_t i = 0; i < n; ++i) out_weight[i] = net.out_weight(i);

  GossipTrace trace;
  trace.rounds = rounds;
  trace.seed = seed;
  trace.params = params;
  const auto record = [&] {
    const int count = static_cast<int>(std::count(informed.begin(), informed.end(), 1));
    trace.informed_count.push_back(count);
    trace.informed_fraction.push_back(static_cast<double>(count) / static_cast<double>(n));
  };
  record();

  Rng rng(seed);
  for (int round = 1; round <= rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      if (out_weight[i] <= 0.0) {
        ++trace.isolated_skips;
        continue;
      }
      const double target = rng.uniform() * out_weight[i];
      std::size_t j = 0;
      double cum = 0.0;
      std::size_t last_positive = 0;
      for (; j < n; ++j) {
        const double wij = net.weight(i, j);
        if (wij > 0.0) last_positive = j;
        cum += wij;
        if (target < cum) break;
      }
      if (j == n) j = last_positive;
      const double u = rng.uniform();
      if (j == i) continue;

      const PairState before{informed[i] != 0, informed[j] != 0};
      const PairState after = PairState::from_index(sample_row(m[before.index()], u));
      informed[i] = after.a;
      informed[j] = after.b;
    }
    record();
  }
  return trace;
}

/// Independent replicates with per-replicate seeds derive_seed(seed, r).
/// Runs on a few worker threads; results are stored by replicate index so
/// the output does not depend on scheduling.
inline std::vector<GossipTrace> simulate_replicates(const netdiff::ManagerNetwork& net,
                                                    const ExchangeParams& params,
                                                    const std::vector<std::size_t>& initially_informed,
                                                    int rounds, std::uint64_t seed, std::size_t replicates) {
  std::vector<GossipTrace> out(replicates);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t r = next++; r < replicates; r = next++)
      out[r] = simulate_population(net, params, initially_informed, rounds, derive_seed(seed, r));
  };
  const std::size_t workers =
      std::min<std::size_t>(replicates, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (std::size_t k = 0; k < workers; ++k) jobs.push_back(std::async(std::launch::async, worker));
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace epifin::gossip
