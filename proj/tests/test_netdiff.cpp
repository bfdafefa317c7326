#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

#include "epifin/io.hpp"
#include "epifin/netdiff.hpp"

using namespace epifin;
using namespace epifin::netdiff;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Eigen::MatrixXd to_eigen(const ManagerNetwork& net) {
  const std::size_t n = net.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = net.weight(i, j);
  return m;
}

// Independent oracle: sum_{t=1..T} w^t 1 with Eigen.
Eigen::VectorXd centrality_oracle(const ManagerNetwork& net, int horizon) {
  const Eigen::MatrixXd w = to_eigen(net);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(w.rows());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(w.rows());
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(w.rows(), w.cols());
  for (int t = 1; t <= horizon; ++t) {
    power = power * w;
    acc += power * ones;
  }
  return acc;
}

// Brute-force transitive closure (Floyd-Warshall on booleans).
bool closure_connected(const ManagerNetwork& net) {
  const std::size_t n = net.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r[i][j] = i == j || net.weight(i, j) > 0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r[i][j] = r[i][j] || (r[i][k] && r[k][j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!r[i][j]) return false;
  return true;
}

}  // namespace

TEST(ValidateNetwork, AcceptsBoundaryWeights) {
  const auto net = validate_network(from_rows({{0, 1}, {1, 0}}));
  EXPECT_EQ(net.size(), 2u);
  EXPECT_EQ(net.weight(0, 1), 1.0);
}

TEST(ValidateNetwork, RejectsOutOfRangeAndNonFinite) {
  EXPECT_THROW(validate_network(from_rows({{0, 1.2}, {0, 0}})), EntryRangeError);
  EXPECT_THROW(validate_network(from_rows({{0, -0.1}, {0, 0}})), EntryRangeError);
  EXPECT_THROW(validate_network(from_rows({{0, NAN}, {0, 0}})), EntryRangeError);
  EXPECT_THROW(validate_network(from_rows({{0, INFINITY}, {0, 0}})), EntryRangeError);
}

TEST(ValidateNetwork, RejectsNonSquare) {
  EXPECT_THROW(validate_network(Matrix(2, 3)), DimensionError);
  EXPECT_THROW(validate_network(Matrix()), DimensionError);
}

TEST(ValidateNetwork, ThreeCycle) {
  EXPECT_NO_THROW(validate_network(from_rows({{0, 0.5, 0}, {0, 0, 0.5}, {0.5, 0, 0}})));
}

TEST(StronglyConnected, Examples) {
  EXPECT_TRUE(strongly_connected(validate_network(from_rows({{0, .5, 0}, {0, 0, .5}, {.5, 0, 0}}))));
  EXPECT_FALSE(strongly_connected(validate_network(from_rows({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}))));
  EXPECT_TRUE(strongly_connected(validate_network(from_rows({{0}}))));
}

TEST(StronglyConnected, AgreesWithTransitiveClosureOnAllSmallDigraphs) {
  // Every digraph on n <= 4 nodes exhaustively, plus random ones on 5.
  for (std::size_t n = 1; n <= 4; ++n) {
    const std::size_t edges = n * (n - 1);
    for (std::uint64_t mask = 0; mask < (1ULL << edges); ++mask) {
      Matrix w(n, n);
      std::size_t bit = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) w(i, j) = (mask >> bit++) & 1 ? 0.5 : 0.0;
      const auto net = validate_network(w);
      ASSERT_EQ(strongly_connected(net), closure_connected(net)) << "n=" << n << " mask=" << mask;
    }
  }
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto net = generate_random_network(5, 0.35, seed);
    ASSERT_EQ(strongly_connected(net), closure_connected(net)) << "seed " << seed;
  }
}

TEST(HearingMatrix, DirectedLineHorizonTwo) {
  const auto net = validate_network(from_rows({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}));
  EXPECT_EQ(hearing_matrix(net, 2), from_rows({{0, 1, 1}, {0, 0, 1}, {0, 0, 0}}));
  const auto dc = diffusion_centrality(net, 2);
  EXPECT_EQ(dc, (std::vector<double>{2, 1, 0}));
}

TEST(HearingMatrix, HorizonOneIsW) {
  const auto net = generate_random_network(6, 0.6, 11);
  EXPECT_EQ(hearing_matrix(net, 1), net.weights());
}

TEST(HearingMatrix, ZeroMatrixStaysZero) {
  const auto net = validate_network(Matrix(4, 4));
  EXPECT_EQ(hearing_matrix(net, 5), Matrix(4, 4));
  EXPECT_EQ(diffusion_centrality(net, 5), std::vector<double>(4, 0.0));
}

TEST(HearingMatrix, RejectsBadHorizon) {
  const auto net = validate_network(Matrix(2, 2));
  EXPECT_THROW(hearing_matrix(net, 0), HorizonError);
  EXPECT_THROW(diffusion_centrality(net, -3), HorizonError);
}

TEST(HearingMatrix, OverflowReportsStep) {
  // Complete graph with unit weights: w^t entries grow like (n-1)^t.
  Matrix w(40, 40, 1.0);
  const auto net = validate_network(w);
  try {
    hearing_matrix(net, 400);
    FAIL() << "expected OverflowError";
  } catch (const OverflowError& e) {
    EXPECT_NE(std::string(e.what()).find("t = "), std::string::npos);
  }
}

TEST(HearingMatrix, TelescopingDifferenceIsNextPower) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto net = generate_random_network(6, 0.5, seed);
    const Eigen::MatrixXd w = to_eigen(net);
    for (int t = 1; t <= 5; ++t) {
      const Matrix a = hearing_matrix(net, t);
      const Matrix b = hearing_matrix(net, t + 1);
      Eigen::MatrixXd power = Eigen::MatrixXd::Identity(6, 6);
      for (int k = 0; k < t + 1; ++k) power = power * w;
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) ASSERT_NEAR(b(i, j) - a(i, j), power(i, j), 1e-12);
    }
  }
}

TEST(DiffusionCentrality, HorizonOneIsRowSumsExactly) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto net = generate_random_network(7, 0.5, seed);
    const auto dc = diffusion_centrality(net, 1);
    for (std::size_t i = 0; i < net.size(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < net.size(); ++j) acc += net.weight(i, j);
      ASSERT_EQ(dc[i], acc);
    }
  }
}

TEST(DiffusionCentrality, CompleteGraphUniformWeight) {
  const double p = 0.3;
  const auto net = validate_network(from_rows({{0, p, p}, {p, 0, p}, {p, p, 0}}));
  for (double v : diffusion_centrality(net, 1)) EXPECT_DOUBLE_EQ(v, 2 * p);
}

TEST(DiffusionCentrality, MatchesMatrixPowerOracle) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 8;
    const int horizon = 1 + static_cast<int>(seed % 6);
    const auto net = generate_random_network(n, 0.6, seed);
    const auto dc = diffusion_centrality(net, horizon);
    const auto oracle = centrality_oracle(net, horizon);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(dc[i], oracle(i), 1e-10);
  }
}

TEST(LeadingEigenpair, SymmetricTwoNode) {
  const auto ep = leading_eigenpair(validate_network(from_rows({{0, 1}, {1, 0}})));
  EXPECT_NEAR(ep.eigenvalue, 1.0, 1e-12);
  EXPECT_NEAR(ep.eigenvector[0], 0.5, 1e-12);
  EXPECT_NEAR(ep.eigenvector[1], 0.5, 1e-12);
}

TEST(LeadingEigenpair, DoublyStochasticRankOne) {
  const auto ep = leading_eigenpair(validate_network(from_rows({{.5, .5}, {.5, .5}})));
  EXPECT_NEAR(ep.eigenvalue, 1.0, 1e-12);
  EXPECT_NEAR(ep.eigenvector[0], 0.5, 1e-12);
}

TEST(LeadingEigenpair, PeriodicCycleStillConverges) {
  // A directed 3-cycle is irreducible but periodic.
  const auto ep = leading_eigenpair(validate_network(from_rows({{0, .5, 0}, {0, 0, .5}, {.5, 0, 0}})));
  EXPECT_NEAR(ep.eigenvalue, 0.5, 1e-10);
  for (double v : ep.eigenvector) EXPECT_NEAR(v, 1.0 / 3.0, 1e-10);
}

TEST(LeadingEigenpair, ZeroMatrixRejected) {
  EXPECT_THROW(leading_eigenpair(validate_network(Matrix(3, 3))), ZeroMatrixError);
}

TEST(LeadingEigenpair, IterationCapReportsBestIterate) {
  const auto net = generate_random_network(6, 0.8, 3);
  try {
    leading_eigenpair(net, 1e-14, 2);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.best_vector.size(), 6u);
    EXPECT_GT(e.best_residual, 0.0);
  }
}

TEST(LeadingEigenpair, MatchesDenseEigensolverOnRandomIrreducible) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 100; ++seed) {
    const auto net = generate_random_network(5, 0.5, seed);
    if (!strongly_connected(net)) continue;
    ++checked;
    const auto ep = leading_eigenpair(net, 1e-12);
    Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(net));
    double oracle = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
      oracle = std::max(oracle, es.eigenvalues()(k).real());
    ASSERT_NEAR(ep.eigenvalue, oracle, 1e-8) << "seed " << seed;
    double norm1 = 0.0;
    for (double v : ep.eigenvector) {
      ASSERT_GE(v, -1e-10);
      norm1 += std::abs(v);
    }
    ASSERT_NEAR(norm1, 1.0, 1e-12);
    ASSERT_LE(ep.residual, 1e-12);
  }
}

TEST(GenerateRandomNetwork, DensityExtremes) {
  const auto empty = generate_random_network(4, 0.0, 7);
  EXPECT_EQ(empty.weights(), Matrix(4, 4));
  const auto full = generate_random_network(4, 1.0, 7);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) {
        EXPECT_EQ(full.weight(i, j), 0.0);
      } else {
        EXPECT_GT(full.weight(i, j), 0.0);
        EXPECT_LE(full.weight(i, j), 1.0);
      }
    }
}

TEST(GenerateRandomNetwork, Deterministic) {
  EXPECT_EQ(generate_random_network(9, 0.4, 123).weights(), generate_random_network(9, 0.4, 123).weights());
  EXPECT_NE(generate_random_network(9, 0.4, 123).weights(), generate_random_network(9, 0.4, 124).weights());
}

TEST(NetworkCsv, RejectsRaggedRows) {
  EXPECT_THROW(io::parse_matrix_csv("0,1\n1\n"), DimensionError);
  const auto m = io::parse_matrix_csv("0,0.5\n0.25,0\n");
  EXPECT_EQ(m(1, 0), 0.25);
  EXPECT_EQ(io::parse_matrix_csv(io::format_matrix_csv(m)), m);
}
