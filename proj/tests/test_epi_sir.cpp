#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "epifin/epi_sir.hpp"

using namespace epifin;
using namespace epifin::sir;

namespace {

const SirParams kFig6b{0.20, 0.10, 0.0, 1.0};
const SirParams kEndemic{0.5, 0.1, 0.05, 1.0};

double max_abs_diff(const SirState& a, const SirState& b) {
  return std::max({std::abs(a.s - b.s), std::abs(a.i - b.i), std::abs(a.r - b.r)});
}

}  // namespace

TEST(Derivatives, DiseaseFreeIsStationary) {
  const auto d = derivatives({1.0, 0.0, 0.0, 0.0}, kEndemic);
  EXPECT_EQ(d.ds, 0.0);
  EXPECT_EQ(d.di, 0.0);
  EXPECT_EQ(d.dr, 0.0);
}

TEST(Derivatives, HandExample) {
  const auto d = derivatives({0.99, 0.01, 0.0, 0.0}, kFig6b);
  EXPECT_NEAR(d.ds, -0.00198, 1e-17);
  EXPECT_NEAR(d.di, 0.00098, 1e-17);
  EXPECT_NEAR(d.dr, 0.001, 1e-17);
}

TEST(Derivatives, SumVanishesOnConservationManifold) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double s = u(gen), i = (1 - s) * u(gen);
    const SirParams p{2 * u(gen), u(gen), u(gen), 1.0};
    const auto d = derivatives({s, i, 1.0 - s - i, 0.0}, p);
    EXPECT_NEAR(d.ds + d.di + d.dr, 0.0, 1e-15);
  }
}

TEST(Rk4, InfectedSubspaceIsInvariant) {
  SirState x{0.7, 0.0, 0.3, 0.0};
  for (int k = 0; k < 5000; ++k) {
    x = rk4_step(x, kEndemic, 0.1);
    ASSERT_EQ(x.i, 0.0);
  }
  EXPECT_NEAR(x.s, 1.0, 1e-9);
}

TEST(Rk4, TurnoverOnlyMatchesClosedForm) {
  const SirParams p{0.0, 0.0, 0.3, 1.0};
  for (double h : {0.01, 0.1, 0.5}) {
    const auto x = rk4_step({0.0, 0.0, 1.0, 0.0}, p, h);
    const double exact = 1.0 - std::exp(-p.mu * h);
    // Local truncation of RK4 on y' = -mu y is (mu h)^5 / 120.
    EXPECT_NEAR(x.s, exact, std::pow(p.mu * h, 5) / 120.0 * 1.01 + 1e-16);
    EXPECT_DOUBLE_EQ(x.t, h);
  }
}

TEST(Rk4, RejectsNonPositiveStep) {
  EXPECT_THROW(rk4_step({1, 0, 0, 0}, kFig6b, 0.0), StepSizeError);
  EXPECT_THROW(rk4_step({1, 0, 0, 0}, kFig6b, -0.1), StepSizeError);
}

TEST(Rk4, LocalErrorIsFifthOrder) {
  // One step from the same state against a fine reference over the same
  // interval: the error ratio under halving is 2^5.
  const SirParams p{0.82, 0.18, 0.0, 1.0};
  const SirState x0{0.9, 0.1, 0.0, 0.0};
  const auto reference = [&](double h) {
    return integrate(p, x0, 1e-5, h).states.back();
  };
  const double h = 0.4;
  const double e1 = max_abs_diff(rk4_step(x0, p, h), reference(h));
  const double e2 = max_abs_diff(rk4_step(x0, p, h / 2), reference(h / 2));
  EXPECT_GT(e1 / e2, 28.0);
  EXPECT_LT(e1 / e2, 36.0);
}

TEST(Rk4, GlobalErrorRatioUnderHalving) {
  for (const auto& preset_params : {kFig6b, SirParams{0.82, 0.18, 0, 1}, SirParams{0.61, 0.49, 0, 1}, kEndemic}) {
    const SirState x0{0.99, 0.01, 0.0, 0.0};
    const double horizon = 20.0;
    const auto ref = integrate(preset_params, x0, 1e-4, horizon).states.back();
    const double e1 = max_abs_diff(integrate(preset_params, x0, 0.4, horizon).states.back(), ref);
    const double e2 = max_abs_diff(integrate(preset_params, x0, 0.2, horizon).states.back(), ref);
    EXPECT_GE(e1 / e2, 12.0) << preset_params.beta;
    EXPECT_LE(e1 / e2, 20.0) << preset_params.beta;
  }
}

TEST(Integrate, TimesAndLength) {
  const auto tr = integrate(kFig6b, {0.999, 0.001, 0, 0}, 0.1, 10.0);
  ASSERT_EQ(tr.states.size(), 101u);
  EXPECT_EQ(tr.states[37].t, 37 * 0.1);
  EXPECT_EQ(tr.states.back().t, 100 * 0.1);
}

TEST(Integrate, ConservationAndNonnegativityForPresets) {
  for (const auto& pr : kPresets) {
    const auto p = *preset(pr.name);
    const auto tr = integrate(p, {0.999, 0.001, 0.0, 0.0}, 0.01, 500.0);
    double drift = 0.0, low = 0.0;
    for (const auto& x : tr.states) {
      drift = std::max(drift, std::abs(x.total() - 1.0));
      low = std::min({low, x.s, x.i, x.r});
    }
    EXPECT_LE(drift, 1e-8) << pr.name;
    EXPECT_GE(low, -1e-10) << pr.name;
  }
}

TEST(Integrate, NoInfectionSourceRelaxesToN) {
  const auto tr = integrate(kEndemic, {0.4, 0.0, 0.6, 0.0}, 0.05, 400.0);
  for (const auto& x : tr.states) ASSERT_EQ(x.i, 0.0);
  EXPECT_NEAR(tr.states.back().s, 1.0, 1e-8);
}

TEST(Integrate, Fig6bSinglePeakedWave) {
  const auto tr = integrate(kFig6b, {0.999, 0.001, 0.0, 0.0}, 0.01, 400.0);
  std::size_t peak = 0;
  for (std::size_t k = 1; k < tr.states.size(); ++k)
    if (tr.states[k].i > tr.states[peak].i) peak = k;
  EXPECT_GT(peak, 0u);
  EXPECT_LT(peak, tr.states.size() - 1);
  for (std::size_t k = 1; k <= peak; ++k) ASSERT_GE(tr.states[k].i, tr.states[k - 1].i);
  for (std::size_t k = peak + 1; k < tr.states.size(); ++k) ASSERT_LE(tr.states[k].i, tr.states[k - 1].i);
}

TEST(Integrate, EndemicConvergenceFromRandomStarts) {
  const double s_star = 0.3, i_star = 0.7 / 3.0, r_star = 1.4 / 3.0;
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int k = 0; k < 10; ++k) {
    double s = u(gen), i = u(gen), r = u(gen);
    const double total = s + i + r;
    s /= total;
    i /= total;
    const auto x = integrate(kEndemic, {s, i, 1.0 - s - i, 0.0}, 0.05, 2000.0).states.back();
    EXPECT_NEAR(x.s, s_star, 1e-6);
    EXPECT_NEAR(x.i, i_star, 1e-6);
    EXPECT_NEAR(x.r, r_star, 1e-6);
  }
}

TEST(Integrate, ThresholdProperty) {
  for (double beta : {0.1, 0.3, 0.5, 0.9})
    for (double alpha : {0.1, 0.25, 0.45})
      for (double s0 : {0.2, 0.5, 0.9}) {
        const SirParams p{beta, alpha, 0.0, 1.0};
        const double i0 = 0.05;
        const auto tr = integrate(p, {s0, i0, 1.0 - s0 - i0, 0.0}, 0.05, 200.0);
        bool decreasing = true;
        for (std::size_t k = 1; k < tr.states.size(); ++k)
          if (tr.states[k].i > tr.states[k - 1].i) decreasing = false;
        EXPECT_EQ(decreasing, basic_reproduction_number(p) * s0 <= 1.0) << beta << " " << alpha << " " << s0;
      }
}

TEST(Integrate, Errors) {
  EXPECT_THROW(integrate(kFig6b, {0.5, 0.1, 0.0, 0.0}, 0.1, 1.0), ConservationError);
  EXPECT_THROW(integrate(kFig6b, {1, 0, 0, 0}, 0.0, 1.0), StepSizeError);
  EXPECT_THROW(integrate(kFig6b, {1, 0, 0, 0}, 0.5, 0.1), StepSizeError);
  // Wildly unstable step blows the drift check.
  EXPECT_THROW(integrate({50.0, 0.1, 0.0, 1.0}, {0.5, 0.5, 0.0, 0.0}, 5.0, 100.0), ConservationError);
}

TEST(R0, Examples) {
  EXPECT_DOUBLE_EQ(basic_reproduction_number(kFig6b), 2.0);
  EXPECT_EQ(basic_reproduction_number({0.0, 0.3, 0.1, 1.0}), 0.0);
  EXPECT_NEAR(basic_reproduction_number({0.82, 0.18, 0.0, 1.0}), 4.5555555555555555, 1e-14);
  EXPECT_THROW(basic_reproduction_number({0.2, 0.0, 0.0, 1.0}), DegenerateParamsError);
}

TEST(Equilibria, SubthresholdDiseaseFreeStable) {
  const auto rep = equilibria({0.1, 0.2, 0.05, 1.0});
  EXPECT_FALSE(rep.endemic.has_value());
  EXPECT_EQ(rep.disease_free.stability, Stability::Stable);
  EXPECT_NEAR(rep.disease_free.eig1.real(), -0.05, 1e-15);
  EXPECT_NEAR(rep.disease_free.eig2.real(), -0.15, 1e-15);
}

TEST(Equilibria, EndemicClosedFormAndStable) {
  const auto rep = equilibria(kEndemic);
  ASSERT_TRUE(rep.endemic.has_value());
  const auto& e = *rep.endemic;
  EXPECT_NEAR(e.s, 0.3, 1e-15);
  EXPECT_NEAR(e.i, 0.7 / 3.0, 1e-15);
  EXPECT_NEAR(e.r, 1.4 / 3.0, 1e-15);
  EXPECT_NEAR(e.s + e.i + e.r, 1.0, 1e-10);
  EXPECT_EQ(e.stability, Stability::Stable);
  EXPECT_EQ(rep.disease_free.stability, Stability::Unstable);
  // Substitution: derivatives vanish at the reported point.
  const auto d = derivatives({e.s, e.i, e.r, 0.0}, kEndemic);
  EXPECT_NEAR(d.ds, 0.0, 1e-15);
  EXPECT_NEAR(d.di, 0.0, 1e-15);
  EXPECT_NEAR(d.dr, 0.0, 1e-15);
}

TEST(Equilibria, ThresholdIsNonHyperbolic) {
  const auto rep = equilibria({0.25, 0.2, 0.05, 1.0});
  EXPECT_EQ(rep.disease_free.stability, Stability::NonHyperbolic);
  EXPECT_FALSE(rep.endemic.has_value());
}

TEST(Equilibria, NoTurnoverAboveThresholdIsUndefined) {
  EXPECT_THROW(equilibria(kFig6b), EndemicUndefinedError);
  EXPECT_THROW(equilibria({0.2, 0.0, 0.0, 1.0}), DegenerateParamsError);
}

TEST(FinalSize, Fig6bRootSatisfiesRelation) {
  const double s = final_size(kFig6b, 0.999, 0.001);
  EXPECT_GT(s, 0.0);
  EXPECT_LT(s, 0.999);
  EXPECT_NEAR(std::log(0.999 / s), 2.0 * (1.0 - s), 1e-11);
}

TEST(FinalSize, NoTransmission) { EXPECT_EQ(final_size({0.0, 0.3, 0.0, 1.0}, 0.8, 0.1), 0.8); }

TEST(FinalSize, SmallOutbreakBound) {
  const SirParams p{0.01, 1.0, 0.0, 1.0};
  const double s0 = 0.99, i0 = 0.01, r0 = 0.01;
  EXPECT_NEAR(final_size(p, s0, i0), s0, i0 * r0 / (1 - r0) + 1e-9);
}

TEST(FinalSize, MatchesLongIntegration) {
  for (const auto& pr : kPresets) {
    const auto p = *preset(pr.name);
    const double expected = final_size(p, 0.999, 0.001);
    const auto tr = integrate(p, {0.999, 0.001, 0.0, 0.0}, 0.01, 400.0);
    EXPECT_NEAR(tr.states.back().s, expected, 1e-4) << pr.name;
  }
}

TEST(FinalSize, Errors) {
  EXPECT_THROW(final_size(kEndemic, 0.9, 0.1), DegenerateParamsError);
  EXPECT_THROW(final_size(kFig6b, 0.9, 0.0), DegenerateParamsError);
}

TEST(Presets, Values) {
  EXPECT_EQ(preset("fig6c")->beta, 0.82);
  EXPECT_EQ(preset("fig6d")->alpha, 0.49);
  EXPECT_EQ(preset("fig6d")->mu, 0.0);
  EXPECT_FALSE(preset("fig7").has_value());
}
