#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "ruin/brownian.hpp"
#include "ruin/quadrature.hpp"

using namespace ruin;

TEST(Quadrature, IntegratesSmoothAndPeakedFunctions) {
  auto r = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-13);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-12);
  auto g = integrate_adaptive([](double x) { return std::exp(-1e4 * (x - 0.3) * (x - 0.3)); }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(g.value, std::sqrt(std::numbers::pi / 1e4), 1e-11);
  EXPECT_EQ(integrate_adaptive([](double) { return 1.0; }, 2.0, 2.0, 1e-9).value, 0.0);
  EXPECT_THROW(integrate_adaptive([](double x) { return x; }, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(ExitDensity, EvenInMu) {
  for (double mu : {0.3, 1.0, 2.5}) {
    for (int j = 1; j <= 20; ++j) {
      const double t = 0.05 * j * j;
      EXPECT_DOUBLE_EQ(exit_density({mu, 1.0}, t), exit_density({-mu, 1.0}, t)) << mu << " " << t;
    }
  }
}

TEST(ExitDensity, MatchesSpectralExpansion) {
  for (double mu : {0.0, 0.5, 1.0, 2.0}) {
    for (double k : {0.5, 1.0, 2.0}) {
      for (double t : {0.05, 0.1, 0.3, 1.0, 2.0, 5.0, 10.0}) {
        const double ref = oracle::spectral_exit_density(mu, k, t);
        const double f = exit_density({mu, k}, t);
        EXPECT_NEAR(f, ref, 1e-12 + 1e-10 * ref) << "mu=" << mu << " k=" << k << " t=" << t;
      }
    }
  }
}

TEST(ExitDensity, UnderflowsAndRejectsBadTimes) {
  EXPECT_EQ(exit_density({0.0, 1.0}, 1e-6), 0.0);
  EXPECT_EQ(exit_density({3.0, 1.0}, 1e5), 0.0);
  EXPECT_THROW(exit_density({0.0, 1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(exit_density({0.0, 1.0}, -1.0), std::invalid_argument);
  EXPECT_THROW(exit_density({0.0, -1.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(exit_density({0.0, 1.0, 0.0}, 1.0), std::invalid_argument);
}

TEST(ExitDensity, TruncationCertificate) {
  for (double mu : {0.0, 1.0}) {
    for (double t : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      BrownianExit tight{mu, 1.0, 1e-18};
      BrownianExit loose{mu, 1.0, 2e-18};
      auto a = exit_density_series(tight, t);
      auto b = exit_density_series(loose, t);
      const double bound = std::max(a.last_pair_bound, b.last_pair_bound) * std::max(1, std::max(a.pairs, b.pairs));
      EXPECT_LE(std::fabs(a.value - b.value), bound + 1e-300) << mu << " " << t;
      EXPECT_LT(a.last_pair_bound, 1e-18);
    }
  }
}

TEST(ExitDensity, NormalizationAcrossGrid) {
  for (double mu : {0.0, 0.5, 1.0, 2.0}) {
    for (double k : {0.5, 1.0, 2.0}) {
      auto m = exit_moment({mu, k}, 0, 1e-12);
      EXPECT_LT(m.tail_estimate, 1e-10);
      const double total = m.integral + m.tail_estimate + m.left_remainder;
      EXPECT_NEAR(total, 1.0, 1e-8) << "mu=" << mu << " k=" << k;
    }
  }
}

TEST(ExitDensity, MeanExitTime) {
  auto m0 = exit_moment({0.0, 1.0}, 1, 1e-12);
  EXPECT_NEAR(m0.integral + m0.tail_estimate, 1.0, 1e-6);
  auto m2 = exit_moment({0.0, 2.0}, 1, 1e-12);
  EXPECT_NEAR(m2.integral + m2.tail_estimate, 4.0, 1e-6);
  // With drift: E[T] = (k / mu) tanh(mu k).
  auto md = exit_moment({0.7, 1.5}, 1, 1e-12);
  EXPECT_NEAR(md.integral + md.tail_estimate, 1.5 / 0.7 * std::tanh(0.7 * 1.5), 1e-6);
}

TEST(DensityGrid, ValuesAndNorm) {
  auto g = density_grid({0.5, 1.0}, {0.1, 0.5, 1.0, 3.0}, 1e-12);
  ASSERT_EQ(g.values.size(), 4u);
  for (double v : g.values) EXPECT_GE(v, -1e-14);
  EXPECT_LE(g.est_norm, 1 + 1e-8);
  EXPECT_LT(g.norm_defect, 1e-8);
}

TEST(ExitTail, Examples) {
  EXPECT_EQ(exit_tail({0.7, 2.0}, 0.0, 1e-10), 1.0);
  EXPECT_GE(exit_tail({0.0, 1.0}, 1.0, 1e-12), exit_tail({0.5, 1.0}, 1.0, 1e-12));
  EXPECT_LT(exit_tail({2.0, 1.0}, 10.0, 1e-12), 1e-3);
  EXPECT_THROW(exit_tail({0.0, 1.0}, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(exit_tail({0.0, 1.0}, -1.0, 1e-9), std::invalid_argument);
}

TEST(ExitTail, MatchesSpectralTail) {
  for (double mu : {0.0, 0.5, 2.0}) {
    for (double t : {0.1, 0.5, 1.0, 4.0, 12.0}) {
      EXPECT_NEAR(exit_tail({mu, 1.0}, t, 1e-12), oracle::spectral_exit_tail(mu, 1.0, t), 1e-10) << mu << " " << t;
    }
  }
}

TEST(MonotonicitySweep, Examples) {
  std::vector<double> mus;
  for (int j = 0; j <= 8; ++j) mus.push_back(0.25 * j);
  auto rep = monotonicity_sweep(1.0, mus, {0.25, 0.5, 1, 2, 4}, 1e-10);
  EXPECT_TRUE(rep.ordered);
  EXPECT_GE(rep.min_margin, -2e-10);
  EXPECT_EQ(rep.margins.size(), mus.size() - 1);

  auto single = monotonicity_sweep(1.0, {0.4}, {1.0, 2.0}, 1e-10);
  EXPECT_TRUE(single.ordered);
  EXPECT_TRUE(single.margins.empty());

  auto k2 = monotonicity_sweep(2.0, {0.0, 1.0}, {4.0}, 1e-10);
  EXPECT_TRUE(k2.ordered);
  EXPECT_GE(k2.tails[0][0], k2.tails[1][0]);

  EXPECT_THROW(monotonicity_sweep(1.0, {0.5, 0.2}, {1.0}, 1e-10), std::invalid_argument);
  EXPECT_THROW(monotonicity_sweep(1.0, {-0.5, 0.2}, {1.0}, 1e-10), std::invalid_argument);
  EXPECT_THROW(monotonicity_sweep(1.0, {}, {1.0}, 1e-10), std::invalid_argument);
}

TEST(MonotonicitySweep, SerialMatchesParallel) {
  const std::vector<double> mus{0.0, 0.3, 0.9, 1.7};
  const std::vector<double> ts{0.2, 1.0, 3.0};
  auto a = monotonicity_sweep_serial(1.5, mus, ts, 1e-10);
  for (int workers : {1, 3, 8}) {
    auto b = monotonicity_sweep(1.5, mus, ts, 1e-10, workers);
    EXPECT_EQ(a.tails, b.tails);
    EXPECT_EQ(a.min_margin, b.min_margin);
  }
}

TEST(RandomWalkBridge, Examples) {
  auto fair = rw_approx_exit_dist(0.0, 1.0, 1e-2, 5.0);
  EXPECT_EQ(fair.p, 0.5);
  EXPECT_EQ(fair.barrier, 10);
  EXPECT_FALSE(fair.barrier_rounding_warning);

  auto fine = rw_approx_exit_dist(0.0, 1.0, 1e-4, 10.0);
  EXPECT_NEAR(fine.mean(), 1.0, 0.02);

  auto drift = rw_approx_exit_dist(0.5, 1.0, 1e-4, 6.0);
  double worst = 0;
  for (double t = 0.1; t <= 5.0 + 1e-9; t += 0.1) {
    worst = std::max(worst, std::fabs(drift.tail(t) - exit_tail({0.5, 1.0}, t, 1e-12)));
  }
  EXPECT_LE(worst, 0.01);

  EXPECT_TRUE(rw_approx_exit_dist(0.0, 1.0, 0.3, 2.0).barrier_rounding_warning);
  EXPECT_THROW(rw_approx_exit_dist(3.0, 1.0, 0.25, 2.0), std::invalid_argument);
  EXPECT_THROW(rw_approx_exit_dist(0.0, 1.0, 0.0, 2.0), std::invalid_argument);
}

TEST(EulerSimulation, ConsistencyTriangle) {
  const double mu = 0.5, k = 1.0;
  auto rw = rw_approx_exit_dist(mu, k, 1e-4, 6.0);
  auto mc = simulate_exit_euler({mu, k, 1e-3, 10.0, 200'000, 31, 1});
  EXPECT_EQ(mc.exit_index.total() + mc.censored, 200'000u);
  double d_rw = 0, d_mc = 0, d_rm = 0;
  for (int j = 1; j <= 50; ++j) {
    const double t = 0.1 * j;
    const double exact = exit_tail({mu, k}, t, 1e-12);
    d_rw = std::max(d_rw, std::fabs(rw.tail(t) - exact));
    d_mc = std::max(d_mc, std::fabs(mc.tail(t) - exact));
    d_rm = std::max(d_rm, std::fabs(rw.tail(t) - mc.tail(t)));
  }
  EXPECT_LE(d_rw, 0.01);
  EXPECT_LE(d_mc, 0.01);
  EXPECT_LE(d_rm, 0.01);
}

TEST(EulerSimulation, SerialMatchesParallel) {
  const EulerExitConfig cfg{1.2, 0.8, 2e-3, 5.0, 20'000, 4, 1};
  auto a = simulate_exit_euler_serial(cfg);
  for (int workers : {2, 5}) {
    auto c = cfg;
    c.workers = workers;
    auto b = simulate_exit_euler(c);
    EXPECT_EQ(a.exit_index, b.exit_index);
    EXPECT_EQ(a.censored, b.censored);
  }
  EXPECT_THROW(simulate_exit_euler({0.0, 1.0, 0.0, 5.0, 10, 1, 1}), std::invalid_argument);
}
