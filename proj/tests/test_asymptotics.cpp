#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nsbound/asymptotics.hpp"
#include "support.hpp"

using namespace nsbound;

namespace {

double h2(double d) { return -d * std::log2(d) - (1 - d) * std::log2(1 - d); }

double bsc_dispersion(double d) {
  const double l = std::log2((1 - d) / d);
  return d * (1 - d) * l * l;
}

}  // namespace

TEST(Capacity, Examples) {
  EXPECT_NEAR(capacity(noiseless(3)).C, std::log2(3.0), 1e-10);
  EXPECT_NEAR(capacity(bsc(0.1)).C, 1 - h2(0.1), 1e-9);
  EXPECT_NEAR(capacity(bsc(0.1)).C, 0.5310044, 1e-6);
  EXPECT_NEAR(capacity(useless({0.2, 0.3, 0.5})).C, 0, 1e-12);
  // BEC and Z-channel closed forms
  EXPECT_NEAR(capacity(bec(0.3)).C, 0.7, 1e-9);
  const double f = 0.2, zc = std::log2(1 + (1 - f) * std::pow(f, f / (1 - f)));
  EXPECT_NEAR(capacity(z_channel(f)).C, zc, 1e-9);
  AsymptoticOptions bad;
  bad.tol = 0;
  EXPECT_THROW(capacity(bsc(0.1), bad), Error);
}

TEST(Capacity, KktConditions) {
  std::mt19937_64 rng(7);
  AsymptoticOptions opt;
  opt.tol = 1e-9;
  for (int trial = 0; trial < 30; ++trial) {
    auto ch = fixtures::random_channel(rng, fixtures::random_size(rng, 1, 5), fixtures::random_size(rng, 1, 5));
    const auto c = capacity(ch, opt);
    double qs = 0;
    for (double v : c.q_star) qs += v;
    EXPECT_NEAR(qs, 1, 1e-12);
    for (std::size_t x = 0; x < ch.input_size(); ++x) {
      const double d = detail::divergence_row(ch, x, c.q_star);
      EXPECT_LE(d, c.C + 10 * opt.tol);
      if (c.p_star[x] > 1e-3) {
        EXPECT_NEAR(d, c.C, 10 * opt.tol);
      }
    }
    for (int k = 0; k < 5; ++k)
      EXPECT_LE(mutual_information(ch, fixtures::random_distribution(rng, ch.input_size(), 0.3)), c.C + opt.tol);
  }
}

TEST(Dispersion, Examples) {
  EXPECT_NEAR(dispersion(noiseless(4)).V, 0, 1e-12);
  EXPECT_NEAR(dispersion(bsc(0.1)).V, bsc_dispersion(0.1), 1e-9);
  EXPECT_NEAR(dispersion(bsc(0.1)).V, 0.9043582, 1e-5);
  EXPECT_NEAR(dispersion(useless({0.4, 0.6})).V, 0, 1e-12);
  EXPECT_NEAR(dispersion(bec(0.3)).V, 0.3 * 0.7, 1e-8);
}

// Two identical BSC inputs plus a third: the capacity-achieving set is a
// segment and the variance is the same along it.
TEST(Dispersion, NonUniqueOptimizer) {
  auto ch = validate_channel<double>({{0.9, 0.1}, {0.9, 0.1}, {0.1, 0.9}});
  const auto d = dispersion(ch);
  EXPECT_NEAR(d.V, bsc_dispersion(0.1), 1e-7);
  EXPECT_EQ(d.support_set.size(), 3u);
  EXPECT_NEAR(d.p_min[0] + d.p_min[1], 0.5, 1e-7);
}

// Noiseless symbol plus a noisy pair: the optimal face has distinct
// variances and the minimum is picked.
TEST(Dispersion, PicksMinimumVarianceInput) {
  auto ch = validate_channel<double>({{1, 0, 0}, {0, 0.5, 0.5}, {0, 0.5, 0.5}, {0, 1, 0}, {0, 0, 1}});
  const auto d = dispersion(ch);
  const auto c = capacity(ch);
  EXPECT_NEAR(c.C, std::log2(3.0), 1e-9);
  // mass on the noisy inputs only adds variance
  EXPECT_NEAR(d.V, 0, 1e-8);
  EXPECT_NEAR(d.p_min[1] + d.p_min[2], 0, 1e-7);
}

TEST(Dispersion, FeasibleAndStable) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto ch = fixtures::random_channel(rng, fixtures::random_size(rng, 2, 4), fixtures::random_size(rng, 2, 4));
    const auto d = dispersion(ch);
    EXPECT_GE(d.V, 0);
    std::vector<double> q(ch.output_size(), 0.0);
    double mass = 0;
    for (std::size_t x = 0; x < ch.input_size(); ++x) {
      mass += d.p_min[x];
      for (std::size_t y = 0; y < ch.output_size(); ++y) q[y] += d.p_min[x] * ch(x, y);
    }
    EXPECT_NEAR(mass, 1, 1e-9);
    for (std::size_t y = 0; y < q.size(); ++y) EXPECT_NEAR(q[y], d.q_star[y], 1e-6);
    // reversing the input order relabels the LP vertices
    std::vector<std::vector<double>> rows = ch.matrix().to_rows();
    std::reverse(rows.begin(), rows.end());
    EXPECT_NEAR(dispersion(Channel(std::move(rows))).V, d.V, 1e-9);
  }
}

TEST(Dispersion, ZeroExactlyWhenOutputRatioIsFlat) {
  for (const auto& ch : {noiseless(3), useless({0.3, 0.7}), typewriter(5, 0.5), bsc(0.1), bec(0.3), z_channel(0.2)}) {
    const auto d = dispersion(ch);
    EXPECT_EQ(zero_dispersion_residual(ch, d) <= 1e-6, d.V <= 1e-8);
  }
}

TEST(SimulationCost, Examples) {
  EXPECT_NEAR(exact_simulation_cost(noiseless(5)), std::log2(5.0), 1e-12);
  EXPECT_NEAR(exact_simulation_cost(bsc(0.1)), std::log2(1.8), 1e-10);
  EXPECT_NEAR(exact_simulation_cost(useless({0.25, 0.75})), 0, 1e-12);
}

TEST(QInv, Examples) {
  EXPECT_EQ(q_inv(0.5), 0);
  // Q(1) and Q(2) to double precision
  EXPECT_NEAR(q_inv(0.15865525393145707), 1.0, 1e-9);
  EXPECT_NEAR(q_inv(0.022750131948179195), 2.0, 1e-9);
  // six-digit inputs move the root by (Q(x) - eps)/phi(x)
  EXPECT_NEAR(q_inv(0.158655), 1.0 + (0.15865525393145707 - 0.158655) / 0.24197072451914337, 1e-9);
  EXPECT_NEAR(q_inv(0.022750), 2.0 + (0.022750131948179195 - 0.022750) / 0.05399096651318806, 1e-8);
  EXPECT_NEAR(q_inv(0.05), 1.6448536269514722, 1e-12);
  EXPECT_THROW(q_inv(0), Error);
  EXPECT_THROW(q_inv(1), Error);
}

TEST(QInv, InverseAndMonotone) {
  double prev = INFINITY;
  for (int i = 1; i <= 1000; ++i) {
    const double eps = i / 1001.0;
    const double x = q_inv(eps);
    EXPECT_LE(std::abs(q_function(x) - eps), 1e-10);
    EXPECT_LT(x, prev);
    prev = x;
  }
  EXPECT_LE(std::abs(q_function(q_inv(1e-12)) - 1e-12), 1e-20);
}

TEST(NormalApproximation, Examples) {
  EXPECT_DOUBLE_EQ(normal_approximation(1, 0, 10, 0.1), 10);
  EXPECT_DOUBLE_EQ(normal_approximation(0.7, 2.5, 33, 0.5), 0.7 * 33);
  EXPECT_NEAR(normal_approximation(0.531004, 0.904358, 100, 0.05), 37.459, 1e-3);
  EXPECT_THROW(normal_approximation(1, -1, 10, 0.1), Error);
  EXPECT_THROW(normal_approximation(1, 1, 0, 0.1), Error);
}

TEST(ZeroDispersion, ConditionsAgree) {
  auto expect = [](const Channel& ch, bool value) {
    const auto r = zero_dispersion_check(ch);
    EXPECT_EQ(r.cond_capacity_eq_alpha, value);
    EXPECT_EQ(r.cond_K0_eq_C, value);
    EXPECT_EQ(r.cond_V_zero, value);
    EXPECT_TRUE(r.consistent());
  };
  expect(noiseless(3), true);
  expect(useless({0.3, 0.7}), true);
  expect(typewriter(5, 0.5), true);
  expect(bsc(0.1), false);
  expect(bec(0.3), false);
  expect(z_channel(0.2), false);
}

TEST(Sandwich, PackingCapacitySimulation) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto ch = fixtures::random_channel(rng, fixtures::random_size(rng, 1, 5), fixtures::random_size(rng, 1, 5), 0.5);
    const double C = capacity(ch).C;
    EXPECT_LE(std::log2(zero_error_size(ch).alpha_star), C + 1e-7);
    EXPECT_LE(C, exact_simulation_cost(ch) + 1e-9);
  }
}
