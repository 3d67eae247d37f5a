#include <gtest/gtest.h>

#include <random>

#include "nsbound/converse.hpp"
#include "nsbound/hypothesis.hpp"
#include "support.hpp"

using namespace nsbound;

namespace {

// beta as an LP over the acceptance probabilities.
double beta_lp(const std::vector<double>& P0, const std::vector<double>& P1, double eps) {
  LinearProgram<double> lp;
  lp.sense = Sense::minimize;
  std::vector<LpTerm<double>> row;
  for (std::size_t r = 0; r < P0.size(); ++r) {
    lp.add_var("T", P1[r], 0.0, 1.0);
    row.push_back({r, P0[r]});
  }
  lp.add_row("type1", RowKind::ge, 1 - eps, std::move(row));
  return solve_lp(lp).objective;
}

}  // namespace

TEST(Beta, Examples) {
  EXPECT_NEAR(beta({0.3, 0.7}, {0.3, 0.7}, 0.2).beta, 0.8, 1e-15);
  EXPECT_EQ(beta({1, 0}, {0, 1}, 0).beta, 0);
  const auto r = beta({0.9, 0.1}, {0.5, 0.5}, 0.1);
  EXPECT_NEAR(r.beta, 0.5, 1e-15);
  EXPECT_EQ(r.test.T, (std::vector<double>{1, 0}));
  EXPECT_THROW(beta({1}, {0.5, 0.5}, 0.1), Error);
}

TEST(Beta, TypeOneBudgetIsExact) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = fixtures::random_size(rng, 1, 8);
    const auto P0 = fixtures::random_distribution(rng, n, 0.3);
    const auto P1 = fixtures::random_distribution(rng, n, 0.3);
    const double eps = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto r = beta(P0, P1, eps);
    double accepted = 0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(r.test.T[i], 0);
      EXPECT_LE(r.test.T[i], 1);
      accepted += r.test.T[i] * P0[i];
    }
    EXPECT_NEAR(accepted, 1 - eps, 1e-12);
    EXPECT_NEAR(r.beta, beta_lp(P0, P1, eps), 1e-10);
  }
}

TEST(Beta, MonotoneAndDataProcessing) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = fixtures::random_size(rng, 2, 8);
    const auto P0 = fixtures::random_distribution(rng, n, 0.2);
    const auto P1 = fixtures::random_distribution(rng, n, 0.2);
    double prev = beta(P0, P1, 0).beta;
    for (double eps = 0.05; eps <= 1.0; eps += 0.05) {
      const double b = beta(P0, P1, eps).beta;
      EXPECT_LE(b, prev + 1e-15);
      prev = b;
    }
    auto merge = [](std::vector<double> v) {
      v[0] += v[1];
      v.erase(v.begin() + 1);
      return v;
    };
    for (double eps : {0.0, 0.1, 0.5})
      EXPECT_GE(beta(merge(P0), merge(P1), eps).beta, beta(P0, P1, eps).beta - 1e-12);
  }
}

TEST(Beta, TieBreakDoesNotChangeValue) {
  // outcomes 0 and 1 share a likelihood ratio
  const std::vector<double> P0{0.2, 0.4, 0.4}, P1{0.1, 0.2, 0.7};
  const std::vector<double> Q0{0.4, 0.2, 0.4}, Q1{0.2, 0.1, 0.7};
  for (double eps : {0.1, 0.45, 0.7}) EXPECT_NEAR(beta(P0, P1, eps).beta, beta(Q0, Q1, eps).beta, 1e-15);
}

TEST(PpvInner, Examples) {
  EXPECT_NEAR(ppv_inner(noiseless(2), {0.5, 0.5}, 0), 0.5, 1e-10);
  EXPECT_NEAR(ppv_inner(useless({0.5, 0.5}), {0.3, 0.7}, 0.5), 0.5, 1e-10);
  EXPECT_NEAR(ppv_inner(bsc(0.1), {0.5, 0.5}, 0.1), 0.5, 1e-10);
}

TEST(PpvBound, Examples) {
  EXPECT_NEAR(ppv_bound(noiseless(3), 0).M, 3, 1e-9);
  EXPECT_NEAR(ppv_bound(useless({0.5, 0.5}), 0.75).M, 4, 1e-9);
  EXPECT_NEAR(ppv_bound(bsc(0.1), 0.1).M, 2, 1e-8);
  EXPECT_THROW(ppv_bound(bsc(0.1), 1.0), Error);
}

TEST(PpvBound, EqualsSizeBound) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    auto ch = fixtures::random_channel(rng, fixtures::random_size(rng, 1, 5), fixtures::random_size(rng, 1, 5));
    for (double eps : {0.0, 0.01, 0.1, 0.5}) {
      const double m = max_size(ch, eps).M_beta;
      EXPECT_NEAR(ppv_bound(ch, eps).M, m, 1e-8 * m) << trial << " " << eps;
    }
  }
}

TEST(PpvBound, MinimaxConsistency) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    auto ch = fixtures::random_channel(rng, fixtures::random_size(rng, 2, 4), fixtures::random_size(rng, 2, 4));
    const double eps = 0.1;
    const auto b = ppv_bound(ch, eps);
    EXPECT_NEAR(ppv_inner(ch, b.p, eps), b.value, 1e-8);
    for (int k = 0; k < 20; ++k)
      EXPECT_GE(ppv_inner(ch, fixtures::random_distribution(rng, ch.input_size(), 0.2), eps), b.value - 1e-9);
  }
}
