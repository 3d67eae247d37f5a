#pragma once

// Neyman-Pearson tests and the hypothesis-testing (PPV) form of the size
// bound, built directly in test variables as a cross-check of the converse
// LPs.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nsbound/channel.hpp"
#include "nsbound/lp.hpp"

namespace nsbound {

/// Randomized test: T[r] is the probability of accepting hypothesis 0 on
/// outcome r.
struct BinaryTest {
  std::vector<double> T;
};

struct BetaResult {
  double beta = 0;
  BinaryTest test;
};

/// Smallest P1-acceptance among tests accepting P0 with probability >= 1-eps.
inline BetaResult beta(const std::vector<double>& P0, const std::vector<double>& P1, double eps) {
  if (P0.size() != P1.size()) throw Error(ErrorCode::dimension_mismatch, "distributions live on different sets");
  if (!(eps >= 0 && eps <= 1)) throw Error(ErrorCode::domain_error, "eps must lie in [0,1]");
  const std::size_t n = P0.size();
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < n; ++r)
    if (P0[r] > 0 || P1[r] > 0) order.push_back(r);
  // P0/P1 descending without dividing; P1 = 0 first
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return P0[a] * P1[b] > P0[b] * P1[a]; });
  BetaResult res;
  res.test.T.assign(n, 0.0);
  double need = 1 - eps;
  CompensatedSum b;
  for (std::size_t r : order) {
    if (need <= 0) break;
    if (P0[r] <= 0) continue;
    const double take = P0[r] <= need ? 1.0 : need / P0[r];
    res.test.T[r] = take;
    need -= take * P0[r];
    b.add(take * P1[r]);
  }
  // P0-null, P1-null outcomes cost nothing
  for (std::size_t r = 0; r < n; ++r)
    if (P0[r] <= 0 && P1[r] <= 0) res.test.T[r] = 1;
  res.beta = std::max(b.value(), 0.0);
  return res;
}

/// min over T in [0,1] of max_y sum_x T_xy p(x) subject to
/// sum E(y|x) p(x) T_xy >= 1 - eps.
inline double ppv_inner(const Channel& ch, const std::vector<double>& p, double eps, const LpOptions& opt = {}) {
  if (p.size() != ch.input_size()) throw Error(ErrorCode::dimension_mismatch, "distribution does not match the input alphabet");
  if (!(eps >= 0 && eps < 1)) throw Error(ErrorCode::domain_error, "eps must lie in [0,1)");
  const std::size_t A = ch.input_size(), B = ch.output_size();
  LinearProgram<double> lp;
  lp.sense = Sense::minimize;
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y) lp.add_var("T_" + std::to_string(x) + "_" + std::to_string(y), 0.0, 0.0, 1.0);
  const std::size_t t = lp.add_var("t", 1.0);
  for (std::size_t y = 0; y < B; ++y) {
    std::vector<LpTerm<double>> row;
    for (std::size_t x = 0; x < A; ++x)
      if (p[x] > 0) row.push_back({x * B + y, p[x]});
    row.push_back({t, -1.0});
    lp.add_row("max_" + std::to_string(y), RowKind::le, 0.0, std::move(row));
  }
  std::vector<LpTerm<double>> hit;
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y)
      if (ch(x, y) * p[x] > 0) hit.push_back({x * B + y, ch(x, y) * p[x]});
  lp.add_row("type1", RowKind::ge, 1 - eps, std::move(hit));
  const auto sol = solve_lp(lp, opt);
  if (sol.status != LpStatus::optimal) throw Error(ErrorCode::solver_failure, std::string("inner LP returned ") + to_string(sol.status));
  return sol.objective;
}

struct PpvResult {
  double M = 0;
  double value = 0;  // 1/M
  std::vector<double> p;
};

/// min mu over (p, R = pT): sum_x R_xy <= mu, sum E R >= 1 - eps,
/// 0 <= R_xy <= p(x), sum p = 1.
inline PpvResult ppv_bound(const Channel& ch, double eps, const LpOptions& opt = {}) {
  if (!(eps >= 0 && eps < 1)) throw Error(ErrorCode::domain_error, "eps must lie in [0,1)");
  const std::size_t A = ch.input_size(), B = ch.output_size();
  LinearProgram<double> lp;
  lp.sense = Sense::minimize;
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y) lp.add_var("R_" + std::to_string(x) + "_" + std::to_string(y));
  for (std::size_t x = 0; x < A; ++x) lp.add_var("p_" + std::to_string(x));
  const std::size_t mu = lp.add_var("mu", 1.0);
  for (std::size_t y = 0; y < B; ++y) {
    std::vector<LpTerm<double>> row;
    for (std::size_t x = 0; x < A; ++x) row.push_back({x * B + y, 1.0});
    row.push_back({mu, -1.0});
    lp.add_row("cap_" + std::to_string(y), RowKind::le, 0.0, std::move(row));
  }
  std::vector<LpTerm<double>> hit;
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y)
      if (ch(x, y) > 0) hit.push_back({x * B + y, ch(x, y)});
  lp.add_row("success", RowKind::ge, 1 - eps, std::move(hit));
  std::vector<LpTerm<double>> norm;
  for (std::size_t x = 0; x < A; ++x) norm.push_back({A * B + x, 1.0});
  lp.add_row("norm", RowKind::eq, 1.0, std::move(norm));
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y)
      lp.add_row("test_" + std::to_string(x) + "_" + std::to_string(y), RowKind::le, 0.0,
                 {{x * B + y, 1.0}, {A * B + x, -1.0}});
  const auto sol = solve_lp(lp, opt);
  if (sol.status != LpStatus::optimal) throw Error(ErrorCode::solver_failure, std::string("PPV LP returned ") + to_string(sol.status));
  PpvResult res;
  res.value = sol.objective;
  res.M = 1 / sol.objective;
  res.p.assign(sol.primal.begin() + static_cast<std::ptrdiff_t>(A * B), sol.primal.begin() + static_cast<std::ptrdiff_t>(A * B + A));
  for (auto& v : res.p) v = std::max(v, 0.0);
  const double s = std::accumulate(res.p.begin(), res.p.end(), 0.0);
  for (auto& v : res.p) v /= s;
  return res;
}

}  // namespace nsbound
