#pragma once

// Capacity, dispersion, exact simulation cost and the normal approximation.
// Everything is reported in bits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "nsbound/channel.hpp"
#include "nsbound/lp.hpp"
#include "nsbound/zero_error.hpp"

namespace nsbound {

struct CapacityResult {
  double C = 0;  // the mutual information of p_star, a lower bound
  double upper = 0;
  std::vector<double> p_star;
  std::vector<double> q_star;
  std::size_t iterations = 0;
  double residual = 0;  // upper - C
};

struct DispersionResult {
  double V = 0;
  std::vector<double> p_min;
  std::vector<std::size_t> support_set;
  double C = 0;
  std::vector<double> q_star;
};

struct AsymptoticOptions {
  double tol = 1e-10;
  std::size_t max_iterations = 100000;
  /// Inputs with D(E(.|x)||q) >= C - support_factor * tol may carry mass.
  double support_factor = 10;
  LpOptions lp;
};

namespace detail {

inline std::vector<double> output_distribution(const Channel& ch, const std::vector<double>& p) {
  std::vector<double> q(ch.output_size(), 0.0);
  for (std::size_t x = 0; x < ch.input_size(); ++x)
    for (std::size_t y = 0; y < ch.output_size(); ++y) q[y] += p[x] * ch(x, y);
  return q;
}

/// D(E(.|x) || q) in bits.
inline double divergence_row(const Channel& ch, std::size_t x, const std::vector<double>& q) {
  double d = 0;
  for (std::size_t y = 0; y < ch.output_size(); ++y) {
    const double e = ch(x, y);
    if (e > 0) d += e * std::log2(e / q[y]);
  }
  return d;
}

/// Var_{y ~ E(.|x)} of log2 E(y|x)/q(y).
inline double variance_row(const Channel& ch, std::size_t x, const std::vector<double>& q) {
  const double mean = divergence_row(ch, x, q);
  double v = 0;
  for (std::size_t y = 0; y < ch.output_size(); ++y) {
    const double e = ch(x, y);
    if (e > 0) {
      const double d = std::log2(e / q[y]) - mean;
      v += e * d * d;
    }
  }
  return v;
}

}  // namespace detail

inline double mutual_information(const Channel& ch, const std::vector<double>& p) {
  if (p.size() != ch.input_size()) throw Error(ErrorCode::dimension_mismatch, "distribution does not match the input alphabet");
  const auto q = detail::output_distribution(ch, p);
  double i = 0;
  for (std::size_t x = 0; x < ch.input_size(); ++x)
    if (p[x] > 0) i += p[x] * detail::divergence_row(ch, x, q);
  return std::max(i, 0.0);
}

/// Blahut-Arimoto, stopped when max_x D(E(.|x)||q) - I(p) < tol.
inline CapacityResult capacity(const Channel& ch, const AsymptoticOptions& opt = {}) {
  if (!(opt.tol > 0)) throw Error(ErrorCode::bad_parameter, "tolerance must be positive");
  const std::size_t A = ch.input_size();
  CapacityResult res;
  std::vector<double> p(A, 1.0 / static_cast<double>(A)), d(A);
  for (res.iterations = 0; res.iterations <= opt.max_iterations; ++res.iterations) {
    const auto q = detail::output_distribution(ch, p);
    double lower = 0, upper = 0;
    for (std::size_t x = 0; x < A; ++x) {
      d[x] = detail::divergence_row(ch, x, q);
      lower += p[x] * d[x];
      upper = std::max(upper, d[x]);
    }
    if (upper - lower < opt.tol) {
      res.C = std::max(lower, 0.0);
      res.upper = upper;
      res.residual = upper - lower;
      res.p_star = p;
      res.q_star = q;
      return res;
    }
    double z = 0;
    for (std::size_t x = 0; x < A; ++x) {
      p[x] *= std::exp2(d[x] - upper);
      z += p[x];
    }
    for (auto& v : p) v /= z;
  }
  throw Error(ErrorCode::non_convergence, "Blahut-Arimoto did not reach the tolerance within the iteration limit");
}

/// Smallest conditional variance over capacity-achieving inputs. The face is
/// found as {p on S : pE closest to q*}; a first LP measures how close that
/// can be, a second minimizes the variance within that distance.
inline DispersionResult dispersion(const Channel& ch, const AsymptoticOptions& opt = {}) {
  const auto cap = capacity(ch, opt);
  const std::size_t A = ch.input_size(), B = ch.output_size();
  DispersionResult res;
  res.C = cap.C;
  res.q_star = cap.q_star;
  std::vector<double> var(A);
  for (std::size_t x = 0; x < A; ++x) {
    if (detail::divergence_row(ch, x, cap.q_star) >= cap.C - opt.support_factor * opt.tol) res.support_set.push_back(x);
    var[x] = detail::variance_row(ch, x, cap.q_star);
  }

  auto build = [&](bool variance_objective, double slack_cap) {
    LinearProgram<double> lp;
    lp.sense = Sense::minimize;
    for (std::size_t x : res.support_set) lp.add_var("p_" + std::to_string(x), variance_objective ? var[x] : 0.0);
    const std::size_t S = res.support_set.size();
    for (std::size_t y = 0; y < B; ++y) {
      lp.add_var("over_" + std::to_string(y), variance_objective ? 0.0 : 1.0);
      lp.add_var("under_" + std::to_string(y), variance_objective ? 0.0 : 1.0);
    }
    std::vector<LpTerm<double>> norm;
    for (std::size_t k = 0; k < S; ++k) norm.push_back({k, 1.0});
    lp.add_row("norm", RowKind::eq, 1.0, std::move(norm));
    std::vector<LpTerm<double>> total;
    for (std::size_t y = 0; y < B; ++y) {
      std::vector<LpTerm<double>> row;
      for (std::size_t k = 0; k < S; ++k)
        if (ch(res.support_set[k], y) > 0) row.push_back({k, ch(res.support_set[k], y)});
      row.push_back({S + 2 * y, -1.0});
      row.push_back({S + 2 * y + 1, 1.0});
      lp.add_row("out_" + std::to_string(y), RowKind::eq, cap.q_star[y], std::move(row));
      total.push_back({S + 2 * y, 1.0});
      total.push_back({S + 2 * y + 1, 1.0});
    }
    if (variance_objective) lp.add_row("distance", RowKind::le, slack_cap, std::move(total));
    return lp;
  };

  const auto first = solve_lp(build(false, 0), opt.lp);
  if (first.status != LpStatus::optimal) throw Error(ErrorCode::non_convergence, "capacity-achieving face is empty");
  const double distance = first.objective + std::max(1e-12, opt.tol);
  const auto second = solve_lp(build(true, distance), opt.lp);
  if (second.status != LpStatus::optimal) throw Error(ErrorCode::non_convergence, "dispersion LP failed");
  res.p_min.assign(A, 0.0);
  for (std::size_t k = 0; k < res.support_set.size(); ++k) res.p_min[res.support_set[k]] = std::max(second.primal[k], 0.0);
  res.V = std::max(second.objective, 0.0);
  return res;
}

/// max over the capacity support and E(y|x) > 0 of |E(y|x) - q(y) 2^C|.
inline double zero_dispersion_residual(const Channel& ch, const DispersionResult& d) {
  double worst = 0;
  const double scale = std::exp2(d.C);
  for (std::size_t x : d.support_set)
    for (std::size_t y = 0; y < ch.output_size(); ++y)
      if (ch(x, y) > 0) worst = std::max(worst, std::abs(ch(x, y) - d.q_star[y] * scale));
  return worst;
}

/// log2 sum_y max_x E(y|x).
inline double exact_simulation_cost(const Channel& ch) {
  CompensatedSum s;
  for (std::size_t y = 0; y < ch.output_size(); ++y) {
    double m = 0;
    for (std::size_t x = 0; x < ch.input_size(); ++x) m = std::max(m, ch(x, y));
    s.add(m);
  }
  return std::max(std::log2(s.value()), 0.0);
}

/// Gaussian tail probability.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double q_inv(double eps) {
  if (!(eps > 0 && eps < 1)) throw Error(ErrorCode::domain_error, "q_inv needs eps in (0,1)");
  if (eps == 0.5) return 0;
  double lo = -40, hi = 40;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * (1 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (q_function(mid) > eps ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  // Newton on log Q keeps the step well scaled in the tails
  for (int i = 0; i < 3; ++i) {
    const double qx = q_function(x);
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI);
    if (!(qx > 0) || !(density > 0)) break;
    const double next = x + (qx - eps) / density;
    if (!std::isfinite(next) || next < lo - 1e-9 || next > hi + 1e-9) break;
    x = next;
  }
  return x;
}

inline double normal_approximation(double C, double V, double n, double eps) {
  if (!(n >= 1)) throw Error(ErrorCode::domain_error, "n must be at least 1");
  if (!(V >= 0)) throw Error(ErrorCode::domain_error, "V must be nonnegative");
  return n * C - std::sqrt(n * V) * q_inv(eps);
}

struct ZeroDispersionCheck {
  bool cond_capacity_eq_alpha = false;
  bool cond_K0_eq_C = false;
  bool cond_V_zero = false;
  double C = 0, log2_alpha = 0, K0 = 0, V = 0;
  bool consistent() const { return cond_capacity_eq_alpha == cond_K0_eq_C && cond_K0_eq_C == cond_V_zero; }
};

inline ZeroDispersionCheck zero_dispersion_check(const Channel& ch, double tol = 1e-6, const AsymptoticOptions& opt = {}) {
  ZeroDispersionCheck out;
  const auto d = dispersion(ch, opt);
  out.C = d.C;
  out.V = d.V;
  out.K0 = exact_simulation_cost(ch);
  out.log2_alpha = std::log2(zero_error_size(ch, opt.lp).alpha_star);
  out.cond_capacity_eq_alpha = std::abs(out.C - out.log2_alpha) <= tol;
  out.cond_K0_eq_C = std::abs(out.K0 - out.C) <= tol;
  out.cond_V_zero = out.V <= tol;
  return out;
}

}  // namespace nsbound
