#pragma once

// Confusability hypergraph of a channel and its fractional packing and
// covering numbers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nsbound/channel.hpp"
#include "nsbound/lp.hpp"

namespace nsbound {

inline constexpr std::size_t kNoEdge = std::numeric_limits<std::size_t>::max();

/// Vertices are inputs; edge e_y holds the inputs that can produce y.
struct Hypergraph {
  std::size_t vertex_count = 0;
  std::vector<std::vector<std::size_t>> edges;  // sorted, deduplicated
  std::vector<std::size_t> edge_origin;         // per output; kNoEdge for an all-zero column

  /// One edge per line, e.g. "{0,1}".
  std::string to_string() const {
    std::vector<std::vector<std::size_t>> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    std::ostringstream out;
    for (const auto& e : sorted) {
      out << '{';
      for (std::size_t i = 0; i < e.size(); ++i) out << (i ? "," : "") << e[i];
      out << "}\n";
    }
    return out.str();
  }
};

template <class T>
struct PackingResult {
  T value = 0;
  std::vector<T> weights;  // per vertex (packing) or per edge (covering)
};

template <class T>
Hypergraph hypergraph(const BasicChannel<T>& ch, double support_tol = 0) {
  if (!(support_tol >= 0)) throw Error(ErrorCode::bad_parameter, "support tolerance must be nonnegative");
  Hypergraph h;
  h.vertex_count = ch.input_size();
  h.edge_origin.assign(ch.output_size(), kNoEdge);
  std::map<std::vector<std::size_t>, std::size_t> seen;
  const T tol = from_double<T>(support_tol);
  for (std::size_t y = 0; y < ch.output_size(); ++y) {
    std::vector<std::size_t> e;
    for (std::size_t x = 0; x < ch.input_size(); ++x)
      if (ch(x, y) > tol) e.push_back(x);
    if (e.empty()) continue;
    auto [it, fresh] = seen.emplace(e, h.edges.size());
    if (fresh) h.edges.push_back(std::move(e));
    h.edge_origin[y] = it->second;
  }
  return h;
}

/// max sum v  s.t.  sum_{x in e} v_x <= 1,  0 <= v_x <= 1.
template <class T = double>
PackingResult<T> fractional_packing(const Hypergraph& h, const LpOptions& opt = {}) {
  if (h.vertex_count == 0) throw Error(ErrorCode::bad_parameter, "empty hypergraph");
  LinearProgram<T> lp;
  for (std::size_t x = 0; x < h.vertex_count; ++x) lp.add_var("v_" + std::to_string(x), T(1), T(0), T(1));
  for (std::size_t k = 0; k < h.edges.size(); ++k) {
    std::vector<LpTerm<T>> terms;
    for (std::size_t x : h.edges[k]) terms.push_back({x, T(1)});
    lp.add_row("edge_" + std::to_string(k), RowKind::le, T(1), std::move(terms));
  }
  const auto sol = solve_lp(lp, opt);
  if (sol.status != LpStatus::optimal)
    throw Error(ErrorCode::solver_failure, std::string("packing LP returned ") + to_string(sol.status));
  return {sol.objective, sol.primal};
}

/// min sum c  s.t.  sum_{e containing x} c_e >= 1,  c >= 0.
template <class T = double>
PackingResult<T> fractional_covering(const Hypergraph& h, const LpOptions& opt = {}) {
  if (h.vertex_count == 0) throw Error(ErrorCode::bad_parameter, "empty hypergraph");
  LinearProgram<T> lp;
  lp.sense = Sense::minimize;
  for (std::size_t k = 0; k < h.edges.size(); ++k) lp.add_var("c_" + std::to_string(k), T(1));
  std::vector<std::vector<LpTerm<T>>> rows(h.vertex_count);
  for (std::size_t k = 0; k < h.edges.size(); ++k)
    for (std::size_t x : h.edges[k]) rows[x].push_back({k, T(1)});
  for (std::size_t x = 0; x < h.vertex_count; ++x) {
    if (rows[x].empty()) throw Error(ErrorCode::solver_failure, "vertex " + std::to_string(x) + " lies in no edge");
    lp.add_row("vertex_" + std::to_string(x), RowKind::ge, T(1), std::move(rows[x]));
  }
  const auto sol = solve_lp(lp, opt);
  if (sol.status != LpStatus::optimal)
    throw Error(ErrorCode::solver_failure, std::string("covering LP returned ") + to_string(sol.status));
  return {sol.objective, sol.primal};
}

/// 1 / max_y sum_x [E(y|x) > 0] p(x).
template <class T>
T alpha_star_p(const BasicChannel<T>& ch, const std::vector<T>& p) {
  if (p.size() != ch.input_size()) throw Error(ErrorCode::dimension_mismatch, "distribution does not match the input alphabet");
  T worst = 0;
  for (std::size_t y = 0; y < ch.output_size(); ++y) {
    T mass = 0;
    for (std::size_t x = 0; x < ch.input_size(); ++x)
      if (ch(x, y) > 0) mass += p[x];
    if (mass > worst) worst = mass;
  }
  if (!(worst > 0)) throw Error(ErrorCode::bad_parameter, "distribution has no mass");
  return T(1) / worst;
}

template <class T>
struct ZeroErrorResult {
  T alpha_star = 0;
  std::int64_t M0 = 0;
};

template <class T>
ZeroErrorResult<T> zero_error_size(const BasicChannel<T>& ch, const LpOptions& opt = {}) {
  ZeroErrorResult<T> out;
  out.alpha_star = fractional_packing<T>(hypergraph(ch), opt).value;
  if constexpr (is_exact_v<T>) {
    out.M0 = (boost::multiprecision::numerator(out.alpha_star) / boost::multiprecision::denominator(out.alpha_star))
                 .template convert_to<std::int64_t>();
  } else {
    out.M0 = static_cast<std::int64_t>(std::floor(out.alpha_star + 1e-6));
  }
  return out;
}

}  // namespace nsbound
