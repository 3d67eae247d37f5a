#pragma once

// Joint types of n-fold DMC uses and the permutation-reduced converse LPs.
//
// Scaled variables. For a joint type t with input marginal s = t_A:
//   P_s = |T_s| p(s)                      (sum_s P_s = 1)
//   a_t = |T_{t_A}| R(t)                  (0 <= a_t <= P_{t_A})
//   r_t = m(t; t_B) / |T_{t_A}|           in (0, 1]
//   W_t = |T_t| E^n(t) / |T_{t_A}|        in [0, 1]; sums to 1 over t with t_A = s
// Error LP: max sum W a  s.t.  sum_{t_B = b} r a <= mu,  a <= P,  sum P = 1.
// Size LP:  max sum V   s.t.  sum_{t_B = b} r a <= 1,   a <= V,  sum W a >= (1-eps) sum V.
//
// Large instances are solved by cutting planes on the per-output-type
// fractional knapsacks g_b(P, mu) = max { sum W a : sum r a <= mu, a <= P }.
// Every cut theta_b <= lambda mu + sum (W - lambda r)^+ P is valid for all
// (P, mu), and every dual of the master LP maps to a feasible reduced dual,
// so each round yields a rigorous bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsbound/channel.hpp"
#include "nsbound/converse.hpp"
#include "nsbound/lp.hpp"

namespace nsbound {

// ---------------------------------------------------------------------------
// Enumeration

/// All compositions of n into k nonnegative parts, descending lexicographic
/// order: for k = 2, n = 2 this is (2,0), (1,1), (0,2).
inline std::vector<std::vector<int>> compositions(int n, std::size_t k) {
  std::vector<std::vector<int>> out;
  if (k == 0) return out;
  std::vector<int> cur(k, 0);
  auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos + 1 == k) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

/// binomial(n + k - 1, k - 1) as a double (may be huge).
inline double composition_count(int n, std::size_t k) {
  if (k == 0) return 0;
  double c = 1;
  for (std::size_t i = 1; i < k; ++i) c = c * static_cast<double>(n + static_cast<int>(i)) / static_cast<double>(i);
  return std::round(c);
}

/// Joint type of (x, y) strings: counts(a, b) = N(a, b | x, y), stored a-major.
struct JointType {
  int n = 0;
  std::size_t a_size = 0;
  std::size_t b_size = 0;
  std::vector<int> counts;

  int count(std::size_t a, std::size_t b) const { return counts[a * b_size + b]; }
  std::vector<int> marginal_a() const {
    std::vector<int> m(a_size, 0);
    for (std::size_t a = 0; a < a_size; ++a)
      for (std::size_t b = 0; b < b_size; ++b) m[a] += count(a, b);
    return m;
  }
  std::vector<int> marginal_b() const {
    std::vector<int> m(b_size, 0);
    for (std::size_t a = 0; a < a_size; ++a)
      for (std::size_t b = 0; b < b_size; ++b) m[b] += count(a, b);
    return m;
  }
};

struct LogMultiplicities {
  double log_T = 0;  // log |T_t|
  double log_m = 0;  // log m(t; t_B)
};

namespace detail {

inline double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

inline double log_multinomial(int n, const std::vector<int>& parts) {
  CompensatedSum s;
  s.add(log_factorial(n));
  for (int c : parts) s.add(-log_factorial(c));
  return s.value();
}

inline BigInt factorial(int k) {
  BigInt f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Natural-log multiplicities of a joint type.
inline LogMultiplicities log_multiplicities(const JointType& jt) {
  LogMultiplicities out;
  out.log_T = detail::log_multinomial(jt.n, jt.counts);
  CompensatedSum m;
  for (std::size_t b = 0; b < jt.b_size; ++b) {
    int col = 0;
    for (std::size_t a = 0; a < jt.a_size; ++a) {
      col += jt.count(a, b);
      m.add(-detail::log_factorial(jt.count(a, b)));
    }
    m.add(detail::log_factorial(col));
  }
  out.log_m = m.value();
  return out;
}

struct ExactMultiplicities {
  BigInt T;
  BigInt m;
};

inline ExactMultiplicities exact_multiplicities(const JointType& jt) {
  ExactMultiplicities out;
  out.T = detail::factorial(jt.n);
  for (int c : jt.counts) out.T /= detail::factorial(c);
  out.m = 1;
  for (std::size_t b = 0; b < jt.b_size; ++b) {
    int col = 0;
    BigInt den = 1;
    for (std::size_t a = 0; a < jt.a_size; ++a) {
      col += jt.count(a, b);
      den *= detail::factorial(jt.count(a, b));
    }
    out.m *= detail::factorial(col) / den;
  }
  return out;
}

inline BigInt exact_multinomial(int n, const std::vector<int>& parts) {
  BigInt v = detail::factorial(n);
  for (int c : parts) v /= detail::factorial(c);
  return v;
}

/// Enumerated joint types for (|A|, |B|, n) with the input and output types
/// they project to. All three lists use the same canonical order.
struct TypeTable {
  std::size_t a_size = 0;
  std::size_t b_size = 0;
  int n = 0;
  std::vector<JointType> types;
  std::vector<double> log_T;
  std::vector<double> log_m;
  std::vector<std::vector<int>> input_types;   // P_n(A)
  std::vector<std::vector<int>> output_types;  // P_n(B)
  std::vector<double> log_T_input;             // log |T_s|
  std::vector<double> log_T_output;
  std::vector<std::size_t> input_of;   // per joint type
  std::vector<std::size_t> output_of;  // per joint type

  std::size_t size() const { return types.size(); }

  /// Index of the joint type with the given a-major counts.
  std::size_t index_of(const std::vector<int>& counts) const {
    if (!lookup_) {
      lookup_ = std::make_shared<std::map<std::vector<int>, std::size_t>>();
      for (std::size_t i = 0; i < types.size(); ++i) (*lookup_)[types[i].counts] = i;
    }
    auto it = lookup_->find(counts);
    if (it == lookup_->end()) throw Error(ErrorCode::bad_parameter, "counts do not form a joint type of this table");
    return it->second;
  }

  /// Joint type index of a pair of strings given as symbol indices.
  std::size_t index_of_strings(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) const {
    std::vector<int> counts(a_size * b_size, 0);
    for (std::size_t i = 0; i < x.size(); ++i) ++counts[x[i] * b_size + y[i]];
    return index_of(counts);
  }

 private:
  mutable std::shared_ptr<std::map<std::vector<int>, std::size_t>> lookup_;
};

inline constexpr double kDefaultTypeLimit = 2e6;

inline TypeTable enumerate_joint_types(std::size_t a_size, std::size_t b_size, int n,
                                       double type_limit = kDefaultTypeLimit) {
  if (a_size == 0 || b_size == 0) throw Error(ErrorCode::bad_parameter, "alphabets must be nonempty");
  if (n < 1) throw Error(ErrorCode::bad_parameter, "blocklength must be at least 1");
  const double count = composition_count(n, a_size * b_size);
  if (count > type_limit)
    throw Error(ErrorCode::limit_exceeded, "n = " + std::to_string(n) + " gives " + shortest_decimal(count) +
                                               " joint types, above the limit of " + shortest_decimal(type_limit));
  TypeTable t;
  t.a_size = a_size;
  t.b_size = b_size;
  t.n = n;
  t.input_types = compositions(n, a_size);
  t.output_types = compositions(n, b_size);
  std::map<std::vector<int>, std::size_t> in_idx, out_idx;
  for (std::size_t i = 0; i < t.input_types.size(); ++i) {
    in_idx[t.input_types[i]] = i;
    t.log_T_input.push_back(detail::log_multinomial(n, t.input_types[i]));
  }
  for (std::size_t i = 0; i < t.output_types.size(); ++i) {
    out_idx[t.output_types[i]] = i;
    t.log_T_output.push_back(detail::log_multinomial(n, t.output_types[i]));
  }
  auto all = compositions(n, a_size * b_size);
  t.types.reserve(all.size());
  for (auto& c : all) {
    JointType jt{n, a_size, b_size, std::move(c)};
    const auto lm = log_multiplicities(jt);
    t.log_T.push_back(lm.log_T);
    t.log_m.push_back(lm.log_m);
    t.input_of.push_back(in_idx.at(jt.marginal_a()));
    t.output_of.push_back(out_idx.at(jt.marginal_b()));
    t.types.push_back(std::move(jt));
  }
  return t;
}

/// n * sum t(a,b) log E(b|a) in natural log; -inf when a used cell has E = 0.
inline double log_channel_weight(const JointType& jt, const Channel& ch) {
  CompensatedSum s;
  for (std::size_t a = 0; a < jt.a_size; ++a)
    for (std::size_t b = 0; b < jt.b_size; ++b) {
      const int c = jt.count(a, b);
      if (c == 0) continue;
      if (ch(a, b) == 0) return -std::numeric_limits<double>::infinity();
      s.add(c * std::log(ch(a, b)));
    }
  return s.value();
}

// ---------------------------------------------------------------------------
// Reduced coefficients

template <class T>
struct ReducedCoefficients {
  std::vector<T> W;
  std::vector<T> r;
  std::size_t dropped = 0;  // coefficients that underflowed and were set to 0
};

inline ReducedCoefficients<double> reduced_coefficients(const TypeTable& t, const Channel& ch,
                                                        double underflow = 1e-300) {
  if (ch.input_size() != t.a_size || ch.output_size() != t.b_size)
    throw Error(ErrorCode::dimension_mismatch, "channel does not match the type table");
  ReducedCoefficients<double> out;
  out.W.resize(t.size());
  out.r.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double lT_in = t.log_T_input[t.input_of[i]];
    const double lw = log_channel_weight(t.types[i], ch);
    double W = std::isinf(lw) ? 0.0 : std::exp(t.log_T[i] + lw - lT_in);
    double r = std::exp(t.log_m[i] - lT_in);
    if (!std::isinf(lw) && W < underflow) {
      W = 0;
      ++out.dropped;
    }
    if (r < underflow) {
      r = 0;
      ++out.dropped;
    }
    out.W[i] = std::min(W, 1.0);
    out.r[i] = std::min(r, 1.0);
  }
  return out;
}

inline ReducedCoefficients<Rational> reduced_coefficients(const TypeTable& t, const ExactChannel& ch) {
  if (ch.input_size() != t.a_size || ch.output_size() != t.b_size)
    throw Error(ErrorCode::dimension_mismatch, "channel does not match the type table");
  ReducedCoefficients<Rational> out;
  out.W.resize(t.size());
  out.r.resize(t.size());
  std::vector<BigInt> T_in;
  for (const auto& s : t.input_types) T_in.push_back(exact_multinomial(t.n, s));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& jt = t.types[i];
    const auto mult = exact_multiplicities(jt);
    Rational e = 1;
    for (std::size_t a = 0; a < jt.a_size; ++a)
      for (std::size_t b = 0; b < jt.b_size; ++b)
        for (int k = 0; k < jt.count(a, b); ++k) e *= ch(a, b);
    const Rational den(T_in[t.input_of[i]]);
    out.W[i] = Rational(mult.T) * e / den;
    out.r[i] = Rational(mult.m) / den;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full reduced LPs (variables a_t, then P_s or V_s)

template <class T>
LinearProgram<T> build_reduced_error_lp(const TypeTable& t, const ReducedCoefficients<T>& co, const T& mu) {
  const std::size_t N = t.size(), S = t.input_types.size();
  LinearProgram<T> lp;
  lp.sense = Sense::maximize;
  for (std::size_t i = 0; i < N; ++i) lp.add_var("a_" + std::to_string(i), co.W[i]);
  for (std::size_t s = 0; s < S; ++s) lp.add_var("P_" + std::to_string(s));
  std::vector<std::vector<LpTerm<T>>> pack(t.output_types.size());
  for (std::size_t i = 0; i < N; ++i)
    if (co.r[i] != 0) pack[t.output_of[i]].push_back({i, co.r[i]});
  for (std::size_t b = 0; b < pack.size(); ++b)
    lp.add_row("pack_" + std::to_string(b), RowKind::le, mu, std::move(pack[b]));
  for (std::size_t i = 0; i < N; ++i)
    lp.add_row("cap_" + std::to_string(i), RowKind::le, T(0), {{i, T(1)}, {N + t.input_of[i], T(-1)}});
  std::vector<LpTerm<T>> norm;
  for (std::size_t s = 0; s < S; ++s) norm.push_back({N + s, T(1)});
  lp.add_row("norm", RowKind::eq, T(1), std::move(norm));
  return lp;
}

template <class T>
LinearProgram<T> build_reduced_size_lp(const TypeTable& t, const ReducedCoefficients<T>& co, const T& eps) {
  const std::size_t N = t.size(), S = t.input_types.size();
  LinearProgram<T> lp;
  lp.sense = Sense::maximize;
  for (std::size_t i = 0; i < N; ++i) lp.add_var("a_" + std::to_string(i));
  for (std::size_t s = 0; s < S; ++s) lp.add_var("V_" + std::to_string(s), T(1));
  for (std::size_t i = 0; i < N; ++i)
    lp.add_row("cap_" + std::to_string(i), RowKind::le, T(0), {{i, T(1)}, {N + t.input_of[i], T(-1)}});
  std::vector<std::vector<LpTerm<T>>> pack(t.output_types.size());
  for (std::size_t i = 0; i < N; ++i)
    if (co.r[i] != 0) pack[t.output_of[i]].push_back({i, co.r[i]});
  for (std::size_t b = 0; b < pack.size(); ++b)
    lp.add_row("pack_" + std::to_string(b), RowKind::le, T(1), std::move(pack[b]));
  std::vector<LpTerm<T>> succ;
  const T keep = T(1) - eps;
  for (std::size_t s = 0; s < S; ++s) succ.push_back({N + s, keep});
  for (std::size_t i = 0; i < N; ++i)
    if (co.W[i] != 0) succ.push_back({i, T(-co.W[i])});
  lp.add_row("succ", RowKind::le, T(0), std::move(succ));
  return lp;
}

// ---------------------------------------------------------------------------
// Results and certificates in reduced form

/// d_t + r_t z_b >= W_t, sum_{t_A = s} d_t <= alpha; certified error
/// 1 - alpha - mu sum z.
template <class T>
struct ReducedErrorCertificate {
  std::vector<T> z;  // per output type
  std::vector<T> d;  // per joint type
  T alpha = 0;
  T certified_error = 0;
};

/// u_t + r_t c_b >= zeta W_t, sum_{t_A = s} u_t <= (1-eps) zeta - 1; bound sum c.
template <class T>
struct ReducedSizeCertificate {
  std::vector<T> c;  // per output type
  std::vector<T> u;  // per joint type
  T zeta = 0;
  T bound = 0;
};

enum class ReducedMethod { automatic, full, cutting_plane };

struct ReducedOptions {
  LpOptions lp;
  ReducedMethod method = ReducedMethod::automatic;
  /// automatic picks the full LP up to this many joint types.
  std::size_t full_type_limit = 1500;
  double type_limit = kDefaultTypeLimit;
  /// Cutting planes stop when (upper - lower) <= rel_gap * upper.
  double rel_gap = 1e-9;
  std::size_t max_rounds = 2000;
  /// Cuts unused for this many rounds are discarded.
  std::size_t cut_idle_limit = 8;
  double underflow = 1e-300;
};

template <class T>
struct ReducedErrorResult {
  TypeTable table;
  T mu = 0;
  T p_err = 0;        // certified lower bound (equal to the optimum for the full LP)
  T p_err_upper = 0;  // error of the returned witness
  std::vector<T> a;   // scaled witness per joint type
  std::vector<T> P;   // per input type
  ReducedErrorCertificate<T> dual;
  std::string method;
  std::size_t rounds = 0;
  std::size_t lp_iterations = 0;
  std::size_t dropped = 0;
};

template <class T>
struct ReducedSizeResult {
  TypeTable table;
  T eps = 0;
  T M_beta = 0;   // certified upper bound (the optimum for the full LP)
  T M_lower = 0;  // value of the returned witness
  std::int64_t M_NS = 0;
  std::vector<T> a;
  std::vector<T> V;
  ReducedSizeCertificate<T> dual;
  std::string method;
  std::size_t rounds = 0;
  std::size_t lp_iterations = 0;
  std::size_t dropped = 0;
};

template <class T>
ReducedErrorCertificate<T> complete_reduced_error_certificate(const TypeTable& t, const ReducedCoefficients<T>& co,
                                                              const T& mu, std::vector<T> z) {
  ReducedErrorCertificate<T> cert;
  for (auto& v : z) v = detail::clamp0(v);
  cert.d.assign(t.size(), T(0));
  std::vector<T> rows(t.input_types.size(), T(0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    cert.d[i] = detail::clamp0(T(co.W[i] - co.r[i] * z[t.output_of[i]]));
    rows[t.input_of[i]] += cert.d[i];
  }
  cert.alpha = *std::max_element(rows.begin(), rows.end());
  T zs = 0;
  for (const auto& v : z) zs += v;
  cert.certified_error = T(1) - cert.alpha - mu * zs;
  cert.z = std::move(z);
  return cert;
}

template <class T>
ReducedSizeCertificate<T> complete_reduced_size_certificate(const TypeTable& t, const ReducedCoefficients<T>& co,
                                                            const T& eps, std::vector<T> u, T zeta) {
  const T keep = T(1) - eps;
  zeta = detail::clamp0(zeta);
  std::vector<T> rows(t.input_types.size(), T(0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    u[i] = detail::clamp0(u[i]);
    if (co.r[i] == 0 && u[i] < zeta * co.W[i]) u[i] = zeta * co.W[i];
    rows[t.input_of[i]] += u[i];
  }
  T excess = 0;
  for (const auto& row : rows) {
    const T e = row - (keep * zeta - T(1));
    if (e > excess) excess = e;
  }
  if (excess > 0) zeta += excess / keep;
  ReducedSizeCertificate<T> cert;
  cert.c.assign(t.output_types.size(), T(0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (co.r[i] == 0) continue;
    const T need = (zeta * co.W[i] - u[i]) / co.r[i];
    auto& c = cert.c[t.output_of[i]];
    if (need > c) c = need;
  }
  for (const auto& c : cert.c) cert.bound += c;
  cert.u = std::move(u);
  cert.zeta = zeta;
  return cert;
}

/// Checks a reduced size certificate; exact for T = Rational.
template <class T>
CertifiedBound certify_reduced_size(const TypeTable& t, const ReducedCoefficients<T>& co, const T& eps,
                                    const ReducedSizeCertificate<T>& cert, double rel_tol = 1e-9) {
  if (cert.u.size() != t.size() || cert.c.size() != t.output_types.size())
    throw Error(ErrorCode::dimension_mismatch, "certificate does not match the type table");
  CertifiedBound out;
  const T tol = is_exact_v<T> ? T(0) : from_double<T>(rel_tol);
  auto miss = [&](const char* what, std::size_t i, std::size_t j, const T& slack, const T& scale) {
    if (slack < -(tol * scale)) out.violations.push_back({what, i, j, -to_double(slack)});
  };
  const T one(1);
  miss("sign", 0, 0, cert.zeta, one);
  for (std::size_t b = 0; b < cert.c.size(); ++b) miss("sign", 0, b, cert.c[b], one);
  std::vector<T> rows(t.input_types.size(), T(0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    miss("sign", i, 0, cert.u[i], one);
    const T rhs = cert.zeta * co.W[i];
    miss("cover", i, t.output_of[i], T(cert.u[i] + co.r[i] * cert.c[t.output_of[i]] - rhs), T(one + rhs));
    rows[t.input_of[i]] += cert.u[i];
  }
  const T keep = T(1) - eps;
  for (std::size_t s = 0; s < rows.size(); ++s) miss("row", s, 0, T(keep * cert.zeta - one - rows[s]), T(one + cert.zeta));
  T bound = 0;
  for (const auto& c : cert.c) bound += c;
  out.valid = out.violations.empty();
  out.bound = to_double(bound);
  if constexpr (is_exact_v<T>) out.exact_bound = to_string(bound);
  return out;
}

// ---------------------------------------------------------------------------
// Cutting planes (float only)

namespace detail {

class KnapsackFamily {
 public:
  KnapsackFamily(const TypeTable& t, const ReducedCoefficients<double>& co) : t_(t), co_(co) {
    groups_.resize(t.output_types.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      if (co.W[i] > 0) groups_[t.output_of[i]].push_back(i);
    ratio_.assign(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i)
      ratio_[i] = co.r[i] > 0 ? co.W[i] / co.r[i] : std::numeric_limits<double>::infinity();
    for (auto& g : groups_)
      std::stable_sort(g.begin(), g.end(), [&](std::size_t x, std::size_t y) { return ratio_[x] > ratio_[y]; });
  }

  std::size_t groups() const { return groups_.size(); }

  /// Smallest finite W/r in group b, 0 if the group is empty.
  double min_ratio(std::size_t b) const {
    for (auto it = groups_[b].rbegin(); it != groups_[b].rend(); ++it)
      if (std::isfinite(ratio_[*it])) return ratio_[*it];
    return 0.0;
  }

  /// max sum W a over group b with a <= P[t_A], sum r a <= budget.
  /// Sets lambda to a subgradient multiplier of the budget row; fills take if given.
  double evaluate(std::size_t b, const std::vector<double>& P, double budget, double* lambda,
                  std::vector<double>* take = nullptr) const {
    double left = budget, value = 0;
    *lambda = 0;
    const auto& g = groups_[b];
    for (std::size_t k = 0; k < g.size(); ++k) {
      const std::size_t i = g[k];
      const double cap = P[t_.input_of[i]];
      if (cap <= 0) continue;
      const double need = co_.r[i] * cap;
      if (left <= 0) {
        *lambda = ratio_[i];
        break;
      }
      if (need <= left) {
        value += co_.W[i] * cap;
        left -= need;
        if (take) (*take)[i] = cap;
      } else {
        const double part = left / co_.r[i];
        value += co_.W[i] * part;
        if (take) (*take)[i] = part;
        left = 0;
        *lambda = ratio_[i];
        break;
      }
    }
    return value;
  }

  /// Coefficients sum_{t in b, t_A = s} (W - lambda r)^+ as a sparse list.
  std::vector<std::pair<std::size_t, double>> cut_coefficients(std::size_t b, double lambda) const {
    std::map<std::size_t, double> acc;
    for (std::size_t i : groups_[b]) {
      if (!(ratio_[i] > lambda)) break;
      const double v = co_.W[i] - lambda * co_.r[i];
      if (v > 0) acc[t_.input_of[i]] += v;
    }
    return {acc.begin(), acc.end()};
  }

  /// u_t contributions of a cut.
  void add_cut_u(std::size_t b, double lambda, double y, std::vector<double>& u) const {
    for (std::size_t i : groups_[b]) {
      if (!(ratio_[i] > lambda)) break;
      const double v = co_.W[i] - lambda * co_.r[i];
      if (v > 0) u[i] += y * v;
    }
  }

  /// Smallest budget mu with sum_b g_b(P, mu) >= target (P fixed), by
  /// bisection on prefix sums. Returns +inf if unreachable.
  double min_budget(const std::vector<double>& P, double target) const {
    struct Prefix {
      std::vector<double> cr, cw, ratio;
    };
    std::vector<Prefix> pre(groups_.size());
    double hi = 0, total = 0;
    for (std::size_t b = 0; b < groups_.size(); ++b) {
      auto& p = pre[b];
      double cr = 0, cw = 0;
      p.cr.push_back(0);
      p.cw.push_back(0);
      for (std::size_t i : groups_[b]) {
        const double cap = P[t_.input_of[i]];
        if (cap <= 0) continue;
        cr += co_.r[i] * cap;
        cw += co_.W[i] * cap;
        p.cr.push_back(cr);
        p.cw.push_back(cw);
        p.ratio.push_back(ratio_[i]);
      }
      hi = std::max(hi, cr);
      total += cw;
    }
    if (total < target * (1 - 1e-12)) return std::numeric_limits<double>::infinity();
    target = std::min(target, total);
    auto value = [&](double mu) {
      CompensatedSum s;
      for (const auto& p : pre) {
        const std::size_t k = static_cast<std::size_t>(std::upper_bound(p.cr.begin(), p.cr.end(), mu) - p.cr.begin());
        // k - 1 is the last full prefix not exceeding mu
        if (k >= p.cr.size()) {
          s.add(p.cw.back());
        } else {
          const std::size_t j = k - 1;
          s.add(p.cw[j] + (mu - p.cr[j]) * p.ratio[j]);
        }
      }
      return s.value();
    };
    double lo = 0;
    if (value(hi) < target) return hi;  // only rounding separates them
    for (int it = 0; it < 200 && hi - lo > hi * 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (value(mid) >= target ? hi : lo) = mid;
    }
    return hi;
  }

 private:
  const TypeTable& t_;
  const ReducedCoefficients<double>& co_;
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<double> ratio_;
};

inline constexpr double kMasterZero = 1e-9;

struct Cut {
  std::size_t group;
  double lambda;
  std::vector<std::pair<std::size_t, double>> coef;
  std::size_t idle = 0;
  bool permanent = false;
};

inline bool has_cut(const std::vector<Cut>& cuts, std::size_t group, double lambda) {
  for (const auto& c : cuts)
    if (c.group == group && c.lambda == lambda) return true;
  return false;
}

inline std::vector<double> uniform_input(const TypeTable& t) {
  std::vector<double> P(t.input_types.size());
  const double ln = t.n * std::log(static_cast<double>(t.a_size));
  for (std::size_t s = 0; s < P.size(); ++s) P[s] = std::exp(t.log_T_input[s] - ln);
  return P;
}

inline void normalize_simplex(std::vector<double>& P) {
  double s = 0;
  for (auto& v : P) {
    v = std::max(v, 0.0);
    s += v;
  }
  if (s <= 0) throw Error(ErrorCode::numerical_breakdown, "master LP returned a zero input distribution");
  for (auto& v : P) v /= s;
}

inline void prune_cuts(std::vector<Cut>& cuts, const std::vector<double>& y, std::size_t idle_limit) {
  std::vector<Cut> keep;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    auto& c = cuts[k];
    c.idle = y[k] > 0 ? 0 : c.idle + 1;
    if (c.permanent || c.idle <= idle_limit) keep.push_back(std::move(c));
  }
  cuts = std::move(keep);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Reduced error LP

namespace detail {

template <class T>
void fill_error_from_full(ReducedErrorResult<T>& res, const ReducedCoefficients<T>& co, const ReducedOptions& opt) {
  const auto& t = res.table;
  const auto lp = build_reduced_error_lp(t, co, res.mu);
  const auto sol = solve_lp(lp, opt.lp);
  if (sol.status != LpStatus::optimal)
    throw Error(ErrorCode::solver_failure, std::string("reduced error LP returned ") + to_string(sol.status));
  const std::size_t N = t.size(), B = t.output_types.size();
  res.a.assign(sol.primal.begin(), sol.primal.begin() + static_cast<std::ptrdiff_t>(N));
  res.P.assign(sol.primal.begin() + static_cast<std::ptrdiff_t>(N), sol.primal.end());
  res.p_err_upper = T(1) - sol.objective;
  std::vector<T> z(sol.dual.begin(), sol.dual.begin() + static_cast<std::ptrdiff_t>(B));
  res.dual = complete_reduced_error_certificate(t, co, res.mu, std::move(z));
  res.p_err = res.p_err_upper;
  res.method = "full";
  res.lp_iterations = sol.iterations;
  res.rounds = 1;
}

inline void fill_error_from_cuts(ReducedErrorResult<double>& res, const ReducedCoefficients<double>& co,
                                 const ReducedOptions& opt) {
  const auto& t = res.table;
  const double mu = res.mu;
  const std::size_t S = t.input_types.size();
  KnapsackFamily fam(t, co);
  const std::size_t G = fam.groups();

  std::vector<Cut> cuts;
  auto add = [&](std::size_t b, double lambda, bool permanent) {
    if (has_cut(cuts, b, lambda)) return false;
    cuts.push_back({b, lambda, fam.cut_coefficients(b, lambda), 0, permanent});
    return true;
  };
  auto success_at = [&](const std::vector<double>& P, std::vector<double>* lambdas) {
    CompensatedSum s;
    for (std::size_t b = 0; b < G; ++b) {
      double lam;
      s.add(fam.evaluate(b, P, mu, &lam));
      if (lambdas) (*lambdas)[b] = lam;
    }
    return s.value();
  };

  std::vector<double> lambdas(G);
  std::vector<double> bestP = uniform_input(t);
  double best_lower = success_at(bestP, &lambdas);  // achievable success
  for (std::size_t b = 0; b < G; ++b) {
    add(b, 0.0, true);
    add(b, lambdas[b], false);
  }
  double best_upper = 1.0;
  ReducedErrorCertificate<double> best_cert;
  bool have_cert = false;

  for (res.rounds = 1; res.rounds <= opt.max_rounds; ++res.rounds) {
    // master dual: min sum mu lambda_k y_k + alpha
    LinearProgram<double> lp;
    lp.sense = Sense::minimize;
    const std::size_t alpha = lp.add_var("alpha", 1.0, std::nullopt, std::nullopt);
    for (std::size_t k = 0; k < cuts.size(); ++k) lp.add_var("y_" + std::to_string(k), mu * cuts[k].lambda);
    std::vector<std::vector<LpTerm<double>>> theta(G), prow(S);
    for (std::size_t s = 0; s < S; ++s) prow[s].push_back({alpha, 1.0});
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      theta[cuts[k].group].push_back({k + 1, 1.0});
      for (const auto& [s, v] : cuts[k].coef)
        if (v > kMasterZero) prow[s].push_back({k + 1, -v});
    }
    for (std::size_t b = 0; b < G; ++b) lp.add_row("theta_" + std::to_string(b), RowKind::ge, 1.0, std::move(theta[b]));
    for (std::size_t s = 0; s < S; ++s) lp.add_row("P_" + std::to_string(s), RowKind::ge, 0.0, std::move(prow[s]));
    const auto sol = solve_lp(lp, opt.lp);
    if (sol.status != LpStatus::optimal)
      throw Error(ErrorCode::solver_failure, std::string("cutting-plane master returned ") + to_string(sol.status));
    res.lp_iterations += sol.iterations;

    // certificate from the master dual
    std::vector<double> y(cuts.size());
    for (std::size_t k = 0; k < cuts.size(); ++k) y[k] = std::max(0.0, sol.primal[k + 1]);
    std::vector<double> gsum(G, 0.0);
    for (std::size_t k = 0; k < cuts.size(); ++k) gsum[cuts[k].group] += y[k];
    std::vector<double> z(G, 0.0), u(t.size(), 0.0);
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      if (y[k] <= 0) continue;
      const double yk = y[k] / std::min(1.0, gsum[cuts[k].group]);
      z[cuts[k].group] += yk * cuts[k].lambda;
      fam.add_cut_u(cuts[k].group, cuts[k].lambda, yk, u);
    }
    // d = (W - r z)^+ is never larger than u, so complete from z directly
    auto cert = complete_reduced_error_certificate(t, co, mu, std::move(z));
    const double upper = 1.0 - cert.certified_error;
    if (!have_cert || upper < best_upper) {
      best_upper = upper;
      best_cert = std::move(cert);
      have_cert = true;
    }

    std::vector<double> P(S);
    for (std::size_t s = 0; s < S; ++s) P[s] = sol.dual[G + s];
    normalize_simplex(P);
    const double lower = success_at(P, &lambdas);
    if (lower > best_lower) {
      best_lower = lower;
      bestP = P;
    }
    if (best_upper - best_lower <= opt.rel_gap * std::max(best_upper, 1e-300)) break;

    bool added = false;
    for (std::size_t b = 0; b < G; ++b) {
      const double theta_b = sol.dual[b];
      double lam;
      const double g = fam.evaluate(b, P, mu, &lam);
      if (theta_b > g + 1e-13) added |= add(b, lam, false);
    }
    prune_cuts(cuts, y, opt.cut_idle_limit);
    if (!added) break;
  }

  res.method = "cutting-plane";
  res.P = bestP;
  res.a.assign(t.size(), 0.0);
  for (std::size_t b = 0; b < G; ++b) {
    double lam;
    fam.evaluate(b, bestP, mu, &lam, &res.a);
  }
  res.p_err_upper = 1.0 - best_lower;
  res.dual = std::move(best_cert);
  res.p_err = res.dual.certified_error;
}

}  // namespace detail

/// Minimum NS error of the n-fold product channel with M messages.
inline ReducedErrorResult<double> reduced_min_error(const Channel& base, int n, std::int64_t M,
                                                    const ReducedOptions& opt = {}) {
  if (M < 1) throw Error(ErrorCode::bad_parameter, "M must be at least 1");
  ReducedErrorResult<double> res;
  res.table = enumerate_joint_types(base.input_size(), base.output_size(), n, opt.type_limit);
  const auto co = reduced_coefficients(res.table, base, opt.underflow);
  res.dropped = co.dropped;
  res.mu = 1.0 / static_cast<double>(M);
  const bool full = opt.method == ReducedMethod::full ||
                    (opt.method == ReducedMethod::automatic && res.table.size() <= opt.full_type_limit);
  if (full)
    detail::fill_error_from_full(res, co, opt);
  else
    detail::fill_error_from_cuts(res, co, opt);
  return res;
}

inline ReducedErrorResult<Rational> reduced_min_error(const ExactChannel& base, int n, std::int64_t M,
                                                      const ReducedOptions& opt = {}) {
  if (M < 1) throw Error(ErrorCode::bad_parameter, "M must be at least 1");
  ReducedErrorResult<Rational> res;
  res.table = enumerate_joint_types(base.input_size(), base.output_size(), n, opt.type_limit);
  const auto co = reduced_coefficients(res.table, base);
  res.mu = Rational(1, M);
  detail::fill_error_from_full(res, co, opt);
  return res;
}

// ---------------------------------------------------------------------------
// Reduced size LP

namespace detail {

template <class T>
void fill_size_from_full(ReducedSizeResult<T>& res, const ReducedCoefficients<T>& co, const ReducedOptions& opt) {
  const auto& t = res.table;
  const auto lp = build_reduced_size_lp(t, co, res.eps);
  const auto sol = solve_lp(lp, opt.lp);
  if (sol.status != LpStatus::optimal)
    throw Error(ErrorCode::solver_failure, std::string("reduced size LP returned ") + to_string(sol.status));
  const std::size_t N = t.size();
  res.a.assign(sol.primal.begin(), sol.primal.begin() + static_cast<std::ptrdiff_t>(N));
  res.V.assign(sol.primal.begin() + static_cast<std::ptrdiff_t>(N), sol.primal.end());
  std::vector<T> u(sol.dual.begin(), sol.dual.begin() + static_cast<std::ptrdiff_t>(N));
  res.dual = complete_reduced_size_certificate(t, co, res.eps, std::move(u), sol.dual.back());
  res.M_beta = sol.objective;
  res.M_lower = sol.objective;
  res.method = "full";
  res.lp_iterations = sol.iterations;
  res.rounds = 1;
}

inline void fill_size_from_cuts(ReducedSizeResult<double>& res, const ReducedCoefficients<double>& co,
                                const ReducedOptions& opt) {
  const auto& t = res.table;
  const double keep = 1.0 - res.eps;
  const std::size_t S = t.input_types.size();
  KnapsackFamily fam(t, co);
  const std::size_t G = fam.groups();

  std::vector<Cut> cuts;
  auto add = [&](std::size_t b, double lambda, bool permanent) {
    if (has_cut(cuts, b, lambda)) return false;
    cuts.push_back({b, lambda, fam.cut_coefficients(b, lambda), 0, permanent});
    return true;
  };

  // start from the i.i.d. uniform input
  std::vector<double> bestP = uniform_input(t);
  double best_mu = fam.min_budget(bestP, keep);
  double K = std::isfinite(best_mu) && best_mu > 0 ? 1.0 / best_mu : 1.0;
  for (std::size_t b = 0; b < G; ++b) {
    double lam;
    fam.evaluate(b, bestP, best_mu, &lam);
    add(b, 0.0, true);
    add(b, fam.min_ratio(b), true);
    add(b, lam, false);
  }

  struct Stored {
    std::vector<std::size_t> group;
    std::vector<double> lambda, y;
    double s = 0, zeta = 0;
  } best_cert;
  double best_bound = std::numeric_limits<double>::infinity();

  for (res.rounds = 1; res.rounds <= opt.max_rounds; ++res.rounds) {
    // master dual: max (1-eps) zeta + alpha
    LinearProgram<double> lp;
    lp.sense = Sense::maximize;
    const std::size_t zeta = lp.add_var("zeta", keep);
    const std::size_t alpha = lp.add_var("alpha", 1.0, std::nullopt, std::nullopt);
    for (std::size_t k = 0; k < cuts.size(); ++k) lp.add_var("y_" + std::to_string(k));
    std::vector<LpTerm<double>> murow;
    std::vector<std::vector<LpTerm<double>>> theta(G), prow(S);
    for (std::size_t b = 0; b < G; ++b) theta[b].push_back({zeta, 1.0});
    for (std::size_t s = 0; s < S; ++s) prow[s].push_back({alpha, 1.0});
    // The bound below is recomputed from the unrounded cuts, so negligible
    // master coefficients can be zeroed without losing validity.
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      if (cuts[k].lambda / K > kMasterZero) murow.push_back({k + 2, cuts[k].lambda / K});
      theta[cuts[k].group].push_back({k + 2, -1.0});
      for (const auto& [s, v] : cuts[k].coef)
        if (v > kMasterZero) prow[s].push_back({k + 2, v});
    }
    lp.add_row("mu", RowKind::le, 1.0, std::move(murow));
    for (std::size_t b = 0; b < G; ++b) lp.add_row("theta_" + std::to_string(b), RowKind::le, 0.0, std::move(theta[b]));
    for (std::size_t s = 0; s < S; ++s) lp.add_row("P_" + std::to_string(s), RowKind::le, 0.0, std::move(prow[s]));
    const auto sol = solve_lp(lp, opt.lp);
    if (sol.status != LpStatus::optimal)
      throw Error(ErrorCode::solver_failure, std::string("cutting-plane master returned ") + to_string(sol.status));
    res.lp_iterations += sol.iterations;

    // certificate: scale the master dual so that every reduced row holds
    std::vector<double> y(cuts.size());
    for (std::size_t k = 0; k < cuts.size(); ++k) y[k] = std::max(0.0, sol.primal[k + 2]);
    std::vector<double> gsum(G, 0.0), rows(S, 0.0);
    double lam_y = 0;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      gsum[cuts[k].group] += y[k];
      lam_y += cuts[k].lambda * y[k];
      for (const auto& [s, v] : cuts[k].coef) rows[s] += v * y[k];
    }
    const double zeta_eff = *std::min_element(gsum.begin(), gsum.end());
    const double alpha_eff = -*std::max_element(rows.begin(), rows.end());
    const double obj = keep * zeta_eff + alpha_eff;
    if (obj > 0) {
      const double bound = lam_y / obj;
      if (bound < best_bound) {
        best_bound = bound;
        best_cert.group.clear();
        best_cert.lambda.clear();
        best_cert.y.clear();
        for (std::size_t k = 0; k < cuts.size(); ++k) {
          if (y[k] <= 0) continue;
          best_cert.group.push_back(cuts[k].group);
          best_cert.lambda.push_back(cuts[k].lambda);
          best_cert.y.push_back(y[k]);
        }
        best_cert.s = 1.0 / obj;
        best_cert.zeta = zeta_eff;
      }
    }

    // master primal: (mu, theta, P)
    const double mu = std::max(sol.dual[0], 0.0) / K;
    std::vector<double> P(S);
    for (std::size_t s = 0; s < S; ++s) P[s] = sol.dual[1 + G + s];
    normalize_simplex(P);
    const double feasible_mu = fam.min_budget(P, keep);
    if (feasible_mu < best_mu) {
      best_mu = feasible_mu;
      bestP = P;
    }
    const double lower = 1.0 / best_mu;
    if (std::isfinite(best_bound) && best_bound - lower <= opt.rel_gap * best_bound) break;

    bool added = false;
    for (std::size_t b = 0; b < G; ++b) {
      const double theta_b = sol.dual[1 + b];
      double lam;
      const double g = fam.evaluate(b, P, mu, &lam);
      if (theta_b > g + 1e-13) added |= add(b, lam, false);
    }
    prune_cuts(cuts, y, opt.cut_idle_limit);
    if (!added) break;
    if (mu > 0) K = 1.0 / mu;
  }
  if (!std::isfinite(best_bound))
    throw Error(ErrorCode::solver_failure, "cutting planes produced no certificate");

  res.method = "cutting-plane";
  // witness: V = P / mu, a = knapsack take / mu
  res.V.resize(S);
  for (std::size_t s = 0; s < S; ++s) res.V[s] = bestP[s] / best_mu;
  res.a.assign(t.size(), 0.0);
  for (std::size_t b = 0; b < G; ++b) {
    double lam;
    fam.evaluate(b, bestP, best_mu, &lam, &res.a);
  }
  for (auto& v : res.a) v /= best_mu;
  res.M_lower = 1.0 / best_mu;

  // certificate: c_b = s sum y lambda, u = s sum y (W - lambda r)^+, zeta = s zeta_eff
  auto& cert = res.dual;
  cert.c.assign(G, 0.0);
  cert.u.assign(t.size(), 0.0);
  for (std::size_t k = 0; k < best_cert.y.size(); ++k) {
    const double sy = best_cert.s * best_cert.y[k];
    cert.c[best_cert.group[k]] += sy * best_cert.lambda[k];
    fam.add_cut_u(best_cert.group[k], best_cert.lambda[k], sy, cert.u);
  }
  cert.zeta = best_cert.s * best_cert.zeta;
  CompensatedSum bound;
  for (double c : cert.c) bound.add(c);
  cert.bound = bound.value();
  res.M_beta = cert.bound;
}

}  // namespace detail

/// Largest code size of the n-fold product channel at error eps.
inline ReducedSizeResult<double> reduced_max_size(const Channel& base, int n, double eps,
                                                  const ReducedOptions& opt = {}) {
  if (eps < 0 || !(eps < 1)) throw Error(ErrorCode::bad_parameter, "eps must lie in [0,1)");
  ReducedSizeResult<double> res;
  res.table = enumerate_joint_types(base.input_size(), base.output_size(), n, opt.type_limit);
  const auto co = reduced_coefficients(res.table, base, opt.underflow);
  res.dropped = co.dropped;
  res.eps = eps;
  const bool full = opt.method == ReducedMethod::full ||
                    (opt.method == ReducedMethod::automatic && res.table.size() <= opt.full_type_limit);
  if (full)
    detail::fill_size_from_full(res, co, opt);
  else
    detail::fill_size_from_cuts(res, co, opt);
  res.M_NS = detail::floor_int(res.M_beta);
  return res;
}

inline ReducedSizeResult<Rational> reduced_max_size(const ExactChannel& base, int n, const Rational& eps,
                                                    const ReducedOptions& opt = {}) {
  if (eps < 0 || !(eps < 1)) throw Error(ErrorCode::bad_parameter, "eps must lie in [0,1)");
  ReducedSizeResult<Rational> res;
  res.table = enumerate_joint_types(base.input_size(), base.output_size(), n, opt.type_limit);
  const auto co = reduced_coefficients(res.table, base);
  res.eps = eps;
  detail::fill_size_from_full(res, co, opt);
  res.M_NS = detail::floor_int(res.M_beta);
  return res;
}

// ---------------------------------------------------------------------------
// Expansion to the explicit tensor-power LPs (small n)

namespace detail {

// Symbol strings of length n over k letters, leftmost symbol most significant.
inline std::vector<std::size_t> digits(std::size_t idx, std::size_t k, int n) {
  std::vector<std::size_t> d(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    d[static_cast<std::size_t>(i)] = idx % k;
    idx /= k;
  }
  return d;
}

template <class F>
void for_each_pair(const TypeTable& t, F&& f) {
  std::size_t nx = 1, ny = 1;
  for (int i = 0; i < t.n; ++i) {
    nx *= t.a_size;
    ny *= t.b_size;
  }
  for (std::size_t x = 0; x < nx; ++x) {
    const auto xs = digits(x, t.a_size, t.n);
    for (std::size_t y = 0; y < ny; ++y) f(x, y, t.index_of_strings(xs, digits(y, t.b_size, t.n)));
  }
}

}  // namespace detail

/// R_xy = a_t / |T_{t_A}|, p_x = P_s / |T_s| on the explicit strings.
inline ErrorPrimalSolution<double> expand_error_witness(const ReducedErrorResult<double>& res) {
  const auto& t = res.table;
  std::size_t nx = 1, ny = 1;
  for (int i = 0; i < t.n; ++i) {
    nx *= t.a_size;
    ny *= t.b_size;
  }
  ErrorPrimalSolution<double> out;
  out.R = Matrix<double>(nx, ny);
  out.p.assign(nx, 0.0);
  detail::for_each_pair(t, [&](std::size_t x, std::size_t y, std::size_t i) {
    const std::size_t s = t.input_of[i];
    out.R(x, y) = res.a[i] * std::exp(-t.log_T_input[s]);
    out.p[x] = res.P[s] * std::exp(-t.log_T_input[s]);
  });
  out.p_err = res.p_err_upper;
  out.success = 1.0 - res.p_err_upper;
  return out;
}

/// V_xy = u_t |T_{t_A}| / |T_t|, c_y = c_b / |T_b|, same zeta.
inline SizeDualCertificate<double> expand_size_certificate(const ReducedSizeResult<double>& res) {
  const auto& t = res.table;
  std::size_t nx = 1, ny = 1;
  for (int i = 0; i < t.n; ++i) {
    nx *= t.a_size;
    ny *= t.b_size;
  }
  SizeDualCertificate<double> out;
  out.V = Matrix<double>(nx, ny);
  out.c.assign(ny, 0.0);
  out.zeta = res.dual.zeta;
  detail::for_each_pair(t, [&](std::size_t x, std::size_t y, std::size_t i) {
    out.V(x, y) = res.dual.u[i] * std::exp(t.log_T_input[t.input_of[i]] - t.log_T[i]);
    out.c[y] = res.dual.c[t.output_of[i]] * std::exp(-t.log_T_output[t.output_of[i]]);
  });
  for (double c : out.c) out.bound += c;
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json counts_json(const JointType& jt) {
  auto m = nlohmann::json::array();
  for (std::size_t a = 0; a < jt.a_size; ++a) {
    auto row = nlohmann::json::array();
    for (std::size_t b = 0; b < jt.b_size; ++b) row.push_back(jt.count(a, b));
    m.push_back(std::move(row));
  }
  return m;
}

/// Per-type witness: R(t) and p(s) are the unscaled per-string values.
template <class T>
nlohmann::json reduced_witness_json(const TypeTable& t, const std::vector<T>& a, const std::vector<T>& P,
                                    const char* input_key) {
  nlohmann::json doc;
  doc["n"] = t.n;
  auto types = nlohmann::json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (a[i] == 0) continue;
    nlohmann::json e;
    e["counts"] = counts_json(t.types[i]);
    if constexpr (is_exact_v<T>)
      e["R"] = to_string(Rational(a[i] / Rational(exact_multinomial(t.n, t.input_types[t.input_of[i]]))));
    else
      e["R"] = a[i] * std::exp(-t.log_T_input[t.input_of[i]]);
    types.push_back(std::move(e));
  }
  doc["types"] = std::move(types);
  auto inputs = nlohmann::json::array();
  for (std::size_t s = 0; s < t.input_types.size(); ++s) {
    if (P[s] == 0) continue;
    nlohmann::json e;
    e["counts"] = t.input_types[s];
    if constexpr (is_exact_v<T>)
      e[input_key] = to_string(Rational(P[s] / Rational(exact_multinomial(t.n, t.input_types[s]))));
    else
      e[input_key] = P[s] * std::exp(-t.log_T_input[s]);
    inputs.push_back(std::move(e));
  }
  doc["inputs"] = std::move(inputs);
  return doc;
}

}  // namespace nsbound
