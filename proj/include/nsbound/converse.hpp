#pragma once

// Single-use (or explicit tensor power) converse LPs: minimum NS error for
// M messages and the largest code size at error eps, each with a primal
// witness and a dual certificate.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsbound/channel.hpp"
#include "nsbound/lp.hpp"

namespace nsbound {

// ---------------------------------------------------------------------------
// Result types

template <class T>
struct ErrorPrimalSolution {
  Matrix<T> R;
  std::vector<T> p;
  T success = 0;
  T p_err = 0;
};

/// E(y|x) <= D_xy + z_y, sum_y D_xy <= alpha; certified error is
/// 1 - alpha - mu * sum_y z_y.
template <class T>
struct ErrorDualCertificate {
  std::vector<T> z;
  Matrix<T> D;
  T alpha = 0;
  T certified_error = 0;
};

template <class T>
struct ErrorBoundResult {
  ErrorPrimalSolution<T> primal;
  ErrorDualCertificate<T> dual;
  T mu = 0;
  T p_err = 0;
  std::size_t iterations = 0;
};

template <class T>
struct SizePrimalSolution {
  Matrix<T> F;
  std::vector<T> v;
  T value = 0;
  T t = 0;
};

/// V_xy + c_y >= zeta E(y|x), sum_y V_xy <= (1-eps) zeta - 1; bound = sum c.
template <class T>
struct SizeDualCertificate {
  Matrix<T> V;
  std::vector<T> c;
  T zeta = 0;
  T bound = 0;
};

template <class T>
struct SizeBoundResult {
  SizePrimalSolution<T> primal;
  SizeDualCertificate<T> dual;
  T eps = 0;
  T M_beta = 0;
  std::int64_t M_NS = 0;
  bool floor_rechecked = false;  // float value sat near an integer and was re-solved exactly
  std::size_t iterations = 0;
};

struct ConverseOptions {
  LpOptions lp;
  /// Re-solve exactly when a float M_beta is this close to an integer...
  double floor_recheck_window = 1e-4;
  /// ...and the explicit LP has at most this many cells.
  std::size_t floor_recheck_cells = 64;
};

// ---------------------------------------------------------------------------
// LP builders. Variable and row layouts are fixed so that duals can be read
// back by index.

/// max sum E R  s.t.  sum_x R_xy <= mu [pack_y],  R_xy <= p_x [cap_x_y],
/// sum p = 1 [norm]. Variables: R (x-major), then p.
template <class T>
LinearProgram<T> build_error_lp(const BasicChannel<T>& ch, const T& mu) {
  const std::size_t A = ch.input_size(), B = ch.output_size();
  LinearProgram<T> lp;
  lp.sense = Sense::maximize;
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y) lp.add_var("R_" + std::to_string(x) + "_" + std::to_string(y), ch(x, y));
  for (std::size_t x = 0; x < A; ++x) lp.add_var("p_" + std::to_string(x));
  for (std::size_t y = 0; y < B; ++y) {
    std::vector<LpTerm<T>> terms;
    for (std::size_t x = 0; x < A; ++x) terms.push_back({x * B + y, T(1)});
    lp.add_row("pack_" + std::to_string(y), RowKind::le, mu, std::move(terms));
  }
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y)
      lp.add_row("cap_" + std::to_string(x) + "_" + std::to_string(y), RowKind::le, T(0),
                 {{x * B + y, T(1)}, {A * B + x, T(-1)}});
  std::vector<LpTerm<T>> norm;
  for (std::size_t x = 0; x < A; ++x) norm.push_back({A * B + x, T(1)});
  lp.add_row("norm", RowKind::eq, T(1), std::move(norm));
  return lp;
}

/// max sum v  s.t.  F_xy <= v_x [fv_x_y],  sum_x F_xy <= 1 [pack_y],
/// (1-eps) sum v <= sum E F [succ]. Variables: F (x-major), then v.
template <class T>
LinearProgram<T> build_size_lp(const BasicChannel<T>& ch, const T& eps) {
  const std::size_t A = ch.input_size(), B = ch.output_size();
  LinearProgram<T> lp;
  lp.sense = Sense::maximize;
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y) lp.add_var("F_" + std::to_string(x) + "_" + std::to_string(y));
  for (std::size_t x = 0; x < A; ++x) lp.add_var("v_" + std::to_string(x), T(1));
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y)
      lp.add_row("fv_" + std::to_string(x) + "_" + std::to_string(y), RowKind::le, T(0),
                 {{x * B + y, T(1)}, {A * B + x, T(-1)}});
  for (std::size_t y = 0; y < B; ++y) {
    std::vector<LpTerm<T>> terms;
    for (std::size_t x = 0; x < A; ++x) terms.push_back({x * B + y, T(1)});
    lp.add_row("pack_" + std::to_string(y), RowKind::le, T(1), std::move(terms));
  }
  std::vector<LpTerm<T>> succ;
  const T keep = T(1) - eps;
  for (std::size_t x = 0; x < A; ++x) succ.push_back({A * B + x, keep});
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y)
      if (ch(x, y) != 0) succ.push_back({x * B + y, T(-ch(x, y))});
  lp.add_row("succ", RowKind::le, T(0), std::move(succ));
  return lp;
}

// ---------------------------------------------------------------------------
// Certificates

namespace detail {

template <class T>
T clamp0(const T& v) {
  return v < 0 ? T(0) : v;
}

}  // namespace detail

/// Smallest feasible (D, alpha) for the given z; returns the completed
/// certificate with its certified error.
template <class T>
ErrorDualCertificate<T> complete_error_certificate(const BasicChannel<T>& ch, const T& mu, std::vector<T> z) {
  const std::size_t A = ch.input_size(), B = ch.output_size();
  if (z.size() != B) throw Error(ErrorCode::dimension_mismatch, "z needs one entry per output symbol");
  ErrorDualCertificate<T> cert;
  for (auto& v : z) v = detail::clamp0(v);
  cert.D = Matrix<T>(A, B);
  T alpha = 0;
  for (std::size_t x = 0; x < A; ++x) {
    T row = 0;
    for (std::size_t y = 0; y < B; ++y) {
      cert.D(x, y) = detail::clamp0(T(ch(x, y) - z[y]));
      row += cert.D(x, y);
    }
    if (x == 0 || row > alpha) alpha = row;
  }
  T zsum = 0;
  for (const auto& v : z) zsum += v;
  cert.alpha = alpha;
  cert.certified_error = T(1) - alpha - mu * zsum;
  cert.z = std::move(z);
  return cert;
}

/// min over x of sum_y (min{z_y, E(y|x)} - z_y/M): a lower bound on the NS
/// error for any nonnegative z.
template <class T>
T error_dual_value(const BasicChannel<T>& ch, std::int64_t M, const std::vector<T>& z) {
  if (z.size() != ch.output_size()) throw Error(ErrorCode::dimension_mismatch, "z needs one entry per output symbol");
  if (M < 1) throw Error(ErrorCode::bad_parameter, "M must be at least 1");
  for (const auto& v : z)
    if (v < 0) throw Error(ErrorCode::bad_parameter, "z must be nonnegative");
  const T inv = T(1) / T(M);
  T best = 0;
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    T s = 0;
    for (std::size_t y = 0; y < ch.output_size(); ++y) s += (z[y] < ch(x, y) ? z[y] : ch(x, y)) - z[y] * inv;
    if (x == 0 || s < best) best = s;
  }
  return best;
}

/// Repairs a float size certificate so that it is feasible by construction:
/// V is clipped at 0, zeta raised until the per-x rows hold, c recomputed.
template <class T>
SizeDualCertificate<T> complete_size_certificate(const BasicChannel<T>& ch, const T& eps, Matrix<T> V, T zeta) {
  const std::size_t A = ch.input_size(), B = ch.output_size();
  if (V.rows() != A || V.cols() != B) throw Error(ErrorCode::dimension_mismatch, "V must be |A| x |B|");
  const T keep = T(1) - eps;
  zeta = detail::clamp0(zeta);
  T excess = 0;
  for (std::size_t x = 0; x < A; ++x) {
    T row = 0;
    for (std::size_t y = 0; y < B; ++y) {
      V(x, y) = detail::clamp0(V(x, y));
      row += V(x, y);
    }
    const T e = row - (keep * zeta - T(1));
    if (e > excess) excess = e;
  }
  if (excess > 0) zeta += excess / keep;
  SizeDualCertificate<T> cert;
  cert.c.assign(B, T(0));
  for (std::size_t y = 0; y < B; ++y)
    for (std::size_t x = 0; x < A; ++x) {
      const T need = zeta * ch(x, y) - V(x, y);
      if (need > cert.c[y]) cert.c[y] = need;
    }
  for (const auto& c : cert.c) cert.bound += c;
  cert.V = std::move(V);
  cert.zeta = zeta;
  return cert;
}

struct CertificateViolation {
  std::string constraint;  // "cover" (V+c >= zeta E), "row" (sum_y V), "sign"
  std::size_t x = 0;
  std::size_t y = 0;
  double amount = 0;  // how far the constraint is missed
};

struct CertifiedBound {
  bool valid = false;
  double bound = 0;
  std::string exact_bound;  // "num/den" when checked exactly
  std::vector<CertificateViolation> violations;
};

/// Checks a size certificate against the dual constraints. With T = Rational
/// the check is exact and tol is ignored.
template <class T>
CertifiedBound certify_size(const BasicChannel<T>& ch, const T& eps, const SizeDualCertificate<T>& cert,
                            double tol = 1e-9) {
  const std::size_t A = ch.input_size(), B = ch.output_size();
  if (cert.V.rows() != A || cert.V.cols() != B || cert.c.size() != B)
    throw Error(ErrorCode::dimension_mismatch, "certificate dimensions do not match the channel");
  const T t = is_exact_v<T> ? T(0) : from_double<T>(tol);
  CertifiedBound out;
  auto miss = [&](const char* what, std::size_t x, std::size_t y, const T& slack) {
    if (slack < -t) out.violations.push_back({what, x, y, -to_double(slack)});
  };
  miss("sign", 0, 0, cert.zeta);
  for (std::size_t y = 0; y < B; ++y) miss("sign", 0, y, cert.c[y]);
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y) {
      miss("sign", x, y, cert.V(x, y));
      miss("cover", x, y, T(cert.V(x, y) + cert.c[y] - cert.zeta * ch(x, y)));
    }
  const T keep = T(1) - eps;
  for (std::size_t x = 0; x < A; ++x) {
    T row = 0;
    for (std::size_t y = 0; y < B; ++y) row += cert.V(x, y);
    miss("row", x, 0, T(keep * cert.zeta - T(1) - row));
  }
  T bound = 0;
  for (const auto& c : cert.c) bound += c;
  out.valid = out.violations.empty();
  out.bound = to_double(bound);
  if constexpr (is_exact_v<T>) out.exact_bound = to_string(bound);
  return out;
}

// ---------------------------------------------------------------------------
// Solvers

template <class T>
ErrorBoundResult<T> min_error_mu(const BasicChannel<T>& ch, const T& mu, const ConverseOptions& opt = {}) {
  if (!(mu > 0) || mu > 1) throw Error(ErrorCode::bad_parameter, "mu must lie in (0,1]");
  const std::size_t A = ch.input_size(), B = ch.output_size();
  const auto lp = build_error_lp(ch, mu);
  const auto sol = solve_lp(lp, opt.lp);
  if (sol.status != LpStatus::optimal)
    throw Error(ErrorCode::solver_failure, std::string("error LP returned ") + to_string(sol.status));

  ErrorBoundResult<T> res;
  res.mu = mu;
  res.iterations = sol.iterations;
  auto& pr = res.primal;
  pr.R = Matrix<T>(A, B);
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y) pr.R(x, y) = sol.primal[x * B + y];
  pr.p.assign(sol.primal.begin() + static_cast<std::ptrdiff_t>(A * B), sol.primal.end());
  pr.success = sol.objective;
  pr.p_err = T(1) - sol.objective;
  std::vector<T> z(sol.dual.begin(), sol.dual.begin() + static_cast<std::ptrdiff_t>(B));
  res.dual = complete_error_certificate(ch, mu, std::move(z));
  res.p_err = pr.p_err;
  return res;
}

template <class T>
ErrorBoundResult<T> min_error(const BasicChannel<T>& ch, std::int64_t M, const ConverseOptions& opt = {}) {
  if (M < 1) throw Error(ErrorCode::bad_parameter, "M must be at least 1");
  return min_error_mu(ch, T(T(1) / T(M)), opt);
}

namespace detail {

template <class T>
std::int64_t floor_int(const T& v) {
  if constexpr (is_exact_v<T>) {
    BigInt q = boost::multiprecision::numerator(v) / boost::multiprecision::denominator(v);
    if (v < 0 && Rational(q) != v) q -= 1;
    return q.template convert_to<std::int64_t>();
  } else {
    if (!(v < 9.2e18)) return std::numeric_limits<std::int64_t>::max();
    return static_cast<std::int64_t>(std::floor(v + 1e-6));
  }
}

}  // namespace detail

template <class T>
SizeBoundResult<T> max_size(const BasicChannel<T>& ch, const T& eps, const ConverseOptions& opt = {}) {
  if (eps < 0 || !(eps < 1)) throw Error(ErrorCode::bad_parameter, "eps must lie in [0,1)");
  const std::size_t A = ch.input_size(), B = ch.output_size();
  const auto lp = build_size_lp(ch, eps);
  const auto sol = solve_lp(lp, opt.lp);
  if (sol.status != LpStatus::optimal)
    throw Error(ErrorCode::solver_failure, std::string("size LP returned ") + to_string(sol.status));

  SizeBoundResult<T> res;
  res.eps = eps;
  res.iterations = sol.iterations;
  auto& pr = res.primal;
  pr.F = Matrix<T>(A, B);
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y) pr.F(x, y) = sol.primal[x * B + y];
  pr.v.assign(sol.primal.begin() + static_cast<std::ptrdiff_t>(A * B), sol.primal.end());
  pr.value = sol.objective;
  for (const auto& v : pr.v) pr.t += v;

  Matrix<T> V(A, B);
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y) V(x, y) = sol.dual[x * B + y];
  res.dual = complete_size_certificate(ch, eps, std::move(V), sol.dual[A * B + B]);
  res.M_beta = sol.objective;
  res.M_NS = detail::floor_int(res.M_beta);

  if constexpr (!is_exact_v<T>) {
    const double frac = res.M_beta - std::round(res.M_beta);
    if (std::abs(frac) <= opt.floor_recheck_window && A * B <= opt.floor_recheck_cells) {
      const auto exact = max_size(to_exact(ch), from_double<Rational>(eps), opt);
      res.M_NS = exact.M_NS;
      res.floor_rechecked = true;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// JSON

template <class T>
nlohmann::json scalar_json(const T& v) {
  if constexpr (is_exact_v<T>)
    return to_string(v);
  else
    return v + 0.0;  // drops the sign of -0
}

template <class T>
nlohmann::json vector_json(const std::vector<T>& v) {
  auto out = nlohmann::json::array();
  for (const auto& e : v) out.push_back(scalar_json(e));
  return out;
}

template <class T>
nlohmann::json matrix_json(const Matrix<T>& m) {
  auto out = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(scalar_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

template <class T>
nlohmann::json certificate_to_json(const SizeDualCertificate<T>& cert) {
  return {{"zeta", scalar_json(cert.zeta)}, {"c", vector_json(cert.c)}, {"V", matrix_json(cert.V)}};
}

/// Reads {"zeta":..,"c":[..],"V":[[..]]}; entries may be numbers, decimal
/// strings or "a/b" strings.
template <class T>
SizeDualCertificate<T> certificate_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("zeta") || !doc.contains("c") || !doc.contains("V"))
    throw Error(ErrorCode::parse_error, "certificate needs zeta, c and V");
  SizeDualCertificate<T> cert;
  cert.zeta = detail::json_entry<T>(doc["zeta"]);
  for (const auto& e : doc["c"]) cert.c.push_back(detail::json_entry<T>(e));
  const auto& V = doc["V"];
  if (!V.is_array() || V.empty() || !V[0].is_array()) throw Error(ErrorCode::parse_error, "V must be a matrix");
  cert.V = Matrix<T>(V.size(), V[0].size());
  for (std::size_t r = 0; r < V.size(); ++r) {
    if (V[r].size() != cert.V.cols()) throw Error(ErrorCode::parse_error, "V rows differ in length");
    for (std::size_t c = 0; c < V[r].size(); ++c) cert.V(r, c) = detail::json_entry<T>(V[r][c]);
  }
  for (const auto& c : cert.c) cert.bound += c;
  return cert;
}

}  // namespace nsbound
