#pragma once

// Symmetrized non-signalling codes built from an error-LP witness, the full
// Z(x, w_hat | w, y) tensor, and direct checks of the NS conditions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsbound/channel.hpp"
#include "nsbound/converse.hpp"

namespace nsbound {

/// A general code Z(x, w_hat | w, y): a distribution over (x, w_hat) for
/// every (w, y).
class CodeTensor {
 public:
  CodeTensor(std::size_t inputs, std::size_t messages, std::size_t outputs)
      : A_(inputs), M_(messages), B_(outputs), z_(inputs * messages * messages * outputs, 0.0) {}

  std::size_t inputs() const { return A_; }
  std::size_t messages() const { return M_; }
  std::size_t outputs() const { return B_; }

  double& operator()(std::size_t x, std::size_t w_hat, std::size_t w, std::size_t y) {
    return z_[((x * M_ + w_hat) * M_ + w) * B_ + y];
  }
  double operator()(std::size_t x, std::size_t w_hat, std::size_t w, std::size_t y) const {
    return z_[((x * M_ + w_hat) * M_ + w) * B_ + y];
  }

 private:
  std::size_t A_, M_, B_;
  std::vector<double> z_;
};

/// Z = R_xy when w_hat = w, (p_x - R_xy)/(M-1) otherwise.
struct NsCode {
  std::int64_t M = 1;
  Matrix<double> R;
  std::vector<double> p;

  double z(std::size_t x, std::size_t w_hat, std::size_t w, std::size_t y) const {
    if (w_hat == w) return R(x, y);
    return (p[x] - R(x, y)) / static_cast<double>(M - 1);
  }

  CodeTensor tensor() const {
    const std::size_t m = static_cast<std::size_t>(M);
    CodeTensor t(R.rows(), m, R.cols());
    for (std::size_t x = 0; x < R.rows(); ++x)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t w = 0; w < m; ++w)
          for (std::size_t y = 0; y < R.cols(); ++y) t(x, a, w, y) = z(x, a, w, y);
    return t;
  }
};

struct NsReport {
  double a_to_b = 0;         // max_{w_hat,y} spread over w of P(w_hat | w, y)
  double b_to_a = 0;         // max_{x,w} spread over y of P(x | w, y)
  double normalization = 0;  // max_{w,y} |sum_{x,w_hat} Z - 1|
  bool passed = false;
};

struct CodeEvaluation {
  double p_err = 0;
  double vpmf_residual = 0;  // max_w |sum Z E - 1|
};

namespace detail {

inline void require_message_count(std::int64_t M) {
  if (M < 1) throw Error(ErrorCode::bad_parameter, "M must be at least 1");
  if (M > 4096) throw Error(ErrorCode::size_limit_exceeded, "code tensors are limited to 4096 messages");
}

}  // namespace detail

/// Witness tolerance 1e-8. Columns of R are raised to exactly 1/M (the NS
/// condition on the decoder marginal), filling zero-probability cells first so
/// an optimal witness keeps its error.
inline NsCode build_code(const Channel& ch, std::int64_t M, const ErrorPrimalSolution<double>& witness,
                         double tol = 1e-8) {
  detail::require_message_count(M);
  const std::size_t A = ch.input_size(), B = ch.output_size();
  if (witness.R.rows() != A || witness.R.cols() != B || witness.p.size() != A)
    throw Error(ErrorCode::dimension_mismatch, "witness does not match the channel");
  const double mu = 1.0 / static_cast<double>(M);

  std::vector<std::string> bad;
  double total = 0;
  for (std::size_t x = 0; x < A; ++x) {
    total += witness.p[x];
    if (witness.p[x] < -tol) bad.push_back("p[" + std::to_string(x) + "] < 0");
    for (std::size_t y = 0; y < B; ++y) {
      const double r = witness.R(x, y);
      if (r < -tol) bad.push_back("R[" + std::to_string(x) + "][" + std::to_string(y) + "] < 0");
      if (r > witness.p[x] + tol) bad.push_back("R[" + std::to_string(x) + "][" + std::to_string(y) + "] > p");
    }
  }
  if (std::abs(total - 1) > tol) bad.push_back("sum p != 1");
  for (std::size_t y = 0; y < B; ++y) {
    double col = 0;
    for (std::size_t x = 0; x < A; ++x) col += witness.R(x, y);
    if (col > mu + tol) bad.push_back("sum_x R[x][" + std::to_string(y) + "] > 1/M");
  }
  if (!bad.empty()) {
    std::string msg = "witness violates";
    for (const auto& b : bad) msg += " " + b + ";";
    throw Error(ErrorCode::infeasible_witness, msg);
  }

  NsCode code;
  code.M = M;
  code.p.resize(A);
  for (std::size_t x = 0; x < A; ++x) code.p[x] = std::max(witness.p[x], 0.0) / total;
  code.R = Matrix<double>(A, B);
  for (std::size_t y = 0; y < B; ++y) {
    double col = 0;
    for (std::size_t x = 0; x < A; ++x) {
      code.R(x, y) = std::clamp(witness.R(x, y), 0.0, code.p[x]);
      col += code.R(x, y);
    }
    if (col > mu) {
      for (std::size_t x = 0; x < A; ++x) code.R(x, y) *= mu / col;
      continue;
    }
    double deficit = mu - col;
    for (int pass = 0; pass < 2 && deficit > 0; ++pass)
      for (std::size_t x = 0; x < A && deficit > 0; ++x) {
        if ((ch(x, y) > 0) != (pass == 1)) continue;
        const double take = std::min(deficit, code.p[x] - code.R(x, y));
        if (take <= 0) continue;
        code.R(x, y) += take;
        deficit -= take;
      }
  }
  return code;
}

inline NsReport verify_nonsignalling(const CodeTensor& z, double tol = 1e-10) {
  const std::size_t A = z.inputs(), M = z.messages(), B = z.outputs();
  NsReport rep;
  for (std::size_t a = 0; a < M; ++a)
    for (std::size_t y = 0; y < B; ++y) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t w = 0; w < M; ++w) {
        CompensatedSum s;
        for (std::size_t x = 0; x < A; ++x) s.add(z(x, a, w, y));
        lo = std::min(lo, s.value());
        hi = std::max(hi, s.value());
      }
      rep.a_to_b = std::max(rep.a_to_b, hi - lo);
    }
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t w = 0; w < M; ++w) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t y = 0; y < B; ++y) {
        CompensatedSum s;
        for (std::size_t a = 0; a < M; ++a) s.add(z(x, a, w, y));
        lo = std::min(lo, s.value());
        hi = std::max(hi, s.value());
      }
      rep.b_to_a = std::max(rep.b_to_a, hi - lo);
    }
  for (std::size_t w = 0; w < M; ++w)
    for (std::size_t y = 0; y < B; ++y) {
      CompensatedSum s;
      for (std::size_t x = 0; x < A; ++x)
        for (std::size_t a = 0; a < M; ++a) s.add(z(x, a, w, y));
      rep.normalization = std::max(rep.normalization, std::abs(s.value() - 1));
    }
  rep.passed = rep.a_to_b <= tol && rep.b_to_a <= tol;
  return rep;
}

inline NsReport verify_nonsignalling(const NsCode& code, double tol = 1e-10) {
  return verify_nonsignalling(code.tensor(), tol);
}

inline CodeEvaluation code_error(const CodeTensor& z, const Channel& ch) {
  if (z.inputs() != ch.input_size() || z.outputs() != ch.output_size())
    throw Error(ErrorCode::dimension_mismatch, "code and channel alphabets differ");
  const std::size_t A = z.inputs(), M = z.messages(), B = z.outputs();
  CodeEvaluation ev;
  CompensatedSum correct;
  for (std::size_t w = 0; w < M; ++w) {
    CompensatedSum total;
    for (std::size_t x = 0; x < A; ++x)
      for (std::size_t y = 0; y < B; ++y) {
        const double e = ch(x, y);
        if (e == 0) continue;
        correct.add(z(x, w, w, y) * e);
        for (std::size_t a = 0; a < M; ++a) total.add(z(x, a, w, y) * e);
      }
    ev.vpmf_residual = std::max(ev.vpmf_residual, std::abs(total.value() - 1));
  }
  ev.p_err = 1 - correct.value() / static_cast<double>(M);
  return ev;
}

inline CodeEvaluation code_error(const NsCode& code, const Channel& ch) { return code_error(code.tensor(), ch); }

/// A deterministic channel under which a receiver-to-sender signalling code
/// is not a valid conditional distribution.
struct SignallingWitness {
  Channel channel;
  std::size_t message = 0;
  double excess = 0;  // sum Z E - 1 for that message
};

inline std::optional<SignallingWitness> signalling_witness(const CodeTensor& z, double tol = 1e-12) {
  const std::size_t A = z.inputs(), M = z.messages(), B = z.outputs();
  if (B < 2) return std::nullopt;
  double best = tol;
  std::size_t bw = 0, bx = 0, by0 = 0, by1 = 0;
  for (std::size_t w = 0; w < M; ++w)
    for (std::size_t x = 0; x < A; ++x)
      for (std::size_t y0 = 0; y0 < B; ++y0)
        for (std::size_t y1 = 0; y1 < B; ++y1) {
          double s0 = 0, s1 = 0;
          for (std::size_t a = 0; a < M; ++a) {
            s0 += z(x, a, w, y0);
            s1 += z(x, a, w, y1);
          }
          if (s0 - s1 > best) {
            best = s0 - s1;
            bw = w;
            bx = x;
            by0 = y0;
            by1 = y1;
          }
        }
  if (best <= tol) return std::nullopt;
  std::vector<std::vector<double>> rows(A, std::vector<double>(B, 0.0));
  for (std::size_t x = 0; x < A; ++x) rows[x][x == bx ? by0 : by1] = 1.0;
  SignallingWitness out{Channel(std::move(rows)), bw, 0};
  CompensatedSum total;
  for (std::size_t x = 0; x < A; ++x)
    for (std::size_t y = 0; y < B; ++y)
      for (std::size_t a = 0; a < M; ++a) total.add(z(x, a, bw, y) * out.channel(x, y));
  out.excess = total.value() - 1;
  return out;
}

inline nlohmann::json code_to_json(const NsCode& code) {
  return {{"M", code.M}, {"p", code.p}, {"R", code.R.to_rows()}};
}

inline NsCode code_from_json(const nlohmann::json& doc) {
  try {
    NsCode code;
    code.M = doc.at("M").get<std::int64_t>();
    code.p = doc.at("p").get<std::vector<double>>();
    const auto rows = doc.at("R").get<std::vector<std::vector<double>>>();
    code.R = Matrix<double>(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t x = 0; x < rows.size(); ++x) {
      if (rows[x].size() != code.R.cols()) throw Error(ErrorCode::dimension_mismatch, "ragged R");
      for (std::size_t y = 0; y < rows[x].size(); ++y) code.R(x, y) = rows[x][y];
    }
    return code;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

}  // namespace nsbound
