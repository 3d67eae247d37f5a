#pragma once

// Discrete channel model: E(y|x) over finite input/output alphabets.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsbound/error.hpp"
#include "nsbound/numeric.hpp"

namespace nsbound {

/// Tolerance on row sums accepted at ingestion.
inline constexpr double kRowSumTolerance = 1e-12;

/// Default cap on |A|^n * |B|^n for explicit tensor powers.
inline constexpr double kExplicitEntryLimit = 1e7;

/// Row-stochastic conditional distribution E(y|x). Immutable once built;
/// rows are renormalized once after validation so that they sum to one.
template <class T>
class BasicChannel {
 public:
  BasicChannel() = default;

  /// Validates `rows` (see validate_channel) and takes ownership.
  explicit BasicChannel(std::vector<std::vector<T>> rows, std::vector<std::string> input_labels = {},
                        std::vector<std::string> output_labels = {});

  std::size_t input_size() const { return inputs_; }
  std::size_t output_size() const { return outputs_; }

  /// E(y|x).
  const T& operator()(std::size_t x, std::size_t y) const { return matrix_(x, y); }
  const Matrix<T>& matrix() const { return matrix_; }

  const std::vector<std::string>& input_labels() const { return input_labels_; }
  const std::vector<std::string>& output_labels() const { return output_labels_; }

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  Matrix<T> matrix_;
  std::vector<std::string> input_labels_;
  std::vector<std::string> output_labels_;
};

using Channel = BasicChannel<double>;
using ExactChannel = BasicChannel<Rational>;

namespace detail {

inline std::vector<std::string> index_labels(std::size_t n) {
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::to_string(i);
  return out;
}

}  // namespace detail

template <class T>
BasicChannel<T>::BasicChannel(std::vector<std::vector<T>> rows, std::vector<std::string> input_labels,
                              std::vector<std::string> output_labels) {
  if (rows.empty() || rows.front().empty()) throw Error(ErrorCode::empty_matrix, "channel matrix is empty");
  inputs_ = rows.size();
  outputs_ = rows.front().size();
  for (std::size_t x = 0; x < inputs_; ++x) {
    if (rows[x].size() != outputs_)
      throw Error(ErrorCode::dimension_mismatch, "row " + std::to_string(x) + " has " +
                                                     std::to_string(rows[x].size()) + " entries, expected " +
                                                     std::to_string(outputs_));
  }
  matrix_ = Matrix<T>(inputs_, outputs_);
  for (std::size_t x = 0; x < inputs_; ++x) {
    T sum = 0;
    for (std::size_t y = 0; y < outputs_; ++y) {
      T v = rows[x][y];
      if constexpr (!is_exact_v<T>) {
        if (!std::isfinite(v))
          throw Error(ErrorCode::non_finite, "entry (" + std::to_string(x) + "," + std::to_string(y) + ")");
        if (v == 0.0) v = 0.0;  // normalizes -0
      }
      if (v < 0)
        throw Error(ErrorCode::negative_entry, "entry (" + std::to_string(x) + "," + std::to_string(y) +
                                                   ") = " + std::to_string(to_double(v)));
      matrix_(x, y) = v;
      sum += v;
    }
    const double deviation = to_double(T(sum - T(1)));
    if (std::abs(deviation) > kRowSumTolerance) throw RowSumMismatch(x, deviation);
    if (sum != T(1))
      for (std::size_t y = 0; y < outputs_; ++y) matrix_(x, y) /= sum;
  }

  input_labels_ = input_labels.empty() ? detail::index_labels(inputs_) : std::move(input_labels);
  output_labels_ = output_labels.empty() ? detail::index_labels(outputs_) : std::move(output_labels);
  if (input_labels_.size() != inputs_ || output_labels_.size() != outputs_)
    throw Error(ErrorCode::dimension_mismatch, "label count does not match channel dimensions");
}

/// Validates a rectangular array of rows and returns the channel.
template <class T = double>
BasicChannel<T> validate_channel(std::vector<std::vector<T>> rows, std::vector<std::string> input_labels = {},
                                 std::vector<std::string> output_labels = {}) {
  return BasicChannel<T>(std::move(rows), std::move(input_labels), std::move(output_labels));
}

/// Exact copy of a float channel: each entry becomes the rational spelled by
/// its shortest round-trip decimal, and rows are renormalized exactly.
inline ExactChannel to_exact(const Channel& ch) {
  std::vector<std::vector<Rational>> rows(ch.input_size(), std::vector<Rational>(ch.output_size()));
  for (std::size_t x = 0; x < ch.input_size(); ++x)
    for (std::size_t y = 0; y < ch.output_size(); ++y) rows[x][y] = from_double<Rational>(ch(x, y));
  for (auto& row : rows) {
    Rational s = 0;
    for (const auto& v : row) s += v;
    for (auto& v : row) v /= s;
  }
  return ExactChannel(std::move(rows), ch.input_labels(), ch.output_labels());
}

inline Channel to_float(const ExactChannel& ch) {
  std::vector<std::vector<double>> rows(ch.input_size(), std::vector<double>(ch.output_size()));
  for (std::size_t x = 0; x < ch.input_size(); ++x)
    for (std::size_t y = 0; y < ch.output_size(); ++y) rows[x][y] = to_double(ch(x, y));
  return Channel(std::move(rows), ch.input_labels(), ch.output_labels());
}

// ---------------------------------------------------------------------------
// Standard constructions

enum class StandardKind { bsc, bec, zchannel, typewriter, useless, noiseless };

namespace detail {

inline void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::bad_parameter, std::string(what) + " must lie in [0,1]");
}

}  // namespace detail

/// Binary symmetric channel with crossover probability `delta`.
inline Channel bsc(double delta) {
  detail::check_probability(delta, "bsc crossover");
  return Channel({{1.0 - delta, delta}, {delta, 1.0 - delta}});
}

/// Binary erasure channel; outputs ordered 0, e, 1.
inline Channel bec(double erasure) {
  detail::check_probability(erasure, "bec erasure probability");
  return Channel({{1.0 - erasure, erasure, 0.0}, {0.0, erasure, 1.0 - erasure}}, {}, {"0", "e", "1"});
}

/// Z channel: input 0 is received perfectly, input 1 flips to 0 with probability `flip`.
inline Channel z_channel(double flip) {
  detail::check_probability(flip, "z-channel flip probability");
  return Channel({{1.0, 0.0}, {flip, 1.0 - flip}});
}

/// Noisy typewriter on k letters: x -> x with probability 1-p, x -> x+1 mod k with probability p.
inline Channel typewriter(int k, double p) {
  if (k < 2) throw Error(ErrorCode::bad_parameter, "typewriter needs k >= 2");
  detail::check_probability(p, "typewriter slip probability");
  std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
  for (int x = 0; x < k; ++x) {
    rows[x][x] += 1.0 - p;
    rows[x][(x + 1) % k] += p;
  }
  return Channel(std::move(rows));
}

/// Channel whose output ignores the input: every row equals `q`.
inline Channel useless(const std::vector<double>& q, std::size_t inputs = 0) {
  if (q.empty()) throw Error(ErrorCode::bad_parameter, "useless channel needs a nonempty output distribution");
  for (double v : q) detail::check_probability(v, "useless output probability");
  if (inputs == 0) inputs = q.size();
  return Channel(std::vector<std::vector<double>>(inputs, q));
}

/// Identity channel on k letters.
inline Channel noiseless(int k) {
  if (k < 1) throw Error(ErrorCode::bad_parameter, "noiseless channel needs k >= 1");
  std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i) rows[i][i] = 1.0;
  return Channel(std::move(rows));
}

/// Dispatches to the named construction. Parameters:
/// bsc{delta}, bec{erasure}, zchannel{flip}, typewriter{k, p}, useless{q...}, noiseless{k}.
inline Channel make_standard(StandardKind kind, const std::vector<double>& params) {
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw Error(ErrorCode::bad_parameter, "expected " + std::to_string(n) + " parameter(s), got " +
                                                std::to_string(params.size()));
  };
  auto as_int = [](double v) {
    if (v != std::floor(v) || v > 1e6) throw Error(ErrorCode::bad_parameter, "expected an integer parameter");
    return static_cast<int>(v);
  };
  switch (kind) {
    case StandardKind::bsc: need(1); return bsc(params[0]);
    case StandardKind::bec: need(1); return bec(params[0]);
    case StandardKind::zchannel: need(1); return z_channel(params[0]);
    case StandardKind::typewriter: need(2); return typewriter(as_int(params[0]), params[1]);
    case StandardKind::useless: return useless(params);
    case StandardKind::noiseless: need(1); return noiseless(as_int(params[0]));
  }
  throw Error(ErrorCode::bad_parameter, "unknown channel kind");
}

inline StandardKind parse_standard_kind(const std::string& name) {
  if (name == "bsc") return StandardKind::bsc;
  if (name == "bec") return StandardKind::bec;
  if (name == "zchannel" || name == "z") return StandardKind::zchannel;
  if (name == "typewriter") return StandardKind::typewriter;
  if (name == "useless") return StandardKind::useless;
  if (name == "noiseless") return StandardKind::noiseless;
  throw Error(ErrorCode::bad_parameter, "unknown channel kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// Products

namespace detail {

inline std::vector<std::string> product_labels(const std::vector<std::string>& a,
                                               const std::vector<std::string>& b) {
  bool single = true;
  for (const auto& s : a) single = single && s.size() == 1;
  for (const auto& s : b) single = single && s.size() == 1;
  std::vector<std::string> out;
  out.reserve(a.size() * b.size());
  for (const auto& l : a)
    for (const auto& r : b) out.push_back(single ? l + r : l + "," + r);
  return out;
}

}  // namespace detail

/// Parallel use of two channels. Pair (x1,x2) has index x1*|A2| + x2.
template <class T>
BasicChannel<T> tensor_product(const BasicChannel<T>& first, const BasicChannel<T>& second) {
  const std::size_t a1 = first.input_size(), b1 = first.output_size();
  const std::size_t a2 = second.input_size(), b2 = second.output_size();
  std::vector<std::vector<T>> rows(a1 * a2, std::vector<T>(b1 * b2));
  for (std::size_t x1 = 0; x1 < a1; ++x1)
    for (std::size_t x2 = 0; x2 < a2; ++x2)
      for (std::size_t y1 = 0; y1 < b1; ++y1)
        for (std::size_t y2 = 0; y2 < b2; ++y2)
          rows[x1 * a2 + x2][y1 * b2 + y2] = first(x1, y1) * second(x2, y2);
  return BasicChannel<T>(std::move(rows), detail::product_labels(first.input_labels(), second.input_labels()),
                         detail::product_labels(first.output_labels(), second.output_labels()));
}

/// Explicit n-fold memoryless extension. Strings are indexed with the
/// leftmost symbol most significant. Throws SizeLimitExceeded when
/// |A|^n |B|^n exceeds `entry_limit`; use the type-reduced LPs instead.
template <class T>
BasicChannel<T> tensor_power(const BasicChannel<T>& ch, int n, double entry_limit = kExplicitEntryLimit) {
  if (n < 1) throw Error(ErrorCode::bad_parameter, "tensor power needs n >= 1");
  const double entries = std::pow(static_cast<double>(ch.input_size() * ch.output_size()), n);
  if (entries > entry_limit)
    throw Error(ErrorCode::size_limit_exceeded,
                "explicit tensor power would have " + std::to_string(entries) +
                    " entries; use the type-reduced LP (--types) instead");
  BasicChannel<T> out = ch;
  for (int i = 1; i < n; ++i) out = tensor_product(out, ch);
  return out;
}

// ---------------------------------------------------------------------------
// JSON file format: {"input_labels":[...], "output_labels":[...], "matrix":[[...],...]}
// Entries may be JSON numbers or strings holding decimals or fractions ("1/3").

namespace detail {

template <class T>
T json_entry(const nlohmann::json& v) {
  if (v.is_string()) {
    Rational r = parse_rational(v.get<std::string>());
    if constexpr (is_exact_v<T>)
      return r;
    else
      return to_double(r);
  }
  if (!v.is_number()) throw Error(ErrorCode::parse_error, "matrix entries must be numbers or numeric strings");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorCode::non_finite, "matrix entry is not finite");
  if (d == 0.0) d = 0.0;
  if constexpr (is_exact_v<T>) {
    // Integers and decimals keep the value of their literal text.
    if (v.is_number_integer()) return Rational(v.get<long long>());
    return from_double<Rational>(d);
  } else {
    return d;
  }
}

}  // namespace detail

template <class T = double>
BasicChannel<T> channel_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("matrix")) throw Error(ErrorCode::parse_error, "channel JSON needs a \"matrix\"");
  const auto& m = doc.at("matrix");
  if (!m.is_array() || m.empty()) throw Error(ErrorCode::empty_matrix, "channel matrix is empty");
  std::vector<std::vector<T>> rows;
  for (const auto& row : m) {
    if (!row.is_array()) throw Error(ErrorCode::parse_error, "matrix rows must be arrays");
    std::vector<T> r;
    for (const auto& v : row) r.push_back(detail::json_entry<T>(v));
    rows.push_back(std::move(r));
  }
  std::vector<std::string> in_labels, out_labels;
  if (doc.contains("input_labels")) in_labels = doc.at("input_labels").get<std::vector<std::string>>();
  if (doc.contains("output_labels")) out_labels = doc.at("output_labels").get<std::vector<std::string>>();
  return BasicChannel<T>(std::move(rows), std::move(in_labels), std::move(out_labels));
}

template <class T = double>
BasicChannel<T> parse_channel(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
  return channel_from_json<T>(doc);
}

template <class T = double>
BasicChannel<T> load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::file_not_found, path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_channel<T>(ss.str());
}

inline nlohmann::json channel_to_json(const Channel& ch) {
  nlohmann::json doc;
  doc["input_labels"] = ch.input_labels();
  doc["output_labels"] = ch.output_labels();
  doc["matrix"] = ch.matrix().to_rows();
  return doc;
}

/// Dimensions plus an FNV-1a hash of the entry bit patterns.
inline std::string channel_fingerprint(const Channel& ch) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(ch.input_size());
  mix(ch.output_size());
  for (double v : ch.matrix().data()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    mix(bits);
  }
  std::ostringstream os;
  os << ch.input_size() << "x" << ch.output_size() << ":" << std::hex << h;
  return os.str();
}

}  // namespace nsbound
