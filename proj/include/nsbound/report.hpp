#pragma once

// Report documents emitted by the command-line tool, and blocklength sweeps.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsbound/asymptotics.hpp"
#include "nsbound/converse.hpp"
#include "nsbound/types.hpp"

namespace nsbound {

/// Rounds to 12 significant digits for display.
inline nlohmann::json sig12(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::stod(buf) + 0.0;
}

inline nlohmann::json sig12(const std::vector<double>& v) {
  auto out = nlohmann::json::array();
  for (double e : v) out.push_back(sig12(e));
  return out;
}

inline nlohmann::json sig12(const Rational& v) { return to_string(v); }

inline nlohmann::json sig12(const std::vector<Rational>& v) {
  auto out = nlohmann::json::array();
  for (const auto& e : v) out.push_back(to_string(e));
  return out;
}

struct Report {
  std::string command;
  nlohmann::json channel = nullptr;
  std::string mode = "float";
  double tol = 0;
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json solver = nlohmann::json::object();
  std::vector<std::string> warnings;
  double seconds = 0;

  nlohmann::json to_json() const {
    return {{"command", command}, {"channel", channel},   {"mode", mode},
            {"tol", tol},         {"results", results},   {"solver", solver},
            {"warnings", warnings}, {"timing", {{"seconds", seconds}}}};
  }

  /// key,value rows for the scalar results; structured values as JSON text.
  std::string to_csv() const {
    std::ostringstream out;
    out << "key,value\n";
    for (const auto& [k, v] : results.items()) {
      std::string text = v.is_string() ? v.get<std::string>() : v.dump();
      if (text.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : text) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        text = q + "\"";
      }
      out << k << ',' << text << '\n';
    }
    return out.str();
  }
};

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  int n = 0;
  double log2_M_beta = 0;
  double rate = 0;
  double normal_approx = 0;
  double gap = 0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepOptions {
  bool use_types = false;
  double entry_limit = kExplicitEntryLimit;
  ReducedOptions reduced;
  ConverseOptions converse;
  AsymptoticOptions asymptotic;
};

/// One row per n: the converse rate against nC - sqrt(nV) Q^{-1}(eps).
inline std::vector<SweepRow> sweep(const Channel& ch, double eps, const std::vector<int>& ns,
                                   const SweepOptions& opt = {}) {
  if (!(eps > 0 && eps < 1)) throw Error(ErrorCode::domain_error, "sweep needs eps in (0,1)");
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (ns[i] < 1 || (i > 0 && ns[i] <= ns[i - 1]))
      throw Error(ErrorCode::bad_parameter, "blocklengths must be ascending positive integers");
  const auto d = dispersion(ch, opt.asymptotic);
  std::vector<SweepRow> rows;
  for (int n : ns) {
    double M;
    const double entries = std::pow(static_cast<double>(ch.input_size() * ch.output_size()), n);
    if (opt.use_types) {
      M = reduced_max_size(ch, n, eps, opt.reduced).M_beta;
    } else {
      if (entries > opt.entry_limit)
        throw Error(ErrorCode::limit_exceeded,
                    "n = " + std::to_string(n) + " exceeds the explicit size limit; use --types");
      M = max_size(tensor_power(ch, n, opt.entry_limit), eps, opt.converse).M_beta;
    }
    SweepRow r;
    r.n = n;
    r.log2_M_beta = std::log2(M);
    r.rate = r.log2_M_beta / n;
    r.normal_approx = normal_approximation(d.C, d.V, n, eps);
    r.gap = r.log2_M_beta - r.normal_approx;
    rows.push_back(r);
  }
  return rows;
}

inline constexpr const char* kSweepHeader = "n,log2_M_beta,rate,normal_approx,gap";

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepHeader << '\n';
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.n, r.log2_M_beta, r.rate, r.normal_approx, r.gap);
    out << buf;
  }
  return out.str();
}

inline std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) throw Error(ErrorCode::parse_error, "missing sweep CSV header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SweepRow r;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf%c", &r.n, &r.log2_M_beta, &r.rate, &r.normal_approx, &r.gap,
                    &tail) != 5)
      throw Error(ErrorCode::parse_error, "bad sweep row: " + line);
    rows.push_back(r);
  }
  return rows;
}

inline nlohmann::json sweep_json(const std::vector<SweepRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"n", r.n},
                   {"log2_M_beta", r.log2_M_beta},
                   {"rate", r.rate},
                   {"normal_approx", r.normal_approx},
                   {"gap", r.gap}});
  return out;
}

}  // namespace nsbound
