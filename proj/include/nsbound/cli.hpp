#pragma once

// The nsbound command line: argument parsing, dispatch and report output.
// Exit codes: 0 success, 2 usage or input error, 3 solver failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsbound/asymptotics.hpp"
#include "nsbound/converse.hpp"
#include "nsbound/hypothesis.hpp"
#include "nsbound/ns_code.hpp"
#include "nsbound/report.hpp"
#include "nsbound/types.hpp"
#include "nsbound/zero_error.hpp"

namespace nsbound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;

struct Args {
  std::string command;
  std::string channel_file;
  std::string standard;  // e.g. "bsc:0.1", "typewriter:5:0.5"
  std::optional<std::int64_t> M;
  std::optional<double> eps;
  std::optional<std::string> eps_text;
  int power = 1;
  bool types = false;
  bool exact = false;
  std::string format = "json";
  double tol = 1e-9;
  std::string out;
  std::string cert_file;
  std::string n_list;
  std::vector<double> p0, p1;
};

namespace detail {

inline Channel parse_standard(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw Error(ErrorCode::usage_error, "empty --standard value");
  std::vector<double> params;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    try {
      params.push_back(std::stod(parts[i]));
    } catch (const std::exception&) {
      throw Error(ErrorCode::usage_error, "bad parameter '" + parts[i] + "' in --standard");
    }
  }
  return make_standard(parse_standard_kind(parts[0]), params);
}

inline std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> ns;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      ns.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::usage_error, "bad blocklength '" + item + "' in --n");
    }
  }
  if (ns.empty()) throw Error(ErrorCode::usage_error, "--n needs at least one blocklength");
  return ns;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::file_not_found, "cannot open " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
}

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::numerical_breakdown:
    case ErrorCode::iteration_limit:
    case ErrorCode::solver_failure:
    case ErrorCode::limit_exceeded:
    case ErrorCode::size_limit_exceeded:
    case ErrorCode::non_convergence:
    case ErrorCode::infeasible_witness:
      return kExitSolver;
    default:
      return kExitUsage;
  }
}

class Runner {
 public:
  explicit Runner(const Args& a) : a_(a) {}

  Report run() {
    rep_.command = a_.command;
    rep_.mode = a_.exact ? "exact" : "float";
    rep_.tol = a_.tol;
    lp_.feasibility_tol = std::min(1e-9, a_.tol);
    const auto& c = a_.command;
    if (c == "beta") {
      beta_cmd();
    } else {
      load();
      if (c == "error") error_cmd();
      else if (c == "size") size_cmd();
      else if (c == "zero-error") zero_error_cmd();
      else if (c == "capacity") capacity_cmd();
      else if (c == "dispersion") dispersion_cmd();
      else if (c == "asymptotics") asymptotics_cmd();
      else if (c == "sweep") sweep_cmd();
      else if (c == "certify") certify_cmd();
      else if (c == "code") code_cmd();
      else throw Error(ErrorCode::usage_error, "unknown command " + c);
    }
    return rep_;
  }

 private:
  void load() {
    if (a_.channel_file.empty() == a_.standard.empty())
      throw Error(ErrorCode::usage_error, "give exactly one of --channel or --standard");
    if (!a_.channel_file.empty()) {
      ch_ = load_channel<double>(a_.channel_file);
      if (a_.exact) exact_ = load_channel<Rational>(a_.channel_file);
    } else {
      ch_ = parse_standard(a_.standard);
      if (a_.exact) exact_ = to_exact(*ch_);
    }
    if (a_.power < 1) throw Error(ErrorCode::usage_error, "--power must be at least 1");
    rep_.channel = {{"fingerprint", channel_fingerprint(*ch_)},
                    {"inputs", ch_->input_size()},
                    {"outputs", ch_->output_size()},
                    {"power", a_.power}};
  }

  void float_only() const {
    if (a_.exact) throw Error(ErrorCode::usage_error, "--exact is not available for " + a_.command);
  }
  void no_power() const {
    if (a_.power != 1 || a_.types) throw Error(ErrorCode::usage_error, "--power/--types are not available for " + a_.command);
  }
  std::int64_t need_M() const {
    if (!a_.M) throw Error(ErrorCode::usage_error, a_.command + " needs -M");
    if (*a_.M < 1) throw Error(ErrorCode::usage_error, "-M must be at least 1");
    return *a_.M;
  }
  double need_eps() const {
    if (!a_.eps) throw Error(ErrorCode::usage_error, a_.command + " needs --eps");
    return *a_.eps;
  }
  Rational exact_eps() const {
    need_eps();
    return parse_rational(*a_.eps_text);
  }

  template <class T>
  BasicChannel<T> explicit_channel(const BasicChannel<T>& base) const {
    return tensor_power(base, a_.power);
  }

  ReducedOptions reduced_options() const {
    ReducedOptions o;
    o.lp = lp_;
    return o;
  }

  void note_dropped(std::size_t dropped) {
    if (dropped > 0)
      rep_.warnings.push_back(std::to_string(dropped) + " joint-type coefficients underflowed and were dropped");
  }

  template <class R>
  void reduced_solver_stats(const R& r) {
    rep_.solver = {{"method", r.method},
                   {"joint_types", r.table.size()},
                   {"rounds", r.rounds},
                   {"lp_iterations", r.lp_iterations},
                   {"dropped", r.dropped}};
    note_dropped(r.dropped);
  }

  void error_cmd() {
    const auto M = need_M();
    auto& out = rep_.results;
    out["M"] = M;
    if (a_.types) {
      if (a_.exact) {
        const auto r = reduced_min_error(*exact_, a_.power, M, reduced_options());
        out["p_err"] = sig12(r.p_err);
        out["witness_p_err"] = sig12(r.p_err_upper);
        reduced_solver_stats(r);
      } else {
        const auto r = reduced_min_error(*ch_, a_.power, M, reduced_options());
        out["p_err"] = sig12(r.p_err);
        out["witness_p_err"] = sig12(r.p_err_upper);
        reduced_solver_stats(r);
      }
      return;
    }
    ConverseOptions o;
    o.lp = lp_;
    if (a_.exact) {
      const auto r = min_error(explicit_channel(*exact_), M, o);
      out["p_err"] = sig12(r.p_err);
      out["certified_error"] = sig12(r.dual.certified_error);
      rep_.solver = {{"lp_iterations", r.iterations}};
    } else {
      const auto r = min_error(explicit_channel(*ch_), M, o);
      out["p_err"] = sig12(r.p_err);
      out["certified_error"] = sig12(r.dual.certified_error);
      rep_.solver = {{"lp_iterations", r.iterations}};
    }
  }

  void size_cmd() {
    const double eps = need_eps();
    auto& out = rep_.results;
    if (a_.types) {
      if (a_.exact) {
        const auto r = reduced_max_size(*exact_, a_.power, exact_eps(), reduced_options());
        out["M_beta"] = sig12(r.M_beta);
        out["M_NS"] = r.M_NS;
        reduced_solver_stats(r);
      } else {
        const auto r = reduced_max_size(*ch_, a_.power, eps, reduced_options());
        out["M_beta"] = sig12(r.M_beta);
        out["M_lower"] = sig12(r.M_lower);
        out["M_NS"] = r.M_NS;
        reduced_solver_stats(r);
      }
      return;
    }
    ConverseOptions o;
    o.lp = lp_;
    if (a_.exact) {
      const auto r = max_size(explicit_channel(*exact_), exact_eps(), o);
      out["M_beta"] = sig12(r.M_beta);
      out["M_NS"] = r.M_NS;
      out["certificate"] = certificate_to_json(r.dual);
      rep_.solver = {{"lp_iterations", r.iterations}};
    } else {
      const auto r = max_size(explicit_channel(*ch_), eps, o);
      out["M_beta"] = sig12(r.M_beta);
      out["M_NS"] = r.M_NS;
      out["certificate"] = certificate_to_json(r.dual);
      rep_.solver = {{"lp_iterations", r.iterations}, {"floor_rechecked", r.floor_rechecked}};
    }
  }

  void zero_error_cmd() {
    if (a_.types) throw Error(ErrorCode::usage_error, "--types is not available for zero-error");
    const auto h = hypergraph(explicit_channel(*ch_), 0);
    auto edges = nlohmann::json::array();
    for (const auto& e : h.edges) edges.push_back(e);
    auto& out = rep_.results;
    out["edges"] = edges;
    if (a_.exact) {
      const auto pack = fractional_packing<Rational>(h, lp_);
      const auto cover = fractional_covering<Rational>(h, lp_);
      out["alpha_star"] = sig12(pack.value);
      out["omega_star"] = sig12(cover.value);
      out["M0"] = zero_error_size(explicit_channel(*exact_), lp_).M0;
      out["packing_weights"] = sig12(pack.weights);
    } else {
      const auto pack = fractional_packing<double>(h, lp_);
      const auto cover = fractional_covering<double>(h, lp_);
      out["alpha_star"] = sig12(pack.value);
      out["omega_star"] = sig12(cover.value);
      out["M0"] = static_cast<std::int64_t>(std::floor(pack.value + 1e-6));
      out["packing_weights"] = sig12(pack.weights);
    }
  }

  AsymptoticOptions asymptotic_options() const {
    AsymptoticOptions o;
    o.tol = a_.tol;
    o.lp = lp_;
    return o;
  }

  void capacity_cmd() {
    float_only();
    no_power();
    const auto c = capacity(*ch_, asymptotic_options());
    auto& out = rep_.results;
    out["C"] = sig12(c.C);
    out["C_upper"] = sig12(c.upper);
    out["p_star"] = sig12(c.p_star);
    out["q_star"] = sig12(c.q_star);
    rep_.solver = {{"iterations", c.iterations}, {"residual", c.residual}};
  }

  void dispersion_cmd() {
    float_only();
    no_power();
    const auto d = dispersion(*ch_, asymptotic_options());
    auto& out = rep_.results;
    out["V"] = sig12(d.V);
    out["C"] = sig12(d.C);
    out["p_min"] = sig12(d.p_min);
    out["support_set"] = d.support_set;
    out["flatness_residual"] = sig12(zero_dispersion_residual(*ch_, d));
  }

  void asymptotics_cmd() {
    float_only();
    if (a_.types) throw Error(ErrorCode::usage_error, "--types is not available for asymptotics");
    const auto chk = zero_dispersion_check(*ch_, std::max(a_.tol, 1e-7), asymptotic_options());
    auto& out = rep_.results;
    out["C"] = sig12(chk.C);
    out["V"] = sig12(chk.V);
    out["K0"] = sig12(chk.K0);
    out["log2_alpha_star"] = sig12(chk.log2_alpha);
    out["cond_capacity_eq_alpha"] = chk.cond_capacity_eq_alpha;
    out["cond_K0_eq_C"] = chk.cond_K0_eq_C;
    out["cond_V_zero"] = chk.cond_V_zero;
    if (!chk.consistent()) rep_.warnings.push_back("zero-dispersion conditions disagree; tolerance too tight or loose");
    if (a_.eps) out["normal_approx"] = sig12(normal_approximation(chk.C, chk.V, a_.power, *a_.eps));
  }

  void sweep_cmd() {
    float_only();
    const double eps = need_eps();
    if (a_.n_list.empty()) throw Error(ErrorCode::usage_error, "sweep needs --n");
    SweepOptions o;
    o.use_types = a_.types;
    o.reduced = reduced_options();
    o.converse.lp = lp_;
    o.asymptotic = asymptotic_options();
    rows_ = sweep(*ch_, eps, parse_n_list(a_.n_list), o);
    rep_.results["eps"] = eps;
    rep_.results["rows"] = sweep_json(*rows_);
  }

  void certify_cmd() {
    const double eps = need_eps();
    if (a_.cert_file.empty()) throw Error(ErrorCode::usage_error, "certify needs --cert");
    if (a_.types) throw Error(ErrorCode::usage_error, "certificates are checked against the explicit channel");
    auto doc = read_json_file(a_.cert_file);
    // accept a bare certificate or a size report
    if (doc.contains("results") && doc["results"].contains("certificate")) doc = doc["results"]["certificate"];
    CertifiedBound v;
    if (a_.exact)
      v = certify_size(explicit_channel(*exact_), exact_eps(), certificate_from_json<Rational>(doc));
    else
      v = certify_size(explicit_channel(*ch_), eps, certificate_from_json<double>(doc), a_.tol);
    auto& out = rep_.results;
    out["valid"] = v.valid;
    out["bound"] = sig12(v.bound);
    if (!v.exact_bound.empty()) out["exact_bound"] = v.exact_bound;
    auto viol = nlohmann::json::array();
    for (std::size_t i = 0; i < v.violations.size() && i < 20; ++i) {
      const auto& e = v.violations[i];
      viol.push_back({{"constraint", e.constraint}, {"x", e.x}, {"y", e.y}, {"amount", e.amount}});
    }
    out["violations"] = viol;
    out["violation_count"] = v.violations.size();
  }

  void code_cmd() {
    float_only();
    if (a_.types) throw Error(ErrorCode::usage_error, "codes are built for the explicit channel");
    const auto M = need_M();
    const auto big = explicit_channel(*ch_);
    ConverseOptions o;
    o.lp = lp_;
    const auto opt = min_error(big, M, o);
    const auto code = build_code(big, M, opt.primal);
    const auto z = code.tensor();
    const auto ns = verify_nonsignalling(z, 1e-10);
    const auto ev = code_error(z, big);
    auto& out = rep_.results;
    out["p_err"] = sig12(ev.p_err);
    out["lp_p_err"] = sig12(opt.p_err);
    out["ns_a_to_b"] = ns.a_to_b;
    out["ns_b_to_a"] = ns.b_to_a;
    out["ns_passed"] = ns.passed;
    out["vpmf_residual"] = ev.vpmf_residual;
    out["code"] = code_to_json(code);
  }

  void beta_cmd() {
    float_only();
    const double eps = need_eps();
    if (!a_.channel_file.empty() || !a_.standard.empty()) {
      load();
      const auto r = ppv_bound(explicit_channel(*ch_), eps, lp_);
      rep_.results["M_PPV"] = sig12(r.M);
      rep_.results["p"] = sig12(r.p);
      return;
    }
    if (a_.p0.empty() || a_.p1.empty()) throw Error(ErrorCode::usage_error, "beta needs --p0 and --p1, or a channel");
    const auto r = beta(a_.p0, a_.p1, eps);
    rep_.results["beta"] = sig12(r.beta);
    rep_.results["test"] = sig12(r.test.T);
  }

  const Args& a_;
  Report rep_;
  LpOptions lp_;
  std::optional<Channel> ch_;
  std::optional<ExactChannel> exact_;

 public:
  std::optional<std::vector<SweepRow>> rows_;
};

}  // namespace detail

/// Parses argv, runs the command and writes the report. Diagnostics go to err.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-signalling converse bounds for discrete channels"};
  app.require_subcommand(1);
  Args a;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"error", "minimum NS error probability for M messages"},
      {"size", "largest NS code size at error eps, with a dual certificate"},
      {"zero-error", "channel hypergraph, fractional packing and covering"},
      {"capacity", "capacity by Blahut-Arimoto"},
      {"dispersion", "minimum information-density variance over optimal inputs"},
      {"asymptotics", "capacity, dispersion, K0 and the zero-dispersion conditions"},
      {"sweep", "converse rate against the normal approximation over blocklengths"},
      {"certify", "check a size certificate"},
      {"code", "build the optimal NS code and verify it"},
      {"beta", "Neyman-Pearson beta, or the hypothesis-testing size bound of a channel"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--channel", a.channel_file, "channel JSON file");
    sub->add_option("--standard", a.standard, "standard channel, e.g. bsc:0.1 or typewriter:5:0.5");
    sub->add_option("-M", a.M, "number of messages");
    sub->add_option("--eps", a.eps_text, "target error probability");
    sub->add_option("--power", a.power, "blocklength n");
    sub->add_flag("--types", a.types, "use the joint-type reduced LP");
    sub->add_flag("--exact", a.exact, "exact rational arithmetic");
    sub->add_option("--format", a.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--tol", a.tol, "tolerance");
    sub->add_option("--out", a.out, "write the report to this file");
    sub->add_option("--cert", a.cert_file, "certificate file (certify)");
    sub->add_option("--n", a.n_list, "comma-separated blocklengths (sweep)");
    sub->add_option("--p0", a.p0, "first distribution (beta)")->delimiter(',');
    sub->add_option("--p1", a.p1, "second distribution (beta)")->delimiter(',');
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (auto* sub : app.get_subcommands()) a.command = sub->get_name();

  try {
    if (a.eps_text) {
      try {
        a.eps = to_double(parse_rational(*a.eps_text));
      } catch (const std::exception&) {
        throw Error(ErrorCode::usage_error, "bad --eps value " + *a.eps_text);
      }
    }
    if (!(a.tol > 0)) throw Error(ErrorCode::usage_error, "--tol must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    detail::Runner runner(a);
    Report rep = runner.run();
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream text;
    if (a.format == "csv")
      text << (runner.rows_ ? sweep_csv(*runner.rows_) : rep.to_csv());
    else
      text << rep.to_json().dump(2) << "\n";
    for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
    if (a.out.empty()) {
      out << text.str();
    } else {
      std::ofstream f(a.out);
      if (!f) throw Error(ErrorCode::file_not_found, "cannot write " + a.out);
      f << text.str();
    }
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return detail::exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace nsbound::cli
