#pragma once

// Dense linear programming: problem container, two-phase primal simplex
// (float and exact rational), point checking and a text export.
//
// Dual convention: dual[i] is the sensitivity d(optimal objective)/d(rhs_i)
// in the problem's own sense. In a max problem the dual of a <= row is >= 0;
// in a min problem the dual of a >= row is >= 0; equality rows are free.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nsbound/error.hpp"
#include "nsbound/numeric.hpp"

namespace nsbound {

enum class Sense { maximize, minimize };
enum class RowKind { le, eq, ge };
enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

template <class T>
struct LpTerm {
  std::size_t var;
  T coef;
};

template <class T>
struct LpRow {
  std::string name;
  RowKind kind = RowKind::le;
  T rhs = 0;
  std::vector<LpTerm<T>> terms;  // sparse; repeated indices are summed
};

/// max/min c.x subject to tagged rows and per-variable bounds.
/// Lower bounds default to 0; nullopt means unbounded on that side.
template <class T>
struct LinearProgram {
  Sense sense = Sense::maximize;
  std::vector<T> objective;
  std::vector<std::optional<T>> lower;
  std::vector<std::optional<T>> upper;
  std::vector<std::string> var_names;
  std::vector<LpRow<T>> rows;

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }

  std::size_t add_var(std::string name, T cost = T(0), std::optional<T> lo = T(0),
                      std::optional<T> up = std::nullopt) {
    objective.push_back(std::move(cost));
    lower.push_back(std::move(lo));
    upper.push_back(std::move(up));
    var_names.push_back(std::move(name));
    return objective.size() - 1;
  }

  std::size_t add_row(std::string name, RowKind kind, T rhs, std::vector<LpTerm<T>> terms) {
    rows.push_back(LpRow<T>{std::move(name), kind, std::move(rhs), std::move(terms)});
    return rows.size() - 1;
  }

  /// Throws DimensionMismatch / NonFinite on malformed input.
  void validate() const {
    const std::size_t n = num_vars();
    if (lower.size() != n || upper.size() != n || var_names.size() != n)
      throw Error(ErrorCode::dimension_mismatch, "bound or name vectors do not match the objective width");
    auto finite = [](const T& v) {
      if constexpr (is_exact_v<T>)
        return true;
      else
        return std::isfinite(v);
    };
    for (const auto& c : objective)
      if (!finite(c)) throw Error(ErrorCode::non_finite, "objective coefficient is not finite");
    for (const auto& r : rows) {
      if (!finite(r.rhs)) throw Error(ErrorCode::non_finite, "rhs of row '" + r.name + "' is not finite");
      for (const auto& t : r.terms) {
        if (t.var >= n) throw Error(ErrorCode::dimension_mismatch, "row '" + r.name + "' references a missing variable");
        if (!finite(t.coef)) throw Error(ErrorCode::non_finite, "row '" + r.name + "' has a non-finite coefficient");
      }
    }
  }

  T row_activity(std::size_t i, const std::vector<T>& x) const {
    T s = 0;
    for (const auto& t : rows[i].terms) s += t.coef * x[t.var];
    return s;
  }
};

template <class T>
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  T objective = 0;
  std::vector<T> primal;
  std::vector<T> dual;        // one per row
  std::vector<T> upper_dual;  // one per variable; zero where no upper bound
  std::size_t iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double cost_tol = 1e-9;
  double gap_tol = 1e-8;
  double pivot_tol = 1e-11;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t bland_after = 50;
  /// 0 picks a size-dependent default.
  std::size_t max_iterations = 0;
  double max_tableau_entries = 1.5e8;
  /// Re-check the float optimum against the original rows.
  bool verify = true;
  /// Equilibrate float LPs before solving.
  bool scale = true;
};

namespace detail {

// Column in the standard-form tableau for each structural variable.
template <class T>
struct VarMap {
  std::ptrdiff_t pos = -1;  // x = shift + x_pos - x_neg
  std::ptrdiff_t neg = -1;
  T shift = 0;
};

template <class T>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_(rows * (cols + 1), T(0)), d_(cols + 1, T(0)) {}

  T& at(std::size_t r, std::size_t c) { return a_[r * (n_ + 1) + c]; }
  const T& at(std::size_t r, std::size_t c) const { return a_[r * (n_ + 1) + c]; }
  T& rhs(std::size_t r) { return at(r, n_); }
  const T& rhs(std::size_t r) const { return at(r, n_); }
  std::vector<T>& cost() { return d_; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void snapshot() {
    a0_ = a_;
    b0_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) b0_[i] = rhs(i);
  }

  /// Shifts the current basic values up by delta, moving the stored
  /// original right-hand side along so that reinversion stays consistent.
  void perturb(const std::vector<T>& delta) {
    const std::size_t w = n_ + 1;
    for (std::size_t r = 0; r < m_; ++r) {
      rhs(r) += delta[r];
      for (std::size_t i = 0; i < m_; ++i) a0_[i * w + n_] += delta[r] * a0_[i * w + basis_[r]];
    }
  }

  void restore_rhs() {
    for (std::size_t i = 0; i < m_; ++i) a0_[i * (n_ + 1) + n_] = b0_[i];
  }

  /// Rebuilds B^-1 [A | b] from the original rows for the current basis and
  /// recomputes reduced costs for `cost`. Float only.
  bool reinvert(const std::vector<T>& cost) {
    if constexpr (is_exact_v<T>) {
      return false;
    } else {
      using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
      const auto rows = static_cast<Eigen::Index>(m_), width = static_cast<Eigen::Index>(n_ + 1);
      Eigen::Map<const Mat> a0(a0_.data(), rows, width);
      Mat B(rows, rows);
      for (std::size_t r = 0; r < m_; ++r)
        B.col(static_cast<Eigen::Index>(r)) = a0.col(static_cast<Eigen::Index>(basis_[r]));
      Mat x = Eigen::PartialPivLU<Mat>(B).solve(a0);
      if (!x.allFinite()) return false;
      Eigen::Map<Mat>(a_.data(), rows, width) = x;
      for (std::size_t r = 0; r < m_; ++r)
        for (std::size_t i = 0; i < m_; ++i) at(i, basis_[r]) = i == r ? 1.0 : 0.0;
      for (std::size_t j = 0; j <= n_; ++j) d_[j] = j < n_ ? cost[j] : 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        const double cb = cost[basis_[r]];
        if (cb == 0) continue;
        for (std::size_t j = 0; j <= n_; ++j) d_[j] -= cb * at(r, j);
      }
      for (std::size_t r = 0; r < m_; ++r) d_[basis_[r]] = 0;
      return true;
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const std::size_t w = n_ + 1;
    T* prow = &a_[r * w];
    const T inv = T(1) / prow[c];
    nz_.clear();
    for (std::size_t j = 0; j < w; ++j) {
      if (prow[j] != 0) {
        prow[j] *= inv;
        nz_.push_back(j);
      }
    }
    prow[c] = 1;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      T* row = &a_[i * w];
      if (row[c] == 0) continue;
      const T f = row[c];
      for (std::size_t j : nz_) row[j] -= f * prow[j];
      row[c] = 0;
    }
    if (d_[c] != 0) {
      const T f = d_[c];
      for (std::size_t j : nz_) d_[j] -= f * prow[j];
      d_[c] = 0;
    }
    basis_[r] = c;
  }

 private:
  std::size_t m_, n_;
  std::vector<T> a_;
  std::vector<T> d_;  // reduced costs; d_[n_] = -objective
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nz_;
  std::vector<T> a0_;
  std::vector<T> b0_;
};

template <class T>
bool positive(const T& v, double tol) {
  if constexpr (is_exact_v<T>)
    return v > 0;
  else
    return v > tol;
}

}  // namespace detail

namespace detail {

template <class T>
LpSolution<T> simplex(const LinearProgram<T>& lp, const LpOptions& opt) {
  using detail::positive;
  lp.validate();
  constexpr bool exact = is_exact_v<T>;
  const std::size_t nvars = lp.num_vars();

  // Structural columns.
  std::vector<detail::VarMap<T>> vmap(nvars);
  std::size_t ncol = 0;
  for (std::size_t j = 0; j < nvars; ++j) {
    if (lp.lower[j]) {
      vmap[j].shift = *lp.lower[j];
      vmap[j].pos = static_cast<std::ptrdiff_t>(ncol++);
    } else {
      vmap[j].pos = static_cast<std::ptrdiff_t>(ncol++);
      vmap[j].neg = static_cast<std::ptrdiff_t>(ncol++);
    }
    if (lp.lower[j] && lp.upper[j] && *lp.upper[j] < *lp.lower[j]) {
      LpSolution<T> sol;
      sol.status = LpStatus::infeasible;
      return sol;
    }
  }

  // Rows: original rows, then one row per finite upper bound.
  struct StdRow {
    std::vector<std::pair<std::size_t, T>> terms;
    RowKind kind;
    T rhs;
    bool flipped = false;
  };
  std::vector<StdRow> srows;
  srows.reserve(lp.num_rows() + nvars);
  for (const auto& row : lp.rows) {
    StdRow s{{}, row.kind, row.rhs};
    for (const auto& t : row.terms) {
      const auto& vm = vmap[t.var];
      s.rhs -= t.coef * vm.shift;
      s.terms.emplace_back(static_cast<std::size_t>(vm.pos), t.coef);
      if (vm.neg >= 0) s.terms.emplace_back(static_cast<std::size_t>(vm.neg), T(-t.coef));
    }
    srows.push_back(std::move(s));
  }
  std::vector<std::ptrdiff_t> bound_row(nvars, -1);
  for (std::size_t j = 0; j < nvars; ++j) {
    if (!lp.upper[j]) continue;
    StdRow s{{}, RowKind::le, T(*lp.upper[j] - vmap[j].shift)};
    s.terms.emplace_back(static_cast<std::size_t>(vmap[j].pos), T(1));
    if (vmap[j].neg >= 0) s.terms.emplace_back(static_cast<std::size_t>(vmap[j].neg), T(-1));
    bound_row[j] = static_cast<std::ptrdiff_t>(srows.size());
    srows.push_back(std::move(s));
  }
  for (auto& s : srows) {
    if (s.rhs < 0) {
      s.rhs = -s.rhs;
      for (auto& t : s.terms) t.second = -t.second;
      s.flipped = true;
      if (s.kind == RowKind::le)
        s.kind = RowKind::ge;
      else if (s.kind == RowKind::ge)
        s.kind = RowKind::le;
    }
  }

  // Logical columns: slack (le), surplus + artificial (ge), artificial (eq).
  const std::size_t m = srows.size();
  std::vector<std::size_t> unit_col(m);
  std::vector<std::ptrdiff_t> surplus_col(m, -1);
  std::vector<bool> is_artificial;
  for (std::size_t i = 0; i < m; ++i) {
    if (srows[i].kind == RowKind::ge) surplus_col[i] = static_cast<std::ptrdiff_t>(ncol++);
    unit_col[i] = ncol++;
  }
  is_artificial.assign(ncol, false);
  bool need_phase1 = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (srows[i].kind != RowKind::le) {
      is_artificial[unit_col[i]] = true;
      need_phase1 = true;
    }
  }

  if (static_cast<double>(m) * static_cast<double>(ncol + 1) > opt.max_tableau_entries)
    throw Error(ErrorCode::limit_exceeded, "LP tableau of " + std::to_string(m) + "x" + std::to_string(ncol) +
                                               " exceeds the dense size limit");

  detail::Tableau<T> tab(m, ncol);
  tab.basis().assign(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& [c, v] : srows[i].terms) tab.at(i, c) += v;
    if (surplus_col[i] >= 0) tab.at(i, static_cast<std::size_t>(surplus_col[i])) = T(-1);
    tab.at(i, unit_col[i]) = T(1);
    tab.rhs(i) = srows[i].rhs;
    tab.basis()[i] = unit_col[i];
  }
  if constexpr (!exact) tab.snapshot();

  // Internal objective is always maximized.
  std::vector<T> cost(ncol, T(0));
  T cost_offset = 0;
  const T sense_sign = lp.sense == Sense::maximize ? T(1) : T(-1);
  for (std::size_t j = 0; j < nvars; ++j) {
    const T c = sense_sign * lp.objective[j];
    cost[static_cast<std::size_t>(vmap[j].pos)] += c;
    if (vmap[j].neg >= 0) cost[static_cast<std::size_t>(vmap[j].neg)] -= c;
    cost_offset += lp.objective[j] * vmap[j].shift;
  }

  const std::size_t max_iter = opt.max_iterations ? opt.max_iterations : 50 * (m + ncol) + 10000;
  std::size_t iterations = 0;

  // Float tableaus are rebuilt from the original rows every so often and
  // before declaring optimality. Long degenerate runs are broken by shifting
  // the basic values by tiny amounts; the shift is removed at the end and any
  // leftover infeasibility is repaired with dual simplex pivots.
  const std::size_t refactor_every = std::max<std::size_t>(50, m / 2);

  auto choose_leaving = [&](std::size_t q, bool bland) -> std::ptrdiff_t {
    if constexpr (!exact) {
      if (!bland) {
        // Harris two-pass test: largest pivot among rows within tolerance of the minimum ratio.
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
          const double arq = tab.at(r, q);
          if (!(arq > opt.pivot_tol)) continue;
          bound = std::min(bound, (std::max(tab.rhs(r), 0.0) + opt.feasibility_tol) / arq);
        }
        std::ptrdiff_t leave = -1;
        double best = 0;
        for (std::size_t r = 0; r < m; ++r) {
          const double arq = tab.at(r, q);
          if (!(arq > opt.pivot_tol) || std::max(tab.rhs(r), 0.0) / arq > bound) continue;
          if (leave < 0 || arq > best) {
            leave = static_cast<std::ptrdiff_t>(r);
            best = arq;
          }
        }
        return leave;
      }
    }
    std::ptrdiff_t leave = -1;
    T best_ratio = 0;
    for (std::size_t r = 0; r < m; ++r) {
      const T& arq = tab.at(r, q);
      if (!positive(arq, opt.pivot_tol)) continue;
      T b = tab.rhs(r);
      if (b < 0) b = 0;
      const T ratio = b / arq;
      if (leave < 0) {
        leave = static_cast<std::ptrdiff_t>(r);
        best_ratio = ratio;
        continue;
      }
      const auto lr = static_cast<std::size_t>(leave);
      bool take = false;
      bool tie = false;
      if constexpr (exact) {
        take = ratio < best_ratio;
        tie = ratio == best_ratio;
      } else {
        const double slack = 1e-12 * (1.0 + std::abs(best_ratio));
        take = ratio < best_ratio - slack;
        tie = !take && ratio <= best_ratio + slack;
      }
      if (!take && tie) {
        if (bland)
          take = tab.basis()[r] < tab.basis()[lr];
        else
          take = abs_value(arq) > abs_value(tab.at(lr, q));
      }
      if (take) {
        leave = static_cast<std::ptrdiff_t>(r);
        if (ratio < best_ratio) best_ratio = ratio;
      }
    }
    return leave;
  };

  // Dual simplex pivots until the basic values are nonnegative (float only).
  auto dual_repair = [&](const std::vector<bool>& barred, const std::vector<T>& phase_cost) {
    auto& d = tab.cost();
    std::size_t since_refactor = 0;
    for (;;) {
      if (++iterations > max_iter)
        throw Error(ErrorCode::iteration_limit, "simplex exceeded " + std::to_string(max_iter) + " iterations");
      std::ptrdiff_t leave = -1;
      T worst = 0;
      for (std::size_t r = 0; r < m; ++r) {
        const T b = tab.rhs(r);
        if (b < -opt.feasibility_tol * 1e-2 && b < worst) {
          worst = b;
          leave = static_cast<std::ptrdiff_t>(r);
        }
      }
      if (leave < 0) return;
      const auto r = static_cast<std::size_t>(leave);
      // Harris two-pass test on the reduced costs.
      T bound = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < ncol; ++j) {
        const T a = tab.at(r, j);
        if (barred[j] || !(a < -opt.pivot_tol)) continue;
        bound = std::min<T>(bound, (std::min<T>(d[j], 0) - opt.cost_tol) / a);
      }
      std::ptrdiff_t enter = -1;
      T best = 0;
      for (std::size_t j = 0; j < ncol; ++j) {
        const T a = tab.at(r, j);
        if (barred[j] || !(a < -opt.pivot_tol) || std::min<T>(d[j], 0) / a > bound) continue;
        if (enter < 0 || -a > best) {
          enter = static_cast<std::ptrdiff_t>(j);
          best = -a;
        }
      }
      if (enter < 0) return;  // left to the final verification
      tab.pivot(r, static_cast<std::size_t>(enter));
      if (++since_refactor >= refactor_every && tab.reinvert(phase_cost)) since_refactor = 0;
    }
  };

  // Returns false when unbounded.
  auto run = [&](const std::vector<bool>& barred, const std::vector<T>& phase_cost) -> bool {
    std::size_t degenerate_run = 0;
    std::size_t since_refactor = 0;
    bool perturbed = false;
    std::size_t perturbations = 0;
    auto& d = tab.cost();
    for (;;) {
      if (++iterations > max_iter)
        throw Error(ErrorCode::iteration_limit, "simplex exceeded " + std::to_string(max_iter) + " iterations");
      if constexpr (!exact) {
        if (since_refactor >= refactor_every && tab.reinvert(phase_cost)) since_refactor = 0;
        if (!perturbed && degenerate_run >= opt.bland_after && perturbations < 3) {
          std::vector<T> delta(m);
          for (std::size_t r = 0; r < m; ++r) {
            const double u = static_cast<double>((r * 2654435761u + perturbations * 40503u) % 1000u) / 1000.0;
            delta[r] = 1e-7 * (1.0 + u) * (1.0 + std::abs(tab.rhs(r)));
          }
          tab.perturb(delta);
          perturbed = true;
          ++perturbations;
          degenerate_run = 0;
        }
      }
      const bool bland = degenerate_run >= opt.bland_after;
      std::ptrdiff_t enter = -1;
      T best = 0;
      for (std::size_t j = 0; j < ncol; ++j) {
        if (barred[j] || !positive(d[j], opt.cost_tol)) continue;
        if (bland) {
          enter = static_cast<std::ptrdiff_t>(j);
          break;
        }
        if (enter < 0 || d[j] > best) {
          enter = static_cast<std::ptrdiff_t>(j);
          best = d[j];
        }
      }
      if (enter < 0) {
        if constexpr (!exact) {
          if (perturbed) {
            tab.restore_rhs();
            perturbed = false;
            if (tab.reinvert(phase_cost)) {
              dual_repair(barred, phase_cost);
              since_refactor = 0;
              degenerate_run = 0;
              continue;
            }
          }
          if (since_refactor > 0 && tab.reinvert(phase_cost)) {
            since_refactor = 0;
            continue;
          }
        }
        return true;
      }
      const std::size_t q = static_cast<std::size_t>(enter);
      const std::ptrdiff_t leave = choose_leaving(q, bland);
      if (leave < 0) {
        if constexpr (!exact) {
          if (perturbed) {
            tab.restore_rhs();
            tab.reinvert(phase_cost);
          }
        }
        return false;
      }
      const T step = tab.rhs(static_cast<std::size_t>(leave));
      bool degenerate;
      if constexpr (exact)
        degenerate = step == 0;
      else
        degenerate = step <= opt.feasibility_tol;
      degenerate_run = degenerate ? degenerate_run + 1 : 0;
      tab.pivot(static_cast<std::size_t>(leave), q);
      ++since_refactor;
    }
  };

  LpSolution<T> sol;
  std::vector<bool> barred = is_artificial;

  if (need_phase1) {
    auto& d = tab.cost();
    std::fill(d.begin(), d.end(), T(0));
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[unit_col[i]]) continue;
      for (std::size_t j = 0; j <= ncol; ++j)
        if (j == ncol || !is_artificial[j]) d[j] += tab.at(i, j);
    }
    for (std::size_t j = 0; j < ncol; ++j)
      if (is_artificial[j]) d[j] = 0;
    std::vector<T> phase1_cost(ncol, T(0));
    for (std::size_t j = 0; j < ncol; ++j)
      if (is_artificial[j]) phase1_cost[j] = T(-1);
    run(barred, phase1_cost);
    // d[ncol] = sum of artificial values remaining.
    T infeas = d[ncol];
    double scale = 1;
    if constexpr (!exact) {
      for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(srows[i].rhs));
    }
    if (positive(infeas, opt.feasibility_tol * scale)) {
      sol.status = LpStatus::infeasible;
      sol.iterations = iterations;
      return sol;
    }
    // Drive remaining basic artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_artificial[tab.basis()[r]]) continue;
      std::ptrdiff_t best_col = -1;
      T best_abs = 0;
      for (std::size_t j = 0; j < ncol; ++j) {
        if (is_artificial[j]) continue;
        const T v = abs_value(tab.at(r, j));
        if (positive(v, opt.pivot_tol) && v > best_abs) {
          best_abs = v;
          best_col = static_cast<std::ptrdiff_t>(j);
        }
      }
      if (best_col >= 0) tab.pivot(r, static_cast<std::size_t>(best_col));
    }
  }

  // Phase 2 reduced costs: d = c - c_B B^-1 A.
  {
    auto& d = tab.cost();
    for (std::size_t j = 0; j < ncol; ++j) d[j] = cost[j];
    d[ncol] = 0;
    for (std::size_t r = 0; r < m; ++r) {
      const T& cb = cost[tab.basis()[r]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= ncol; ++j)
        if (tab.at(r, j) != 0) d[j] -= cb * tab.at(r, j);
    }
    for (std::size_t r = 0; r < m; ++r) d[tab.basis()[r]] = 0;
  }
  if (!run(barred, cost)) {
    sol.status = LpStatus::unbounded;
    sol.iterations = iterations;
    return sol;
  }

  // Primal.
  std::vector<T> colval(ncol, T(0));
  for (std::size_t r = 0; r < m; ++r) {
    T v = tab.rhs(r);
    if constexpr (!exact) {
      if (v < 0) v = 0;
    }
    colval[tab.basis()[r]] = v;
  }
  sol.primal.assign(nvars, T(0));
  for (std::size_t j = 0; j < nvars; ++j) {
    T v = vmap[j].shift + colval[static_cast<std::size_t>(vmap[j].pos)];
    if (vmap[j].neg >= 0) v -= colval[static_cast<std::size_t>(vmap[j].neg)];
    sol.primal[j] = v;
  }
  sol.objective = 0;
  for (std::size_t j = 0; j < nvars; ++j) sol.objective += lp.objective[j] * sol.primal[j];

  // Duals from the unit columns: y_i = -d[unit_i] for the internal max problem.
  auto row_dual = [&](std::size_t i) {
    T y = -tab.cost()[unit_col[i]];
    if (srows[i].flipped) y = -y;
    return T(sense_sign * y);
  };
  sol.dual.resize(lp.num_rows());
  for (std::size_t i = 0; i < lp.num_rows(); ++i) sol.dual[i] = row_dual(i);
  sol.upper_dual.assign(nvars, T(0));
  for (std::size_t j = 0; j < nvars; ++j)
    if (bound_row[j] >= 0) sol.upper_dual[j] = row_dual(static_cast<std::size_t>(bound_row[j]));
  sol.status = LpStatus::optimal;
  sol.iterations = iterations;

  return sol;
}

inline void verify_rows(const LinearProgram<double>& lp, const LpSolution<double>& sol, const LpOptions& opt) {
  double worst = 0.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const double act = lp.row_activity(i, sol.primal);
    const double rhs = lp.rows[i].rhs;
    double viol = 0.0;
    switch (lp.rows[i].kind) {
      case RowKind::le: viol = act - rhs; break;
      case RowKind::ge: viol = rhs - act; break;
      case RowKind::eq: viol = std::abs(act - rhs); break;
    }
    worst = std::max(worst, viol / (1.0 + std::abs(rhs)));
  }
  if (worst > std::max(1e-7, 100 * opt.feasibility_tol))
    throw Error(ErrorCode::numerical_breakdown,
                "float simplex optimum violates a row by " + std::to_string(worst) + "; retry in exact mode");
}

inline double pow2_near(double v) { return std::exp2(std::round(std::log2(v))); }

}  // namespace detail

/// Two-phase primal simplex on a dense tableau. Dantzig pricing; for
/// T = Rational all arithmetic and tests are exact and Bland's rule takes
/// over after `bland_after` consecutive degenerate pivots. Float solves
/// equilibrate rows and columns by powers of two, refactorize periodically
/// and break degenerate runs by perturbation.
template <class T>
LpSolution<T> solve_lp(const LinearProgram<T>& lp, const LpOptions& opt = {}) {
  if constexpr (is_exact_v<T>) {
    return detail::simplex(lp, opt);
  } else {
    lp.validate();
    if (!opt.scale) {
      auto sol = detail::simplex(lp, opt);
      if (sol.status == LpStatus::optimal && opt.verify) detail::verify_rows(lp, sol, opt);
      return sol;
    }
    const std::size_t n = lp.num_vars(), m = lp.num_rows();
    std::vector<double> rs(m, 1.0), cs(n, 1.0);
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> rmax(m, 0.0), cmax(n, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        for (const auto& t : lp.rows[i].terms) {
          const double v = std::abs(t.coef) * rs[i] * cs[t.var];
          rmax[i] = std::max(rmax[i], v);
        }
      for (std::size_t i = 0; i < m; ++i)
        if (rmax[i] > 0) rs[i] /= detail::pow2_near(rmax[i]);
      for (std::size_t i = 0; i < m; ++i)
        for (const auto& t : lp.rows[i].terms) cmax[t.var] = std::max(cmax[t.var], std::abs(t.coef) * rs[i] * cs[t.var]);
      for (std::size_t j = 0; j < n; ++j)
        if (cmax[j] > 0) cs[j] /= detail::pow2_near(cmax[j]);
    }
    // x = cs * x', row i multiplied by rs[i]
    LinearProgram<double> scaled;
    scaled.sense = lp.sense;
    for (std::size_t j = 0; j < n; ++j) {
      auto sc = [&](const std::optional<double>& v) -> std::optional<double> {
        if (!v) return std::nullopt;
        return *v / cs[j];
      };
      scaled.add_var(lp.var_names[j], lp.objective[j] * cs[j], sc(lp.lower[j]), sc(lp.upper[j]));
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<LpTerm<double>> terms;
      terms.reserve(lp.rows[i].terms.size());
      for (const auto& t : lp.rows[i].terms) terms.push_back({t.var, t.coef * rs[i] * cs[t.var]});
      scaled.add_row(lp.rows[i].name, lp.rows[i].kind, lp.rows[i].rhs * rs[i], std::move(terms));
    }
    auto sol = detail::simplex(scaled, opt);
    if (sol.status != LpStatus::optimal) return sol;
    for (std::size_t j = 0; j < n; ++j) {
      sol.primal[j] *= cs[j];
      sol.upper_dual[j] /= cs[j];
    }
    for (std::size_t i = 0; i < m; ++i) sol.dual[i] *= rs[i];
    sol.objective = 0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.primal[j];
    if (opt.verify) detail::verify_rows(lp, sol, opt);
    return sol;
  }
}

/// Converts a float LP to exact rationals (shortest decimal of each entry).
inline LinearProgram<Rational> to_exact(const LinearProgram<double>& lp) {
  LinearProgram<Rational> out;
  out.sense = lp.sense;
  auto cv = [](const std::optional<double>& v) -> std::optional<Rational> {
    if (!v) return std::nullopt;
    return from_double<Rational>(*v);
  };
  for (std::size_t j = 0; j < lp.num_vars(); ++j)
    out.add_var(lp.var_names[j], from_double<Rational>(lp.objective[j]), cv(lp.lower[j]), cv(lp.upper[j]));
  for (const auto& r : lp.rows) {
    std::vector<LpTerm<Rational>> terms;
    terms.reserve(r.terms.size());
    for (const auto& t : r.terms) terms.push_back({t.var, from_double<Rational>(t.coef)});
    out.add_row(r.name, r.kind, from_double<Rational>(r.rhs), std::move(terms));
  }
  return out;
}

/// Objective of the dual implied by `sol`: b.y + u.w + sum over finite
/// lower bounds of l_j * (c_j - A_j^T y - w_j).
template <class T>
T dual_objective(const LinearProgram<T>& lp, const LpSolution<T>& sol) {
  T value = 0;
  std::vector<T> reduced = lp.objective;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    value += lp.rows[i].rhs * sol.dual[i];
    for (const auto& t : lp.rows[i].terms) reduced[t.var] -= t.coef * sol.dual[i];
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.upper[j]) {
      value += *lp.upper[j] * sol.upper_dual[j];
      reduced[j] -= sol.upper_dual[j];
    }
    if (lp.lower[j]) value += *lp.lower[j] * reduced[j];
  }
  return value;
}

/// Largest violation of dual feasibility (sign conditions and reduced costs).
template <class T>
T dual_infeasibility(const LinearProgram<T>& lp, const LpSolution<T>& sol) {
  const T s = lp.sense == Sense::maximize ? T(1) : T(-1);
  T worst = 0;
  auto bump = [&](const T& v) {
    if (v > worst) worst = v;
  };
  std::vector<T> reduced = lp.objective;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const T y = s * sol.dual[i];  // in max-form
    if (lp.rows[i].kind == RowKind::le) bump(T(-y));
    if (lp.rows[i].kind == RowKind::ge) bump(y);
    for (const auto& t : lp.rows[i].terms) reduced[t.var] -= t.coef * sol.dual[i];
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.upper[j]) {
      bump(T(-(s * sol.upper_dual[j])));
      reduced[j] -= sol.upper_dual[j];
    }
    const T r = s * reduced[j];  // must be <= 0 at a finite lower bound, 0 if free
    if (lp.lower[j])
      bump(r);
    else
      bump(abs_value(r));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Point checking

template <class T>
struct RowSlack {
  std::size_t row;
  T slack;  // negative when violated
};

template <class T>
struct FeasibilityReport {
  bool feasible = true;
  T objective = 0;
  std::vector<RowSlack<T>> violations;        // constraint rows
  std::vector<RowSlack<T>> bound_violations;  // `row` holds the variable index
  std::vector<std::size_t> tight;             // rows with |slack| <= tol
};

/// Evaluates every row and bound of `lp` at `point`.
template <class T>
FeasibilityReport<T> check_point(const LinearProgram<T>& lp, const std::vector<T>& point, double tol = 1e-9) {
  if (point.size() != lp.num_vars())
    throw Error(ErrorCode::dimension_mismatch, "point has " + std::to_string(point.size()) + " entries, LP has " +
                                                   std::to_string(lp.num_vars()) + " variables");
  FeasibilityReport<T> rep;
  const T t = from_double<T>(tol);
  for (std::size_t j = 0; j < lp.num_vars(); ++j) rep.objective += lp.objective[j] * point[j];
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const T act = lp.row_activity(i, point);
    const T& rhs = lp.rows[i].rhs;
    T slack;
    switch (lp.rows[i].kind) {
      case RowKind::le: slack = rhs - act; break;
      case RowKind::ge: slack = act - rhs; break;
      default: slack = -abs_value(T(act - rhs)); break;
    }
    if (slack < -t) rep.violations.push_back({i, slack});
    if (abs_value(slack) <= t) rep.tight.push_back(i);
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.lower[j] && point[j] < *lp.lower[j] - t) rep.bound_violations.push_back({j, T(point[j] - *lp.lower[j])});
    if (lp.upper[j] && point[j] > *lp.upper[j] + t) rep.bound_violations.push_back({j, T(*lp.upper[j] - point[j])});
  }
  rep.feasible = rep.violations.empty() && rep.bound_violations.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Text export in CPLEX LP format (see docs/lp_format.md).

namespace detail {

inline std::string lp_number(double v) { return shortest_decimal(v); }
inline std::string lp_number(const Rational& v) { return to_string(v); }

inline std::string lp_name(const std::string& name, const char* prefix, std::size_t idx) {
  if (name.empty()) return prefix + std::to_string(idx);
  std::string out;
  for (char ch : name) out.push_back((std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') ? ch : '_');
  if (std::isdigit(static_cast<unsigned char>(out.front()))) out = std::string(prefix) + out;
  return out;
}

template <class T>
void lp_linear(std::ostream& os, const std::vector<std::pair<std::size_t, T>>& terms,
               const std::vector<std::string>& names) {
  if (terms.empty()) {
    os << " 0 " << names.front();
    return;
  }
  bool first = true;
  for (const auto& [j, c] : terms) {
    const bool neg = c < 0;
    os << (neg ? " - " : (first ? " " : " + ")) << lp_number(T(neg ? T(-c) : c)) << " " << names[j];
    first = false;
  }
}

}  // namespace detail

template <class T>
void write_lp(std::ostream& os, const LinearProgram<T>& lp) {
  std::vector<std::string> names(lp.num_vars());
  for (std::size_t j = 0; j < lp.num_vars(); ++j) names[j] = detail::lp_name(lp.var_names[j], "x", j);
  if (names.empty()) names.push_back("x0");
  os << (lp.sense == Sense::maximize ? "Maximize\n" : "Minimize\n") << " obj:";
  std::vector<std::pair<std::size_t, T>> obj;
  for (std::size_t j = 0; j < lp.num_vars(); ++j)
    if (lp.objective[j] != 0) obj.emplace_back(j, lp.objective[j]);
  detail::lp_linear(os, obj, names);
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.rows[i];
    os << " " << detail::lp_name(r.name, "r", i) << ":";
    std::vector<std::pair<std::size_t, T>> terms;
    for (const auto& t : r.terms) terms.emplace_back(t.var, t.coef);
    detail::lp_linear(os, terms, names);
    os << (r.kind == RowKind::le ? " <= " : r.kind == RowKind::ge ? " >= " : " = ") << detail::lp_number(r.rhs)
       << "\n";
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const auto& lo = lp.lower[j];
    const auto& up = lp.upper[j];
    if (lo && *lo == 0 && !up) continue;
    os << " ";
    if (lo)
      os << detail::lp_number(*lo) << " <= ";
    else
      os << "-inf <= ";
    os << names[j];
    if (up)
      os << " <= " << detail::lp_number(*up);
    else
      os << " <= +inf";
    os << "\n";
  }
  os << "End\n";
}

template <class T>
std::string to_lp_string(const LinearProgram<T>& lp) {
  std::ostringstream os;
  write_lp(os, lp);
  return os.str();
}

}  // namespace nsbound
