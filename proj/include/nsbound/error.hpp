#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nsbound {

enum class ErrorCode {
  negative_entry,
  row_sum_mismatch,
  empty_matrix,
  non_finite,
  bad_parameter,
  size_limit_exceeded,
  dimension_mismatch,
  numerical_breakdown,
  iteration_limit,
  solver_failure,
  limit_exceeded,
  infeasible_witness,
  non_convergence,
  domain_error,
  usage_error,
  parse_error,
  file_not_found,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::negative_entry: return "NegativeEntry";
    case ErrorCode::row_sum_mismatch: return "RowSumMismatch";
    case ErrorCode::empty_matrix: return "EmptyMatrix";
    case ErrorCode::non_finite: return "NonFiniteEntry";
    case ErrorCode::bad_parameter: return "BadParameter";
    case ErrorCode::size_limit_exceeded: return "SizeLimitExceeded";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::numerical_breakdown: return "NumericalBreakdown";
    case ErrorCode::iteration_limit: return "IterationLimit";
    case ErrorCode::solver_failure: return "SolverFailure";
    case ErrorCode::limit_exceeded: return "LimitExceeded";
    case ErrorCode::infeasible_witness: return "InfeasibleWitness";
    case ErrorCode::non_convergence: return "NonConvergence";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::usage_error: return "UsageError";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::file_not_found: return "FileNotFound";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A channel row whose entries do not sum to one.
class RowSumMismatch : public Error {
 public:
  RowSumMismatch(std::size_t row, double deviation)
      : Error(ErrorCode::row_sum_mismatch,
              "row " + std::to_string(row) + " deviates from 1 by " + std::to_string(deviation)),
        row_(row),
        deviation_(deviation) {}

  std::size_t row() const noexcept { return row_; }
  double deviation() const noexcept { return deviation_; }

 private:
  std::size_t row_;
  double deviation_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace nsbound
