#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orgutil {

enum class ErrorCode {
  dimension_mismatch,
  degenerate_probability,
  bad_domain,
  not_affine,
  arity,
  empty_input,
  invalid_tree,
  domain_exceeded,
  non_monotonic_utility,
  range_exceeded,
  bet_never_accepted,
  bet_always_accepted,
  invalid_lottery,
  quantity_out_of_bounds,
  non_unimodal_objective,
  no_convergence,
  no_interior_solution,
  infeasible,
  invalid_config,
  parse_error,
  unknown_figure,
};

std::string_view to_string(ErrorCode code) noexcept;

// Numerical failures map to CLI exit code 3, everything else is an input error.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace orgutil
