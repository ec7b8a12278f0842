#include "orgutil/error.hpp"

namespace orgutil {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::degenerate_probability: return "DegenerateProbability";
    case ErrorCode::bad_domain: return "BadDomain";
    case ErrorCode::not_affine: return "NotAffine";
    case ErrorCode::arity: return "Arity";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::invalid_tree: return "InvalidTree";
    case ErrorCode::domain_exceeded: return "DomainExceeded";
    case ErrorCode::non_monotonic_utility: return "NonMonotonicUtility";
    case ErrorCode::range_exceeded: return "RangeExceeded";
    case ErrorCode::bet_never_accepted: return "DegenerateBet(never accepts)";
    case ErrorCode::bet_always_accepted: return "DegenerateBet(always accepts)";
    case ErrorCode::invalid_lottery: return "InvalidLottery";
    case ErrorCode::quantity_out_of_bounds: return "QuantityOutOfBounds";
    case ErrorCode::non_unimodal_objective: return "NonUnimodalObjective";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::no_interior_solution: return "NoInteriorSolution";
    case ErrorCode::infeasible: return "Infeasible";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::unknown_figure: return "UnknownFigure";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::degenerate_probability:
    case ErrorCode::non_monotonic_utility:
    case ErrorCode::range_exceeded:
    case ErrorCode::bet_never_accepted:
    case ErrorCode::bet_always_accepted:
    case ErrorCode::non_unimodal_objective:
    case ErrorCode::no_convergence:
    case ErrorCode::no_interior_solution:
    case ErrorCode::infeasible:
      return true;
    default:
      return false;
  }
}

}  // namespace orgutil
