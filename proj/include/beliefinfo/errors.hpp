#pragma once

#include <stdexcept>
#include <string>

namespace beliefinfo {

// Failure taxonomy shared by the whole library. The CLI maps categories onto
// process exit codes, so additions here need a mapping there as well.
enum class errc {
  // malformed inputs (shape, parse, schema)
  bad_input,
  empty_input,
  not_normalized,
  inconsistent_class_count,
  // mathematical domain violations
  support_mismatch,
  undefined_ratio,
  conflicting_divergence,
  invalid_order,
  zero_denominator,
  index_out_of_range,
  dimension_mismatch,
  not_spd,
  undefined_kernel,
  negative_lambda,
  target_out_of_range,
  degenerate_result,
  non_finite_info,
  evaluation_failure,
  // solver outcomes
  infeasible,
  no_convergence,
};

inline const char* errc_name(errc c) noexcept {
  switch (c) {
    case errc::bad_input: return "bad_input";
    case errc::empty_input: return "empty_input";
    case errc::not_normalized: return "not_normalized";
    case errc::inconsistent_class_count: return "inconsistent_class_count";
    case errc::support_mismatch: return "support_mismatch";
    case errc::undefined_ratio: return "undefined_ratio";
    case errc::conflicting_divergence: return "conflicting_divergence";
    case errc::invalid_order: return "invalid_order";
    case errc::zero_denominator: return "zero_denominator";
    case errc::index_out_of_range: return "index_out_of_range";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::not_spd: return "not_spd";
    case errc::undefined_kernel: return "undefined_kernel";
    case errc::negative_lambda: return "negative_lambda";
    case errc::target_out_of_range: return "target_out_of_range";
    case errc::degenerate_result: return "degenerate_result";
    case errc::non_finite_info: return "non_finite_info";
    case errc::evaluation_failure: return "evaluation_failure";
    case errc::infeasible: return "infeasible";
    case errc::no_convergence: return "no_convergence";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace beliefinfo
