#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace projcx {

enum class ErrorKind {
  division_by_zero,
  mixed_fields,
  unsupported_field,
  cycle_detected,
  inhomogeneous_sum,
  dangling_output,
  malformed_gate,
  field_mismatch,
  length_mismatch,
  shape_mismatch,
  syntax_error,
  unknown_gate_ref,
  duplicate_id,
  not_homogeneous,
  degree_zero_output,
  bad_parameters,
  resource_limit,
  not_normal_form,
  capacity_exceeded,
  degree_not_representable,
  budget_exceeded,
  not_t_guarded,
  field_too_small,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (and the CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace projcx
