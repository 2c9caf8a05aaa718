#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cosea {

enum class ErrorCode {
  backend_mismatch,
  not_orthogonal,
  not_dominated,
  scalar_out_of_range,
  not_hermitian,
  out_of_interval,
  not_unitary,
  not_one_dimensional,
  arity_mismatch,
  invalid_context,
  not_convex,
  invalid_state,
  not_sharp,
  not_central,
  trivial_split,
  degenerate_generic,
  not_commuting,
  zero_effect,
  not_invertible,
  zero_probability,
  precondition_unsatisfied,
  not_representable,
  comparability_violated,
  incomplete_data,
  invalid_tolerance,
  parse_error,
  validation_error,
  unknown_name,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::backend_mismatch: return "BackendMismatch";
    case ErrorCode::not_orthogonal: return "NotOrthogonal";
    case ErrorCode::not_dominated: return "NotDominated";
    case ErrorCode::scalar_out_of_range: return "ScalarOutOfRange";
    case ErrorCode::not_hermitian: return "NotHermitian";
    case ErrorCode::out_of_interval: return "OutOfInterval";
    case ErrorCode::not_unitary: return "NotUnitary";
    case ErrorCode::not_one_dimensional: return "NotOneDimensional";
    case ErrorCode::arity_mismatch: return "ArityMismatch";
    case ErrorCode::invalid_context: return "InvalidContext";
    case ErrorCode::not_convex: return "NotConvex";
    case ErrorCode::invalid_state: return "InvalidState";
    case ErrorCode::not_sharp: return "NotSharp";
    case ErrorCode::not_central: return "NotCentral";
    case ErrorCode::trivial_split: return "TrivialSplit";
    case ErrorCode::degenerate_generic: return "DegenerateGeneric";
    case ErrorCode::not_commuting: return "NotCommuting";
    case ErrorCode::zero_effect: return "ZeroEffect";
    case ErrorCode::not_invertible: return "NotInvertible";
    case ErrorCode::zero_probability: return "ZeroProbability";
    case ErrorCode::precondition_unsatisfied: return "PreconditionUnsatisfied";
    case ErrorCode::not_representable: return "NotRepresentable";
    case ErrorCode::comparability_violated: return "ComparabilityViolated";
    case ErrorCode::incomplete_data: return "IncompleteData";
    case ErrorCode::invalid_tolerance: return "InvalidTolerance";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::validation_error: return "ValidationError";
    case ErrorCode::unknown_name: return "UnknownName";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

  /// Name of the document object the error concerns, when known.
  const std::string& object() const noexcept { return object_; }
  Error about(std::string object) const {
    Error e = *this;
    e.object_ = std::move(object);
    return e;
  }

 private:
  ErrorCode code_;
  std::string message_;
  std::string object_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace cosea
