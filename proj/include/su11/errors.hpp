#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace su11 {

// Bad input: parameters out of range, malformed config, caps violations.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ErrorCode {
  DarkFringe,       // subtraction normalizer vanishes
  StationaryPoint,  // d<N>/dphi vanishes
  Leakage,          // Fock truncation too small
  ZeroProbability,  // photon subtraction never succeeds
  Normalization,    // generating-function normalizer vanishes
  NotConverged,     // oracle did not converge within the n_cut cap
  Inconsistent,     // two independent routes disagree
};

std::string_view to_string(ErrorCode code) noexcept;

// A point where the physics is singular or the numerics fail. Sweeps record
// the code instead of emitting NaN.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace su11
