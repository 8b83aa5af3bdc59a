#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pexp {

enum class ErrorKind {
  RankMismatch,
  ZeroVector,
  ZeroCharacter,
  NotSaturated,
  NotIndependent,
  NotUnimodular,
  NotDivisible,
  NotPolynomial,
  NonPrimitiveRay,
  DuplicateRay,
  RedundantGenerator,
  NotStronglyConvex,
  NotAFan,
  NotSimplicial,
  NotSmooth,
  NotFullDimensional,
  NotComplete,
  UnsupportedDimension,
  ConeNotInFan,
  RayOutsideSupport,
  FanMismatch,
  IncompatibleCartierData,
  GkmViolation,
  NotDescendable,
  NotInSpan,
  NotIntegral,
  DependentBasis,
  SingularGram,
  InvalidArgument,
  Parse,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so that callers (the CLI
// in particular) can separate mathematical negatives from malformed input.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pexp
