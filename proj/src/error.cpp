#include "pexp/error.hpp"

namespace pexp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::ZeroCharacter: return "ZeroCharacter";
    case ErrorKind::NotSaturated: return "NotSaturated";
    case ErrorKind::NotIndependent: return "NotIndependent";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::NotDivisible: return "NotDivisible";
    case ErrorKind::NotPolynomial: return "NotPolynomial";
    case ErrorKind::NonPrimitiveRay: return "NonPrimitiveRay";
    case ErrorKind::DuplicateRay: return "DuplicateRay";
    case ErrorKind::RedundantGenerator: return "RedundantGenerator";
    case ErrorKind::NotStronglyConvex: return "NotStronglyConvex";
    case ErrorKind::NotAFan: return "NotAFan";
    case ErrorKind::NotSimplicial: return "NotSimplicial";
    case ErrorKind::NotSmooth: return "NotSmooth";
    case ErrorKind::NotFullDimensional: return "NotFullDimensional";
    case ErrorKind::NotComplete: return "NotComplete";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::ConeNotInFan: return "ConeNotInFan";
    case ErrorKind::RayOutsideSupport: return "RayOutsideSupport";
    case ErrorKind::FanMismatch: return "FanMismatch";
    case ErrorKind::IncompatibleCartierData: return "IncompatibleCartierData";
    case ErrorKind::GkmViolation: return "GkmViolation";
    case ErrorKind::NotDescendable: return "NotDescendable";
    case ErrorKind::NotInSpan: return "NotInSpan";
    case ErrorKind::NotIntegral: return "NotIntegral";
    case ErrorKind::DependentBasis: return "DependentBasis";
    case ErrorKind::SingularGram: return "SingularGram";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace pexp
