#include "thinspec/errors.hpp"

namespace thinspec {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSyntax: return "Syntax";
    case ErrorKind::kUnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::kDivisionByZero: return "DivisionByZero";
    case ErrorKind::kDomain: return "Domain";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kSizeExceeded: return "SizeExceeded";
    case ErrorKind::kNotSPD: return "NotSPD";
    case ErrorKind::kNotConverged: return "NotConverged";
    case ErrorKind::kNoPositivePrincipal: return "NoPositivePrincipal";
    case ErrorKind::kUnbracketable: return "Unbracketable";
    case ErrorKind::kInvalidPrincipal: return "InvalidPrincipal";
    case ErrorKind::kPartialSpectrum: return "PartialSpectrum";
    case ErrorKind::kHypothesisViolated: return "HypothesisViolated";
    case ErrorKind::kH6Violated: return "H6Violated";
    case ErrorKind::kUnderResolved: return "UnderResolved";
    case ErrorKind::kConfig: return "Config";
    case ErrorKind::kInternal: return "Internal";
  }
  return "Unknown";
}

bool is_hypothesis_failure(ErrorKind kind) {
  return kind == ErrorKind::kNoPositivePrincipal ||
         kind == ErrorKind::kHypothesisViolated || kind == ErrorKind::kH6Violated;
}

void rethrow_with_stage(const Error& e, std::string_view stage) {
  const std::string message = std::string(stage) + ": " + e.what();
  if (const auto* h6 = dynamic_cast<const H6ViolatedError*>(&e)) {
    throw H6ViolatedError(message, h6->scan(), h6->mu2());
  }
  if (const auto* nc = dynamic_cast<const NotConvergedError*>(&e)) {
    throw NotConvergedError(message, nc->best_residual());
  }
  if (const auto* ps = dynamic_cast<const PartialSpectrumError*>(&e)) {
    throw PartialSpectrumError(message, ps->found());
  }
  if (const auto* ur = dynamic_cast<const UnderResolvedError*>(&e)) {
    throw UnderResolvedError(message, ur->required_m1());
  }
  throw Error(e.kind(), message);
}

}  // namespace thinspec
