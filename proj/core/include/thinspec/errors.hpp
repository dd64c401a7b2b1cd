#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace thinspec {

enum class ErrorKind {
  kSyntax,
  kUnknownIdentifier,
  kDivisionByZero,
  kDomain,
  kNonFinite,
  kInvalidArgument,
  kSizeExceeded,
  kNotSPD,
  kNotConverged,
  kNoPositivePrincipal,
  kUnbracketable,
  kInvalidPrincipal,
  kPartialSpectrum,
  kHypothesisViolated,
  kH6Violated,
  kUnderResolved,
  kConfig,
  kInternal,
};

std::string_view to_string(ErrorKind kind);

// True for failures that mean the coefficient data violate one of the
// standing hypotheses (sign change, negative average, interior minimum)
// rather than a bug or a solver breakdown. The CLI maps these to exit 2.
bool is_hypothesis_failure(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error(ErrorKind::kSyntax, message + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& message, double best_residual)
      : Error(ErrorKind::kNotConverged, message), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class PartialSpectrumError : public Error {
 public:
  PartialSpectrumError(const std::string& message, int found)
      : Error(ErrorKind::kPartialSpectrum, message), found_(found) {}
  int found() const noexcept { return found_; }

 private:
  int found_;
};

class UnderResolvedError : public Error {
 public:
  UnderResolvedError(const std::string& message, int required_m1)
      : Error(ErrorKind::kUnderResolved, message), required_m1_(required_m1) {}
  int required_m1() const noexcept { return required_m1_; }

 private:
  int required_m1_;
};

// One row of the x1 scan used to verify the interior minimum of mu(x1).
struct ScanPoint {
  double x1;
  double mu;
};

class H6ViolatedError : public Error {
 public:
  H6ViolatedError(const std::string& message, std::vector<ScanPoint> scan,
                  double mu2)
      : Error(ErrorKind::kH6Violated, message), scan_(std::move(scan)), mu2_(mu2) {}
  const std::vector<ScanPoint>& scan() const noexcept { return scan_; }
  double mu2() const noexcept { return mu2_; }

 private:
  std::vector<ScanPoint> scan_;
  double mu2_;
};

// Prefixes the message of `e` with a stage label, keeping the kind.
[[noreturn]] void rethrow_with_stage(const Error& e, std::string_view stage);

}  // namespace thinspec
