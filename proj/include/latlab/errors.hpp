#pragma once

// Error taxonomy for the toolkit. Every failure that callers are expected to
// branch on gets its own type; everything carries a code so the CLI can map
// failures onto exit codes without string matching.

#include <stdexcept>
#include <string>
#include <vector>

namespace latlab {

enum class ErrorCode {
  Parse,
  DimensionMismatch,
  SingularBasis,
  SingularMinor,
  NotSquarefree,
  NotIrreducibleVerified,
  NotTotallyReal,
  ZeroDivision,
  DomainViolation,
  PrecisionExhausted,
  BudgetExceeded,
  GridExhausted,
  InfeasibleShape,
  UnsupportedScalarKind,
  AxisPointPresent,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorCode::Parse, w) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& w) : Error(ErrorCode::DimensionMismatch, w) {}
};

struct SingularBasis : Error {
  explicit SingularBasis(const std::string& w) : Error(ErrorCode::SingularBasis, w) {}
};

struct SingularMinor : Error {
  explicit SingularMinor(const std::string& w) : Error(ErrorCode::SingularMinor, w) {}
};

struct NotSquarefree : Error {
  explicit NotSquarefree(const std::string& w) : Error(ErrorCode::NotSquarefree, w) {}
};

struct NotIrreducibleVerified : Error {
  explicit NotIrreducibleVerified(const std::string& w) : Error(ErrorCode::NotIrreducibleVerified, w) {}
};

struct NotTotallyReal : Error {
  explicit NotTotallyReal(const std::string& w) : Error(ErrorCode::NotTotallyReal, w) {}
};

struct ZeroDivision : Error {
  explicit ZeroDivision(const std::string& w) : Error(ErrorCode::ZeroDivision, w) {}
};

// Domain errors: log of a possibly-nonpositive interval, sqrt of a negative one, ...
struct DomainViolation : Error {
  explicit DomainViolation(const std::string& w) : Error(ErrorCode::DomainViolation, w) {}
};

// Raised when escalation hit the precision cap without reaching a certified verdict.
struct PrecisionExhausted : Error {
  PrecisionExhausted(const std::string& w, unsigned cap_bits)
      : Error(ErrorCode::PrecisionExhausted, w), cap_bits(cap_bits) {}
  unsigned cap_bits;
};

struct BudgetExceeded : Error {
  explicit BudgetExceeded(const std::string& w) : Error(ErrorCode::BudgetExceeded, w) {}
};

// A parameter ladder (e.g. the dilation grid of the cylinder construction) ran out
// before its entry condition was met. best_achieved documents how close it got.
struct GridExhausted : Error {
  GridExhausted(const std::string& w, double best_achieved)
      : Error(ErrorCode::GridExhausted, w), best_achieved(best_achieved) {}
  double best_achieved;
};

struct InfeasibleShape : Error {
  explicit InfeasibleShape(const std::string& w) : Error(ErrorCode::InfeasibleShape, w) {}
};

struct UnsupportedScalarKind : Error {
  explicit UnsupportedScalarKind(const std::string& w) : Error(ErrorCode::UnsupportedScalarKind, w) {}
};

// Not a failure of the machinery: the subspace search found a nonzero lattice point
// on the first coordinate axis, which routes the caller to the unbounded branch of
// the dichotomy. Carries the integer coefficient vector of the point (decimal text,
// so this header stays free of bignum includes).
struct AxisPointPresent : Error {
  AxisPointPresent(const std::string& w, std::vector<std::string> u_decimal)
      : Error(ErrorCode::AxisPointPresent, w), u_decimal(std::move(u_decimal)) {}
  std::vector<std::string> u_decimal;
};

struct InternalError : Error {
  explicit InternalError(const std::string& w) : Error(ErrorCode::Internal, w) {}
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::SingularBasis: return "singular-basis";
    case ErrorCode::SingularMinor: return "singular-minor";
    case ErrorCode::NotSquarefree: return "not-squarefree";
    case ErrorCode::NotIrreducibleVerified: return "not-irreducible-verified";
    case ErrorCode::NotTotallyReal: return "not-totally-real";
    case ErrorCode::ZeroDivision: return "zero-division";
    case ErrorCode::DomainViolation: return "domain-violation";
    case ErrorCode::PrecisionExhausted: return "precision-exhausted";
    case ErrorCode::BudgetExceeded: return "budget-exceeded";
    case ErrorCode::GridExhausted: return "grid-exhausted";
    case ErrorCode::InfeasibleShape: return "infeasible-shape";
    case ErrorCode::UnsupportedScalarKind: return "unsupported-scalar-kind";
    case ErrorCode::AxisPointPresent: return "axis-point-present";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace latlab
