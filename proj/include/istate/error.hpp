#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace istate {

// Machine-readable failure reasons. The CLI maps these onto exit codes.
enum class Reason {
  InvalidArgument,
  InvalidSpectrum,
  OutOfRange,
  TruncationMismatch,
  NotNormalized,
  NonNormalizable,
  NonNormalizableNumerically,
  NonConvergent,
  TruncationInsufficient,
  SingularContinuedFraction,
  Overflow,
  Unsupported,
};

constexpr std::string_view to_string(Reason r) noexcept {
  switch (r) {
    case Reason::InvalidArgument: return "invalid_argument";
    case Reason::InvalidSpectrum: return "invalid_spectrum";
    case Reason::OutOfRange: return "out_of_range";
    case Reason::TruncationMismatch: return "truncation_mismatch";
    case Reason::NotNormalized: return "not_normalized";
    case Reason::NonNormalizable: return "non_normalizable";
    case Reason::NonNormalizableNumerically: return "non_normalizable_numerically";
    case Reason::NonConvergent: return "non_convergent";
    case Reason::TruncationInsufficient: return "truncation_insufficient";
    case Reason::SingularContinuedFraction: return "singular_continued_fraction";
    case Reason::Overflow: return "overflow";
    case Reason::Unsupported: return "unsupported";
  }
  return "unknown";
}

/// True for failures caused by the numerics of an otherwise valid request.
constexpr bool is_numerical(Reason r) noexcept {
  switch (r) {
    case Reason::NonNormalizable:
    case Reason::NonNormalizableNumerically:
    case Reason::NonConvergent:
    case Reason::TruncationInsufficient:
    case Reason::SingularContinuedFraction:
    case Reason::Overflow:
      return true;
    default:
      return false;
  }
}

/// Compact number text for diagnostics ("%.6g").
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class Error : public std::runtime_error {
 public:
  Error(Reason reason, const std::string& what)
      : std::runtime_error(std::string(to_string(reason)) + ": " + what), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

/// Raised when a coefficient sequence keeps growing; carries the observed rate.
class GrowthError : public Error {
 public:
  GrowthError(const std::string& what, std::size_t index, double growth_rate)
      : Error(Reason::NonNormalizableNumerically, what), index_(index), growth_rate_(growth_rate) {}

  std::size_t index() const noexcept { return index_; }
  /// Mean per-index factor by which |c_n|^2 grew across the detection window.
  double growth_rate() const noexcept { return growth_rate_; }

 private:
  std::size_t index_;
  double growth_rate_;
};

}  // namespace istate
