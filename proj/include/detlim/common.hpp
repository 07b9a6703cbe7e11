#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace detlim {

inline constexpr std::string_view kVersion = "0.1.0";

// Probability tolerances, shared by construction and by tests.
inline constexpr double kProbInputTol = 1e-9;    // accepted deviation of an input mass sum from 1
inline constexpr double kProbStoredTol = 1e-12;  // stored pmfs sum to 1 within this
inline constexpr double kNegMassTol = 1e-15;     // entries above -kNegMassTol are clamped to 0
inline constexpr double kSlackTol = 1e-12;       // inequality slacks must exceed -kSlackTol

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double x) noexcept { return std::isinf(x); }

// All library failures derive from Error and carry a stable name that the
// CLI reports verbatim and maps to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string_view name, const std::string& message)
      : std::runtime_error(std::string(name) + ": " + message), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define DETLIM_DEFINE_ERROR(NAME)                                         \
  struct NAME : Error {                                                   \
    explicit NAME(const std::string& message) : Error(#NAME, message) {}  \
  }

DETLIM_DEFINE_ERROR(NegativeMass);
DETLIM_DEFINE_ERROR(BadSum);
DETLIM_DEFINE_ERROR(DuplicateLabel);
DETLIM_DEFINE_ERROR(LengthMismatch);
DETLIM_DEFINE_ERROR(AlphabetMismatch);
DETLIM_DEFINE_ERROR(SpaceMismatch);
DETLIM_DEFINE_ERROR(ZeroWeightAtDifference);
DETLIM_DEFINE_ERROR(MissingDiam);
DETLIM_DEFINE_ERROR(MissingPgStar);
DETLIM_DEFINE_ERROR(InvalidBase);
DETLIM_DEFINE_ERROR(OptOutOfRange);
DETLIM_DEFINE_ERROR(BothZeroMass);
DETLIM_DEFINE_ERROR(TooLarge);
DETLIM_DEFINE_ERROR(ZeroRateAtGridPoint);
DETLIM_DEFINE_ERROR(DegenerateDegrees);
DETLIM_DEFINE_ERROR(NoEdges);
DETLIM_DEFINE_ERROR(PerfectFoolability);
DETLIM_DEFINE_ERROR(BadArgument);
DETLIM_DEFINE_ERROR(ParseError);

#undef DETLIM_DEFINE_ERROR

}  // namespace detlim
