#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spatial_exit {

enum class Errc {
  InvalidArgument,
  MissingColumn,
  BadCoordinate,
  BadIndustryCode,
  BadValue,
  DuplicateId,
  EmptyFilter,
  TooFewRows,
  ConstantColumn,
  SingularSystem,
  RankDeficient,
  PerfectSeparation,
  AllSameOutcome,
  ProbabilityUnderflow,
  DegenerateRhoGradient,
  StepOutOfDomain,
  NonFiniteDensity,
  OracleScaleLimit,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

/// Library-wide exception carrying a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace spatial_exit
