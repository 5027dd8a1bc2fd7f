#include "spatial_exit/error.hpp"

namespace spatial_exit {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::BadCoordinate: return "BadCoordinate";
    case Errc::BadIndustryCode: return "BadIndustryCode";
    case Errc::BadValue: return "BadValue";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::EmptyFilter: return "EmptyFilter";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::ConstantColumn: return "ConstantColumn";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::PerfectSeparation: return "PerfectSeparation";
    case Errc::AllSameOutcome: return "AllSameOutcome";
    case Errc::ProbabilityUnderflow: return "ProbabilityUnderflow";
    case Errc::DegenerateRhoGradient: return "DegenerateRhoGradient";
    case Errc::StepOutOfDomain: return "StepOutOfDomain";
    case Errc::NonFiniteDensity: return "NonFiniteDensity";
    case Errc::OracleScaleLimit: return "OracleScaleLimit";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace spatial_exit
