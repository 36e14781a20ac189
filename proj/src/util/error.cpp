#include "gaitggm/error.hpp"

namespace gaitggm {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MalformedAsf: return "MalformedAsf";
    case ErrorCode::MalformedAmc: return "MalformedAmc";
    case ErrorCode::MalformedTrajectory: return "MalformedTrajectory";
    case ErrorCode::HeterogeneousSkeletons: return "HeterogeneousSkeletons";
    case ErrorCode::DegenerateHeading: return "DegenerateHeading";
    case ErrorCode::NoCycleDetected: return "NoCycleDetected";
    case ErrorCode::UnknownJoint: return "UnknownJoint";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::MissingScatterModel: return "MissingScatterModel";
    case ErrorCode::NonStationary: return "NonStationary";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::ZeroResidual: return "ZeroResidual";
    case ErrorCode::JaccardUndefined: return "JaccardUndefined";
    case ErrorCode::CoincidentMedoids: return "CoincidentMedoids";
    case ErrorCode::ZeroDiameter: return "ZeroDiameter";
    }
    return "Unknown";
}

ErrorClass classify(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::LagTooLarge:
    case ErrorCode::MissingScatterModel:
    case ErrorCode::NonStationary:
        return ErrorClass::Usage;
    case ErrorCode::NonConvergence:
    case ErrorCode::EigenFailure:
    case ErrorCode::ZeroResidual:
    case ErrorCode::JaccardUndefined:
    case ErrorCode::CoincidentMedoids:
    case ErrorCode::ZeroDiameter:
        return ErrorClass::Numerical;
    default:
        return ErrorClass::Data;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

ParseError::ParseError(ErrorCode code, std::size_t line, const std::string& message)
    : Error(code, "line " + std::to_string(line) + ": " + message), line_(line)
{
}

}  // namespace gaitggm
