#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaitggm {

enum class ErrorCode {
    // input data
    MalformedAsf,
    MalformedAmc,
    MalformedTrajectory,
    HeterogeneousSkeletons,
    DegenerateHeading,
    NoCycleDetected,
    UnknownJoint,
    DimensionMismatch,
    EmptyDataset,
    TooFewSamples,
    Io,
    // configuration / usage
    InvalidConfig,
    LagTooLarge,
    MissingScatterModel,
    NonStationary,
    // numerical
    NonConvergence,
    EigenFailure,
    ZeroResidual,
    JaccardUndefined,
    CoincidentMedoids,
    ZeroDiameter,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Broad failure class, used by the command-line front end to pick an exit code.
enum class ErrorClass { Usage, Data, Numerical };

ErrorClass classify(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Parse error carrying the 1-based line number of the offending input.
class ParseError : public Error {
public:
    ParseError(ErrorCode code, std::size_t line, const std::string& message);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace gaitggm
