#include "gaitggm/granger/config.hpp"

#include "gaitggm/error.hpp"

#include <cmath>
#include <string>

namespace gaitggm::granger {

void GgmConfig::validate() const
{
    if (lag < 1) throw Error(ErrorCode::InvalidConfig, "lag must be >= 1");
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) throw Error(ErrorCode::InvalidConfig, "lambda_max must be > 0");
    if (cv_folds < 2) throw Error(ErrorCode::InvalidConfig, "cv_folds must be >= 2");
    if (lambda_grid_size < 1) throw Error(ErrorCode::InvalidConfig, "lambda_grid_size must be >= 1");
    if (!(zero_threshold > 0.0)) throw Error(ErrorCode::InvalidConfig, "zero_threshold must be > 0");
    if (!(weight_floor > 0.0)) throw Error(ErrorCode::InvalidConfig, "weight_floor must be > 0");
    if (max_sweeps < 1) throw Error(ErrorCode::InvalidConfig, "max_sweeps must be >= 1");
    if (!(cd_tolerance > 0.0) || !(kkt_tolerance > 0.0))
        throw Error(ErrorCode::InvalidConfig, "solver tolerances must be > 0");
}

std::string_view to_string(Penalty p) noexcept
{
    return p == Penalty::AdaptiveLasso ? "adaptive-lasso" : "plain-lasso";
}

Penalty parse_penalty(std::string_view s)
{
    if (s == "adaptive-lasso" || s == "adaptive") return Penalty::AdaptiveLasso;
    if (s == "plain-lasso" || s == "lasso") return Penalty::PlainLasso;
    throw Error(ErrorCode::InvalidConfig, "unknown penalty '" + std::string(s) + "'");
}

std::string_view to_string(CvRule r) noexcept
{
    return r == CvRule::MinError ? "min" : "one-se";
}

CvRule parse_cv_rule(std::string_view s)
{
    if (s == "min") return CvRule::MinError;
    if (s == "one-se") return CvRule::OneStandardError;
    throw Error(ErrorCode::InvalidConfig, "unknown cv rule '" + std::string(s) + "'");
}

}  // namespace gaitggm::granger
