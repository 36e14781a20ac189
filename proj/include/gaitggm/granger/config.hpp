#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace gaitggm::granger {

enum class Penalty { AdaptiveLasso, PlainLasso };

std::string_view to_string(Penalty p) noexcept;
Penalty parse_penalty(std::string_view s);  // "adaptive-lasso" | "plain-lasso"

enum class CvRule { MinError, OneStandardError };

std::string_view to_string(CvRule r) noexcept;
CvRule parse_cv_rule(std::string_view s);  // "min" | "one-se"

struct GgmConfig {
    std::size_t lag = 1;
    double lambda_max = 5.0;
    std::size_t cv_folds = 5;
    std::size_t lambda_grid_size = 20;
    double zero_threshold = 1e-8;  // |beta| above this (original scale) counts as an edge
    double weight_floor = 1e-8;    // minimum block norm of the ML estimate
    Penalty penalty = Penalty::AdaptiveLasso;
    CvRule cv_rule = CvRule::OneStandardError;

    // Coordinate-descent controls.
    std::size_t max_sweeps = 10000;
    double cd_tolerance = 1e-9;
    double kkt_tolerance = 1e-6;

    /// Throws InvalidConfig when a field is out of range.
    void validate() const;
};

}  // namespace gaitggm::granger
