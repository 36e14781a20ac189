#pragma once

// Acclaim skeleton (ASF) and motion (AMC) readers.

#include "gaitggm/mocap/skeleton.hpp"

#include <Eigen/Core>

#include <string_view>
#include <vector>

namespace gaitggm::mocap {

/// Parses an ASF document. Accepts `#` comments, case-insensitive keywords and
/// arbitrary whitespace. Requires `:root`, `:bonedata` and `:hierarchy`.
/// Throws ParseError(MalformedAsf) with the offending line.
Skeleton parse_asf(std::string_view text);

/// Per-frame channel values from an AMC document.
struct MotionChannels {
    /// values[joint] is frames x dof(joint).size(), columns in the joint's dof order.
    std::vector<Eigen::MatrixXd> values;
    std::size_t frames = 0;
    long long first_frame = 1;
    bool degrees = true;
};

/// Parses an AMC document against `skeleton`. Every joint that declares dofs must
/// appear exactly once in every frame with exactly that many values; frame numbers
/// must be consecutive. Throws ParseError(MalformedAmc).
MotionChannels parse_amc(std::string_view text, const Skeleton& skeleton);

}  // namespace gaitggm::mocap
