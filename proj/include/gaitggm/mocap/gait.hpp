#pragma once

#include "gaitggm/mocap/motion.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace gaitggm::mocap {

struct SegmentOptions {
    std::size_t fixed_length = 156;
    /// Ankle joint names; empty means auto-detect among the CMU and Kinect conventions.
    std::string left_ankle;
    std::string right_ankle;
    /// Joints whose summed per-axis temporal variance is below this are dropped.
    double static_variance = 1e-10;
    /// Reorder retained joints into the circular layout used for graph plots.
    bool canonical_order = true;
    std::string sequence_id = "0";
};

/// Frame indices of heel strikes: local maxima of the horizontal inter-ankle
/// distance that exceed its mean, merged so the leading leg alternates.
std::vector<std::size_t> detect_heel_strikes(const MotionSequence& seq, const std::string& left_ankle,
                                             const std::string& right_ankle);

/// Linear interpolation of every row onto `length` uniformly spaced points
/// spanning fractional frame positions [start, end].
Eigen::MatrixXd resample_linear(const Eigen::MatrixXd& coords, double start, double end, std::size_t length);

/// Summed x/y/z population variance of each joint over the frames of `coords`.
Eigen::VectorXd joint_variance(const Eigen::MatrixXd& coords);

/// Cuts a normalized sequence into gait cycles (strike k to strike k+2, i.e. the
/// next strike led by the same leg), resamples each to fixed_length frames and
/// removes static joints. Throws NoCycleDetected when fewer than three strikes exist.
std::vector<GaitCycle> segment_gait_cycles(const MotionSequence& seq, const SegmentOptions& options = {});

/// CMU joint names in counter-clockwise plotting order: legs, torso, left arm,
/// right arm. Names outside this list keep their relative order after the known ones.
std::vector<std::string> canonical_joint_order(const std::vector<std::string>& joints);

}  // namespace gaitggm::mocap
