#pragma once

#include "gaitggm/mocap/skeleton.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace gaitggm::mocap {

/// Raw joint trajectories: coords is (3 * joints) x frames, rows ordered
/// joint0.x, joint0.y, joint0.z, joint1.x, ...
struct MotionSequence {
    std::vector<std::string> joints;
    Eigen::MatrixXd coords;
    /// World-frame trajectory of the root (3 x frames). Kept separately from the
    /// root's row block so the walking direction survives root-centering.
    Eigen::Matrix3Xd root_path;
    double frame_rate = 120.0;
    std::string label;
    std::string root_joint = "root";
    std::shared_ptr<const Skeleton> skeleton;

    std::size_t frames() const noexcept { return static_cast<std::size_t>(coords.cols()); }
    std::size_t joint_count() const noexcept { return joints.size(); }

    std::size_t joint_index(const std::string& name) const;  // throws UnknownJoint
    Eigen::Vector3d position(std::size_t joint, std::size_t frame) const
    {
        return coords.block<3, 1>(3 * static_cast<Eigen::Index>(joint), static_cast<Eigen::Index>(frame));
    }

    /// Checks row/joint agreement, at least 2 frames, finite values, root_path shape.
    void validate() const;
};

/// Builds a sequence whose root_path is the root joint's own trajectory.
MotionSequence make_sequence(std::vector<std::string> joints, Eigen::MatrixXd coords, std::string label = {},
                             double frame_rate = 120.0, std::string root_joint = "root");

/// One resampled, root-relative gait cycle: coords is (3 * joints) x fixed_length.
struct GaitCycle {
    std::vector<std::string> joints;
    Eigen::MatrixXd coords;
    std::string subject_label;
    std::string sequence_id;
    std::size_t cycle_index = 0;

    std::size_t frames() const noexcept { return static_cast<std::size_t>(coords.cols()); }
    std::size_t joint_count() const noexcept { return joints.size(); }
    std::size_t joint_index(const std::string& name) const;  // throws UnknownJoint

    /// Archive file stem `<subject>_<seq>_<cycle>`.
    std::string id() const;

    void validate() const;
};

}  // namespace gaitggm::mocap
