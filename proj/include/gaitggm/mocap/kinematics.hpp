#pragma once

#include "gaitggm/mocap/acclaim.hpp"
#include "gaitggm/mocap/motion.hpp"

#include <Eigen/Geometry>

namespace gaitggm::mocap {

/// Rotation applying `angles` (radians, indexed by axis) in `order`, first entry first:
/// order XYZ gives Rz * Ry * Rx.
Eigen::Matrix3d euler_rotation(const Eigen::Vector3d& angles, const std::array<Axis, 3>& order);

/// Joint positions for every frame. Each joint sits at its parent's position plus
/// its bone (length * direction) rotated by the accumulated world rotation
///   R_joint = R_parent * C * M * C^-1
/// where C is the joint's axis frame and M its per-frame dof rotation. The root
/// is placed at the ASF root position plus its translation channels.
MotionSequence forward_kinematics(const Skeleton& skeleton, const MotionChannels& channels,
                                  std::string label = {}, double frame_rate = 120.0);

/// Root-centers every frame and rotates the axes into the walker's frame:
/// +Y world up, +Z along the mean horizontal root displacement (walking
/// direction), +X = Y x Z (walker's left). Throws DegenerateHeading when the
/// mean horizontal displacement is shorter than 1e-9.
MotionSequence normalize_pose(const MotionSequence& seq);

}  // namespace gaitggm::mocap
