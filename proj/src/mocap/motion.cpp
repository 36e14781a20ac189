#include "gaitggm/mocap/motion.hpp"

#include "gaitggm/error.hpp"

#include <algorithm>

namespace gaitggm::mocap {
namespace {

std::size_t find_joint(const std::vector<std::string>& joints, const std::string& name)
{
    const auto it = std::find(joints.begin(), joints.end(), name);
    if (it == joints.end()) throw Error(ErrorCode::UnknownJoint, "no joint named '" + name + "'");
    return static_cast<std::size_t>(it - joints.begin());
}

}  // namespace

std::size_t MotionSequence::joint_index(const std::string& name) const { return find_joint(joints, name); }

void MotionSequence::validate() const
{
    if (coords.rows() != 3 * static_cast<Eigen::Index>(joints.size()))
        throw Error(ErrorCode::DimensionMismatch, "coordinate rows must be 3 per joint");
    if (coords.cols() < 2) throw Error(ErrorCode::MalformedTrajectory, "a motion sequence needs at least 2 frames");
    if (!coords.allFinite()) throw Error(ErrorCode::MalformedTrajectory, "non-finite coordinate");
    if (root_path.cols() != coords.cols())
        throw Error(ErrorCode::DimensionMismatch, "root path length differs from frame count");
    if (!root_path.allFinite()) throw Error(ErrorCode::MalformedTrajectory, "non-finite root path");
}

MotionSequence make_sequence(std::vector<std::string> joints, Eigen::MatrixXd coords, std::string label,
                             double frame_rate, std::string root_joint)
{
    MotionSequence seq;
    seq.joints = std::move(joints);
    seq.coords = std::move(coords);
    seq.label = std::move(label);
    seq.frame_rate = frame_rate;
    seq.root_joint = std::move(root_joint);
    const auto it = std::find(seq.joints.begin(), seq.joints.end(), seq.root_joint);
    if (it != seq.joints.end() && seq.coords.rows() == 3 * static_cast<Eigen::Index>(seq.joints.size())) {
        const auto r = 3 * static_cast<Eigen::Index>(it - seq.joints.begin());
        seq.root_path = seq.coords.middleRows(r, 3);
    } else {
        seq.root_path = Eigen::Matrix3Xd::Zero(3, seq.coords.cols());
    }
    return seq;
}

std::size_t GaitCycle::joint_index(const std::string& name) const { return find_joint(joints, name); }

std::string GaitCycle::id() const
{
    return subject_label + "_" + sequence_id + "_" + std::to_string(cycle_index);
}

void GaitCycle::validate() const
{
    if (joints.empty()) throw Error(ErrorCode::DimensionMismatch, "gait cycle has no joints");
    if (coords.rows() != 3 * static_cast<Eigen::Index>(joints.size()))
        throw Error(ErrorCode::DimensionMismatch, "coordinate rows must be 3 per joint");
    if (coords.cols() < 2) throw Error(ErrorCode::MalformedTrajectory, "a gait cycle needs at least 2 frames");
    if (!coords.allFinite()) throw Error(ErrorCode::MalformedTrajectory, "non-finite coordinate");
}

}  // namespace gaitggm::mocap
