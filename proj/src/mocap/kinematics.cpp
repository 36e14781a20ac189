#include "gaitggm/mocap/kinematics.hpp"

#include "gaitggm/error.hpp"

#include <cmath>
#include <numbers>

namespace gaitggm::mocap {
namespace {

Eigen::Vector3d unit(Axis a)
{
    switch (a) {
    case Axis::X: return Eigen::Vector3d::UnitX();
    case Axis::Y: return Eigen::Vector3d::UnitY();
    case Axis::Z: return Eigen::Vector3d::UnitZ();
    }
    return Eigen::Vector3d::UnitX();
}

struct FrameChannels {
    Eigen::Vector3d rotation = Eigen::Vector3d::Zero();     // radians, by axis
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

FrameChannels read_channels(const Joint& joint, const Eigen::MatrixXd& values, Eigen::Index frame, double to_rad)
{
    FrameChannels fc;
    for (std::size_t k = 0; k < joint.dof.size(); ++k) {
        const double v = values(frame, static_cast<Eigen::Index>(k));
        switch (joint.dof[k]) {
        case Dof::RX: fc.rotation.x() = v * to_rad; break;
        case Dof::RY: fc.rotation.y() = v * to_rad; break;
        case Dof::RZ: fc.rotation.z() = v * to_rad; break;
        case Dof::TX: fc.translation.x() = v; break;
        case Dof::TY: fc.translation.y() = v; break;
        case Dof::TZ: fc.translation.z() = v; break;
        }
    }
    return fc;
}

}  // namespace

Eigen::Matrix3d euler_rotation(const Eigen::Vector3d& angles, const std::array<Axis, 3>& order)
{
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    for (const auto a : order) {
        const double theta = angles(static_cast<int>(a));
        r = Eigen::AngleAxisd(theta, unit(a)).toRotationMatrix() * r;
    }
    return r;
}

MotionSequence forward_kinematics(const Skeleton& skeleton, const MotionChannels& channels, std::string label,
                                  double frame_rate)
{
    if (channels.values.size() != skeleton.size())
        throw Error(ErrorCode::DimensionMismatch, "channels were parsed against a different skeleton");
    const auto n_frames = static_cast<Eigen::Index>(channels.frames);
    const auto n_joints = skeleton.size();
    const double to_rad = channels.degrees ? std::numbers::pi / 180.0 : 1.0;
    const double axis_to_rad = skeleton.angles_in_degrees() ? std::numbers::pi / 180.0 : 1.0;

    std::vector<Eigen::Matrix3d> axis_frame(n_joints);
    std::vector<Eigen::Vector3d> bone(n_joints);
    for (std::size_t j = 0; j < n_joints; ++j) {
        const auto& joint = skeleton.joint(j);
        axis_frame[j] = euler_rotation(joint.axis_angles * axis_to_rad, joint.axis_order);
        bone[j] = joint.length * joint.direction;
        if (channels.values[j].rows() != n_frames ||
            channels.values[j].cols() != static_cast<Eigen::Index>(joint.dof.size()))
            throw Error(ErrorCode::DimensionMismatch, "channel block for '" + joint.name + "' has wrong shape");
    }

    Eigen::MatrixXd coords(3 * static_cast<Eigen::Index>(n_joints), n_frames);
    std::vector<Eigen::Matrix3d> world_rot(n_joints);
    std::vector<Eigen::Vector3d> world_pos(n_joints);

    for (Eigen::Index f = 0; f < n_frames; ++f) {
        for (const auto j : skeleton.topological_order()) {
            const auto& joint = skeleton.joint(j);
            const auto fc = read_channels(joint, channels.values[j], f, to_rad);
            const Eigen::Matrix3d local =
                axis_frame[j] * euler_rotation(fc.rotation, joint.axis_order) * axis_frame[j].transpose();
            if (!joint.parent) {
                world_rot[j] = local;
                world_pos[j] = skeleton.root_position() + fc.translation;
            } else {
                const auto p = *joint.parent;
                world_rot[j] = world_rot[p] * local;
                world_pos[j] = world_pos[p] + world_rot[j] * bone[j];
            }
            coords.block<3, 1>(3 * static_cast<Eigen::Index>(j), f) = world_pos[j];
        }
    }

    auto seq = make_sequence(skeleton.joint_names(), std::move(coords), std::move(label), frame_rate,
                             skeleton.joint(0).name);
    seq.skeleton = std::make_shared<const Skeleton>(skeleton);
    return seq;
}

MotionSequence normalize_pose(const MotionSequence& seq)
{
    seq.validate();
    const auto root = static_cast<Eigen::Index>(seq.joint_index(seq.root_joint));
    const auto n = seq.coords.cols();

    Eigen::Vector3d heading = (seq.root_path.col(n - 1) - seq.root_path.col(0)) / static_cast<double>(n - 1);
    heading.y() = 0.0;
    const double norm = heading.norm();
    if (!(norm >= 1e-9))
        throw Error(ErrorCode::DegenerateHeading, "mean horizontal root displacement is " + std::to_string(norm));
    const Eigen::Vector3d z_axis = heading / norm;
    const Eigen::Vector3d y_axis = Eigen::Vector3d::UnitY();
    const Eigen::Vector3d x_axis = y_axis.cross(z_axis);
    Eigen::Matrix3d rot;
    rot.row(0) = x_axis.transpose();
    rot.row(1) = y_axis.transpose();
    rot.row(2) = z_axis.transpose();

    MotionSequence out = seq;
    for (Eigen::Index f = 0; f < n; ++f) {
        const Eigen::Vector3d origin = seq.coords.block<3, 1>(3 * root, f);
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(seq.joints.size()); ++j)
            out.coords.block<3, 1>(3 * j, f) = rot * (seq.coords.block<3, 1>(3 * j, f) - origin);
    }
    const Eigen::Vector3d start = seq.root_path.col(0);
    out.root_path = rot * (seq.root_path.colwise() - start);
    return out;
}

}  // namespace gaitggm::mocap
