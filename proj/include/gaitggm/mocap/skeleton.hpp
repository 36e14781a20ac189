#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gaitggm::mocap {

enum class Axis { X, Y, Z };

/// Rotational and translational channels an ASF joint may declare.
enum class Dof { RX, RY, RZ, TX, TY, TZ };

struct Joint {
    std::string name;
    std::optional<std::size_t> parent;  // index into Skeleton::joints(); empty for the root
    Eigen::Vector3d direction = Eigen::Vector3d::UnitY();  // unit, world frame at rest
    double length = 0.0;                                    // file units
    Eigen::Vector3d axis_angles = Eigen::Vector3d::Zero();  // local frame orientation, in file angle units
    std::array<Axis, 3> axis_order{Axis::X, Axis::Y, Axis::Z};  // first entry applied first
    std::vector<Dof> dof;
};

/// Joint tree parsed from an ASF document. Joint 0 is the root.
class Skeleton {
public:
    Skeleton() = default;

    /// Validates the tree (single root at index 0, every other joint has a parent,
    /// no cycles, unique names, unit directions, nonnegative lengths) and builds the
    /// name index. Throws Error(MalformedAsf) on violation.
    Skeleton(std::vector<Joint> joints, bool angles_in_degrees, Eigen::Vector3d root_position);

    const std::vector<Joint>& joints() const noexcept { return joints_; }
    const Joint& joint(std::size_t i) const { return joints_.at(i); }
    std::size_t size() const noexcept { return joints_.size(); }

    std::optional<std::size_t> find(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;  // throws UnknownJoint

    /// Parents-before-children traversal order.
    const std::vector<std::size_t>& topological_order() const noexcept { return order_; }
    std::vector<std::size_t> children(std::size_t i) const;

    bool angles_in_degrees() const noexcept { return degrees_; }
    const Eigen::Vector3d& root_position() const noexcept { return root_position_; }

    std::vector<std::string> joint_names() const;

    /// Same joints, same bone geometry except lengths replaced by `lengths`.
    Skeleton with_lengths(const std::vector<double>& lengths) const;

private:
    std::vector<Joint> joints_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> order_;
    bool degrees_ = true;
    Eigen::Vector3d root_position_ = Eigen::Vector3d::Zero();
};

/// Mean bone length per joint over skeletons sharing names and hierarchy;
/// directions, axes and dofs come from the first skeleton.
/// Throws HeterogeneousSkeletons if joint sets or parents differ, EmptyDataset if empty.
Skeleton build_prototype_skeleton(const std::vector<Skeleton>& skeletons);

}  // namespace gaitggm::mocap
