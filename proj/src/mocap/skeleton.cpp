#include "gaitggm/mocap/skeleton.hpp"

#include "gaitggm/error.hpp"

#include <cmath>

namespace gaitggm::mocap {

Skeleton::Skeleton(std::vector<Joint> joints, bool angles_in_degrees, Eigen::Vector3d root_position)
    : joints_(std::move(joints)), degrees_(angles_in_degrees), root_position_(root_position)
{
    if (joints_.empty()) throw Error(ErrorCode::MalformedAsf, "skeleton has no joints");
    if (joints_[0].parent) throw Error(ErrorCode::MalformedAsf, "root joint must not have a parent");

    for (std::size_t i = 0; i < joints_.size(); ++i) {
        const auto& j = joints_[i];
        if (!index_.emplace(j.name, i).second)
            throw Error(ErrorCode::MalformedAsf, "duplicate joint name '" + j.name + "'");
        if (i > 0 && !j.parent)
            throw Error(ErrorCode::MalformedAsf, "joint '" + j.name + "' is not attached to the hierarchy");
        if (j.parent && *j.parent >= joints_.size())
            throw Error(ErrorCode::MalformedAsf, "joint '" + j.name + "' has an out-of-range parent");
        if (!(j.length >= 0.0) || !std::isfinite(j.length))
            throw Error(ErrorCode::MalformedAsf, "joint '" + j.name + "' has invalid bone length");
        if (std::abs(j.direction.norm() - 1.0) > 1e-6)
            throw Error(ErrorCode::MalformedAsf, "joint '" + j.name + "' direction is not a unit vector");
    }

    // Breadth-first from the root; anything unreached sits on a cycle.
    std::vector<std::vector<std::size_t>> kids(joints_.size());
    for (std::size_t i = 1; i < joints_.size(); ++i) kids[*joints_[i].parent].push_back(i);
    order_.reserve(joints_.size());
    order_.push_back(0);
    for (std::size_t head = 0; head < order_.size(); ++head)
        for (auto c : kids[order_[head]]) order_.push_back(c);
    if (order_.size() != joints_.size())
        throw Error(ErrorCode::MalformedAsf, "hierarchy contains a cycle");
}

std::optional<std::size_t> Skeleton::find(const std::string& name) const
{
    const auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Skeleton::index_of(const std::string& name) const
{
    if (auto i = find(name)) return *i;
    throw Error(ErrorCode::UnknownJoint, "no joint named '" + name + "'");
}

std::vector<std::size_t> Skeleton::children(std::size_t i) const
{
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < joints_.size(); ++c)
        if (joints_[c].parent == i) out.push_back(c);
    return out;
}

std::vector<std::string> Skeleton::joint_names() const
{
    std::vector<std::string> out;
    out.reserve(joints_.size());
    for (const auto& j : joints_) out.push_back(j.name);
    return out;
}

Skeleton Skeleton::with_lengths(const std::vector<double>& lengths) const
{
    if (lengths.size() != joints_.size())
        throw Error(ErrorCode::DimensionMismatch, "length vector does not match joint count");
    auto joints = joints_;
    for (std::size_t i = 0; i < joints.size(); ++i) joints[i].length = lengths[i];
    return Skeleton(std::move(joints), degrees_, root_position_);
}

Skeleton build_prototype_skeleton(const std::vector<Skeleton>& skeletons)
{
    if (skeletons.empty()) throw Error(ErrorCode::EmptyDataset, "no skeletons to average");
    const auto& first = skeletons.front();
    std::vector<double> sum(first.size(), 0.0);
    for (const auto& s : skeletons) {
        if (s.size() != first.size())
            throw Error(ErrorCode::HeterogeneousSkeletons, "skeletons differ in joint count");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto& a = first.joint(i);
            const auto& b = s.joint(i);
            const auto parent_name = [](const Skeleton& sk, const Joint& j) {
                return j.parent ? sk.joint(*j.parent).name : std::string{};
            };
            if (a.name != b.name || parent_name(first, a) != parent_name(s, b))
                throw Error(ErrorCode::HeterogeneousSkeletons,
                            "joint " + std::to_string(i) + " differs ('" + a.name + "' vs '" + b.name + "')");
            sum[i] += b.length;
        }
    }
    for (auto& v : sum) v /= static_cast<double>(skeletons.size());
    return first.with_lengths(sum);
}

}  // namespace gaitggm::mocap
