#include "gaitggm/mocap/gait.hpp"

#include "gaitggm/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace gaitggm::mocap {
namespace {

constexpr std::array<std::pair<const char*, const char*>, 4> kAnkleNames{{
    {"ltibia", "rtibia"},
    {"lankle", "rankle"},
    {"AnkleLeft", "AnkleRight"},
    {"ankle_left", "ankle_right"},
}};

constexpr std::array<const char*, 31> kCircleOrder{
    // legs
    "lfemur", "ltibia", "lfoot", "ltoes", "rfemur", "rtibia", "rfoot", "rtoes",
    // torso
    "lowerback", "upperback", "thorax", "lowerneck", "upperneck", "head",
    // left arm
    "lclavicle", "lhumerus", "lradius", "lwrist", "lhand", "lfingers", "lthumb",
    // right arm
    "rclavicle", "rhumerus", "rradius", "rwrist", "rhand", "rfingers", "rthumb",
    // static under root-centering, listed last if retained
    "root", "lhipjoint", "rhipjoint",
};

std::pair<std::string, std::string> resolve_ankles(const MotionSequence& seq, const SegmentOptions& o)
{
    const auto has = [&](const std::string& n) {
        return std::find(seq.joints.begin(), seq.joints.end(), n) != seq.joints.end();
    };
    if (!o.left_ankle.empty() || !o.right_ankle.empty()) {
        if (!has(o.left_ankle)) throw Error(ErrorCode::UnknownJoint, "no joint named '" + o.left_ankle + "'");
        if (!has(o.right_ankle)) throw Error(ErrorCode::UnknownJoint, "no joint named '" + o.right_ankle + "'");
        return {o.left_ankle, o.right_ankle};
    }
    for (const auto& [l, r] : kAnkleNames)
        if (has(l) && has(r)) return {l, r};
    throw Error(ErrorCode::UnknownJoint, "cannot find left/right ankle joints");
}

}  // namespace

std::vector<std::size_t> detect_heel_strikes(const MotionSequence& seq, const std::string& left_ankle,
                                             const std::string& right_ankle)
{
    const auto l = seq.joint_index(left_ankle);
    const auto r = seq.joint_index(right_ankle);
    const auto n = seq.frames();
    std::vector<double> dist(n);
    std::vector<int> lead(n);
    for (std::size_t f = 0; f < n; ++f) {
        const Eigen::Vector3d d = seq.position(l, f) - seq.position(r, f);
        dist[f] = std::hypot(d.x(), d.z());
        lead[f] = d.z() >= 0.0 ? 1 : -1;
    }
    if (n < 3) return {};
    double mean = 0.0;
    for (double v : dist) mean += v;
    mean /= static_cast<double>(n);

    std::vector<std::size_t> peaks;
    for (std::size_t f = 1; f + 1 < n; ++f) {
        if (!(dist[f] > dist[f - 1] && dist[f] >= dist[f + 1] && dist[f] > mean)) continue;
        if (!peaks.empty() && lead[peaks.back()] == lead[f]) {
            if (dist[f] > dist[peaks.back()]) peaks.back() = f;
            continue;
        }
        peaks.push_back(f);
    }
    return peaks;
}

Eigen::MatrixXd resample_linear(const Eigen::MatrixXd& coords, double start, double end, std::size_t length)
{
    if (length < 2) throw Error(ErrorCode::InvalidConfig, "resampled length must be at least 2");
    const double last = static_cast<double>(coords.cols() - 1);
    if (!(start >= 0.0 && end <= last && start < end))
        throw Error(ErrorCode::DimensionMismatch, "resampling window outside the sequence");
    Eigen::MatrixXd out(coords.rows(), static_cast<Eigen::Index>(length));
    const double step = (end - start) / static_cast<double>(length - 1);
    for (std::size_t i = 0; i < length; ++i) {
        const double t = i + 1 == length ? end : start + step * static_cast<double>(i);
        auto lo = static_cast<Eigen::Index>(std::floor(t));
        if (lo >= coords.cols() - 1) lo = coords.cols() - 2;
        const double w = t - static_cast<double>(lo);
        out.col(static_cast<Eigen::Index>(i)) = (1.0 - w) * coords.col(lo) + w * coords.col(lo + 1);
    }
    return out;
}

Eigen::VectorXd joint_variance(const Eigen::MatrixXd& coords)
{
    const auto joints = coords.rows() / 3;
    Eigen::VectorXd var = Eigen::VectorXd::Zero(joints);
    const double n = static_cast<double>(coords.cols());
    for (Eigen::Index j = 0; j < joints; ++j) {
        for (Eigen::Index c = 0; c < 3; ++c) {
            const auto row = coords.row(3 * j + c);
            const double mean = row.mean();
            var(j) += (row.array() - mean).square().sum() / n;
        }
    }
    return var;
}

std::vector<GaitCycle> segment_gait_cycles(const MotionSequence& seq, const SegmentOptions& options)
{
    seq.validate();
    if (options.fixed_length < 2) throw Error(ErrorCode::InvalidConfig, "fixed length must be at least 2");
    const auto [left, right] = resolve_ankles(seq, options);
    const auto strikes = detect_heel_strikes(seq, left, right);
    if (strikes.size() < 3)
        throw Error(ErrorCode::NoCycleDetected, "found " + std::to_string(strikes.size()) +
                                                    " heel strikes, a full cycle needs 3");

    std::vector<Eigen::MatrixXd> windows;
    for (std::size_t k = 0; k + 2 < strikes.size(); ++k)
        windows.push_back(resample_linear(seq.coords, static_cast<double>(strikes[k]),
                                          static_cast<double>(strikes[k + 2]), options.fixed_length));

    // A joint is dropped if it is static over the sequence or inside any cycle,
    // so every cycle of the sequence keeps the same joint set.
    const auto n_joints = static_cast<Eigen::Index>(seq.joints.size());
    std::vector<bool> keep(seq.joints.size(), true);
    const auto mark_static = [&](const Eigen::MatrixXd& m) {
        const auto v = joint_variance(m);
        for (Eigen::Index j = 0; j < n_joints; ++j)
            if (v(j) < options.static_variance) keep[static_cast<std::size_t>(j)] = false;
    };
    mark_static(seq.coords);
    for (const auto& w : windows) mark_static(w);

    std::vector<std::string> kept;
    for (std::size_t j = 0; j < seq.joints.size(); ++j)
        if (keep[j]) kept.push_back(seq.joints[j]);
    if (kept.empty()) throw Error(ErrorCode::NoCycleDetected, "every joint is static");
    if (options.canonical_order) kept = canonical_joint_order(kept);

    std::vector<Eigen::Index> source;
    for (const auto& name : kept) source.push_back(static_cast<Eigen::Index>(seq.joint_index(name)));

    std::vector<GaitCycle> cycles;
    cycles.reserve(windows.size());
    for (std::size_t k = 0; k < windows.size(); ++k) {
        GaitCycle c;
        c.joints = kept;
        c.subject_label = seq.label;
        c.sequence_id = options.sequence_id;
        c.cycle_index = k;
        c.coords.resize(3 * static_cast<Eigen::Index>(kept.size()), windows[k].cols());
        for (std::size_t j = 0; j < source.size(); ++j)
            c.coords.middleRows(3 * static_cast<Eigen::Index>(j), 3) = windows[k].middleRows(3 * source[j], 3);
        cycles.push_back(std::move(c));
    }
    return cycles;
}

std::vector<std::string> canonical_joint_order(const std::vector<std::string>& joints)
{
    const auto rank = [](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < kCircleOrder.size(); ++i)
            if (name == kCircleOrder[i]) return i;
        return kCircleOrder.size();
    };
    std::vector<std::string> out = joints;
    std::stable_sort(out.begin(), out.end(),
                     [&](const std::string& a, const std::string& b) { return rank(a) < rank(b); });
    return out;
}

}  // namespace gaitggm::mocap
