#include "gaitggm/granger/design.hpp"

#include "gaitggm/error.hpp"

namespace gaitggm::granger {
namespace {

void check_lag(const mocap::GaitCycle& cycle, std::size_t lag)
{
    if (lag == 0) throw Error(ErrorCode::LagTooLarge, "lag must be at least 1");
    if (lag >= cycle.frames())
        throw Error(ErrorCode::LagTooLarge,
                    "lag " + std::to_string(lag) + " leaves no prediction rows for " +
                        std::to_string(cycle.frames()) + " frames");
}

}  // namespace

DesignMatrix build_design_matrix(const mocap::GaitCycle& cycle, std::size_t lag)
{
    cycle.validate();
    check_lag(cycle, lag);
    const auto n = static_cast<Eigen::Index>(cycle.frames());
    const auto p = static_cast<Eigen::Index>(cycle.joint_count());
    const auto d = static_cast<Eigen::Index>(lag);

    DesignMatrix dm;
    dm.lag = lag;
    dm.joints = cycle.joints;
    dm.values.resize(3 * (n - d), p * d);
    // 0-based frame index of time t is t-1; the first target frame is d.
    for (Eigen::Index t = d; t < n; ++t)
        for (Eigen::Index c = 0; c < 3; ++c)
            for (Eigen::Index j = 0; j < p; ++j)
                for (Eigen::Index k = 1; k <= d; ++k)
                    dm.values(3 * (t - d) + c, j * d + (k - 1)) = cycle.coords(3 * j + c, t - k);
    return dm;
}

FlatTarget flatten_target(const mocap::GaitCycle& cycle, std::size_t joint, std::size_t lag)
{
    cycle.validate();
    check_lag(cycle, lag);
    if (joint >= cycle.joint_count())
        throw Error(ErrorCode::UnknownJoint, "joint index " + std::to_string(joint) + " out of range");
    const auto n = static_cast<Eigen::Index>(cycle.frames());
    const auto d = static_cast<Eigen::Index>(lag);
    const auto i = static_cast<Eigen::Index>(joint);

    FlatTarget ft;
    ft.joint = cycle.joints[joint];
    ft.values.resize(3 * (n - d));
    for (Eigen::Index t = d; t < n; ++t)
        for (Eigen::Index c = 0; c < 3; ++c) ft.values(3 * (t - d) + c) = cycle.coords(3 * i + c, t);
    return ft;
}

FlatTarget flatten_target(const mocap::GaitCycle& cycle, const std::string& joint, std::size_t lag)
{
    return flatten_target(cycle, cycle.joint_index(joint), lag);
}

Eigen::Vector3d lagged_prediction(const mocap::GaitCycle& cycle, const Eigen::VectorXd& beta, std::size_t lag,
                                  std::size_t t)
{
    const auto p = cycle.joint_count();
    if (beta.size() != static_cast<Eigen::Index>(p * lag))
        throw Error(ErrorCode::DimensionMismatch, "coefficient vector length must be p*d");
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (Eigen::Index c = 0; c < 3; ++c) {
        // X^lag_{t,d} = [x_j^{t-k}], j-major then lag.
        Eigen::VectorXd lag_vector(static_cast<Eigen::Index>(p * lag));
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 1; k <= lag; ++k)
                lag_vector(static_cast<Eigen::Index>(j * lag + k - 1)) =
                    cycle.coords(static_cast<Eigen::Index>(3 * j) + c, static_cast<Eigen::Index>(t - 1 - k));
        out(c) = lag_vector.dot(beta);
    }
    return out;
}

}  // namespace gaitggm::granger
