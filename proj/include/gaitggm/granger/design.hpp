#pragma once

#include "gaitggm/mocap/motion.hpp"

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

namespace gaitggm::granger {

/// Lagged regressors stacked over the three coordinate axes.
///
/// Row 3*(t-d-1)+c (t = d+1..n, c in {x,y,z}) holds, in the column block of
/// joint j, the values x_j^{t-1}(c), ..., x_j^{t-d}(c). Column j*d + (k-1) is
/// therefore joint j at lag k.
struct DesignMatrix {
    Eigen::MatrixXd values;
    std::size_t lag = 1;
    std::vector<std::string> joints;

    std::size_t joint_count() const noexcept { return joints.size(); }
    /// Column range [first, first + lag) of joint j's lagged block.
    std::pair<std::size_t, std::size_t> block(std::size_t joint) const noexcept
    {
        return {joint * lag, lag};
    }
};

/// x_i stacked as x^{d+1}(x), x^{d+1}(y), x^{d+1}(z), ..., x^n(z).
struct FlatTarget {
    Eigen::VectorXd values;
    std::string joint;
};

/// Throws LagTooLarge if lag == 0 or lag >= frames.
DesignMatrix build_design_matrix(const mocap::GaitCycle& cycle, std::size_t lag);

/// Throws UnknownJoint / LagTooLarge.
FlatTarget flatten_target(const mocap::GaitCycle& cycle, const std::string& joint, std::size_t lag);
FlatTarget flatten_target(const mocap::GaitCycle& cycle, std::size_t joint, std::size_t lag);

/// Prediction of target joint i at time t from the concatenated lag vector
/// [x_j^{t-k}] (j = 1..p, k = 1..d) evaluated axis by axis. Equivalent to the
/// three design rows of time t multiplied by beta; kept as an independent route.
Eigen::Vector3d lagged_prediction(const mocap::GaitCycle& cycle, const Eigen::VectorXd& beta, std::size_t lag,
                                  std::size_t t);

}  // namespace gaitggm::granger
