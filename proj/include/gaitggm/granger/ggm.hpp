#pragma once

#include "gaitggm/granger/config.hpp"
#include "gaitggm/granger/design.hpp"
#include "gaitggm/granger/graph.hpp"
#include "gaitggm/mocap/motion.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace gaitggm::granger {

/// Fitted regression for one target joint, coefficients on the original data scale.
struct CoefficientBlock {
    Eigen::VectorXd beta;      // p * d
    Eigen::VectorXd weights;   // p, one per joint
    Eigen::VectorXd mle_beta;  // p * d
    double lambda_selected = 0.0;
    std::string target;
};

/// A(j, i) = 1 iff some lag coefficient of joint j in blocks[i].beta exceeds
/// config.zero_threshold in magnitude and j != i.
/// Throws DimensionMismatch unless there is one block of length p * lag per joint.
CausalGraph extract_edges(const std::vector<CoefficientBlock>& blocks, const std::vector<std::string>& joint_order,
                          const GgmConfig& config);

struct GgmFit {
    CausalGraph graph;
    std::vector<CoefficientBlock> blocks;
};

/// Full feature extraction for one cycle: lagged design, design columns and
/// target centred and scaled to unit L2 norm, ML initial estimate, adaptive
/// weights 1 / max(||b_j^mle||_1, floor), cross-validated lambda, edge extraction.
/// The selected support is invariant to a positive rescaling of the cycle.
GgmFit compute_ggm_fit(const mocap::GaitCycle& cycle, const GgmConfig& config = {});

CausalGraph compute_ggm(const mocap::GaitCycle& cycle, const GgmConfig& config = {});

/// JSON export: joint_order, adjacency, config and the selected lambda per target.
std::string ggm_json(const GgmFit& fit, const GgmConfig& config);

}  // namespace gaitggm::granger
