#include "gaitggm/granger/ggm.hpp"

#include "gaitggm/error.hpp"
#include "gaitggm/granger/regression.hpp"

#include <json.hpp>

#include <cmath>

namespace gaitggm::granger {
namespace {

struct Standardized {
    Eigen::MatrixXd x;
    Eigen::VectorXd scale;  // L2 norm of the centred column, 0 for constant columns
};

// Centres each column and scales it to unit L2 norm.
Standardized standardize_columns(const Eigen::MatrixXd& x)
{
    Standardized s;
    s.x = x;
    s.scale = Eigen::VectorXd::Zero(x.cols());
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
        const double mean = x.col(k).mean();
        s.x.col(k).array() -= mean;
        const double norm = s.x.col(k).norm();
        const double floor = 1e-12 * std::sqrt(static_cast<double>(x.rows())) * (1.0 + std::abs(mean));
        if (norm > floor) {
            s.x.col(k) /= norm;
            s.scale(k) = norm;
        } else {
            s.x.col(k).setZero();
        }
    }
    return s;
}

Eigen::VectorXd to_original_scale(const Eigen::VectorXd& beta, const Eigen::VectorXd& scale, double target_scale)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(beta.size());
    for (Eigen::Index k = 0; k < beta.size(); ++k)
        if (scale(k) > 0.0) out(k) = beta(k) * target_scale / scale(k);
    return out;
}

}  // namespace

CausalGraph extract_edges(const std::vector<CoefficientBlock>& blocks, const std::vector<std::string>& joint_order,
                          const GgmConfig& config)
{
    const auto p = static_cast<Eigen::Index>(joint_order.size());
    const auto d = static_cast<Eigen::Index>(config.lag);
    if (static_cast<Eigen::Index>(blocks.size()) != p)
        throw Error(ErrorCode::DimensionMismatch, "expected one coefficient block per joint");
    CausalGraph g;
    g.joint_order = joint_order;
    g.adjacency = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        const auto& beta = blocks[static_cast<std::size_t>(i)].beta;
        if (beta.size() != p * d) throw Error(ErrorCode::DimensionMismatch, "coefficient block length must be p*d");
        for (Eigen::Index j = 0; j < p; ++j) {
            if (j == i) continue;
            if ((beta.segment(j * d, d).array().abs() > config.zero_threshold).any()) g.adjacency(j, i) = 1.0;
        }
    }
    return g;
}

GgmFit compute_ggm_fit(const mocap::GaitCycle& cycle, const GgmConfig& config)
{
    config.validate();
    const auto design = build_design_matrix(cycle, config.lag);
    const auto p = design.joint_count();
    const auto std_x = standardize_columns(design.values);

    GgmFit fit;
    fit.blocks.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        auto target = flatten_target(cycle, i, config.lag);
        Eigen::VectorXd y = target.values.array() - target.values.mean();
        const double y_norm = y.norm();
        if (y_norm > 1e-12 * std::sqrt(static_cast<double>(y.size())) * (1.0 + std::abs(target.values.mean())))
            y /= y_norm;
        else
            y.setZero();

        const auto gram = GramSystem::from(std_x.x, y);
        const Eigen::VectorXd mle = least_squares(gram);

        Eigen::VectorXd weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p));
        if (config.penalty == Penalty::AdaptiveLasso) {
            const auto norms = block_norms(mle, config.lag);
            for (Eigen::Index j = 0; j < weights.size(); ++j) weights(j) = 1.0 / std::max(norms(j), config.weight_floor);
        }
        const auto cv = cross_validate_lambda(std_x.x, y, expand_joint_weights(weights, config.lag), config);

        auto& block = fit.blocks[i];
        block.target = target.joint;
        block.weights = weights;
        block.lambda_selected = cv.lambda;
        block.beta = to_original_scale(cv.beta, std_x.scale, y_norm);
        block.mle_beta = to_original_scale(mle, std_x.scale, y_norm);
    }
    fit.graph = extract_edges(fit.blocks, design.joints, config);
    fit.graph.source_cycle = cycle.id();
    return fit;
}

CausalGraph compute_ggm(const mocap::GaitCycle& cycle, const GgmConfig& config)
{
    return compute_ggm_fit(cycle, config).graph;
}

std::string ggm_json(const GgmFit& fit, const GgmConfig& config)
{
    using nlohmann::json;
    json j;
    j["source_cycle"] = fit.graph.source_cycle;
    j["joint_order"] = fit.graph.joint_order;
    json adj = json::array();
    for (Eigen::Index r = 0; r < fit.graph.adjacency.rows(); ++r) {
        std::vector<int> row;
        for (Eigen::Index c = 0; c < fit.graph.adjacency.cols(); ++c) row.push_back(fit.graph.adjacency(r, c) != 0.0);
        adj.push_back(row);
    }
    j["adjacency"] = std::move(adj);
    j["config"] = {
        {"lag", config.lag},
        {"lambda_max", config.lambda_max},
        {"cv_folds", config.cv_folds},
        {"lambda_grid_size", config.lambda_grid_size},
        {"zero_threshold", config.zero_threshold},
        {"weight_floor", config.weight_floor},
        {"penalty", std::string(to_string(config.penalty))},
        {"cv_rule", std::string(to_string(config.cv_rule))},
    };
    json lambdas = json::object();
    for (const auto& b : fit.blocks) lambdas[b.target] = b.lambda_selected;
    j["lambda_selected"] = std::move(lambdas);
    return j.dump(2) + "\n";
}

}  // namespace gaitggm::granger
