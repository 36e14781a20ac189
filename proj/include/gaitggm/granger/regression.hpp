#pragma once

#include "gaitggm/granger/config.hpp"
#include "gaitggm/granger/design.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace gaitggm::granger {

struct LassoOptions {
    std::size_t max_sweeps = 10000;
    double tolerance = 1e-9;      // stop when the largest coefficient update is below this
    double kkt_tolerance = 1e-6;  // accepted KKT residual after the sweep cap
};

/// Sufficient statistics of a least-squares problem: X'X, X'y, y'y.
struct GramSystem {
    Eigen::MatrixXd gram;
    Eigen::VectorXd xty;
    double yty = 0.0;

    static GramSystem from(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
};

/// Ridge-stabilised least squares. Solves X'X b = X'y directly when X'X is
/// numerically well conditioned (smallest LDLT pivot >= 1e-8 of the largest);
/// otherwise adds 1e-6 * mean(diag X'X) to the diagonal. All-zero X gives b = 0.
Eigen::VectorXd least_squares(const GramSystem& g);

/// Weighted lasso by cyclic coordinate descent on the Gram system:
///   minimise ||y - X b||^2 + lambda * sum_k w_k |b_k|
/// Full sweeps alternate with sweeps over the nonzero coefficients only; a full
/// sweep with every update below options.tolerance ends the descent, which is
/// followed by an exact active-set refinement. Throws NonConvergence if the sweep
/// cap is hit and the KKT residual still exceeds options.kkt_tolerance.
Eigen::VectorXd weighted_lasso(const GramSystem& g, const Eigen::VectorXd& column_weights, double lambda,
                               const LassoOptions& options = {}, const Eigen::VectorXd* warm_start = nullptr);

/// Largest violation of the lasso optimality conditions, with g = 2 X'(X b - y):
///   |g_k + lambda w_k sign(b_k)| if b_k != 0,   max(0, |g_k| - lambda w_k) otherwise.
double kkt_residual(const GramSystem& g, const Eigen::VectorXd& column_weights, double lambda,
                    const Eigen::VectorXd& beta);

/// Smallest lambda for which b = 0 is optimal: max_k |2 (X'y)_k| / w_k.
double full_shrinkage_bound(const GramSystem& g, const Eigen::VectorXd& column_weights);

/// Per-joint weights repeated over each joint's lag block.
Eigen::VectorXd expand_joint_weights(const Eigen::VectorXd& joint_weights, std::size_t lag);

/// Sum of |b| over each joint's block.
Eigen::VectorXd block_norms(const Eigen::VectorXd& beta, std::size_t lag);

/// Initial Gaussian ML estimate (least squares, ridge-stabilised under collinearity).
Eigen::VectorXd mle_estimate(const DesignMatrix& design, const FlatTarget& target);

/// Adaptive-lasso fit with one weight per joint, shared by the joint's lags.
Eigen::VectorXd adaptive_lasso_fit(const DesignMatrix& design, const FlatTarget& target,
                                   const Eigen::VectorXd& joint_weights, double lambda,
                                   const LassoOptions& options = {});

/// Log-spaced grid of `size` values from lambda_max * 1e-3 up to lambda_max (ascending).
std::vector<double> lambda_grid(double lambda_max, std::size_t size);

struct CrossValidation {
    double lambda = 0.0;
    Eigen::VectorXd beta;            // refit on all rows at lambda
    std::vector<double> grid;        // ascending
    std::vector<double> mean_error;  // mean validation MSE per grid point
    std::vector<double> standard_error;  // of the fold MSEs around mean_error
};

/// Blocked K-fold cross-validation over prediction time points (three rows each):
/// fold f holds a contiguous run of time points. CvRule::MinError picks the grid
/// value with the smallest mean validation MSE (the larger lambda on ties);
/// CvRule::OneStandardError picks the largest lambda whose mean error is within
/// one standard error of that minimum. Refits on all rows at the chosen lambda.
CrossValidation cross_validate_lambda(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& column_weights, const GgmConfig& config);

CrossValidation cross_validate_lambda(const DesignMatrix& design, const FlatTarget& target,
                                      const Eigen::VectorXd& joint_weights, const GgmConfig& config);

struct InformationCriteria {
    double aic = 0.0;
    double bic = 0.0;
    double rss = 0.0;
    std::size_t observations = 0;  // N = 3 (n - d)
    std::size_t nonzero = 0;       // k
};

/// AIC = N ln(RSS/N) + 2k, BIC = N ln(RSS/N) + k ln N, k = #{|b| > zero_threshold}.
/// Throws ZeroResidual when RSS == 0.
InformationCriteria information_criteria(const DesignMatrix& design, const FlatTarget& target,
                                         const Eigen::VectorXd& beta, double zero_threshold = 1e-8);

}  // namespace gaitggm::granger
