#include "gaitggm/granger/regression.hpp"

#include "gaitggm/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gaitggm::granger {
namespace {

double soft_threshold(double v, double t) noexcept
{
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

double sign(double v) noexcept { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

constexpr std::size_t kPolishInterval = 32;  // full sweeps between active-set polish attempts

/// Stationary point of the quadratic on support S with signs s:
///   G_SS b_S = c_S - lambda / 2 * w_S * s_S.
/// `solution` holds b_S when the system is consistent (least-norm if G_SS is
/// singular); otherwise `direction` holds a null-space vector along which the
/// restricted objective decreases linearly.
struct SupportStep {
    Eigen::VectorXd solution;
    Eigen::VectorXd direction;
};

std::optional<SupportStep> solve_on_support(const GramSystem& g, const Eigen::VectorXd& w, double lambda,
                                            const std::vector<Eigen::Index>& support, const Eigen::VectorXd& signs)
{
    const auto m = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd ga(m, m);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) ga(a, b) = g.gram(support[a], support[b]);
        rhs(a) = g.xty(support[a]) - 0.5 * lambda * w(support[a]) * signs(support[a]);
    }
    SupportStep out;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(ga);
    if (ldlt.info() == Eigen::Success) {
        const auto d = ldlt.vectorD().cwiseAbs();
        if (d.minCoeff() > 1e-10 * d.maxCoeff()) {
            out.solution = ldlt.solve(rhs);
            if (out.solution.allFinite()) return out;
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ga);
    if (eig.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const double cutoff = 1e-10 * std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const Eigen::VectorXd proj = eig.eigenvectors().transpose() * rhs;
    Eigen::VectorXd range = Eigen::VectorXd::Zero(m), null = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (ev(i) > cutoff) range(i) = proj(i) / ev(i);
        else null(i) = proj(i);
    }
    if (null.norm() <= 1e-10 * std::max(rhs.norm(), 1.0)) {
        out.solution = eig.eigenvectors() * range;
    } else {
        out.direction = eig.eigenvectors() * null;
    }
    if (!out.solution.allFinite() || !out.direction.allFinite()) return std::nullopt;
    return out;
}

/// Active-set polish from a sign-consistent start. Each step solves the
/// stationarity conditions on the support; a sign flip moves to the first
/// zero crossing on the segment and drops that coefficient, otherwise the worst
/// KKT violator outside the support joins it. The objective never increases.
/// Returns nullopt on a singular support or when max_steps runs out.
std::optional<Eigen::VectorXd> polish_active_set(const GramSystem& g, const Eigen::VectorXd& w, double lambda,
                                                 const Eigen::VectorXd& start, std::size_t max_steps)
{
    const auto p = start.size();
    Eigen::VectorXd cur = start;
    Eigen::VectorXd signs = Eigen::VectorXd::Zero(p);
    std::vector<Eigen::Index> support;
    for (Eigen::Index k = 0; k < p; ++k)
        if (cur(k) != 0.0) {
            signs(k) = sign(cur(k));
            support.push_back(k);
        }
    const double scale = std::max(1.0, g.xty.cwiseAbs().maxCoeff());
    for (std::size_t step = 0; step < max_steps; ++step) {
        Eigen::VectorXd target = Eigen::VectorXd::Zero(p);
        bool unbounded = false;
        if (!support.empty()) {
            const auto sol = solve_on_support(g, w, lambda, support, signs);
            if (!sol) return std::nullopt;
            unbounded = sol->direction.size() > 0;
            const Eigen::VectorXd& v = unbounded ? sol->direction : sol->solution;
            for (std::size_t a = 0; a < support.size(); ++a) target(support[a]) = v(static_cast<Eigen::Index>(a));
        }

        // Segment cur -> target, or the ray cur + t * direction when unbounded.
        const Eigen::VectorXd move = unbounded ? target : Eigen::VectorXd(target - cur);
        double t = unbounded ? std::numeric_limits<double>::infinity() : 1.0;
        Eigen::Index blocking = -1;
        for (const auto k : support) {
            if (unbounded ? move(k) * signs(k) >= 0.0 : target(k) * signs(k) > 0.0) continue;
            const double along = cur(k) * signs(k) > 0.0 ? -cur(k) / move(k) : 0.0;
            if (along < t) {
                t = along;
                blocking = k;
            }
        }
        if (unbounded && blocking < 0) return std::nullopt;
        if (blocking >= 0) {
            cur += t * move;
            std::vector<Eigen::Index> kept;
            for (const auto k : support) {
                if (k == blocking || cur(k) * signs(k) <= 0.0) {
                    cur(k) = 0.0;
                    signs(k) = 0.0;
                } else {
                    kept.push_back(k);
                }
            }
            support = std::move(kept);
            continue;
        }

        cur = target;
        const Eigen::VectorXd grad = 2.0 * (g.gram * cur - g.xty);
        Eigen::Index worst = -1;
        double worst_excess = 1e-13 * scale;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (signs(k) != 0.0 || !(g.gram(k, k) > 0.0)) continue;
            const double excess = std::abs(grad(k)) - lambda * w(k);
            if (excess > worst_excess) {
                worst_excess = excess;
                worst = k;
            }
        }
        if (worst < 0) return cur;
        signs(worst) = -sign(grad(worst));
        support.insert(std::upper_bound(support.begin(), support.end(), worst), worst);
    }
    return std::nullopt;
}

}  // namespace

GramSystem GramSystem::from(const Eigen::MatrixXd& x, const Eigen::VectorXd& y)
{
    if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "design and target row counts differ");
    GramSystem g;
    g.gram = x.transpose() * x;
    g.xty = x.transpose() * y;
    g.yty = y.squaredNorm();
    return g;
}

Eigen::VectorXd least_squares(const GramSystem& g)
{
    const auto p = g.gram.rows();
    if (p == 0) return {};
    const double mean_diag = g.gram.diagonal().mean();
    if (!(mean_diag > 0.0)) return Eigen::VectorXd::Zero(p);

    Eigen::LDLT<Eigen::MatrixXd> ldlt(g.gram);
    if (ldlt.info() == Eigen::Success) {
        const auto d = ldlt.vectorD().cwiseAbs();
        if (ldlt.isPositive() && d.minCoeff() >= 1e-8 * d.maxCoeff()) {
            Eigen::VectorXd b = ldlt.solve(g.xty);
            if (b.allFinite()) return b;
        }
    }
    const double ridge = 1e-6 * mean_diag;
    Eigen::MatrixXd reg = g.gram;
    reg.diagonal().array() += ridge;
    return Eigen::LLT<Eigen::MatrixXd>(reg).solve(g.xty);
}

double kkt_residual(const GramSystem& g, const Eigen::VectorXd& w, double lambda, const Eigen::VectorXd& beta)
{
    const Eigen::VectorXd grad = 2.0 * (g.gram * beta - g.xty);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < beta.size(); ++k) {
        const double bound = lambda * w(k);
        const double v = beta(k) != 0.0 ? std::abs(grad(k) + bound * sign(beta(k)))
                                        : std::max(0.0, std::abs(grad(k)) - bound);
        worst = std::max(worst, v);
    }
    return worst;
}

double full_shrinkage_bound(const GramSystem& g, const Eigen::VectorXd& w)
{
    double bound = 0.0;
    for (Eigen::Index k = 0; k < g.xty.size(); ++k)
        if (g.xty(k) != 0.0) bound = std::max(bound, 2.0 * std::abs(g.xty(k)) / w(k));
    return bound;
}

Eigen::VectorXd weighted_lasso(const GramSystem& g, const Eigen::VectorXd& w, double lambda,
                               const LassoOptions& options, const Eigen::VectorXd* warm_start)
{
    const auto p = g.gram.rows();
    if (w.size() != p) throw Error(ErrorCode::DimensionMismatch, "one weight per column required");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidConfig, "lambda must be >= 0");
    if ((w.array() <= 0.0).any() || !w.allFinite())
        throw Error(ErrorCode::InvalidConfig, "penalty weights must be positive and finite");

    Eigen::VectorXd beta = warm_start && warm_start->size() == p ? *warm_start : Eigen::VectorXd::Zero(p);
    for (Eigen::Index k = 0; k < p; ++k)
        if (!(g.gram(k, k) > 0.0)) beta(k) = 0.0;
    Eigen::VectorXd gb = g.gram * beta;

    const auto update = [&](Eigen::Index k) {
        const double gkk = g.gram(k, k);
        if (!(gkk > 0.0)) return 0.0;
        const double rho = g.xty(k) - (gb(k) - gkk * beta(k));
        const double next = soft_threshold(rho, 0.5 * lambda * w(k)) / gkk;
        const double delta = next - beta(k);
        if (delta != 0.0) {
            gb.noalias() += g.gram.col(k) * delta;
            beta(k) = next;
        }
        return std::abs(delta);
    };

    // Full sweeps decide convergence; between them, sweeps over the nonzero
    // coefficients only run until they settle.
    bool converged = false;
    std::vector<Eigen::Index> active;
    std::size_t inner_budget = options.max_sweeps;  // active-only sweeps, shared across the call
    const auto polish_steps = static_cast<std::size_t>(4 * p + 16);
    for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (Eigen::Index k = 0; k < p; ++k) max_delta = std::max(max_delta, update(k));
        if (max_delta < options.tolerance) {
            converged = true;
            break;
        }
        active.clear();
        for (Eigen::Index k = 0; k < p; ++k)
            if (beta(k) != 0.0) active.push_back(k);
        for (; inner_budget > 0; --inner_budget) {
            double inner_delta = 0.0;
            for (const auto k : active) inner_delta = std::max(inner_delta, update(k));
            if (inner_delta < options.tolerance) break;
        }
        if (sweep % kPolishInterval == kPolishInterval - 1) {
            if (auto polished = polish_active_set(g, w, lambda, beta, polish_steps)) {
                if (kkt_residual(g, w, lambda, *polished) <= 0.1 * options.kkt_tolerance) {
                    beta = std::move(*polished);
                    converged = true;
                    break;
                }
            }
        }
    }

    double residual = kkt_residual(g, w, lambda, beta);
    if (residual > 0.0) {
        auto refined = polish_active_set(g, w, lambda, beta, polish_steps);
        if (!refined) refined = polish_active_set(g, w, lambda, Eigen::VectorXd::Zero(p), polish_steps);
        if (refined) {
            const double r2 = kkt_residual(g, w, lambda, *refined);
            if (r2 <= residual) {
                beta = std::move(*refined);
                residual = r2;
            }
        }
    }
    if (!converged && residual > options.kkt_tolerance)
        throw Error(ErrorCode::NonConvergence, "coordinate descent hit " + std::to_string(options.max_sweeps) +
                                                   " sweeps with KKT residual " + std::to_string(residual));
    return beta;
}

Eigen::VectorXd expand_joint_weights(const Eigen::VectorXd& joint_weights, std::size_t lag)
{
    Eigen::VectorXd out(joint_weights.size() * static_cast<Eigen::Index>(lag));
    for (Eigen::Index j = 0; j < joint_weights.size(); ++j)
        out.segment(j * static_cast<Eigen::Index>(lag), static_cast<Eigen::Index>(lag)).setConstant(joint_weights(j));
    return out;
}

Eigen::VectorXd block_norms(const Eigen::VectorXd& beta, std::size_t lag)
{
    const auto d = static_cast<Eigen::Index>(lag);
    Eigen::VectorXd out(beta.size() / d);
    for (Eigen::Index j = 0; j < out.size(); ++j) out(j) = beta.segment(j * d, d).cwiseAbs().sum();
    return out;
}

Eigen::VectorXd mle_estimate(const DesignMatrix& design, const FlatTarget& target)
{
    return least_squares(GramSystem::from(design.values, target.values));
}

Eigen::VectorXd adaptive_lasso_fit(const DesignMatrix& design, const FlatTarget& target,
                                   const Eigen::VectorXd& joint_weights, double lambda, const LassoOptions& options)
{
    if (joint_weights.size() != static_cast<Eigen::Index>(design.joint_count()))
        throw Error(ErrorCode::DimensionMismatch, "one weight per joint required");
    return weighted_lasso(GramSystem::from(design.values, target.values),
                          expand_joint_weights(joint_weights, design.lag), lambda, options);
}

std::vector<double> lambda_grid(double lambda_max, std::size_t size)
{
    if (!(lambda_max > 0.0) || size == 0) throw Error(ErrorCode::InvalidConfig, "invalid lambda grid");
    std::vector<double> grid(size);
    if (size == 1) {
        grid[0] = lambda_max;
        return grid;
    }
    const double lo = std::log(lambda_max * 1e-3);
    const double hi = std::log(lambda_max);
    for (std::size_t i = 0; i < size; ++i)
        grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(size - 1));
    grid.back() = lambda_max;
    return grid;
}

CrossValidation cross_validate_lambda(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& w, const GgmConfig& config)
{
    config.validate();
    if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "design and target row counts differ");
    if (x.rows() % 3 != 0) throw Error(ErrorCode::DimensionMismatch, "rows must come in coordinate triples");
    const auto time_points = static_cast<std::size_t>(x.rows() / 3);
    const auto folds = config.cv_folds;
    if (folds > time_points)
        throw Error(ErrorCode::InvalidConfig, std::to_string(folds) + " folds exceed " +
                                                  std::to_string(time_points) + " prediction time points");

    LassoOptions opts{config.max_sweeps, config.cd_tolerance, config.kkt_tolerance};
    const auto full = GramSystem::from(x, y);

    CrossValidation cv;
    cv.grid = lambda_grid(config.lambda_max, config.lambda_grid_size);
    cv.mean_error.assign(cv.grid.size(), 0.0);
    std::vector<double> sum_sq(cv.grid.size(), 0.0);

    for (std::size_t f = 0; f < folds; ++f) {
        const auto t0 = static_cast<Eigen::Index>(f * time_points / folds);
        const auto t1 = static_cast<Eigen::Index>((f + 1) * time_points / folds);
        const auto r0 = 3 * t0;
        const auto rows = 3 * (t1 - t0);
        const Eigen::MatrixXd xv = x.middleRows(r0, rows);
        const Eigen::VectorXd yv = y.segment(r0, rows);
        const auto held = GramSystem::from(xv, yv);
        GramSystem train;
        train.gram = full.gram - held.gram;
        train.xty = full.xty - held.xty;
        train.yty = full.yty - held.yty;

        Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
        for (std::size_t gi = cv.grid.size(); gi-- > 0;) {
            beta = weighted_lasso(train, w, cv.grid[gi], opts, &beta);
            const double mse = (yv - xv * beta).squaredNorm() / static_cast<double>(rows);
            cv.mean_error[gi] += mse;
            sum_sq[gi] += mse * mse;
        }
    }
    const double k = static_cast<double>(folds);
    cv.standard_error.assign(cv.grid.size(), 0.0);
    for (std::size_t gi = 0; gi < cv.grid.size(); ++gi) {
        cv.mean_error[gi] /= k;
        const double var = std::max(0.0, (sum_sq[gi] / k - cv.mean_error[gi] * cv.mean_error[gi]) * k / (k - 1.0));
        cv.standard_error[gi] = std::sqrt(var / k);
    }

    std::size_t best = cv.grid.size() - 1;
    for (std::size_t gi = cv.grid.size(); gi-- > 0;)
        if (cv.mean_error[gi] < cv.mean_error[best]) best = gi;
    if (config.cv_rule == CvRule::OneStandardError) {
        const double limit = cv.mean_error[best] + cv.standard_error[best];
        for (std::size_t gi = cv.grid.size(); gi-- > best;)
            if (cv.mean_error[gi] <= limit) {
                best = gi;
                break;
            }
    }
    cv.lambda = cv.grid[best];
    cv.beta = weighted_lasso(full, w, cv.lambda, opts);
    return cv;
}

CrossValidation cross_validate_lambda(const DesignMatrix& design, const FlatTarget& target,
                                      const Eigen::VectorXd& joint_weights, const GgmConfig& config)
{
    if (joint_weights.size() != static_cast<Eigen::Index>(design.joint_count()))
        throw Error(ErrorCode::DimensionMismatch, "one weight per joint required");
    return cross_validate_lambda(design.values, target.values, expand_joint_weights(joint_weights, design.lag),
                                 config);
}

InformationCriteria information_criteria(const DesignMatrix& design, const FlatTarget& target,
                                         const Eigen::VectorXd& beta, double zero_threshold)
{
    if (beta.size() != design.values.cols())
        throw Error(ErrorCode::DimensionMismatch, "coefficient length differs from design columns");
    if (target.values.size() != design.values.rows())
        throw Error(ErrorCode::DimensionMismatch, "design and target row counts differ");
    InformationCriteria ic;
    ic.observations = static_cast<std::size_t>(design.values.rows());
    ic.rss = (target.values - design.values * beta).squaredNorm();
    if (ic.rss == 0.0) throw Error(ErrorCode::ZeroResidual, "residual sum of squares is zero");
    ic.nonzero = static_cast<std::size_t>((beta.array().abs() > zero_threshold).count());
    const double n = static_cast<double>(ic.observations);
    const double fit = n * std::log(ic.rss / n);
    ic.aic = fit + 2.0 * static_cast<double>(ic.nonzero);
    ic.bic = fit + static_cast<double>(ic.nonzero) * std::log(n);
    return ic;
}

}  // namespace gaitggm::granger
