#include "gaitggm/distances/svd.hpp"

#include "gaitggm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace gaitggm::distances {

Svd jacobi_svd(const Eigen::MatrixXd& a, const JacobiOptions& options)
{
    if (a.rows() < a.cols()) {
        Svd t = jacobi_svd(a.transpose(), options);
        Svd out;
        out.singular_values = std::move(t.singular_values);
        if (options.compute_vectors) {
            // a = v_t diag(s) u_t^T; keep u as m x n with zero columns beyond rank m.
            out.u = Eigen::MatrixXd::Zero(a.rows(), a.cols());
            out.u.leftCols(a.rows()) = t.v;
            out.v = Eigen::MatrixXd::Zero(a.cols(), a.cols());
            out.v.leftCols(a.rows()) = t.u;
            out.singular_values.conservativeResize(a.cols());
            out.singular_values.tail(a.cols() - a.rows()).setZero();
        } else {
            out.singular_values.conservativeResize(a.cols());
            out.singular_values.tail(a.cols() - a.rows()).setZero();
        }
        return out;
    }

    const Eigen::Index n = a.cols();
    Eigen::MatrixXd u = a;
    Eigen::MatrixXd v;
    if (options.compute_vectors) v = Eigen::MatrixXd::Identity(n, n);

    // Columns below this norm are rounding residue of a rank deficiency and are set to zero;
    // their direction is noise and would otherwise keep rotating.
    const double negligible = std::numeric_limits<double>::epsilon() * a.norm();
    const double negligible_sq = negligible * negligible;

    bool converged = n < 2;
    for (std::size_t sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
        converged = true;
        for (Eigen::Index i = 0; i < n - 1; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double alpha = u.col(i).squaredNorm();
                const double beta = u.col(j).squaredNorm();
                if (alpha <= negligible_sq || beta <= negligible_sq) {
                    if (alpha <= negligible_sq) u.col(i).setZero();
                    if (beta <= negligible_sq) u.col(j).setZero();
                    continue;
                }
                const double gamma = u.col(i).dot(u.col(j));
                if (std::abs(gamma) <= options.tolerance * std::sqrt(alpha * beta)) continue;
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index r = 0; r < u.rows(); ++r) {
                    const double ui = u(r, i);
                    const double uj = u(r, j);
                    u(r, i) = c * ui - s * uj;
                    u(r, j) = s * ui + c * uj;
                }
                if (options.compute_vectors) {
                    for (Eigen::Index r = 0; r < n; ++r) {
                        const double vi = v(r, i);
                        const double vj = v(r, j);
                        v(r, i) = c * vi - s * vj;
                        v(r, j) = s * vi + c * vj;
                    }
                }
            }
        }
    }
    if (!converged) throw Error(ErrorCode::EigenFailure, "Jacobi SVD did not converge within the sweep cap");

    Eigen::VectorXd sigma(n);
    for (Eigen::Index k = 0; k < n; ++k) sigma(k) = u.col(k).norm();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return sigma(x) > sigma(y); });

    Svd out;
    out.singular_values.resize(n);
    if (options.compute_vectors) {
        out.u = Eigen::MatrixXd::Zero(a.rows(), n);
        out.v.resize(n, n);
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.singular_values(k) = sigma(src);
        if (options.compute_vectors) {
            if (sigma(src) > 0.0) out.u.col(k) = u.col(src) / sigma(src);
            out.v.col(k) = v.col(src);
        }
    }
    return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a)
{
    JacobiOptions options;
    options.compute_vectors = false;
    return jacobi_svd(a, options).singular_values;
}

}  // namespace gaitggm::distances
