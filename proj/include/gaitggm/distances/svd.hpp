#pragma once

#include <Eigen/Core>

namespace gaitggm::distances {

/// a = u * diag(singular_values) * v^T, singular values nonnegative and
/// nonincreasing. u is m x n, v is n x n; columns of u paired with a zero
/// singular value are zero.
struct Svd {
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd u;
    Eigen::MatrixXd v;
};

struct JacobiOptions {
    double tolerance = 1e-12;  // |u_i . u_j| <= tolerance * ||u_i|| ||u_j|| for every column pair
    std::size_t max_sweeps = 1000;
    bool compute_vectors = true;
};

/// One-sided (Hestenes) Jacobi SVD for dense matrices with rows >= cols.
/// Wider inputs are handled through the transpose. Throws EigenFailure if the
/// sweep cap is reached before all column pairs are orthogonal.
Svd jacobi_svd(const Eigen::MatrixXd& a, const JacobiOptions& options = {});

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

}  // namespace gaitggm::distances
