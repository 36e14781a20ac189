#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaitggm::distances {

enum class DistanceKind {
    Total,
    Frobenius,
    Max,
    Jaccard,
    Hamming,
    RowSum,
    ColSum,
    Spectral,
    KyFan,
    HilbertSchmidt,
    Mahalanobis,
};

struct DistanceFunctionId {
    DistanceKind kind = DistanceKind::Total;
    std::size_t k = 1;  // Ky-Fan order, 1 <= k <= p

    /// "total", "frobenius", ..., "kyfan1", "kyfan3", "hilbert_schmidt", "mahalanobis".
    std::string name() const;
    bool operator==(const DistanceFunctionId&) const = default;
};

/// Accepts the names produced by name() plus "kyfan" (k = 1) and "kyfan(k)".
/// Throws InvalidConfig.
DistanceFunctionId parse_distance_id(std::string_view s);

/// The eleven functions in table order, with Ky-Fan at k = 1.
std::vector<DistanceFunctionId> all_distance_ids();

// Vector-norm distances. All throw DimensionMismatch unless a and b are square and equal-sized.
double total_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double frobenius_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
/// p * max |a - b|.
double max_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
/// ||min(a, b)||_2 / ||max(a, b)||_2 elementwise, a similarity (1 on identical
/// nonzero inputs). Throws JaccardUndefined when ||max(a, b)||_2 == 0.
double jaccard_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
/// (||max(a, b)||_2 - ||min(a, b)||_2) / (p (p - 1)). Throws DimensionMismatch for p < 2.
double hamming_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Operator-norm distances.
double row_sum_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double col_sum_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
/// Largest singular value of a - b.
double spectral_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Singular-value distances, taken on the elementwise absolute difference |a - b|.
/// Sum of the k largest singular values. Throws InvalidConfig unless 1 <= k <= p.
double kyfan_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t k);
/// sqrt of the sum of squared nonzero singular values.
double hilbert_schmidt_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Total scatter of vectorised (column-major) p x p matrices:
/// sigma_t = sum_s (v_s - mean)(v_s - mean)^T, with the factorisation of
/// sigma_t + gamma I cached.
class ScatterModel {
public:
    ScatterModel() = default;
    ScatterModel(Eigen::MatrixXd sigma_t, Eigen::VectorXd mean, std::size_t p, double gamma);

    std::size_t dimension() const noexcept { return p_; }
    double gamma() const noexcept { return gamma_; }
    const Eigen::MatrixXd& sigma_t() const noexcept { return sigma_t_; }
    const Eigen::VectorXd& mean() const noexcept { return mean_; }

    /// L^-1 vec(a) where L L^T = sigma_t + gamma I, so that
    /// mahalanobis(a, b) = ||whiten(a) - whiten(b)||.
    Eigen::VectorXd whiten(const Eigen::MatrixXd& a) const;
    /// (sigma_t + gamma I)^-1 v.
    Eigen::VectorXd solve(const Eigen::VectorXd& v) const;

private:
    Eigen::MatrixXd sigma_t_;
    Eigen::VectorXd mean_;
    std::size_t p_ = 0;
    double gamma_ = 0.0;
    Eigen::LLT<Eigen::MatrixXd> factor_;
};

/// gamma defaults to 1e-6 * trace(sigma_t) / p^2, or 1e-6 when the trace is zero.
/// Throws EmptyDataset, DimensionMismatch, InvalidConfig (gamma <= 0) and
/// EigenFailure if the regularised matrix cannot be factorised.
ScatterModel fit_scatter(const std::vector<Eigen::MatrixXd>& dataset, std::optional<double> gamma = std::nullopt);

/// sqrt(d^T (sigma_t + gamma I)^-1 d), d = vec(a) - vec(b).
double mahalanobis_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const ScatterModel& model);

/// Dispatch. Throws MissingScatterModel for mahalanobis without a model.
double distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const DistanceFunctionId& id,
                const ScatterModel* model = nullptr);

/// Symmetric n x n matrix of pairwise distances; entry (i, i) is distance(g_i, g_i).
/// Rows are computed on up to `jobs` threads with identical results for any job count.
Eigen::MatrixXd distance_matrix(const std::vector<Eigen::MatrixXd>& graphs, const DistanceFunctionId& id,
                                const ScatterModel* model = nullptr, std::size_t jobs = 1);

/// Header "id,<id_1>,...,<id_n>", then one row per sample led by its id.
std::string distance_matrix_csv(const std::vector<std::string>& ids, const Eigen::MatrixXd& d);

}  // namespace gaitggm::distances
