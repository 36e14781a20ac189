#include "gaitggm/distances/distance.hpp"

#include "gaitggm/distances/svd.hpp"
#include "gaitggm/error.hpp"
#include "gaitggm/util/parallel.hpp"
#include "gaitggm/util/text.hpp"

#include <cmath>

namespace gaitggm::distances {
namespace {

void check_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw Error(ErrorCode::DimensionMismatch, "adjacency matrices must be square");
    if (a.rows() != b.rows())
        throw Error(ErrorCode::DimensionMismatch, "adjacency matrices have different sizes (" +
                                                      std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) + ")");
}

Eigen::VectorXd abs_difference_spectrum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    check_pair(a, b);
    return singular_values((a - b).cwiseAbs());
}

Eigen::Map<const Eigen::VectorXd> vec(const Eigen::MatrixXd& m)
{
    return {m.data(), m.size()};
}

}  // namespace

std::string DistanceFunctionId::name() const
{
    switch (kind) {
    case DistanceKind::Total: return "total";
    case DistanceKind::Frobenius: return "frobenius";
    case DistanceKind::Max: return "max";
    case DistanceKind::Jaccard: return "jaccard";
    case DistanceKind::Hamming: return "hamming";
    case DistanceKind::RowSum: return "row_sum";
    case DistanceKind::ColSum: return "col_sum";
    case DistanceKind::Spectral: return "spectral";
    case DistanceKind::KyFan: return "kyfan" + std::to_string(k);
    case DistanceKind::HilbertSchmidt: return "hilbert_schmidt";
    case DistanceKind::Mahalanobis: return "mahalanobis";
    }
    return "unknown";
}

DistanceFunctionId parse_distance_id(std::string_view s)
{
    const std::string name = util::to_lower(util::trim(s));
    static const std::pair<const char*, DistanceKind> simple[] = {
        {"total", DistanceKind::Total},
        {"frobenius", DistanceKind::Frobenius},
        {"max", DistanceKind::Max},
        {"jaccard", DistanceKind::Jaccard},
        {"hamming", DistanceKind::Hamming},
        {"row_sum", DistanceKind::RowSum},
        {"col_sum", DistanceKind::ColSum},
        {"spectral", DistanceKind::Spectral},
        {"hilbert_schmidt", DistanceKind::HilbertSchmidt},
        {"mahalanobis", DistanceKind::Mahalanobis},
    };
    for (const auto& [n, kind] : simple)
        if (name == n) return {kind, 1};
    if (name.rfind("kyfan", 0) == 0) {
        std::string_view rest = std::string_view(name).substr(5);
        if (rest.empty()) return {DistanceKind::KyFan, 1};
        if (rest.front() == '(' && rest.back() == ')') rest = rest.substr(1, rest.size() - 2);
        const auto k = util::parse_int(rest);
        if (k && *k >= 1) return {DistanceKind::KyFan, static_cast<std::size_t>(*k)};
    }
    throw Error(ErrorCode::InvalidConfig, "unknown distance function '" + std::string(s) + "'");
}

std::vector<DistanceFunctionId> all_distance_ids()
{
    return {
        {DistanceKind::Total, 1},   {DistanceKind::Frobenius, 1}, {DistanceKind::Max, 1},
        {DistanceKind::Jaccard, 1}, {DistanceKind::Hamming, 1},   {DistanceKind::RowSum, 1},
        {DistanceKind::ColSum, 1},  {DistanceKind::Spectral, 1},  {DistanceKind::KyFan, 1},
        {DistanceKind::HilbertSchmidt, 1}, {DistanceKind::Mahalanobis, 1},
    };
}

double total_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    check_pair(a, b);
    return (a - b).cwiseAbs().sum();
}

double frobenius_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    check_pair(a, b);
    return (a - b).norm();
}

double max_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    check_pair(a, b);
    if (a.size() == 0) return 0.0;
    return static_cast<double>(a.rows()) * (a - b).cwiseAbs().maxCoeff();
}

double jaccard_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    check_pair(a, b);
    const double hi = a.cwiseMax(b).norm();
    if (hi == 0.0) throw Error(ErrorCode::JaccardUndefined, "Jaccard distance undefined: ||max(A, A')|| is zero");
    return a.cwiseMin(b).norm() / hi;
}

double hamming_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    check_pair(a, b);
    const auto p = static_cast<double>(a.rows());
    if (a.rows() < 2) throw Error(ErrorCode::DimensionMismatch, "Hamming distance needs p >= 2");
    return (a.cwiseMax(b).norm() - a.cwiseMin(b).norm()) / (p * (p - 1.0));
}

double row_sum_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    check_pair(a, b);
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().rowwise().sum().maxCoeff();
}

double col_sum_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    check_pair(a, b);
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().colwise().sum().maxCoeff();
}

double spectral_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    check_pair(a, b);
    if (a.size() == 0) return 0.0;
    return singular_values(a - b)(0);
}

double kyfan_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t k)
{
    check_pair(a, b);
    if (k < 1 || k > static_cast<std::size_t>(a.rows()))
        throw Error(ErrorCode::InvalidConfig, "Ky-Fan order " + std::to_string(k) + " outside [1, " +
                                                  std::to_string(a.rows()) + "]");
    return abs_difference_spectrum(a, b).head(static_cast<Eigen::Index>(k)).sum();
}

double hilbert_schmidt_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    const Eigen::VectorXd s = abs_difference_spectrum(a, b);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < s.size() && s(i) > 0.0; ++i) sum += s(i) * s(i);
    return std::sqrt(sum);
}

ScatterModel::ScatterModel(Eigen::MatrixXd sigma_t, Eigen::VectorXd mean, std::size_t p, double gamma)
    : sigma_t_(std::move(sigma_t)), mean_(std::move(mean)), p_(p), gamma_(gamma)
{
    const auto dim = static_cast<Eigen::Index>(p * p);
    if (sigma_t_.rows() != dim || sigma_t_.cols() != dim || mean_.size() != dim)
        throw Error(ErrorCode::DimensionMismatch, "scatter matrix must be p^2 x p^2");
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) throw Error(ErrorCode::InvalidConfig, "gamma must be > 0");
    Eigen::MatrixXd reg = sigma_t_;
    reg.diagonal().array() += gamma_;
    factor_.compute(reg);
    if (factor_.info() != Eigen::Success)
        throw Error(ErrorCode::EigenFailure, "regularised scatter matrix is not positive definite");
}

Eigen::VectorXd ScatterModel::whiten(const Eigen::MatrixXd& a) const
{
    if (a.rows() != static_cast<Eigen::Index>(p_) || a.cols() != static_cast<Eigen::Index>(p_))
        throw Error(ErrorCode::DimensionMismatch, "matrix size differs from the scatter model");
    return factor_.matrixL().solve(vec(a));
}

Eigen::VectorXd ScatterModel::solve(const Eigen::VectorXd& v) const
{
    if (v.size() != static_cast<Eigen::Index>(p_ * p_))
        throw Error(ErrorCode::DimensionMismatch, "vector size differs from the scatter model");
    return factor_.solve(v);
}

ScatterModel fit_scatter(const std::vector<Eigen::MatrixXd>& dataset, std::optional<double> gamma)
{
    if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "scatter model needs at least one matrix");
    const auto p = dataset.front().rows();
    for (const auto& m : dataset)
        if (m.rows() != p || m.cols() != p) throw Error(ErrorCode::DimensionMismatch, "dataset matrices differ in size");
    const Eigen::Index dim = p * p;
    const auto n = static_cast<Eigen::Index>(dataset.size());

    Eigen::MatrixXd centred(dim, n);
    for (Eigen::Index s = 0; s < n; ++s) centred.col(s) = vec(dataset[static_cast<std::size_t>(s)]);
    const Eigen::VectorXd mean = centred.rowwise().mean();
    centred.colwise() -= mean;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(dim, dim);
    sigma.selfadjointView<Eigen::Lower>().rankUpdate(centred);
    sigma.triangularView<Eigen::StrictlyUpper>() = sigma.transpose();

    double g = 0.0;
    if (gamma) {
        g = *gamma;
    } else {
        const double trace = sigma.trace();
        g = trace > 0.0 ? 1e-6 * trace / static_cast<double>(dim) : 1e-6;
    }
    return ScatterModel(std::move(sigma), mean, static_cast<std::size_t>(p), g);
}

double mahalanobis_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const ScatterModel& model)
{
    check_pair(a, b);
    return (model.whiten(a) - model.whiten(b)).norm();
}

double distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const DistanceFunctionId& id,
                const ScatterModel* model)
{
    switch (id.kind) {
    case DistanceKind::Total: return total_distance(a, b);
    case DistanceKind::Frobenius: return frobenius_distance(a, b);
    case DistanceKind::Max: return max_distance(a, b);
    case DistanceKind::Jaccard: return jaccard_distance(a, b);
    case DistanceKind::Hamming: return hamming_distance(a, b);
    case DistanceKind::RowSum: return row_sum_distance(a, b);
    case DistanceKind::ColSum: return col_sum_distance(a, b);
    case DistanceKind::Spectral: return spectral_distance(a, b);
    case DistanceKind::KyFan: return kyfan_distance(a, b, id.k);
    case DistanceKind::HilbertSchmidt: return hilbert_schmidt_distance(a, b);
    case DistanceKind::Mahalanobis:
        if (!model) throw Error(ErrorCode::MissingScatterModel, "mahalanobis distance needs a fitted scatter model");
        return mahalanobis_distance(a, b, *model);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown distance function");
}

Eigen::MatrixXd distance_matrix(const std::vector<Eigen::MatrixXd>& graphs, const DistanceFunctionId& id,
                                const ScatterModel* model, std::size_t jobs)
{
    const auto n = graphs.size();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (id.kind == DistanceKind::Mahalanobis) {
        if (!model) throw Error(ErrorCode::MissingScatterModel, "mahalanobis distance needs a fitted scatter model");
        std::vector<Eigen::VectorXd> white(n);
        util::parallel_for(n, jobs, [&](std::size_t i) { white[i] = model->whiten(graphs[i]); });
        util::parallel_for(n, jobs, [&](std::size_t i) {
            for (std::size_t j = i + 1; j < n; ++j)
                d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (white[i] - white[j]).norm();
        });
    } else {
        util::parallel_for(n, jobs, [&](std::size_t i) {
            for (std::size_t j = i; j < n; ++j)
                d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = distance(graphs[i], graphs[j], id, model);
        });
    }
    d.triangularView<Eigen::StrictlyLower>() = d.transpose();
    return d;
}

std::string distance_matrix_csv(const std::vector<std::string>& ids, const Eigen::MatrixXd& d)
{
    if (static_cast<Eigen::Index>(ids.size()) != d.rows() || d.rows() != d.cols())
        throw Error(ErrorCode::DimensionMismatch, "one id per distance-matrix row required");
    std::string out = "id";
    for (const auto& id : ids) out += ',' + id;
    out += '\n';
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
        out += ids[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < d.cols(); ++c) out += ',' + util::format_double(d(r, c));
        out += '\n';
    }
    return out;
}

}  // namespace gaitggm::distances
