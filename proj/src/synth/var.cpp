#include "gaitggm/synth/var.hpp"

#include "gaitggm/error.hpp"

#include <cmath>
#include <numbers>

namespace gaitggm::synth {

std::uint64_t CounterRng::next() noexcept
{
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform() noexcept
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double CounterRng::gaussian() noexcept
{
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::MatrixXd companion_matrix(const VarProcess& proc)
{
    const auto p = static_cast<Eigen::Index>(proc.p);
    const auto d = static_cast<Eigen::Index>(proc.order());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p * d, p * d);
    for (Eigen::Index k = 0; k < d; ++k) c.block(0, k * p, p, p) = proc.coeffs[static_cast<std::size_t>(k)];
    if (d > 1) c.block(p, 0, p * (d - 1), p * (d - 1)).setIdentity();
    return c;
}

double spectral_radius(const Eigen::MatrixXd& a, double tolerance, std::size_t max_iterations)
{
    if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "spectral radius needs a square matrix");
    if (a.size() == 0) return 0.0;
    const double n0 = a.norm();
    if (n0 == 0.0) return 0.0;
    // Invariant: A^(2^k) = exp(2^k * r) * b with ||b|| = 1.
    Eigen::MatrixXd b = a / n0;
    double r = std::log(n0);
    double estimate = n0;
    double scale = 1.0;
    for (std::size_t k = 0; k < max_iterations; ++k) {
        Eigen::MatrixXd sq = b * b;
        const double nb = sq.norm();
        if (nb == 0.0) return 0.0;
        scale *= 0.5;
        r += scale * std::log(nb);
        b = sq / nb;
        const double next = std::exp(r);
        if (std::abs(next - estimate) < tolerance) return next;
        estimate = next;
    }
    throw Error(ErrorCode::NonConvergence, "spectral radius iteration did not converge");
}

void VarProcess::validate() const
{
    if (p == 0) throw Error(ErrorCode::InvalidConfig, "VAR process needs at least one series");
    if (coeffs.empty()) throw Error(ErrorCode::InvalidConfig, "VAR order must be >= 1");
    for (const auto& c : coeffs)
        if (c.rows() != static_cast<Eigen::Index>(p) || c.cols() != static_cast<Eigen::Index>(p))
            throw Error(ErrorCode::DimensionMismatch, "VAR coefficient matrices must be p x p");
    if (!(noise_std > 0.0) || !std::isfinite(noise_std)) throw Error(ErrorCode::InvalidConfig, "noise_std must be > 0");
    if (dims_per_series != 1 && dims_per_series != 3)
        throw Error(ErrorCode::InvalidConfig, "dims_per_series must be 1 or 3");
    const double rho = spectral_radius(companion_matrix(*this));
    if (!(rho < 1.0))
        throw Error(ErrorCode::NonStationary, "companion spectral radius " + std::to_string(rho) + " >= 1");
}

Eigen::MatrixXd simulate(const VarProcess& proc, std::size_t n)
{
    proc.validate();
    const std::size_t d = proc.order();
    if (n <= 10 * d) throw Error(ErrorCode::InvalidConfig, "frame count must exceed 10 * order");
    const auto p = static_cast<Eigen::Index>(proc.p);
    const auto dims = static_cast<Eigen::Index>(proc.dims_per_series);
    const std::size_t burn = 10 * d;
    const std::size_t total = burn + n;

    // One column per frame, rows series-major then channel.
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(p * dims, static_cast<Eigen::Index>(total));
    CounterRng rng(proc.seed);
    Eigen::VectorXd lagged(p);
    for (std::size_t t = 0; t < total; ++t) {
        const auto tc = static_cast<Eigen::Index>(t);
        for (Eigen::Index c = 0; c < dims; ++c) {
            Eigen::VectorXd value = Eigen::VectorXd::Zero(p);
            for (std::size_t k = 1; k <= d && k <= t; ++k) {
                for (Eigen::Index j = 0; j < p; ++j) lagged(j) = x(j * dims + c, tc - static_cast<Eigen::Index>(k));
                value += proc.coeffs[k - 1] * lagged;
            }
            for (Eigen::Index i = 0; i < p; ++i) x(i * dims + c, tc) = value(i) + proc.noise_std * rng.gaussian();
        }
    }
    return x.rightCols(static_cast<Eigen::Index>(n));
}

std::vector<std::string> series_names(std::size_t p)
{
    std::vector<std::string> names;
    names.reserve(p);
    for (std::size_t i = 1; i <= p; ++i) names.push_back("s" + std::to_string(i));
    return names;
}

mocap::GaitCycle generate_var(const VarProcess& proc, std::size_t n)
{
    const Eigen::MatrixXd x = simulate(proc, n);
    const auto p = static_cast<Eigen::Index>(proc.p);
    const auto dims = static_cast<Eigen::Index>(proc.dims_per_series);
    mocap::GaitCycle cycle;
    cycle.joints = series_names(proc.p);
    cycle.coords = Eigen::MatrixXd::Zero(3 * p, x.cols());
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index c = 0; c < dims; ++c) cycle.coords.row(3 * i + c) = x.row(i * dims + c);
    cycle.subject_label = proc.label;
    cycle.sequence_id = std::to_string(proc.seed);
    cycle.cycle_index = 0;
    return cycle;
}

granger::CausalGraph true_graph(const VarProcess& proc, double threshold)
{
    const auto p = static_cast<Eigen::Index>(proc.p);
    granger::CausalGraph g;
    g.joint_order = series_names(proc.p);
    g.adjacency = Eigen::MatrixXd::Zero(p, p);
    for (const auto& c : proc.coeffs) {
        if (c.rows() != p || c.cols() != p) throw Error(ErrorCode::DimensionMismatch, "VAR coefficient matrices must be p x p");
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = 0; j < p; ++j)
                if (i != j && std::abs(c(i, j)) > threshold) g.adjacency(j, i) = 1.0;
    }
    return g;
}

RecoveryScore recovery_metrics(const granger::CausalGraph& estimated, const granger::CausalGraph& truth)
{
    const auto& e = estimated.adjacency;
    const auto& t = truth.adjacency;
    if (e.rows() != t.rows() || e.cols() != t.cols() || e.rows() != e.cols())
        throw Error(ErrorCode::DimensionMismatch, "graphs must have equal square dimensions");
    RecoveryScore s;
    for (Eigen::Index r = 0; r < e.rows(); ++r)
        for (Eigen::Index c = 0; c < e.cols(); ++c) {
            if (r == c) continue;
            const bool pe = e(r, c) != 0.0;
            const bool pt = t(r, c) != 0.0;
            if (pe && pt) ++s.true_positives;
            else if (pe) ++s.false_positives;
            else if (pt) ++s.false_negatives;
            else ++s.true_negatives;
        }
    const auto tp = static_cast<double>(s.true_positives);
    if (s.true_positives + s.false_positives > 0) s.precision = tp / static_cast<double>(s.true_positives + s.false_positives);
    if (s.true_positives + s.false_negatives > 0) s.recall = tp / static_cast<double>(s.true_positives + s.false_negatives);
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    const auto negatives = s.false_positives + s.true_negatives;
    s.spurious_rate = negatives > 0 ? static_cast<double>(s.false_positives) / static_cast<double>(negatives) : 0.0;
    return s;
}

VarProcess chain_process(std::size_t p, double coefficient, double noise_std, std::uint64_t seed)
{
    VarProcess proc;
    proc.p = p;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 1; i < c.rows(); ++i) c(i, i - 1) = coefficient;
    proc.coeffs = {c};
    proc.noise_std = noise_std;
    proc.seed = seed;
    proc.label = "chain";
    return proc;
}

VarProcess white_noise_process(std::size_t p, double noise_std, std::uint64_t seed)
{
    VarProcess proc;
    proc.p = p;
    proc.coeffs = {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p))};
    proc.noise_std = noise_std;
    proc.seed = seed;
    proc.label = "null";
    return proc;
}

VarProcess named_process(std::string_view name, std::size_t p, double coefficient, double noise_std,
                         std::uint64_t seed)
{
    VarProcess proc;
    if (name == "chain") {
        proc = chain_process(p, coefficient, noise_std, seed);
    } else if (name == "null") {
        proc = white_noise_process(p, noise_std, seed);
    } else if (name == "reverse" || name == "star") {
        proc = white_noise_process(p, noise_std, seed);
        auto& c = proc.coeffs.front();
        for (Eigen::Index i = 1; i < c.rows(); ++i) {
            if (name == "reverse") c(i - 1, i) = coefficient;
            else c(i, 0) = coefficient;
        }
    } else {
        throw Error(ErrorCode::InvalidConfig, "unknown process '" + std::string(name) + "'");
    }
    proc.label = std::string(name);
    return proc;
}

}  // namespace gaitggm::synth
