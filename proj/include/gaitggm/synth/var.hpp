#pragma once

#include "gaitggm/granger/graph.hpp"
#include "gaitggm/mocap/motion.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gaitggm::synth {

/// splitmix64 evaluated at seed + counter * golden gamma; the stream is a pure
/// function of (seed, counter).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept : seed_(seed), counter_(counter) {}

    std::uint64_t next() noexcept;
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal by Box-Muller; consumes two draws.
    double gaussian() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

/// x^t = sum_k C_k x^{t-k} + e^t, coeffs[k-1](i, j) = effect of series j at lag k on series i.
struct VarProcess {
    std::size_t p = 0;
    std::vector<Eigen::MatrixXd> coeffs;  // d matrices of p x p
    double noise_std = 1.0;
    int dims_per_series = 3;  // 1: series in the x channel, y = z = 0; 3: independent x, y, z channels
    std::uint64_t seed = 0;
    std::string label = "var";

    std::size_t order() const noexcept { return coeffs.size(); }

    /// Throws DimensionMismatch / InvalidConfig for malformed fields and
    /// NonStationary if the companion spectral radius is >= 1.
    void validate() const;
};

/// pd x pd companion matrix [C_1 ... C_d; I 0].
Eigen::MatrixXd companion_matrix(const VarProcess& proc);

/// Spectral radius by normalised repeated squaring, rho = lim ||A^(2^k)||^(1/2^k).
/// Stops once successive estimates differ by less than tolerance. Throws
/// NonConvergence after max_iterations.
double spectral_radius(const Eigen::MatrixXd& a, double tolerance = 1e-10, std::size_t max_iterations = 1000);

/// Channels (series-major, dims_per_series rows per series) x n frames, after
/// discarding a burn-in of 10 d frames started from zero. Throws InvalidConfig if n <= 10 d.
Eigen::MatrixXd simulate(const VarProcess& proc, std::size_t n);

/// simulate() laid out as a cycle: joint "s<i>" (1-based) holds series i.
mocap::GaitCycle generate_var(const VarProcess& proc, std::size_t n);

std::vector<std::string> series_names(std::size_t p);

/// Edge j -> i iff some |coeffs[k](i, j)| > threshold, i != j.
granger::CausalGraph true_graph(const VarProcess& proc, double threshold = 0.0);

struct RecoveryScore {
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
    double spurious_rate = 0.0;  // false positives / truly absent off-diagonal edges
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    std::size_t true_negatives = 0;
};

/// Off-diagonal directed edges only. Precision is 1 when nothing is predicted,
/// recall is 1 when the truth is empty, F1 is 0 when precision + recall is 0.
RecoveryScore recovery_metrics(const granger::CausalGraph& estimated, const granger::CausalGraph& truth);

/// Order-1 chain 1 -> 2 -> ... -> p with a common coefficient.
VarProcess chain_process(std::size_t p, double coefficient, double noise_std, std::uint64_t seed);

/// Order-1 process with zero coefficients.
VarProcess white_noise_process(std::size_t p, double noise_std, std::uint64_t seed);

/// "chain" (1 -> 2 -> ... -> p), "reverse" (p -> ... -> 1), "star" (1 -> every
/// other series) or "null"; the name becomes the label. Throws InvalidConfig.
VarProcess named_process(std::string_view name, std::size_t p, double coefficient, double noise_std,
                         std::uint64_t seed);

}  // namespace gaitggm::synth
