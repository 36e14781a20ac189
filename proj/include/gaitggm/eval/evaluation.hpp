#pragma once

#include "gaitggm/distances/distance.hpp"
#include "gaitggm/granger/graph.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gaitggm::eval {

/// Graphs with one subject label each. Sample ids default to the graphs'
/// source_cycle; every ranking tie (distances equal to within a relative 1e-12)
/// is broken by the lexicographically smallest id.
struct LabeledFeatureSet {
    std::vector<granger::CausalGraph> graphs;
    std::vector<std::string> labels;
    std::vector<std::string> joint_order;

    std::size_t size() const noexcept { return graphs.size(); }
    std::vector<std::string> sample_ids() const;
    std::vector<Eigen::MatrixXd> matrices() const;

    /// Throws DimensionMismatch (sizes, joint order), TooFewSamples (< 2 distinct labels).
    void validate() const;
};

struct EvalOptions {
    /// Use 1 - jaccard so that the Jaccard row ranks by dissimilarity.
    bool jaccard_complement = true;
    std::size_t jobs = 1;
    std::optional<double> gamma;  // Mahalanobis regulariser; default per fit_scatter
};

/// Pairwise distances over the set in its stored order. Fits a scatter model on
/// the set for Mahalanobis unless `model` is given.
Eigen::MatrixXd feature_distances(const LabeledFeatureSet& set, const distances::DistanceFunctionId& id,
                                  const EvalOptions& options = {}, const distances::ScatterModel* model = nullptr);

// Metrics on a precomputed distance matrix; `ids` fixes the tie order.

struct CcrResult {
    double ccr = 0.0;
    std::vector<std::pair<std::string, double>> per_class;  // sorted by label
};

/// Leave-one-out 1-NN. Throws TooFewSamples if any class has fewer than two samples.
CcrResult ccr_from_distances(const Eigen::MatrixXd& d, const std::vector<std::string>& labels,
                             const std::vector<std::string>& ids);

/// Medoid Davies-Bouldin: S_c is the mean distance of class c to its medoid
/// (the medoid contributing 0). Throws CoincidentMedoids, TooFewSamples (< 2 classes).
double davies_bouldin_from_distances(const Eigen::MatrixXd& d, const std::vector<std::string>& labels,
                                     const std::vector<std::string>& ids);

/// min inter-class distance / max class diameter. Throws ZeroDiameter, TooFewSamples.
double dunn_from_distances(const Eigen::MatrixXd& d, const std::vector<std::string>& labels);

double ccr_loo_1nn(const LabeledFeatureSet& set, const distances::DistanceFunctionId& id, const EvalOptions& options = {});
double davies_bouldin(const LabeledFeatureSet& set, const distances::DistanceFunctionId& id,
                      const EvalOptions& options = {});
double dunn_index(const LabeledFeatureSet& set, const distances::DistanceFunctionId& id, const EvalOptions& options = {});

struct EvalReport {
    distances::DistanceFunctionId distance_id;
    double ccr = 0.0;
    double dbi = 0.0;
    double di = 0.0;
    std::vector<std::pair<std::string, double>> per_class;
    std::vector<std::string> notes;  // undefined DBI/DI (NaN) and why
};

/// CCR, DBI and DI from one distance matrix. CoincidentMedoids and ZeroDiameter
/// leave the affected value NaN with a note instead of failing the report.
EvalReport evaluate(const LabeledFeatureSet& set, const distances::DistanceFunctionId& id,
                    const EvalOptions& options = {});

/// One report per function of all_distance_ids(); Mahalanobis fitted on the full set.
/// A function undefined on some pair (JaccardUndefined) gets NaN values and a note.
std::vector<EvalReport> compare_distances(const LabeledFeatureSet& set, const EvalOptions& options = {});

enum class Metric { Ccr, Dbi, Di };

std::string_view to_string(Metric m) noexcept;
Metric parse_metric(std::string_view s);  // "ccr" | "dbi" | "di"

/// ccr -> total, dbi -> kyfan1, di -> kyfan1.
distances::DistanceFunctionId default_distance(Metric m);

double metric_value(Metric m, const Eigen::MatrixXd& d, const std::vector<std::string>& labels,
                    const std::vector<std::string>& ids);

struct AblationMatrix {
    Eigen::MatrixXd values;  // p x p percent decrease, symmetric, zero diagonal
    Metric metric = Metric::Ccr;
    distances::DistanceFunctionId distance_id;
    double baseline = 0.0;
    std::vector<std::string> joint_order;
};

/// For every unordered joint pair (i, j), zeroes A(i, j) and A(j, i) in every
/// graph and re-evaluates the metric. Decrease is 100 (base - ablated) / base for
/// CCR and DI and 100 (ablated - base) / base for DBI. Mahalanobis keeps the
/// scatter model fitted on the unablated set. A cell whose ablated metric is
/// undefined (CoincidentMedoids, ZeroDiameter) is NaN.
AblationMatrix ablate_joint_pairs(const LabeledFeatureSet& set, Metric metric,
                                  std::optional<distances::DistanceFunctionId> id = std::nullopt,
                                  const EvalOptions& options = {});

// Exports.
std::string report_table_csv(const std::vector<EvalReport>& reports);
std::string report_json(const std::vector<EvalReport>& reports, const EvalOptions& options);
std::string ablation_csv(const AblationMatrix& m);
std::string ablation_json(const AblationMatrix& m);
/// Matrix with joint names as first row and column, for `plot ... matrix rowheaders columnheaders`.
std::string ablation_gnuplot(const AblationMatrix& m);

}  // namespace gaitggm::eval
