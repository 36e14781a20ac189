#include "gaitggm/eval/evaluation.hpp"

#include "gaitggm/error.hpp"
#include "gaitggm/util/parallel.hpp"
#include "gaitggm/util/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace gaitggm::eval {
namespace {

using distances::DistanceFunctionId;
using distances::DistanceKind;

/// Sample indices sorted by id, stable on equal ids.
std::vector<std::size_t> canonical_order(const std::vector<std::string>& ids)
{
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    return order;
}

/// Class label -> member indices in canonical order.
std::map<std::string, std::vector<std::size_t>> classes_of(const std::vector<std::string>& labels,
                                                           const std::vector<std::size_t>& order)
{
    std::map<std::string, std::vector<std::size_t>> classes;
    for (auto i : order) classes[labels[i]].push_back(i);
    return classes;
}

/// Classes ordered by their first member in canonical order, members in canonical order.
/// Independent of the label strings, so renaming classes cannot reorder sums.
std::vector<std::pair<std::string, std::vector<std::size_t>>> classes_by_first_member(
    const std::vector<std::string>& labels, const std::vector<std::size_t>& order)
{
    std::vector<std::pair<std::string, std::vector<std::size_t>>> classes;
    std::map<std::string, std::size_t> slot;
    for (auto i : order) {
        const auto [it, fresh] = slot.emplace(labels[i], classes.size());
        if (fresh) classes.emplace_back(labels[i], std::vector<std::size_t>{});
        classes[it->second].second.push_back(i);
    }
    return classes;
}

/// Distances within this relative gap are ties, so rounding differences between
/// algebraically equal distances (e.g. Frobenius and Hilbert-Schmidt) cannot
/// change a nearest neighbour or a medoid.
constexpr double kTieTolerance = 1e-12;

bool clearly_less(double a, double b)
{
    return a < b - kTieTolerance * std::max(std::abs(a), std::abs(b));
}

void check_matrix(const Eigen::MatrixXd& d, std::size_t n)
{
    if (d.rows() != static_cast<Eigen::Index>(n) || d.cols() != static_cast<Eigen::Index>(n))
        throw Error(ErrorCode::DimensionMismatch, "distance matrix does not match the sample count");
}

bool is_jaccard(const DistanceFunctionId& id) { return id.kind == DistanceKind::Jaccard; }

double pair_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const DistanceFunctionId& id,
                     const distances::ScatterModel* model, const EvalOptions& options)
{
    const double v = distances::distance(a, b, id, model);
    return is_jaccard(id) && options.jaccard_complement ? 1.0 - v : v;
}

std::optional<distances::ScatterModel> scatter_if_needed(const LabeledFeatureSet& set, const DistanceFunctionId& id,
                                                         const EvalOptions& options)
{
    if (id.kind != DistanceKind::Mahalanobis) return std::nullopt;
    return distances::fit_scatter(set.matrices(), options.gamma);
}

bool undefined_metric(const Error& e)
{
    return e.code() == ErrorCode::CoincidentMedoids || e.code() == ErrorCode::ZeroDiameter;
}

double percent_decrease(Metric m, double baseline, double ablated)
{
    const double delta = m == Metric::Dbi ? ablated - baseline : baseline - ablated;
    if (delta == 0.0) return 0.0;
    if (baseline == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 100.0 * delta / baseline;
}

}  // namespace

std::vector<std::string> LabeledFeatureSet::sample_ids() const
{
    std::vector<std::string> ids;
    ids.reserve(graphs.size());
    for (const auto& g : graphs) ids.push_back(g.source_cycle);
    return ids;
}

std::vector<Eigen::MatrixXd> LabeledFeatureSet::matrices() const
{
    std::vector<Eigen::MatrixXd> out;
    out.reserve(graphs.size());
    for (const auto& g : graphs) out.push_back(g.adjacency);
    return out;
}

void LabeledFeatureSet::validate() const
{
    if (graphs.size() != labels.size()) throw Error(ErrorCode::DimensionMismatch, "one label per graph required");
    if (graphs.empty()) throw Error(ErrorCode::TooFewSamples, "feature set is empty");
    const auto p = static_cast<Eigen::Index>(joint_order.size());
    for (const auto& g : graphs) {
        if (g.adjacency.rows() != p || g.adjacency.cols() != p)
            throw Error(ErrorCode::DimensionMismatch, "graph '" + g.source_cycle + "' does not match the joint order");
        if (!g.joint_order.empty() && g.joint_order != joint_order)
            throw Error(ErrorCode::DimensionMismatch, "graph '" + g.source_cycle + "' uses a different joint order");
    }
    std::vector<std::string> distinct = labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw Error(ErrorCode::TooFewSamples, "at least two distinct labels are required");
}

Eigen::MatrixXd feature_distances(const LabeledFeatureSet& set, const DistanceFunctionId& id,
                                  const EvalOptions& options, const distances::ScatterModel* model)
{
    set.validate();
    std::optional<distances::ScatterModel> fitted;
    if (!model && id.kind == DistanceKind::Mahalanobis) {
        fitted = scatter_if_needed(set, id, options);
        model = &*fitted;
    }
    Eigen::MatrixXd d = distances::distance_matrix(set.matrices(), id, model, options.jobs);
    if (is_jaccard(id) && options.jaccard_complement) d = (1.0 - d.array()).matrix();
    return d;
}

CcrResult ccr_from_distances(const Eigen::MatrixXd& d, const std::vector<std::string>& labels,
                             const std::vector<std::string>& ids)
{
    const std::size_t n = labels.size();
    check_matrix(d, n);
    if (ids.size() != n) throw Error(ErrorCode::DimensionMismatch, "one id per sample required");
    const auto order = canonical_order(ids);
    const auto classes = classes_of(labels, order);
    for (const auto& [label, members] : classes)
        if (members.size() < 2)
            throw Error(ErrorCode::TooFewSamples, "class '" + label + "' has fewer than two samples");

    std::map<std::string, std::size_t> correct;
    std::size_t total_correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = n;
        for (auto j : order) {
            if (j == i) continue;
            if (best == n || clearly_less(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                          d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(best))))
                best = j;
        }
        if (labels[best] == labels[i]) {
            ++correct[labels[i]];
            ++total_correct;
        }
    }
    CcrResult r;
    r.ccr = static_cast<double>(total_correct) / static_cast<double>(n);
    for (const auto& [label, members] : classes)
        r.per_class.emplace_back(label, static_cast<double>(correct[label]) / static_cast<double>(members.size()));
    return r;
}

double davies_bouldin_from_distances(const Eigen::MatrixXd& d, const std::vector<std::string>& labels,
                                     const std::vector<std::string>& ids)
{
    const std::size_t n = labels.size();
    check_matrix(d, n);
    if (ids.size() != n) throw Error(ErrorCode::DimensionMismatch, "one id per sample required");
    const auto classes = classes_by_first_member(labels, canonical_order(ids));
    if (classes.size() < 2) throw Error(ErrorCode::TooFewSamples, "Davies-Bouldin index needs two classes");

    const auto dist = [&](std::size_t a, std::size_t b) {
        return a == b ? 0.0 : d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    };
    std::vector<std::string> names;
    std::vector<std::size_t> medoid;
    std::vector<double> scatter;
    for (const auto& [label, members] : classes) {
        std::size_t best = members.front();
        double best_sum = std::numeric_limits<double>::infinity();
        for (auto m : members) {
            double sum = 0.0;
            for (auto o : members) sum += dist(m, o);
            if (best_sum == std::numeric_limits<double>::infinity() || clearly_less(sum, best_sum)) {
                best_sum = sum;
                best = m;
            }
        }
        names.push_back(label);
        medoid.push_back(best);
        scatter.push_back(best_sum / static_cast<double>(members.size()));
    }

    double total = 0.0;
    for (std::size_t c = 0; c < names.size(); ++c) {
        double worst = 0.0;
        for (std::size_t o = 0; o < names.size(); ++o) {
            if (o == c) continue;
            const double gap = dist(medoid[c], medoid[o]);
            if (gap == 0.0)
                throw Error(ErrorCode::CoincidentMedoids,
                            "medoids of classes '" + names[c] + "' and '" + names[o] + "' coincide");
            worst = std::max(worst, (scatter[c] + scatter[o]) / gap);
        }
        total += worst;
    }
    return total / static_cast<double>(names.size());
}

double dunn_from_distances(const Eigen::MatrixXd& d, const std::vector<std::string>& labels)
{
    const std::size_t n = labels.size();
    check_matrix(d, n);
    std::vector<std::string> distinct = labels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw Error(ErrorCode::TooFewSamples, "Dunn index needs two classes");

    double min_inter = std::numeric_limits<double>::infinity();
    double max_diameter = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (labels[i] == labels[j])
                max_diameter = std::max(max_diameter, v);
            else
                min_inter = std::min(min_inter, v);
        }
    if (max_diameter == 0.0) throw Error(ErrorCode::ZeroDiameter, "every class has zero diameter");
    return min_inter / max_diameter;
}

double ccr_loo_1nn(const LabeledFeatureSet& set, const DistanceFunctionId& id, const EvalOptions& options)
{
    return ccr_from_distances(feature_distances(set, id, options), set.labels, set.sample_ids()).ccr;
}

double davies_bouldin(const LabeledFeatureSet& set, const DistanceFunctionId& id, const EvalOptions& options)
{
    return davies_bouldin_from_distances(feature_distances(set, id, options), set.labels, set.sample_ids());
}

double dunn_index(const LabeledFeatureSet& set, const DistanceFunctionId& id, const EvalOptions& options)
{
    return dunn_from_distances(feature_distances(set, id, options), set.labels);
}

EvalReport evaluate(const LabeledFeatureSet& set, const DistanceFunctionId& id, const EvalOptions& options)
{
    const Eigen::MatrixXd d = feature_distances(set, id, options);
    const auto ids = set.sample_ids();
    EvalReport r;
    r.distance_id = id;
    auto ccr = ccr_from_distances(d, set.labels, ids);
    r.ccr = ccr.ccr;
    r.per_class = std::move(ccr.per_class);
    try {
        r.dbi = davies_bouldin_from_distances(d, set.labels, ids);
    } catch (const Error& e) {
        if (!undefined_metric(e)) throw;
        r.dbi = std::numeric_limits<double>::quiet_NaN();
        r.notes.push_back(std::string("dbi: ") + e.what());
    }
    try {
        r.di = dunn_from_distances(d, set.labels);
    } catch (const Error& e) {
        if (!undefined_metric(e)) throw;
        r.di = std::numeric_limits<double>::quiet_NaN();
        r.notes.push_back(std::string("di: ") + e.what());
    }
    return r;
}

std::vector<EvalReport> compare_distances(const LabeledFeatureSet& set, const EvalOptions& options)
{
    std::vector<EvalReport> out;
    for (const auto& id : distances::all_distance_ids()) {
        try {
            out.push_back(evaluate(set, id, options));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::JaccardUndefined) throw;
            EvalReport r;
            r.distance_id = id;
            r.ccr = r.dbi = r.di = std::numeric_limits<double>::quiet_NaN();
            r.notes.push_back(e.what());
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::string_view to_string(Metric m) noexcept
{
    switch (m) {
    case Metric::Ccr: return "ccr";
    case Metric::Dbi: return "dbi";
    case Metric::Di: return "di";
    }
    return "unknown";
}

Metric parse_metric(std::string_view s)
{
    const auto name = util::to_lower(util::trim(s));
    if (name == "ccr") return Metric::Ccr;
    if (name == "dbi") return Metric::Dbi;
    if (name == "di") return Metric::Di;
    throw Error(ErrorCode::InvalidConfig, "unknown metric '" + std::string(s) + "'");
}

DistanceFunctionId default_distance(Metric m)
{
    return m == Metric::Ccr ? DistanceFunctionId{DistanceKind::Total, 1} : DistanceFunctionId{DistanceKind::KyFan, 1};
}

double metric_value(Metric m, const Eigen::MatrixXd& d, const std::vector<std::string>& labels,
                    const std::vector<std::string>& ids)
{
    switch (m) {
    case Metric::Ccr: return ccr_from_distances(d, labels, ids).ccr;
    case Metric::Dbi: return davies_bouldin_from_distances(d, labels, ids);
    case Metric::Di: return dunn_from_distances(d, labels);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown metric");
}

AblationMatrix ablate_joint_pairs(const LabeledFeatureSet& set, Metric metric, std::optional<DistanceFunctionId> id,
                                  const EvalOptions& options)
{
    set.validate();
    AblationMatrix out;
    out.metric = metric;
    out.distance_id = id.value_or(default_distance(metric));
    out.joint_order = set.joint_order;

    const auto model = scatter_if_needed(set, out.distance_id, options);
    const auto* model_ptr = model ? &*model : nullptr;
    const auto ids = set.sample_ids();
    const auto base_matrices = set.matrices();
    const Eigen::MatrixXd base_d = feature_distances(set, out.distance_id, options, model_ptr);
    out.baseline = metric_value(metric, base_d, set.labels, ids);

    const auto p = static_cast<Eigen::Index>(set.joint_order.size());
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = i + 1; j < p; ++j) pairs.emplace_back(i, j);

    std::vector<double> results(pairs.size(), 0.0);
    util::parallel_for(pairs.size(), options.jobs, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        std::vector<Eigen::MatrixXd> graphs = base_matrices;
        std::vector<std::size_t> changed;
        for (std::size_t s = 0; s < graphs.size(); ++s) {
            auto& a = graphs[s];
            if (a(i, j) != 0.0 || a(j, i) != 0.0) {
                a(i, j) = 0.0;
                a(j, i) = 0.0;
                changed.push_back(s);
            }
        }
        if (changed.empty()) return;
        Eigen::MatrixXd d = base_d;
        std::vector<bool> is_changed(graphs.size(), false);
        for (auto s : changed) is_changed[s] = true;
        for (auto s : changed)
            for (std::size_t o = 0; o < graphs.size(); ++o) {
                if (is_changed[o] && o < s) continue;
                const double v = pair_distance(graphs[s], graphs[o], out.distance_id, model_ptr, options);
                d(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(o)) = v;
                d(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(s)) = v;
            }
        try {
            results[k] = percent_decrease(metric, out.baseline, metric_value(metric, d, set.labels, ids));
        } catch (const Error& e) {
            if (!undefined_metric(e)) throw;
            results[k] = std::numeric_limits<double>::quiet_NaN();
        }
    });

    out.values = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        out.values(i, j) = results[k];
        out.values(j, i) = results[k];
    }
    return out;
}

std::string report_table_csv(const std::vector<EvalReport>& reports)
{
    std::string out = "distance,ccr,dbi,di\n";
    for (const auto& r : reports)
        out += r.distance_id.name() + ',' + util::format_double(r.ccr) + ',' + util::format_double(r.dbi) + ',' +
               util::format_double(r.di) + '\n';
    return out;
}

std::string report_json(const std::vector<EvalReport>& reports, const EvalOptions& options)
{
    using nlohmann::json;
    json rows = json::array();
    for (const auto& r : reports) {
        json per_class = json::object();
        for (const auto& [label, acc] : r.per_class) per_class[label] = acc;
        const auto number = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
        rows.push_back({{"distance", r.distance_id.name()},
                        {"ccr", number(r.ccr)},
                        {"dbi", number(r.dbi)},
                        {"di", number(r.di)},
                        {"per_class_ccr", per_class},
                        {"notes", r.notes}});
    }
    json j;
    j["jaccard_complement"] = options.jaccard_complement;
    j["reports"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string ablation_csv(const AblationMatrix& m)
{
    std::string out = "joint";
    for (const auto& name : m.joint_order) out += ',' + name;
    out += '\n';
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
        out += m.joint_order[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < m.values.cols(); ++c) out += ',' + util::format_double(m.values(r, c));
        out += '\n';
    }
    return out;
}

std::string ablation_json(const AblationMatrix& m)
{
    using nlohmann::json;
    json values = json::array();
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
            const double v = m.values(r, c);
            row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
        }
        values.push_back(std::move(row));
    }
    json j;
    j["metric"] = std::string(to_string(m.metric));
    j["distance"] = m.distance_id.name();
    j["baseline"] = m.baseline;
    j["joint_order"] = m.joint_order;
    j["percent_decrease"] = std::move(values);
    return j.dump(2) + "\n";
}

std::string ablation_gnuplot(const AblationMatrix& m)
{
    std::string out = "# percent decrease in " + std::string(to_string(m.metric)) + " (" + m.distance_id.name() +
                      "), baseline " + util::format_double(m.baseline) + "\n";
    out += "joint";
    for (const auto& name : m.joint_order) out += ' ' + name;
    out += '\n';
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
        out += m.joint_order[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < m.values.cols(); ++c) out += ' ' + util::format_double(m.values(r, c));
        out += '\n';
    }
    return out;
}

}  // namespace gaitggm::eval
