#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gaitggm/error.hpp"
#include "gaitggm/eval/evaluation.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace gaitggm;
using namespace gaitggm::eval;
using distances::DistanceFunctionId;
using distances::DistanceKind;

namespace {

template <class F>
ErrorCode code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a gaitggm::Error");
    return ErrorCode::Io;
}

const DistanceFunctionId kTotal{DistanceKind::Total, 1};

std::vector<std::string> names(std::size_t p)
{
    std::vector<std::string> out;
    for (std::size_t j = 0; j < p; ++j) out.push_back("j" + std::to_string(j));
    return out;
}

// Off-diagonal cells in row-major order, skipping the (0,1)/(1,0) pair.
std::vector<std::pair<Eigen::Index, Eigen::Index>> free_cells(Eigen::Index p)
{
    std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            if (i != j && !(std::min(i, j) == 0 && std::max(i, j) == 1)) cells.emplace_back(i, j);
    return cells;
}

void add(LabeledFeatureSet& set, const std::string& id, const std::string& label, const Eigen::MatrixXd& a)
{
    granger::CausalGraph g;
    g.joint_order = set.joint_order;
    g.adjacency = a;
    g.source_cycle = id;
    set.graphs.push_back(std::move(g));
    set.labels.push_back(label);
}

// Graph with the first `count` free cells starting at `offset` set.
Eigen::MatrixXd edges(Eigen::Index p, std::size_t offset, std::size_t count)
{
    const auto cells = free_cells(p);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t k = offset; k < offset + count; ++k) a(cells[k].first, cells[k].second) = 1.0;
    return a;
}

LabeledFeatureSet permuted(const LabeledFeatureSet& set, std::mt19937_64& rng)
{
    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    LabeledFeatureSet out;
    out.joint_order = set.joint_order;
    for (const auto k : order) {
        out.graphs.push_back(set.graphs[k]);
        out.labels.push_back(set.labels[k]);
    }
    return out;
}

LabeledFeatureSet random_set(std::mt19937_64& rng, std::size_t n, std::size_t classes, Eigen::Index p)
{
    LabeledFeatureSet set;
    set.joint_order = names(static_cast<std::size_t>(p));
    for (std::size_t k = 0; k < n; ++k)
        add(set, "s" + std::to_string(1000 + k), "c" + std::to_string(k % classes), test_support::random_binary(rng, p, 0.4));
    return set;
}

// Class identity carried by the (0,1) pair only: 0->1 for A, 1->0 for B.
// Every sample also has one private edge elsewhere.
LabeledFeatureSet single_edge_identity(std::size_t per_class)
{
    LabeledFeatureSet set;
    set.joint_order = names(6);
    for (std::size_t k = 0; k < 2 * per_class; ++k) {
        Eigen::MatrixXd a = edges(6, k, 1);
        const bool first = k < per_class;
        if (first) a(0, 1) = 1.0;
        else a(1, 0) = 1.0;
        add(set, (first ? "a" : "b") + std::to_string(k), first ? "A" : "B", a);
    }
    return set;
}

}  // namespace

TEST_SUITE("validity indices")
{
    TEST_CASE("Davies-Bouldin four-point fixture is 0.2")
    {
        // d(a0,a1) = d(b0,b1) = 2, medoids a0 and b0 at total distance 10.
        LabeledFeatureSet set;
        set.joint_order = names(6);
        add(set, "a0", "A", edges(6, 0, 0));
        add(set, "a1", "A", edges(6, 0, 2));
        add(set, "b0", "B", edges(6, 2, 10));
        add(set, "b1", "B", edges(6, 2, 12));
        CHECK(davies_bouldin(set, kTotal) == doctest::Approx(0.2).epsilon(1e-15));

        Eigen::MatrixXd d(4, 4);
        d << 0, 2, 10, 12, 2, 0, 12, 10, 10, 12, 0, 2, 12, 10, 2, 0;
        CHECK(davies_bouldin_from_distances(d, {"A", "A", "B", "B"}, {"a0", "a1", "b0", "b1"}) == 0.2);
    }

    TEST_CASE("Dunn duplicate-point fixture is 5")
    {
        LabeledFeatureSet set;
        set.joint_order = names(6);
        add(set, "x", "A", edges(6, 0, 0));
        add(set, "x_dup", "A", edges(6, 0, 1));
        add(set, "y", "B", edges(6, 1, 5));
        CHECK(dunn_index(set, kTotal) == 5.0);
    }

    TEST_CASE("identical members and distinct classes give zero DBI")
    {
        LabeledFeatureSet set;
        set.joint_order = names(5);
        for (int k = 0; k < 3; ++k) {
            add(set, "a" + std::to_string(k), "A", edges(5, 0, 3));
            add(set, "b" + std::to_string(k), "B", edges(5, 3, 4));
        }
        CHECK(davies_bouldin(set, kTotal) == 0.0);
        CHECK(code_of([&] { dunn_index(set, kTotal); }) == ErrorCode::ZeroDiameter);
        const auto r = evaluate(set, kTotal);
        CHECK(std::isnan(r.di));
        CHECK(r.notes.size() == 1);
    }

    TEST_CASE("interleaved classes give DI below one")
    {
        Eigen::MatrixXd d(4, 4);
        d << 0, 1, 3, 1, 1, 0, 1, 3, 3, 1, 0, 1, 1, 3, 1, 0;  // A = {0, 2}, B = {1, 3} on a 4-cycle
        CHECK(dunn_from_distances(d, {"A", "B", "A", "B"}) < 1.0);
    }

    TEST_CASE("coincident medoids are reported")
    {
        LabeledFeatureSet set;
        set.joint_order = names(4);
        add(set, "a0", "A", edges(4, 0, 1));
        add(set, "a1", "A", edges(4, 0, 1));
        add(set, "b0", "B", edges(4, 0, 1));
        add(set, "b1", "B", edges(4, 1, 1));
        CHECK(code_of([&] { davies_bouldin(set, kTotal); }) == ErrorCode::CoincidentMedoids);
    }
}

TEST_SUITE("classification")
{
    TEST_CASE("separable set scores 1 under all eleven functions")
    {
        const auto set = test_support::separable_set();
        for (const auto& r : compare_distances(set)) {
            CAPTURE(r.distance_id.name());
            CHECK(r.ccr == 1.0);
        }
    }

    TEST_CASE("permutation null stays within the binomial band")
    {
        std::mt19937_64 rng(21);
        const std::size_t n = 60, classes = 3, reps = 40;
        double sum = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            auto set = random_set(rng, n, classes, 7);
            std::shuffle(set.labels.begin(), set.labels.end(), rng);
            sum += ccr_loo_1nn(set, kTotal);
        }
        const double mean = sum / static_cast<double>(reps);
        const double p = 1.0 / static_cast<double>(classes);
        const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n * reps));
        CHECK(std::abs(mean - p) <= 3.0 * sigma);
    }

    TEST_CASE("sample order does not matter")
    {
        std::mt19937_64 rng(22);
        const auto set = random_set(rng, 24, 3, 4);  // small graphs force distance ties
        const auto ref = evaluate(set, kTotal);
        for (int rep = 0; rep < 10; ++rep) {
            const auto shuffled = permuted(set, rng);
            const auto r = evaluate(shuffled, kTotal);
            CHECK(r.ccr == ref.ccr);
            CHECK(r.dbi == ref.dbi);
            CHECK(r.di == ref.di);
        }
    }

    TEST_CASE("renaming classes does not matter")
    {
        std::mt19937_64 rng(23);
        const auto set = random_set(rng, 30, 3, 6);
        auto renamed = set;
        for (auto& l : renamed.labels) l = l == "c0" ? "zeta" : l == "c1" ? "alpha" : "mid";
        for (const auto& id : distances::all_distance_ids()) {
            const auto a = evaluate(set, id);
            const auto b = evaluate(renamed, id);
            CHECK(a.ccr == b.ccr);
            CHECK(a.dbi == b.dbi);
            CHECK(a.di == b.di);
        }
    }

    TEST_CASE("duplicated samples classify perfectly")
    {
        std::mt19937_64 rng(24);
        const auto base = random_set(rng, 15, 3, 6);
        auto doubled = base;
        for (std::size_t k = 0; k < base.size(); ++k) {
            auto g = base.graphs[k];
            g.source_cycle += "_dup";
            doubled.graphs.push_back(g);
            doubled.labels.push_back(base.labels[k]);
        }
        for (const auto& id : distances::all_distance_ids()) {
            const auto d = feature_distances(base, id);
            bool indiscernible = true;
            for (Eigen::Index i = 0; i < d.rows(); ++i)
                for (Eigen::Index j = 0; j < d.cols(); ++j)
                    if (i != j && d(i, j) == 0.0) indiscernible = false;
            if (!indiscernible) continue;
            CAPTURE(id.name());
            CHECK(ccr_loo_1nn(doubled, id) == 1.0);
        }
    }

    TEST_CASE("ties go to the smallest sample id")
    {
        // All samples equidistant: each one takes the label of "a", or of "b" for "a" itself.
        Eigen::MatrixXd d = Eigen::MatrixXd::Constant(4, 4, 1.0);
        d.diagonal().setZero();
        const auto r = ccr_from_distances(d, {"B", "A", "A", "B"}, {"z", "m", "a", "b"});
        CHECK(r.ccr == 0.25);
        d(0, 3) = d(3, 0) = 1.0 + 1e-15;  // rounding-level gap is still a tie
        CHECK(ccr_from_distances(d, {"B", "A", "A", "B"}, {"z", "m", "a", "b"}).ccr == 0.25);
        d(0, 3) = d(3, 0) = 1.0 - 1e-9;
        CHECK(ccr_from_distances(d, {"B", "A", "A", "B"}, {"z", "m", "a", "b"}).ccr == 0.75);
    }

    TEST_CASE("input validation")
    {
        LabeledFeatureSet set;
        set.joint_order = names(3);
        add(set, "a", "A", edges(3, 0, 1));
        add(set, "b", "A", edges(3, 1, 1));
        CHECK(code_of([&] { set.validate(); }) == ErrorCode::TooFewSamples);
        add(set, "c", "B", edges(3, 2, 1));
        CHECK(code_of([&] { ccr_loo_1nn(set, kTotal); }) == ErrorCode::TooFewSamples);
        CHECK(code_of([] { parse_metric("auc"); }) == ErrorCode::InvalidConfig);
    }
}

TEST_SUITE("comparison and ablation")
{
    TEST_CASE("Frobenius and Hilbert-Schmidt rows agree")
    {
        std::mt19937_64 rng(25);
        const auto reports = compare_distances(random_set(rng, 20, 2, 6));
        REQUIRE(reports.size() == 11);
        const auto find = [&](DistanceKind k) {
            return *std::find_if(reports.begin(), reports.end(), [&](const EvalReport& r) { return r.distance_id.kind == k; });
        };
        const auto f = find(DistanceKind::Frobenius);
        const auto h = find(DistanceKind::HilbertSchmidt);
        CHECK(std::abs(f.ccr - h.ccr) < 1e-9);
        CHECK(std::abs(f.dbi - h.dbi) < 1e-9);
        CHECK(std::abs(f.di - h.di) < 1e-9);
    }

    TEST_CASE("empty graphs leave only the Jaccard row undefined")
    {
        auto set = test_support::separable_set(5, 4);
        for (std::size_t k = 4; k < 8; ++k) set.graphs[k].adjacency.setZero();
        CHECK(code_of([&] { evaluate(set, DistanceFunctionId{DistanceKind::Jaccard, 1}); }) ==
              ErrorCode::JaccardUndefined);
        const auto reports = compare_distances(set);
        REQUIRE(reports.size() == 11);
        for (const auto& r : reports) {
            if (r.distance_id.kind == DistanceKind::Jaccard) {
                CHECK(std::isnan(r.ccr));
                CHECK(r.notes.size() == 1);
            } else {
                CHECK(r.ccr == 1.0);
            }
        }
        CHECK(report_json(reports, {}).find("\"ccr\": null") != std::string::npos);
    }

    TEST_CASE("pair absent from every graph leaves the metric unchanged")
    {
        std::mt19937_64 rng(26);
        auto set = random_set(rng, 18, 3, 6);
        for (auto& g : set.graphs) g.adjacency(2, 4) = g.adjacency(4, 2) = 0.0;
        for (const auto m : {Metric::Ccr, Metric::Dbi, Metric::Di}) {
            const auto ab = ablate_joint_pairs(set, m);
            CHECK(ab.values(2, 4) == 0.0);
            CHECK(ab.values(4, 2) == 0.0);
            CHECK(ab.values == ab.values.transpose());
            CHECK(ab.values.diagonal().isZero(0.0));
            CHECK(ab.distance_id == default_distance(m));
        }
    }

    TEST_CASE("identity carried by one edge collapses to chance when it is removed")
    {
        const auto set = single_edge_identity(4);
        CHECK(ccr_loo_1nn(set, kTotal) == 1.0);
        const auto ab = ablate_joint_pairs(set, Metric::Ccr, kTotal);
        CHECK(ab.baseline == 1.0);
        CHECK(ab.values(0, 1) == 50.0);  // 1.0 -> 0.5 = 1 / C
        Eigen::MatrixXd rest = ab.values;
        rest(0, 1) = rest(1, 0) = 0.0;
        CHECK(rest.isZero(0.0));
    }

    TEST_CASE("ablation is deterministic across worker counts")
    {
        std::mt19937_64 rng(27);
        const auto set = random_set(rng, 16, 2, 5);
        EvalOptions one, four;
        four.jobs = 4;
        for (const auto m : {Metric::Ccr, Metric::Dbi}) {
            const auto a = ablate_joint_pairs(set, m, std::nullopt, one);
            const auto b = ablate_joint_pairs(set, m, std::nullopt, four);
            CHECK(ablation_csv(a) == ablation_csv(b));
        }
    }

    TEST_CASE("exports")
    {
        const auto set = test_support::separable_set(5, 3);
        const auto reports = compare_distances(set);
        const auto csv = report_table_csv(reports);
        CHECK(csv.rfind("distance,ccr,dbi,di\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
        const auto j = nlohmann::json::parse(report_json(reports, {}));
        CHECK(j.at("reports").size() == 11);
        CHECK(j.at("jaccard_complement") == true);

        const auto ab = ablate_joint_pairs(set, Metric::Ccr);
        const auto aj = nlohmann::json::parse(ablation_json(ab));
        CHECK(aj.at("joint_order").size() == 5);
        const auto gp = ablation_gnuplot(ab);
        CHECK(gp.front() == '#');
        CHECK(ablation_csv(ab).find("j0") != std::string::npos);
    }
}
