#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gaitggm/error.hpp"
#include "gaitggm/synth/var.hpp"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <set>

using namespace gaitggm;
using namespace gaitggm::synth;

namespace {

template <class F>
ErrorCode code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected gaitggm::Error");
    return ErrorCode::InvalidConfig;
}

// Reference splitmix64 finaliser, written from the published constants.
std::uint64_t splitmix_ref(std::uint64_t state)
{
    std::uint64_t z = state;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

double mean_of(const Eigen::RowVectorXd& x) { return x.mean(); }

double variance_of(const Eigen::RowVectorXd& x)
{
    const double m = x.mean();
    return (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
}

double lag1_autocorrelation(const Eigen::RowVectorXd& x)
{
    const Eigen::Index n = x.size();
    const Eigen::RowVectorXd c = x.array() - x.mean();
    return c.head(n - 1).dot(c.tail(n - 1)) / c.squaredNorm();
}

double eigen_spectral_radius(const Eigen::MatrixXd& a)
{
    return Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("rng") {
TEST_CASE("counter stream matches the splitmix64 reference")
{
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xDEADBEEFULL}) {
        CounterRng rng(seed);
        for (std::uint64_t k = 1; k <= 64; ++k) CHECK(rng.next() == splitmix_ref(seed + k * 0x9E3779B97F4A7C15ULL));
        CHECK(rng.counter() == 64);
    }
}

TEST_CASE("stream is a pure function of seed and counter")
{
    CounterRng a(7);
    for (int i = 0; i < 100; ++i) a.next();
    CounterRng b(7, 100);
    for (int i = 0; i < 50; ++i) CHECK(a.next() == b.next());
    CounterRng c(8);
    CounterRng d(7);
    CHECK(c.next() != d.next());
}

TEST_CASE("uniform and gaussian moments")
{
    CounterRng rng(123);
    const int n = 200000;
    double su = 0.0, sg = 0.0, sg2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
    }
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        REQUIRE(std::isfinite(g));
        sg += g;
        sg2 += g * g;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sg / n) < 0.01);
    CHECK(sg2 / n == doctest::Approx(1.0).epsilon(0.02));
}
}

TEST_SUITE("spectral radius") {
TEST_CASE("closed-form examples")
{
    Eigen::MatrixXd diag = Eigen::Vector2d(0.5, -0.8).asDiagonal();
    CHECK(spectral_radius(diag) == doctest::Approx(0.8).epsilon(1e-9));

    Eigen::MatrixXd nilpotent = Eigen::MatrixXd::Zero(3, 3);
    nilpotent(0, 1) = 2.0;
    nilpotent(1, 2) = 5.0;
    CHECK(spectral_radius(nilpotent) == 0.0);
    CHECK(spectral_radius(Eigen::MatrixXd::Zero(4, 4)) == 0.0);

    const double th = 0.7;
    Eigen::MatrixXd rot(2, 2);
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    CHECK(spectral_radius(0.9 * rot) == doctest::Approx(0.9).epsilon(1e-9));

    Eigen::MatrixXd jordan(2, 2);
    jordan << 0.6, 1.0, 0.0, 0.6;
    CHECK(spectral_radius(jordan) == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("agrees with the eigenvalue solver on random matrices")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 2 + trial % 9;
        const Eigen::MatrixXd a = test_support::random_real(rng, n, n, 0.4);
        const double expected = eigen_spectral_radius(a);
        CHECK(spectral_radius(a, 1e-12) == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("non-square input")
{
    CHECK(code_of([] { spectral_radius(Eigen::MatrixXd::Zero(2, 3)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("companion layout")
{
    VarProcess proc;
    proc.p = 2;
    Eigen::MatrixXd c1(2, 2), c2(2, 2);
    c1 << 0.1, 0.2, 0.3, 0.4;
    c2 << 0.5, 0.6, 0.7, 0.8;
    proc.coeffs = {c1, c2};
    Eigen::MatrixXd expected(4, 4);
    expected << 0.1, 0.2, 0.5, 0.6,  //
        0.3, 0.4, 0.7, 0.8,          //
        1.0, 0.0, 0.0, 0.0,          //
        0.0, 1.0, 0.0, 0.0;
    CHECK(companion_matrix(proc) == expected);
}
}

TEST_SUITE("simulation") {
TEST_CASE("white noise has the configured standard deviation")
{
    for (int dims : {1, 3}) {
        auto proc = white_noise_process(3, 0.25, 5);
        proc.dims_per_series = dims;
        const Eigen::MatrixXd x = simulate(proc, 10000);
        REQUIRE(x.rows() == 3 * dims);
        REQUIRE(x.cols() == 10000);
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            CHECK(std::sqrt(variance_of(x.row(r))) == doctest::Approx(0.25).epsilon(0.05));
            CHECK(std::abs(mean_of(x.row(r))) < 0.05 * 0.25);
        }
    }
}

TEST_CASE("AR(1) lag-one autocorrelation")
{
    VarProcess proc;
    proc.p = 1;
    proc.coeffs = {Eigen::MatrixXd::Constant(1, 1, 0.9)};
    proc.noise_std = 1.0;
    proc.dims_per_series = 1;
    proc.seed = 3;
    const Eigen::MatrixXd x = simulate(proc, 10000);
    CHECK(lag1_autocorrelation(x.row(0)) == doctest::Approx(0.9).epsilon(0.05 / 0.9));
    // Stationary variance sigma^2 / (1 - a^2).
    CHECK(variance_of(x.row(0)) == doctest::Approx(1.0 / (1.0 - 0.81)).epsilon(0.2));
}

TEST_CASE("halves of a stationary run agree")
{
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto proc = chain_process(4, 0.6, 1.0, seed);
        const Eigen::MatrixXd x = simulate(proc, 8000);
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            const Eigen::RowVectorXd a = x.row(r).head(4000);
            const Eigen::RowVectorXd b = x.row(r).tail(4000);
            const double sd = std::sqrt(variance_of(x.row(r)));
            CHECK(std::abs(mean_of(a) - mean_of(b)) < 0.2 * sd);
            CHECK(variance_of(b) == doctest::Approx(variance_of(a)).epsilon(0.2));
        }
    }
}

TEST_CASE("residuals reproduce the noise stream")
{
    // Order-2 process, one channel: frame t, series i uses gaussian draw number t * p + i.
    VarProcess proc;
    proc.p = 3;
    Eigen::MatrixXd c1 = Eigen::MatrixXd::Zero(3, 3), c2 = Eigen::MatrixXd::Zero(3, 3);
    c1(1, 0) = 0.4;
    c1(2, 2) = 0.3;
    c2(2, 1) = -0.35;
    c2(0, 0) = 0.2;
    proc.coeffs = {c1, c2};
    proc.noise_std = 0.5;
    proc.dims_per_series = 1;
    proc.seed = 99;
    const std::size_t n = 60;
    const Eigen::MatrixXd x = simulate(proc, n);
    const std::size_t burn = 20;
    for (Eigen::Index k = 2; k < x.cols(); ++k) {
        const Eigen::VectorXd e = x.col(k) - c1 * x.col(k - 1) - c2 * x.col(k - 2);
        for (Eigen::Index i = 0; i < 3; ++i) {
            const auto draw = (burn + static_cast<std::size_t>(k)) * 3 + static_cast<std::size_t>(i);
            CounterRng rng(proc.seed, 2 * draw);
            CHECK(e(i) == doctest::Approx(proc.noise_std * rng.gaussian()).epsilon(1e-12));
        }
    }
}

TEST_CASE("same seed is bit-identical, different seed differs")
{
    auto proc = chain_process(5, 0.6, 0.1, 17);
    const Eigen::MatrixXd a = simulate(proc, 300);
    const Eigen::MatrixXd b = simulate(proc, 300);
    CHECK(a == b);
    proc.seed = 18;
    CHECK(simulate(proc, 300) != a);
}

TEST_CASE("validation")
{
    VarProcess empty;
    CHECK(code_of([&] { empty.validate(); }) == ErrorCode::InvalidConfig);

    auto unit_root = chain_process(2, 0.5, 1.0, 0);
    unit_root.coeffs.front()(0, 0) = 1.0;
    CHECK(code_of([&] { simulate(unit_root, 100); }) == ErrorCode::NonStationary);

    auto explosive = chain_process(3, 0.5, 1.0, 0);
    explosive.coeffs.front().diagonal().setConstant(1.2);
    CHECK(code_of([&] { explosive.validate(); }) == ErrorCode::NonStationary);

    auto wrong_shape = chain_process(3, 0.5, 1.0, 0);
    wrong_shape.coeffs.front() = Eigen::MatrixXd::Zero(2, 3);
    CHECK(code_of([&] { wrong_shape.validate(); }) == ErrorCode::DimensionMismatch);

    auto bad_noise = chain_process(3, 0.5, 0.0, 0);
    CHECK(code_of([&] { bad_noise.validate(); }) == ErrorCode::InvalidConfig);

    auto bad_dims = chain_process(3, 0.5, 1.0, 0);
    bad_dims.dims_per_series = 2;
    CHECK(code_of([&] { bad_dims.validate(); }) == ErrorCode::InvalidConfig);

    auto short_run = chain_process(3, 0.5, 1.0, 0);
    CHECK(code_of([&] { simulate(short_run, 10); }) == ErrorCode::InvalidConfig);
    CHECK(simulate(short_run, 11).cols() == 11);
}

TEST_CASE("generate_var lays series out as joints")
{
    auto proc = chain_process(3, 0.5, 1.0, 4);
    proc.dims_per_series = 1;
    const auto cycle = generate_var(proc, 50);
    CHECK(cycle.joints == std::vector<std::string>{"s1", "s2", "s3"});
    CHECK(cycle.subject_label == "chain");
    CHECK(cycle.sequence_id == "4");
    REQUIRE(cycle.coords.rows() == 9);
    const Eigen::MatrixXd x = simulate(proc, 50);
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(cycle.coords.row(3 * i) == x.row(i));
        CHECK(cycle.coords.row(3 * i + 1).isZero(0.0));
        CHECK(cycle.coords.row(3 * i + 2).isZero(0.0));
    }
    proc.dims_per_series = 3;
    CHECK(generate_var(proc, 50).coords == simulate(proc, 50));
}

TEST_CASE("named processes")
{
    const auto chain = true_graph(named_process("chain", 4, 0.5, 1.0, 0));
    const auto reverse = true_graph(named_process("reverse", 4, 0.5, 1.0, 0));
    const auto star = true_graph(named_process("star", 4, 0.5, 1.0, 0));
    const auto null = true_graph(named_process("null", 4, 0.5, 1.0, 0));
    CHECK(chain.adjacency == reverse.adjacency.transpose());
    CHECK(chain.edge_count() == 3);
    CHECK(chain.adjacency(0, 1) == 1.0);
    CHECK(reverse.adjacency(1, 0) == 1.0);
    CHECK(star.edge_count() == 3);
    CHECK(star.adjacency.row(0).sum() == 3.0);
    CHECK(null.edge_count() == 0);
    CHECK(named_process("star", 4, 0.5, 1.0, 0).label == "star");
    CHECK(code_of([] { named_process("ring", 4, 0.5, 1.0, 0); }) == ErrorCode::InvalidConfig);
}
}

TEST_SUITE("ground truth") {
TEST_CASE("true graph of simple tensors")
{
    CHECK(true_graph(white_noise_process(4, 1.0, 0)).edge_count() == 0);

    VarProcess proc = white_noise_process(3, 1.0, 0);
    proc.coeffs.push_back(Eigen::MatrixXd::Zero(3, 3));
    proc.coeffs[1](1, 0) = 0.5;  // series 1 at lag 2 drives series 2
    const auto g = true_graph(proc);
    CHECK(g.edge_count() == 1);
    CHECK(g.adjacency(0, 1) == 1.0);
    CHECK(g.joint_order == series_names(3));

    proc.coeffs[0](2, 2) = 0.9;  // self-lag is never an edge
    CHECK(true_graph(proc).edge_count() == 1);
    CHECK(true_graph(proc, 0.5).edge_count() == 0);
}

TEST_CASE("true graph matches a brute-force scan")
{
    std::mt19937_64 rng(21);
    std::bernoulli_distribution on(0.25);
    std::uniform_real_distribution<double> mag(-0.3, 0.3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t p = 2 + static_cast<std::size_t>(trial % 7);
        const std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
        VarProcess proc;
        proc.p = p;
        std::set<std::pair<std::size_t, std::size_t>> expected;
        for (std::size_t k = 0; k < d; ++k) {
            Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
            for (std::size_t i = 0; i < p; ++i)
                for (std::size_t j = 0; j < p; ++j)
                    if (on(rng)) {
                        const double v = mag(rng);
                        c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                        if (i != j && std::abs(v) > 0.1) expected.insert({j, i});
                    }
            proc.coeffs.push_back(c);
        }
        const auto g = true_graph(proc, 0.1);
        std::set<std::pair<std::size_t, std::size_t>> got;
        for (Eigen::Index r = 0; r < g.adjacency.rows(); ++r)
            for (Eigen::Index c = 0; c < g.adjacency.cols(); ++c)
                if (g.adjacency(r, c) != 0.0) got.insert({static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
        CHECK(got == expected);
    }
}

TEST_CASE("recovery metrics conventions")
{
    const auto truth = true_graph(chain_process(4, 0.5, 1.0, 0));
    const auto perfect = recovery_metrics(truth, truth);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.spurious_rate == 0.0);
    CHECK(perfect.true_positives == 3);
    CHECK(perfect.true_negatives == 9);

    auto empty = truth;
    empty.adjacency.setZero();
    const auto none = recovery_metrics(empty, truth);
    CHECK(none.precision == 1.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);
    CHECK(none.false_negatives == 3);

    const auto nothing_true = recovery_metrics(truth, empty);
    CHECK(nothing_true.recall == 1.0);
    CHECK(nothing_true.precision == 0.0);
    CHECK(nothing_true.spurious_rate == doctest::Approx(3.0 / 12.0));

    auto small = truth;
    small.adjacency = Eigen::MatrixXd::Zero(3, 3);
    CHECK(code_of([&] { recovery_metrics(small, truth); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("recovery metrics match exhaustive counts")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index p = 2 + trial % 8;
        granger::CausalGraph e, t;
        e.adjacency = test_support::random_binary(rng, p, 0.3);
        t.adjacency = test_support::random_binary(rng, p, 0.3);
        double tp = 0, fp = 0, fn = 0, tn = 0;
        for (Eigen::Index r = 0; r < p; ++r)
            for (Eigen::Index c = 0; c < p; ++c) {
                if (r == c) continue;
                const bool a = e.adjacency(r, c) == 1.0, b = t.adjacency(r, c) == 1.0;
                tp += a && b;
                fp += a && !b;
                fn += !a && b;
                tn += !a && !b;
            }
        const auto s = recovery_metrics(e, t);
        CHECK(static_cast<double>(s.true_positives) == tp);
        CHECK(static_cast<double>(s.false_positives) == fp);
        CHECK(static_cast<double>(s.false_negatives) == fn);
        CHECK(static_cast<double>(s.true_negatives) == tn);
        const double prec = tp + fp > 0 ? tp / (tp + fp) : 1.0;
        const double rec = tp + fn > 0 ? tp / (tp + fn) : 1.0;
        CHECK(s.precision == doctest::Approx(prec));
        CHECK(s.recall == doctest::Approx(rec));
        CHECK(s.f1 == doctest::Approx(prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0));
        CHECK(s.spurious_rate == doctest::Approx(fp + tn > 0 ? fp / (fp + tn) : 0.0));
    }
}
}
