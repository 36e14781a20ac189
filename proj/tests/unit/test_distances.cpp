#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gaitggm/distances/distance.hpp"
#include "gaitggm/distances/svd.hpp"
#include "gaitggm/error.hpp"
#include "test_support.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

using namespace gaitggm;
using namespace gaitggm::distances;
using test_support::random_binary;
using test_support::random_real;

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

DistanceFunctionId id(DistanceKind kind, std::size_t k = 1) { return {kind, k}; }

// Number of eigenvalues of symmetric m below sigma: negative pivots of an
// unpivoted LDL^T of m - sigma I (Sylvester's law of inertia).
int count_below(const Eigen::MatrixXd& m, double sigma)
{
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd a = m - sigma * Eigen::MatrixXd::Identity(n, n);
    int negative = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        double piv = a(k, k);
        if (piv == 0.0) piv = -1e-300;
        if (piv < 0.0) ++negative;
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const double f = a(i, k) / piv;
            for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return negative;
}

double largest_eigenvalue_bisection(const Eigen::MatrixXd& m)
{
    double lo = 0.0;
    double hi = m.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;  // Gershgorin
    const int n = static_cast<int>(m.rows());
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(m, mid) == n) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Direct recomputation of the elementwise formulas.
struct Elementwise {
    double total = 0, frob = 0, maxabs = 0, min2 = 0, max2 = 0;
};

Elementwise elementwise(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    Elementwise e;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double d = a(i, j) - b(i, j);
            e.total += std::abs(d);
            e.frob += d * d;
            e.maxabs = std::max(e.maxabs, std::abs(d));
            e.min2 += std::pow(std::min(a(i, j), b(i, j)), 2);
            e.max2 += std::pow(std::max(a(i, j), b(i, j)), 2);
        }
    e.frob = std::sqrt(e.frob);
    e.min2 = std::sqrt(e.min2);
    e.max2 = std::sqrt(e.max2);
    return e;
}

std::vector<Eigen::MatrixXd> random_dataset(std::mt19937_64& rng, int count, Eigen::Index p, bool binary)
{
    std::vector<Eigen::MatrixXd> out;
    for (int i = 0; i < count; ++i) out.push_back(binary ? random_binary(rng, p) : random_real(rng, p, p));
    return out;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m)
{
    Eigen::VectorXd v(m.size());
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) v(k++) = m(r, c);
    return v;
}

}  // namespace

TEST_SUITE("elementwise")
{
    TEST_CASE("identical binary pair")
    {
        std::mt19937_64 rng(1);
        const auto a = random_binary(rng, 6, 0.5);
        REQUIRE(a.sum() > 0);
        CHECK(total_distance(a, a) == 0.0);
        CHECK(frobenius_distance(a, a) == 0.0);
        CHECK(max_distance(a, a) == 0.0);
        CHECK(hamming_distance(a, a) == 0.0);
        CHECK(jaccard_distance(a, a) == 1.0);
    }

    TEST_CASE("k flipped entries give total k")
    {
        std::mt19937_64 rng(2);
        auto a = random_binary(rng, 7);
        auto b = a;
        b(0, 3) = 1 - b(0, 3);
        b(4, 1) = 1 - b(4, 1);
        b(6, 2) = 1 - b(6, 2);
        CHECK(total_distance(a, b) == 3.0);
        CHECK(max_distance(a, b) == 7.0);
    }

    TEST_CASE("random real pairs match direct recomputation")
    {
        std::mt19937_64 rng(3);
        for (int rep = 0; rep < 50; ++rep) {
            const auto a = random_real(rng, 5, 5);
            const auto b = random_real(rng, 5, 5);
            const auto e = elementwise(a, b);
            CHECK(total_distance(a, b) == doctest::Approx(e.total).epsilon(1e-13));
            CHECK(frobenius_distance(a, b) == doctest::Approx(e.frob).epsilon(1e-13));
            CHECK(max_distance(a, b) == doctest::Approx(5.0 * e.maxabs).epsilon(1e-13));
            CHECK(jaccard_distance(a, b) == doctest::Approx(e.min2 / e.max2).epsilon(1e-13));
            CHECK(hamming_distance(a, b) == doctest::Approx((e.max2 - e.min2) / 20.0).epsilon(1e-13));

            double rmax = 0, cmax = 0;
            for (Eigen::Index i = 0; i < 5; ++i) {
                double r = 0, c = 0;
                for (Eigen::Index j = 0; j < 5; ++j) {
                    r += std::abs(a(i, j) - b(i, j));
                    c += std::abs(a(j, i) - b(j, i));
                }
                rmax = std::max(rmax, r);
                cmax = std::max(cmax, c);
            }
            CHECK(row_sum_distance(a, b) == doctest::Approx(rmax).epsilon(1e-13));
            CHECK(col_sum_distance(a, b) == doctest::Approx(cmax).epsilon(1e-13));
        }
    }

    TEST_CASE("errors")
    {
        const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
        CHECK(code_of([&] { jaccard_distance(z, z); }) == ErrorCode::JaccardUndefined);
        CHECK(code_of([&] { total_distance(z, Eigen::MatrixXd::Zero(4, 4)); }) == ErrorCode::DimensionMismatch);
        CHECK(code_of([&] { spectral_distance(z, Eigen::MatrixXd::Zero(3, 2)); }) == ErrorCode::DimensionMismatch);
        CHECK(code_of([&] { hamming_distance(Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1)); }) ==
              ErrorCode::DimensionMismatch);
        CHECK(code_of([&] { kyfan_distance(z, z, 0); }) == ErrorCode::InvalidConfig);
        CHECK(code_of([&] { kyfan_distance(z, z, 4); }) == ErrorCode::InvalidConfig);
    }
}

TEST_SUITE("operator norms")
{
    TEST_CASE("diagonal difference (3, -1)")
    {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
        a(0, 0) = 3;
        b(1, 1) = 1;
        CHECK(row_sum_distance(a, b) == 3.0);
        CHECK(col_sum_distance(a, b) == 3.0);
        CHECK(spectral_distance(a, b) == doctest::Approx(3.0).epsilon(1e-14));
    }

    TEST_CASE("all-ones difference")
    {
        for (Eigen::Index p : {2, 5, 28}) {
            const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(p, p);
            const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(p, p);
            const double pd = static_cast<double>(p);
            CHECK(row_sum_distance(ones, zero) == pd);
            CHECK(col_sum_distance(ones, zero) == pd);
            CHECK(spectral_distance(ones, zero) == doctest::Approx(pd).epsilon(1e-12));
        }
    }

    TEST_CASE("spectral matches the inertia-bisection eigen oracle")
    {
        std::mt19937_64 rng(4);
        for (int rep = 0; rep < 30; ++rep) {
            const auto a = random_real(rng, 6, 6);
            const auto b = random_real(rng, 6, 6);
            const Eigen::MatrixXd d = a - b;
            const double oracle = std::sqrt(largest_eigenvalue_bisection(d.transpose() * d));
            CHECK(std::abs(spectral_distance(a, b) - oracle) < 1e-8);
        }
    }
}

TEST_SUITE("singular values")
{
    TEST_CASE("Jacobi SVD reconstructs its input")
    {
        std::mt19937_64 rng(5);
        std::vector<Eigen::MatrixXd> cases{random_real(rng, 7, 7), random_real(rng, 9, 4), random_real(rng, 3, 8),
                                           random_binary(rng, 28), Eigen::MatrixXd::Zero(4, 4)};
        Eigen::MatrixXd low = random_real(rng, 6, 2) * random_real(rng, 2, 6);  // rank 2
        cases.push_back(low);
        for (const auto& m : cases) {
            const auto s = jacobi_svd(m);
            const Eigen::MatrixXd rec = s.u * s.singular_values.asDiagonal() * s.v.transpose();
            CHECK((rec - m).cwiseAbs().maxCoeff() < 1e-8);
            for (Eigen::Index k = 0; k < s.singular_values.size(); ++k) {
                CHECK(s.singular_values(k) >= 0.0);
                if (k > 0) CHECK(s.singular_values(k) <= s.singular_values(k - 1));
            }
            const Eigen::Index r = std::min(m.rows(), m.cols());
            const Eigen::MatrixXd vr = s.v.leftCols(r);
            CHECK((vr.transpose() * vr - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-10);
            const Eigen::VectorXd ref = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
            for (Eigen::Index k = 0; k < ref.size(); ++k) CHECK(std::abs(singular_values(m)(k) - ref(k)) < 1e-9);
        }
        CHECK(singular_values(low)(2) < 1e-12);
    }

    TEST_CASE("Ky-Fan(p) is the nuclear norm of |A - A'|")
    {
        std::mt19937_64 rng(6);
        for (int rep = 0; rep < 30; ++rep) {
            const auto a = random_real(rng, 5, 5);
            const auto b = random_real(rng, 5, 5);
            const Eigen::MatrixXd abs_d = (a - b).cwiseAbs();
            const double nuclear = Eigen::JacobiSVD<Eigen::MatrixXd>(abs_d).singularValues().sum();
            CHECK(std::abs(kyfan_distance(a, b, 5) - nuclear) < 1e-8);
            for (std::size_t k = 1; k < 5; ++k) CHECK(kyfan_distance(a, b, k) <= kyfan_distance(a, b, k + 1));
        }
    }

    TEST_CASE("zero difference and Hilbert-Schmidt identity")
    {
        std::mt19937_64 rng(7);
        const auto a = random_binary(rng, 8);
        for (std::size_t k = 1; k <= 8; ++k) CHECK(kyfan_distance(a, a, k) == 0.0);
        CHECK(hilbert_schmidt_distance(a, a) == 0.0);
        for (int rep = 0; rep < 20; ++rep) {
            const auto b = random_binary(rng, 8);
            CHECK(std::abs(hilbert_schmidt_distance(a, b) - frobenius_distance(a, b)) < 1e-9);
        }
    }

    TEST_CASE("Ky-Fan(1) equals spectral on a dominated pair")
    {
        std::mt19937_64 rng(8);
        const Eigen::MatrixXd lo = random_real(rng, 6, 6).cwiseAbs();
        const Eigen::MatrixXd hi = lo + random_real(rng, 6, 6).cwiseAbs();
        CHECK(std::abs(kyfan_distance(hi, lo, 1) - spectral_distance(hi, lo)) < 1e-12);
    }
}

TEST_SUITE("scatter")
{
    TEST_CASE("identical matrices give zero scatter and scaled Euclidean distance")
    {
        std::mt19937_64 rng(9);
        const auto a = random_real(rng, 3, 3);
        const auto model = fit_scatter({a, a, a}, 0.25);
        CHECK(model.sigma_t().cwiseAbs().maxCoeff() < 1e-24);  // mean of equal copies is exact up to rounding
        const auto b = random_real(rng, 3, 3);
        CHECK(mahalanobis_distance(a, b, model) == doctest::Approx(frobenius_distance(a, b) / 0.5).epsilon(1e-12));
    }

    TEST_CASE("two-point scatter is 2 v v^T")
    {
        std::mt19937_64 rng(10);
        const auto m = random_real(rng, 3, 3);
        const auto model = fit_scatter({m, Eigen::MatrixXd(-m)});
        const Eigen::VectorXd v = vec(m);
        CHECK((model.sigma_t() - 2.0 * v * v.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(model.mean().isZero(1e-15));
    }

    TEST_CASE("accumulation matches a brute-force covariance sum")
    {
        std::mt19937_64 rng(11);
        const auto data = random_dataset(rng, 50, 4, false);
        const auto model = fit_scatter(data);
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(16);
        for (const auto& m : data) mean += vec(m);
        mean /= 50.0;
        Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(16, 16);
        for (const auto& m : data)
            for (Eigen::Index i = 0; i < 16; ++i)
                for (Eigen::Index j = 0; j < 16; ++j) sigma(i, j) += (vec(m)(i) - mean(i)) * (vec(m)(j) - mean(j));
        CHECK((model.sigma_t() - sigma).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(model.gamma() == doctest::Approx(1e-6 * sigma.trace() / 16.0).epsilon(1e-12));
        CHECK(model.dimension() == 4);
        CHECK(code_of([] { fit_scatter({}); }) == ErrorCode::EmptyDataset);
    }

    TEST_CASE("Mahalanobis matches a solve-then-dot recomputation")
    {
        std::mt19937_64 rng(12);
        const auto data = random_dataset(rng, 30, 4, true);
        const auto model = fit_scatter(data);
        const Eigen::MatrixXd reg = model.sigma_t() + model.gamma() * Eigen::MatrixXd::Identity(16, 16);
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(reg);
        for (int rep = 0; rep < 20; ++rep) {
            const auto a = random_binary(rng, 4);
            const auto b = random_binary(rng, 4);
            const Eigen::VectorXd d = vec(a) - vec(b);
            const double oracle = std::sqrt(d.dot(lu.solve(d)));
            CHECK(std::abs(mahalanobis_distance(a, b, model) - oracle) <= 1e-10 * std::max(1.0, oracle));
        }
        const auto a = random_binary(rng, 4);
        CHECK(mahalanobis_distance(a, a, model) == 0.0);
    }

    TEST_CASE("zero scatter with unit regulariser is Euclidean")
    {
        const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
        const auto model = fit_scatter({z, z}, 1.0);
        std::mt19937_64 rng(13);
        const auto a = random_real(rng, 3, 3);
        const auto b = random_real(rng, 3, 3);
        CHECK(mahalanobis_distance(a, b, model) == doctest::Approx((a - b).norm()).epsilon(1e-14));
        CHECK(code_of([&] { mahalanobis_distance(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2), model); }) ==
              ErrorCode::DimensionMismatch);
    }
}

TEST_SUITE("properties")
{
    TEST_CASE("symmetry and identity for every function")
    {
        std::mt19937_64 rng(14);
        const auto data = random_dataset(rng, 40, 6, true);
        const auto model = fit_scatter(data);
        for (const auto& fid : all_distance_ids()) {
            for (int rep = 0; rep < 30; ++rep) {
                const auto& a = data[static_cast<std::size_t>(rep)];
                const auto& b = data[static_cast<std::size_t>(rep + 5)];
                if (fid.kind == DistanceKind::Jaccard && a.sum() == 0 && b.sum() == 0) continue;
                CHECK(distance(a, b, fid, &model) == distance(b, a, fid, &model));
                if (a.sum() == 0) continue;
                CHECK(distance(a, a, fid, &model) == (fid.kind == DistanceKind::Jaccard ? 1.0 : 0.0));
            }
        }
    }

    TEST_CASE("norm ordering on real and binary pairs")
    {
        std::mt19937_64 rng(15);
        for (int rep = 0; rep < 200; ++rep) {
            const bool binary = rep % 2 == 0;
            const auto a = binary ? random_binary(rng, 9) : random_real(rng, 9, 9);
            const auto b = binary ? random_binary(rng, 9) : random_real(rng, 9, 9);
            const double s = spectral_distance(a, b);
            const double hs = hilbert_schmidt_distance(a, b);
            CHECK(s <= hs * (1.0 + 1e-12));
            CHECK(hs <= total_distance(a, b) * (1.0 + 1e-12));
        }
    }

    TEST_CASE("triangle inequality for the norm-induced distances and Mahalanobis")
    {
        std::mt19937_64 rng(16);
        const auto data = random_dataset(rng, 60, 5, false);
        const auto model = fit_scatter(data);
        const std::vector<DistanceFunctionId> ids{id(DistanceKind::Total),     id(DistanceKind::Frobenius),
                                                  id(DistanceKind::Max),       id(DistanceKind::RowSum),
                                                  id(DistanceKind::ColSum),    id(DistanceKind::Spectral),
                                                  id(DistanceKind::HilbertSchmidt), id(DistanceKind::Mahalanobis)};
        std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
        for (const auto& fid : ids) {
            for (int rep = 0; rep < 300; ++rep) {
                const auto& a = data[pick(rng)];
                const auto& b = data[pick(rng)];
                const auto& c = data[pick(rng)];
                const double ac = distance(a, c, fid, &model);
                CHECK(ac <= (distance(a, b, fid, &model) + distance(b, c, fid, &model)) * (1.0 + 1e-12) + 1e-12);
            }
        }
    }
}

TEST_SUITE("dispatch")
{
    TEST_CASE("names parse back")
    {
        const auto ids = all_distance_ids();
        CHECK(ids.size() == 11);
        for (const auto& fid : ids) CHECK(parse_distance_id(fid.name()) == fid);
        CHECK(parse_distance_id("kyfan(3)") == id(DistanceKind::KyFan, 3));
        CHECK(parse_distance_id("kyfan7") == id(DistanceKind::KyFan, 7));
        CHECK(code_of([] { parse_distance_id("cosine"); }) == ErrorCode::InvalidConfig);
    }

    TEST_CASE("every id matches its dedicated function")
    {
        std::mt19937_64 rng(17);
        const auto data = random_dataset(rng, 10, 5, true);
        const auto model = fit_scatter(data);
        const auto& a = data[1];
        const auto& b = data[2];
        CHECK(distance(a, b, id(DistanceKind::Total)) == total_distance(a, b));
        CHECK(distance(a, b, id(DistanceKind::Frobenius)) == frobenius_distance(a, b));
        CHECK(distance(a, b, id(DistanceKind::Max)) == max_distance(a, b));
        CHECK(distance(a, b, id(DistanceKind::Jaccard)) == jaccard_distance(a, b));
        CHECK(distance(a, b, id(DistanceKind::Hamming)) == hamming_distance(a, b));
        CHECK(distance(a, b, id(DistanceKind::RowSum)) == row_sum_distance(a, b));
        CHECK(distance(a, b, id(DistanceKind::ColSum)) == col_sum_distance(a, b));
        CHECK(distance(a, b, id(DistanceKind::Spectral)) == spectral_distance(a, b));
        CHECK(distance(a, b, id(DistanceKind::KyFan, 3)) == kyfan_distance(a, b, 3));
        CHECK(distance(a, b, id(DistanceKind::HilbertSchmidt)) == hilbert_schmidt_distance(a, b));
        CHECK(distance(a, b, id(DistanceKind::Mahalanobis), &model) == mahalanobis_distance(a, b, model));
        CHECK(distance(a, a, id(DistanceKind::Total)) == 0.0);
        CHECK(code_of([&] { distance(a, b, id(DistanceKind::Mahalanobis)); }) == ErrorCode::MissingScatterModel);
    }

    TEST_CASE("distance matrix is symmetric and independent of the worker count")
    {
        std::mt19937_64 rng(18);
        const auto data = random_dataset(rng, 13, 6, true);
        const auto model = fit_scatter(data);
        for (const auto& fid : all_distance_ids()) {
            if (fid.kind == DistanceKind::Jaccard) continue;
            const auto d1 = distance_matrix(data, fid, &model, 1);
            const auto d4 = distance_matrix(data, fid, &model, 4);
            CHECK(d1 == d4);
            CHECK(d1 == d1.transpose());
            for (std::size_t i = 0; i < data.size(); ++i)
                for (std::size_t j = 0; j < data.size(); ++j)
                    CHECK(d1(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
                          distance(data[i], data[j], fid, &model));
        }
    }

    TEST_CASE("csv export")
    {
        Eigen::MatrixXd d(2, 2);
        d << 0, 0.1, 0.1, 0;
        CHECK(distance_matrix_csv({"x", "y"}, d) == "id,x,y\nx,0,0.10000000000000001\ny,0.10000000000000001,0\n");
    }
}
