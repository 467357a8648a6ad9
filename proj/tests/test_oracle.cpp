#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace lpspec;
using namespace lpspec_test;

namespace {

// Discriminant of t -> det(A_1 + t A_2), where A_i are the slices along the
// first index.
double slice_discriminant(const DenseTensor& a)
{
    auto det = [&](double s, double t) {
        auto m = [&](std::size_t j, std::size_t k) { return s * a.at({0, j, k}) + t * a.at({1, j, k}); };
        return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    };
    const double c0 = det(1, 0);
    const double c2 = det(0, 1);
    const double c1 = det(1, 1) - c0 - c2;
    return c1 * c1 - 4 * c0 * c2;
}

DenseTensor rotated(const DenseTensor& a, double angle)
{
    const double c = std::cos(angle), s = std::sin(angle);
    const Matrix r(2, 2, {c, -s, s, c});
    return multilinear_transform(a, std::vector<Matrix>(a.order(), r));
}

std::vector<double> sorted_values(const std::vector<CriticalPoint>& pts)
{
    std::vector<double> v;
    for (const auto& p : pts)
        v.push_back(p.value);
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST(Oracle, DiagonalMatrix)
{
    const auto a = DenseTensor::from_matrix(Matrix(2, 2, {3, 0, 0, 1}));
    const auto pts = enumerate_critical_points(a, PNormSpec(2), CriticalKind::singular, 20);
    std::vector<double> values;
    for (const auto& p : pts) {
        values.push_back(std::abs(p.value));
        EXPECT_LE(p.residual, oracle_tolerance);
        for (const auto& x : p.vectors)
            EXPECT_NEAR(std::max(std::abs(x[0]), std::abs(x[1])), 1.0, 1e-9);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end(), [](double x, double y) { return std::abs(x - y) < 1e-9; }),
                 values.end());
    ASSERT_EQ(values.size(), 2u);
    EXPECT_NEAR(values[0], 1.0, 1e-10);
    EXPECT_NEAR(values[1], 3.0, 1e-10);
}

TEST(Oracle, SingleEntryTensorContainsCoordinatePoint)
{
    const auto a = sparse_tensor({2, 2, 2}, {{{1, 1, 1}, 3.0}});
    const auto pts = enumerate_critical_points(a, PNormSpec(2), CriticalKind::singular, 20);
    const bool found = std::any_of(pts.begin(), pts.end(), [](const CriticalPoint& p) {
        if (std::abs(p.value - 3.0) > 1e-10)
            return false;
        return std::all_of(p.vectors.begin(), p.vectors.end(),
                           [](const Vector& x) { return std::abs(std::abs(x[0]) - 1.0) < 1e-10; });
    });
    EXPECT_TRUE(found);
}

TEST(Oracle, ContainsEigenSolverOutput)
{
    std::mt19937_64 rng(50);
    for (int t = 0; t < 3; ++t) {
        const auto a = random_symmetric(rng, 2, 3);
        const auto pts = enumerate_critical_points(a, PNormSpec(2), CriticalKind::eigen, 60);
        for (const auto& pr : solve_symmetric_eigenpairs(a, 2, SolverConfig{})) {
            const bool found = std::any_of(pts.begin(), pts.end(), [&](const CriticalPoint& q) {
                return std::abs(q.value - pr.lambda) < 1e-6 && max_abs_diff(q.vectors[0], pr.vector) < 1e-6;
            });
            EXPECT_TRUE(found) << "lambda " << pr.lambda;
        }
    }
}

TEST(Oracle, ResidualsAreRecomputed)
{
    std::mt19937_64 rng(51);
    const auto a = random_tensor(rng, {2, 3, 2});
    const PNormSpec ps({2, 3, 2});
    for (const auto& p : enumerate_critical_points(a, ps, CriticalKind::singular, 12)) {
        EXPECT_NEAR(p.value, multilinear_eval(a, p.vectors), 1e-9);
        EXPECT_LE(singular_residual(a, p.vectors, p.value, ps), 1e-9);
    }
}

TEST(Oracle, BudgetAndArguments)
{
    const auto big = DenseTensor::filled({6, 6, 6}, 1.0);
    EXPECT_THROW(enumerate_critical_points(big, PNormSpec(2), CriticalKind::singular, 40), SizeLimitError);
    const auto a = DenseTensor::filled({2, 2}, 1.0);
    EXPECT_THROW(enumerate_critical_points(a, PNormSpec(2), CriticalKind::singular, 0), ParameterError);
    EXPECT_THROW(enumerate_critical_points(DenseTensor::filled({2, 3}, 1.0), PNormSpec(2), CriticalKind::eigen, 10),
                 DimensionError);
}

TEST(Oracle, InvariantUnderRotation)
{
    std::mt19937_64 rng(52);
    const auto a = random_tensor(rng, {2, 2, 2});
    const auto before = sorted_values(enumerate_critical_points(a, PNormSpec(2), CriticalKind::singular, 20));
    const auto after = sorted_values(enumerate_critical_points(rotated(a, 0.7), PNormSpec(2), CriticalKind::singular, 20));
    ASSERT_EQ(before.size(), after.size());
    for (std::size_t i = 0; i < before.size(); ++i)
        EXPECT_NEAR(before[i], after[i], 1e-8);
}

TEST(Oracle, HyperdeterminantExamples)
{
    EXPECT_EQ(hyperdet_222(sparse_tensor({2, 2, 2}, {{{1, 1, 1}, 1.0}, {{2, 2, 2}, 1.0}})), 1.0);
    const auto single = sparse_tensor({2, 2, 2}, {{{1, 1, 1}, 1.0}});
    EXPECT_EQ(hyperdet_222(single), 0.0);
    // Witness: (e2, e2, e2) annihilates every contraction, so sigma = 0 works.
    const std::vector<Vector> e2(3, Vector{0, 1});
    EXPECT_EQ(singular_residual(single, e2, 0.0, PNormSpec(2)), 0.0);
    EXPECT_THROW(hyperdet_222(DenseTensor::filled({2, 2, 3}, 1.0)), DimensionError);
}

TEST(Oracle, HyperdeterminantMatchesSliceDiscriminant)
{
    std::mt19937_64 rng(53);
    for (int t = 0; t < 50; ++t) {
        const auto a = random_tensor(rng, {2, 2, 2});
        const double want = slice_discriminant(a);
        EXPECT_NEAR(hyperdet_222(a), want, 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST(Oracle, HyperdeterminantIsInvariantUnderSpecialLinearActions)
{
    std::mt19937_64 rng(54);
    const auto a = random_tensor(rng, {2, 2, 2});
    const double d = hyperdet_222(a);
    EXPECT_NEAR(hyperdet_222(rotated(a, 1.1)), d, 1e-12 * std::max(1.0, std::abs(d)));
    // Swapping two modes keeps the value.
    const auto swapped = DenseTensor::generate({2, 2, 2}, [&](const TensorIndex& j) { return a.at({j[1], j[0], j[2]}); });
    EXPECT_NEAR(hyperdet_222(swapped), d, 1e-12 * std::max(1.0, std::abs(d)));
    // Shear with determinant one on the first mode.
    const Matrix shear(2, 2, {1, 0.8, 0, 1});
    const auto sheared = multilinear_transform(a, std::vector<Matrix>{shear, Matrix::identity(2), Matrix::identity(2)});
    EXPECT_NEAR(hyperdet_222(sheared), d, 1e-12 * std::max(1.0, std::abs(d)));
}

TEST(Oracle, ZeroSingularValueIffHyperdeterminantVanishes)
{
    const std::vector<DenseTensor> degenerate{
        sparse_tensor({2, 2, 2}, {{{1, 1, 1}, 1.0}}),
        DenseTensor({2, 2, 2}, {1, 0, 0, 1, 1, 1, 0, 1}),
        DenseTensor({2, 2, 2}, {1, 2, 3, 4, 1, 2, 3, 4}),
    };
    for (const auto& a : degenerate) {
        EXPECT_LT(std::abs(hyperdet_222(a)), 1e-9);
        EXPECT_TRUE(has_zero_value(enumerate_critical_points(a, PNormSpec(2), CriticalKind::singular, 20), 1e-5));
    }
    std::mt19937_64 rng(55);
    for (int t = 0; t < 3; ++t) {
        const auto a = random_tensor(rng, {2, 2, 2});
        const bool zero = has_zero_value(enumerate_critical_points(a, PNormSpec(2), CriticalKind::singular, 20), 1e-5);
        EXPECT_EQ(zero, std::abs(hyperdet_222(a)) < 1e-9);
    }
}

TEST(Oracle, DenseSvdExamples)
{
    const auto d = dense_baseline_svd(Matrix(2, 2, {3, 0, 0, 1}));
    ASSERT_EQ(d.size(), 2u);
    EXPECT_NEAR(d[0].sigma, 3.0, 1e-14);
    EXPECT_NEAR(d[1].sigma, 1.0, 1e-14);
    const double c = std::cos(M_PI / 6), s = std::sin(M_PI / 6);
    const auto r = dense_baseline_svd(Matrix(2, 2, {c, -s, s, c}));
    EXPECT_NEAR(r[0].sigma, 1.0, 1e-14);
    EXPECT_NEAR(r[1].sigma, 1.0, 1e-14);
}

TEST(Oracle, DenseSvdReconstructs)
{
    std::mt19937_64 rng(56);
    const Matrix m(5, 5, normal_vector(rng, 25));
    const auto svd = dense_baseline_svd(m);
    ASSERT_EQ(svd.size(), 5u);
    Matrix rec(5, 5);
    for (const auto& t : svd)
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j)
                rec(i, j) += t.sigma * t.u[i] * t.v[j];
    EXPECT_LT(max_abs_diff(rec.data, m.data) / norm2(m.data), 1e-10);
    for (std::size_t i = 1; i < 5; ++i)
        EXPECT_GE(svd[i - 1].sigma, svd[i].sigma);
}

TEST(Oracle, DenseSymeigReconstructs)
{
    std::mt19937_64 rng(57);
    Matrix m(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i; j < 5; ++j)
            m(i, j) = m(j, i) = std::normal_distribution<double>()(rng);
    const auto eig = dense_baseline_symeig(m);
    ASSERT_EQ(eig.size(), 5u);
    for (const auto& e : eig) {
        const auto y = m * e.x;
        Vector r(5);
        for (std::size_t i = 0; i < 5; ++i)
            r[i] = y[i] - e.lambda * e.x[i];
        EXPECT_LT(norm2(r), 1e-12);
        EXPECT_NEAR(norm2(e.x), 1.0, 1e-14);
    }
    for (std::size_t i = 1; i < 5; ++i)
        EXPECT_GE(eig[i - 1].lambda, eig[i].lambda);
}
