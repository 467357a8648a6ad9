#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace lpspec;
using namespace lpspec_test;

namespace {

Vector e(std::size_t n, std::size_t i)
{
    Vector v(n, 0.0);
    v[i] = 1.0;
    return v;
}

// Direct definition of A(M_1, .., M_k): sum over all source indices for every
// target index.
DenseTensor naive_transform(const DenseTensor& a, const std::vector<Matrix>& ms)
{
    std::vector<std::size_t> out_dims;
    for (const auto& m : ms)
        out_dims.push_back(m.cols);
    return DenseTensor::generate(out_dims, [&](const TensorIndex& c) {
        double s = 0.0;
        for (std::size_t off = 0; off < a.size(); ++off) {
            const auto j = a.unravel(off);
            double term = a.values()[off];
            for (std::size_t m = 0; m < ms.size(); ++m)
                term *= ms[m](j[m], c[m]);
            s += term;
        }
        return s;
    });
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c)
{
    return Matrix(r, c, normal_vector(rng, r * c));
}

Matrix integer_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c)
{
    std::uniform_int_distribution<int> dist(-3, 3);
    Matrix m(r, c);
    for (auto& v : m.data)
        v = dist(rng);
    return m;
}

} // namespace

TEST(Tensor, ConstructionValidates)
{
    EXPECT_THROW(DenseTensor({3}, {1, 2, 3}), DimensionError);
    EXPECT_THROW(DenseTensor({2, 0}, {}), DimensionError);
    EXPECT_THROW(DenseTensor({2, 2}, {1, 2, 3}), DimensionError);
    EXPECT_THROW(DenseTensor({2, 1}, {1, std::nan("")}), DomainError);
    const DenseTensor t({2, 3}, {1, 2, 3, 4, 5, 6});
    EXPECT_EQ(t.at({1, 0}), 4.0);
    EXPECT_EQ(t.unravel(t.offset(TensorIndex{1, 2})), (TensorIndex{1, 2}));
}

TEST(Tensor, MultilinearEvalExamples)
{
    const auto id = DenseTensor::from_matrix(Matrix::identity(2));
    EXPECT_EQ(multilinear_eval(id, std::vector<Vector>{{1, 0}, {1, 0}}), 1.0);
    const auto ones = DenseTensor::filled({2, 2, 2}, 1.0);
    EXPECT_EQ(multilinear_eval(ones, std::vector<Vector>(3, Vector{1, 1})), 8.0);
    const auto single = sparse_tensor({2, 2, 2}, {{{1, 2, 2}, 5.0}});
    EXPECT_EQ(multilinear_eval(single, std::vector<Vector>{e(2, 0), e(2, 1), e(2, 1)}), 5.0);
}

TEST(Tensor, MultilinearEvalDimensionErrorNamesMode)
{
    const auto ones = DenseTensor::filled({2, 3, 2}, 1.0);
    try {
        multilinear_eval(ones, std::vector<Vector>{{1, 1}, {1, 1}, {1, 1}});
        FAIL() << "expected DimensionError";
    } catch (const DimensionError& err) {
        EXPECT_NE(std::string(err.what()).find("mode 2"), std::string::npos) << err.what();
    }
    EXPECT_THROW(multilinear_eval(ones, std::vector<Vector>{{1, 1}, {1, 1, 1}}), DimensionError);
}

TEST(Tensor, MultilinearTransformExamples)
{
    std::mt19937_64 rng(1);
    const auto a = random_tensor(rng, {2, 3, 2});
    std::vector<Matrix> ids{Matrix::identity(2), Matrix::identity(3), Matrix::identity(2)};
    EXPECT_EQ(multilinear_transform(a, ids), a);

    const Matrix m(2, 2, {1, 2, 3, 4});
    const Matrix p(2, 3, {1, 0, 2, -1, 1, 0});
    const Matrix q(2, 2, {0, 1, 1, 1});
    const auto got = multilinear_transform(DenseTensor::from_matrix(m), std::vector<Matrix>{p, q});
    const auto want = p.transposed() * m * q;
    EXPECT_EQ(got.dims(), (std::vector<std::size_t>{3, 2}));
    EXPECT_EQ(Vector(got.values().begin(), got.values().end()), want.data);

    const auto ones = DenseTensor::filled({2, 2, 2}, 1.0);
    const Vector one{1, 1};
    const auto col = Matrix::column(one);
    const auto r = multilinear_transform(ones, std::vector<Matrix>(3, col));
    EXPECT_EQ(r.dims(), (std::vector<std::size_t>{1, 1, 1}));
    EXPECT_EQ(r.values()[0], 8.0);

    EXPECT_THROW(multilinear_transform(ones, std::vector<Matrix>(3, Matrix::identity(3))), DimensionError);
    EXPECT_THROW(multilinear_transform(ones, std::vector<Matrix>(2, Matrix::identity(2))), DimensionError);
}

TEST(Tensor, MultilinearTransformMatchesDefinition)
{
    std::mt19937_64 rng(2);
    // Integer data: every partial sum is exact, so summation order cannot matter.
    for (int t = 0; t < 5; ++t) {
        std::uniform_int_distribution<int> dist(-4, 4);
        const auto a = DenseTensor::generate({2, 3, 2}, [&](const TensorIndex&) { return dist(rng); });
        std::vector<Matrix> ms{integer_matrix(rng, 2, 3), integer_matrix(rng, 3, 2), integer_matrix(rng, 2, 4)};
        EXPECT_EQ(multilinear_transform(a, ms), naive_transform(a, ms));
    }
    for (int t = 0; t < 5; ++t) {
        const auto a = random_tensor(rng, {3, 2, 2});
        std::vector<Matrix> ms{random_matrix(rng, 3, 2), random_matrix(rng, 2, 3), random_matrix(rng, 2, 2)};
        const auto got = multilinear_transform(a, ms);
        const auto want = naive_transform(a, ms);
        EXPECT_LT(max_abs_diff(Vector(got.values().begin(), got.values().end()),
                               Vector(want.values().begin(), want.values().end())),
                  1e-12);
    }
}

TEST(Tensor, MultilinearTransformComposes)
{
    std::mt19937_64 rng(3);
    const auto a = random_tensor(rng, {2, 3, 2});
    std::vector<Matrix> m{random_matrix(rng, 2, 3), random_matrix(rng, 3, 2), random_matrix(rng, 2, 2)};
    std::vector<Matrix> n{random_matrix(rng, 3, 2), random_matrix(rng, 2, 2), random_matrix(rng, 2, 3)};
    std::vector<Matrix> mn;
    for (std::size_t i = 0; i < 3; ++i)
        mn.push_back(m[i] * n[i]);
    const auto lhs = multilinear_transform(multilinear_transform(a, m), n);
    const auto rhs = multilinear_transform(a, mn);
    EXPECT_LT(max_abs_diff(Vector(lhs.values().begin(), lhs.values().end()),
                           Vector(rhs.values().begin(), rhs.values().end())),
              1e-12);
}

TEST(Tensor, MultilinearEvalIsLinearInEachSlot)
{
    std::mt19937_64 rng(4);
    const auto a = random_tensor(rng, {3, 2, 4});
    std::vector<Vector> xs{normal_vector(rng, 3), normal_vector(rng, 2), normal_vector(rng, 4)};
    for (std::size_t m = 0; m < 3; ++m) {
        const auto y = normal_vector(rng, a.dim(m));
        auto xs_y = xs;
        xs_y[m] = y;
        auto xs_comb = xs;
        for (std::size_t i = 0; i < y.size(); ++i)
            xs_comb[m][i] = 2.5 * xs[m][i] - 0.75 * y[i];
        const double want = 2.5 * multilinear_eval(a, xs) - 0.75 * multilinear_eval(a, xs_y);
        EXPECT_NEAR(multilinear_eval(a, xs_comb), want, 1e-12 * (1 + std::abs(want)));
    }
}

TEST(Tensor, PartialContractionExamples)
{
    const auto ones = DenseTensor::filled({2, 2, 2}, 1.0);
    std::vector<Vector> xs(3, Vector{1, 1});
    EXPECT_EQ(partial_contraction(ones, xs, 0), (Vector{4, 4}));
    const Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
    const Vector x1{2, -1};
    std::vector<Vector> ys{x1, {}};
    EXPECT_EQ(partial_contraction(DenseTensor::from_matrix(m), ys, 1), m.transposed() * x1);
    EXPECT_THROW(partial_contraction(ones, xs, 3), ModeError);
}

TEST(Tensor, PartialContractionIsGradient)
{
    std::mt19937_64 rng(5);
    const auto a = random_tensor(rng, {2, 3, 2});
    std::vector<Vector> xs{normal_vector(rng, 2), normal_vector(rng, 3), normal_vector(rng, 2)};
    for (std::size_t m = 0; m < 3; ++m) {
        auto f = [&](const Vector& v) {
            auto ys = xs;
            ys[m] = v;
            return multilinear_eval(a, ys);
        };
        EXPECT_LT(relative_error(partial_contraction(a, xs, m), central_difference(f, xs[m])), 1e-6);
    }
}

TEST(Tensor, PartialContraction2MatchesSingleContractions)
{
    std::mt19937_64 rng(6);
    const auto a = random_tensor(rng, {2, 3, 4});
    std::vector<Vector> xs{normal_vector(rng, 2), normal_vector(rng, 3), normal_vector(rng, 4)};
    const auto h = partial_contraction2(a, xs, 2, 0);
    ASSERT_EQ(h.rows, 4u);
    ASSERT_EQ(h.cols, 2u);
    // h * x_1 contracts mode 1 and leaves mode 3 free.
    EXPECT_LT(max_abs_diff(h * xs[0], partial_contraction(a, xs, 2)), 1e-12);
    EXPECT_THROW(partial_contraction2(a, xs, 1, 1), ModeError);
}

TEST(Tensor, HomogeneousEvalExamples)
{
    const auto ones = DenseTensor::filled({2, 2, 2}, 1.0);
    EXPECT_EQ(homogeneous_eval(ones, Vector{1, 1}), 8.0);
    const auto single = sparse_tensor({2, 2, 2}, {{{1, 1, 1}, 1.0}});
    EXPECT_EQ(homogeneous_eval(single, Vector{1.5, -7}), 1.5 * 1.5 * 1.5);
    EXPECT_THROW(homogeneous_eval(DenseTensor::filled({2, 3}, 1.0), Vector{1, 1}), DimensionError);
}

TEST(Tensor, HomogeneousGradientExamples)
{
    const auto ones = DenseTensor::filled({2, 2, 2}, 1.0);
    EXPECT_EQ(homogeneous_gradient(ones, Vector{1, 1}), (Vector{12, 12}));
    const auto single = sparse_tensor({2, 2, 2}, {{{1, 1, 1}, 1.0}});
    EXPECT_EQ(homogeneous_gradient(single, Vector{2, 5}), (Vector{12, 0}));
    const auto nonsym = sparse_tensor({2, 2, 2}, {{{1, 1, 2}, 1.0}});
    EXPECT_THROW(homogeneous_gradient(nonsym, Vector{1, 1}), SymmetryError);
    EXPECT_NO_THROW(homogeneous_gradient(nonsym, Vector{1, 1}, false));
}

TEST(Tensor, HomogeneousGradientMatchesFiniteDifference)
{
    std::mt19937_64 rng(7);
    const auto a = random_symmetric(rng, 3, 3);
    for (int t = 0; t < 5; ++t) {
        const auto x = normal_vector(rng, 3);
        auto f = [&](const Vector& v) { return homogeneous_eval(a, v); };
        EXPECT_LT(relative_error(homogeneous_gradient(a, x), central_difference(f, x)), 1e-6);
    }
}

TEST(Tensor, SymmetryChecks)
{
    EXPECT_TRUE(is_symmetric(DenseTensor::filled({3, 3, 3}, 1.0)));
    EXPECT_FALSE(is_symmetric(DenseTensor::filled({2, 3, 2}, 1.0)));
    EXPECT_FALSE(is_symmetric(sparse_tensor({2, 2, 2}, {{{1, 1, 2}, 1.0}})));
    const auto near = sparse_tensor({2, 2}, {{{1, 2}, 1.0}, {{2, 1}, 1.0 + 1e-13}});
    EXPECT_FALSE(is_symmetric(near));
    EXPECT_TRUE(is_symmetric(near, 1e-12));
}

TEST(Tensor, SymmetrizeExamples)
{
    std::mt19937_64 rng(8);
    const auto s = random_symmetric(rng, 3, 3);
    EXPECT_TRUE(is_symmetric(s));
    EXPECT_EQ(symmetrize(s), s);
    const auto orbit = symmetrize(sparse_tensor({2, 2, 2}, {{{1, 1, 2}, 3.0}}));
    EXPECT_EQ(orbit, sparse_tensor({2, 2, 2}, {{{1, 1, 2}, 1.0}, {{1, 2, 1}, 1.0}, {{2, 1, 1}, 1.0}}));
    EXPECT_THROW(symmetrize(DenseTensor::filled({2, 3}, 1.0)), DimensionError);
}

TEST(Tensor, SymmetrizePreservesHomogeneousEval)
{
    std::mt19937_64 rng(9);
    const auto a = random_tensor(rng, {3, 3, 3});
    const auto s = symmetrize(a);
    for (int t = 0; t < 10; ++t) {
        const auto x = normal_vector(rng, 3);
        const double want = homogeneous_eval(a, x);
        EXPECT_NEAR(homogeneous_eval(s, x), want, 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST(Tensor, SymmetricModeContractionsAreIdentical)
{
    std::mt19937_64 rng(10);
    for (std::size_t k : {3u, 4u}) {
        const auto a = random_symmetric(rng, 3, k);
        const auto x = normal_vector(rng, 3);
        const auto first = mode_contraction(a, x, 0);
        for (std::size_t m = 1; m < k; ++m)
            EXPECT_EQ(mode_contraction(a, x, m), first);
    }
}
