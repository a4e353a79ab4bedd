#include <cmath>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "symfact/linalg.hpp"
#include "symfact/synthetic.hpp"

using namespace symfact;

namespace {

double tol_for(double lambda) { return 1e-6 * std::max(1.0, std::abs(lambda)); }

SymmetricMatrix random_psd(Eigen::Index n, Eigen::Index r, std::uint64_t seed) {
    const DenseMatrix g = synthetic::gaussian_matrix(n, r, seed);
    return SymmetricMatrix::symmetrize(g * g.transpose());
}

}  // namespace

TEST(SymmetricMatrix, RejectsNonSquare) {
    EXPECT_THROW(SymmetricMatrix(DenseMatrix::Zero(2, 3)), InvalidInput);
}

TEST(SymmetricMatrix, RejectsNonFinite) {
    DenseMatrix m = DenseMatrix::Identity(2, 2);
    m(0, 0) = std::nan("");
    EXPECT_THROW(SymmetricMatrix{m}, InvalidInput);
    m(0, 0) = INFINITY;
    EXPECT_THROW(SymmetricMatrix{m}, InvalidInput);
}

TEST(SymmetricMatrix, RejectsAsymmetric) {
    DenseMatrix m(2, 2);
    m << 1, 2, 3, 4;
    EXPECT_THROW(SymmetricMatrix{m}, InvalidInput);
}

TEST(SymmetricMatrix, AveragesRoundingAsymmetry) {
    DenseMatrix m(2, 2);
    m << 1, 0.3, 0.3 + 1e-17, 1;
    const SymmetricMatrix s(m);
    EXPECT_EQ(s(0, 1), s(1, 0));
}

TEST(ExtremeEigenvalues, Diagonal) {
    Vector d(2);
    d << 3, 1;
    const auto e = extreme_eigenvalues(SymmetricMatrix::diagonal(d));
    EXPECT_NEAR(e.lambda_max, 3.0, 1e-8);
    EXPECT_NEAR(e.lambda_min, 1.0, 1e-8);
    EXPECT_TRUE(e.converged);
}

TEST(ExtremeEigenvalues, SwapMatrixOppositeSigns) {
    DenseMatrix m(2, 2);
    m << 0, 1, 1, 0;
    const auto e = extreme_eigenvalues(SymmetricMatrix(m));
    EXPECT_NEAR(e.lambda_max, 1.0, 1e-8);
    EXPECT_NEAR(e.lambda_min, -1.0, 1e-8);
}

TEST(ExtremeEigenvalues, ZeroMatrix) {
    const auto e = extreme_eigenvalues(SymmetricMatrix::zero(4));
    EXPECT_EQ(e.lambda_max, 0.0);
    EXPECT_EQ(e.lambda_min, 0.0);
}

TEST(ExtremeEigenvalues, OneByOne) {
    DenseMatrix m(1, 1);
    m << -2.5;
    const auto e = extreme_eigenvalues(SymmetricMatrix(m));
    EXPECT_NEAR(e.lambda_max, -2.5, 1e-12);
    EXPECT_NEAR(e.lambda_min, -2.5, 1e-12);
}

TEST(ExtremeEigenvalues, Random20MatchesFullDecomposition) {
    const auto s = synthetic::random_symmetric(20, 7);
    const auto e = extreme_eigenvalues(s);
    const auto full = jacobi_eigh(s);
    const double hi = full.values(0), lo = full.values(full.values.size() - 1);
    EXPECT_NEAR(e.lambda_max, hi, tol_for(hi));
    EXPECT_NEAR(e.lambda_min, lo, tol_for(lo));
}

TEST(ExtremeEigenvalues, WithinGershgorinAndOrdered) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = synthetic::random_symmetric(3 + static_cast<Eigen::Index>(seed), seed);
        const double c = s.dense().cwiseAbs().rowwise().sum().maxCoeff();
        const auto e = extreme_eigenvalues(s);
        EXPECT_LE(e.lambda_min, e.lambda_max);
        EXPECT_LE(e.lambda_max, c);
        EXPECT_GE(e.lambda_min, -c);
    }
}

TEST(ExtremeEigenvalues, PsdMinimumIsNonnegative) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto e = extreme_eigenvalues(random_psd(12, 4, seed));
        EXPECT_GE(e.lambda_min, -1e-8 * e.lambda_max);
    }
}

TEST(ExtremeEigenvalues, MaxIterOneIsFlaggedUnconverged) {
    PowerIterationOptions opt;
    opt.max_iter = 1;
    const auto e = extreme_eigenvalues(synthetic::random_symmetric(10, 1), opt);
    EXPECT_FALSE(e.converged);
    EXPECT_LE(e.lambda_min, e.lambda_max);
}

TEST(ExtremeEigenvalues, WarmStartReachesSameValues) {
    const auto s = synthetic::random_symmetric(15, 3);
    const auto cold = extreme_eigenvalues(s);
    PowerIterationOptions opt;
    opt.start_max = cold.vec_max;
    opt.start_min = cold.vec_min;
    const auto warm = extreme_eigenvalues(s, opt);
    EXPECT_NEAR(warm.lambda_max, cold.lambda_max, 1e-8);
    EXPECT_NEAR(warm.lambda_min, cold.lambda_min, 1e-8);
    EXPECT_LT(warm.iterations, cold.iterations);
}

TEST(ExtremeEigenvalues, RejectsBadOptions) {
    PowerIterationOptions opt;
    opt.tol = 0.0;
    EXPECT_THROW(extreme_eigenvalues(SymmetricMatrix::identity(2), opt), InvalidInput);
    opt = {};
    opt.max_iter = 0;
    EXPECT_THROW(extreme_eigenvalues(SymmetricMatrix::identity(2), opt), InvalidInput);
}

TEST(JacobiEigh, Identity) {
    const auto e = jacobi_eigh(SymmetricMatrix::identity(2));
    EXPECT_DOUBLE_EQ(e.values(0), 1.0);
    EXPECT_DOUBLE_EQ(e.values(1), 1.0);
    EXPECT_LE((e.vectors * e.values.asDiagonal() * e.vectors.transpose() -
               DenseMatrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(JacobiEigh, ClassicTwoByTwo) {
    DenseMatrix m(2, 2);
    m << 2, 1, 1, 2;
    const auto e = jacobi_eigh(SymmetricMatrix(m));
    EXPECT_NEAR(e.values(0), 3.0, 1e-14);
    EXPECT_NEAR(e.values(1), 1.0, 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(e.vectors(0, 0)), r, 1e-14);
    EXPECT_NEAR(e.vectors(0, 0) * e.vectors(1, 0), 0.5, 1e-14);
    EXPECT_NEAR(e.vectors(0, 1) * e.vectors(1, 1), -0.5, 1e-14);
}

TEST(JacobiEigh, Random8Reconstruction) {
    const auto s = synthetic::random_symmetric(8, 11);
    const auto e = jacobi_eigh(s);
    const DenseMatrix back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE((back - s.dense()).norm(), 1e-10 * s.frobenius_norm());
}

TEST(JacobiEigh, DescendingAndMatchesReferenceSolver) {
    const auto s = synthetic::random_symmetric(25, 5);
    const auto e = jacobi_eigh(s);
    const Eigen::VectorXd ref = oracle::eigenvalues(s.dense());  // ascending
    for (Eigen::Index i = 0; i < 25; ++i) {
        EXPECT_NEAR(e.values(i), ref(24 - i), 1e-10);
        if (i > 0) {
            EXPECT_GE(e.values(i - 1), e.values(i));
        }
    }
}

TEST(JacobiEigh, OrthonormalVectorsUpTo50) {
    for (Eigen::Index n : {1, 2, 5, 17, 50}) {
        const auto e = jacobi_eigh(synthetic::random_symmetric(n, static_cast<std::uint64_t>(n)));
        const DenseMatrix gram = e.vectors.transpose() * e.vectors;
        EXPECT_LE((gram - DenseMatrix::Identity(n, n)).norm(), 1e-12 * static_cast<double>(n));
    }
}

TEST(JacobiEigh, EmptyMatrix) {
    const auto e = jacobi_eigh(SymmetricMatrix(DenseMatrix(0, 0)));
    EXPECT_EQ(e.values.size(), 0);
}

TEST(PolarFactor, OrthonormalInputIsFixed) {
    const DenseMatrix g = synthetic::gaussian_matrix(6, 3, 2);
    const DenseMatrix q = Eigen::HouseholderQR<DenseMatrix>(g).householderQ() *
                          DenseMatrix::Identity(6, 3);
    EXPECT_LE((polar_orthogonal_factor(q) - q).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PolarFactor, ScaledRotation) {
    DenseMatrix b(2, 2);
    b << 0, 2, -3, 0;
    DenseMatrix expected(2, 2);
    expected << 0, 1, -1, 0;
    EXPECT_LE((polar_orthogonal_factor(b) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PolarFactor, Random10x3MaximizesTraceAndLeavesSymmetricPsd) {
    const DenseMatrix b = synthetic::gaussian_matrix(10, 3, 3);
    const DenseMatrix q = polar_orthogonal_factor(b);
    EXPECT_LE((q.transpose() * q - DenseMatrix::Identity(3, 3)).norm(), 1e-12);

    const DenseMatrix s = q.transpose() * b;
    EXPECT_LE((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(oracle::eigenvalues(0.5 * (s + s.transpose())).minCoeff(), -1e-12);

    const double best = (q.transpose() * b).trace();
    for (std::uint64_t c = 0; c < 1000; ++c) {
        const DenseMatrix g = synthetic::gaussian_matrix(10, 3, 1000 + c);
        const DenseMatrix cand = Eigen::HouseholderQR<DenseMatrix>(g).householderQ() *
                                 DenseMatrix::Identity(10, 3);
        ASSERT_LE((cand.transpose() * b).trace(), best + 1e-12);
    }
}

TEST(PolarFactor, Idempotent) {
    const DenseMatrix q = polar_orthogonal_factor(synthetic::gaussian_matrix(9, 4, 8));
    EXPECT_LE((polar_orthogonal_factor(q) - q).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PolarFactor, RankDeficientThrows) {
    DenseMatrix b(3, 2);
    b << 1, 2, 2, 4, 3, 6;
    EXPECT_THROW(polar_orthogonal_factor(b), SingularMatrix);
}

TEST(PolarFactor, WideInputRejected) {
    EXPECT_THROW(polar_orthogonal_factor(DenseMatrix::Ones(2, 3)), InvalidInput);
}
