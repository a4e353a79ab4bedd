#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "symfact/clustering.hpp"
#include "symfact/random.hpp"
#include "symfact/synthetic.hpp"

using namespace symfact;

namespace {

LabelVector labels(std::vector<int> v, int k = 0) { return LabelVector(std::move(v), k); }

std::vector<int> random_labels(Rng& rng, std::size_t n, int k) {
    std::vector<int> out(n);
    for (auto& l : out) l = static_cast<int>(uniform01(rng) * k);
    return out;
}

}  // namespace

TEST(AssignLabels, SignedArgmax) {
    DenseMatrix h(3, 2);
    h << 0.9, 0.1, -0.5, 0.2, 0.5, 0.5;
    EXPECT_EQ(assign_labels(h).values(), (std::vector<int>{0, 1, 0}));
}

TEST(AssignLabels, NegativeMagnitudeDoesNotWin) {
    DenseMatrix h(1, 3);
    h << -9, 0.1, -0.2;
    EXPECT_EQ(assign_labels(h)[0], 1);
}

TEST(AssignLabels, PositiveRowScalingInvariant) {
    const DenseMatrix h = synthetic::gaussian_matrix(30, 4, 1);
    DenseMatrix scaled = h;
    for (Eigen::Index i = 0; i < h.rows(); ++i) scaled.row(i) *= 0.01 + static_cast<double>(i);
    EXPECT_EQ(assign_labels(h), assign_labels(scaled));
}

TEST(AssignLabels, NumClustersFollowsColumns) {
    EXPECT_EQ(assign_labels(DenseMatrix::Zero(4, 3)).num_clusters(), 3);
}

TEST(LabelVector, RejectsNegative) {
    EXPECT_THROW(labels({0, -1}), InvalidInput);
}

TEST(Accuracy, Identical) {
    EXPECT_EQ(accuracy(labels({0, 1, 2, 0}), labels({0, 1, 2, 0})).ac, 1.0);
}

TEST(Accuracy, PermutedLabels) {
    const auto r = accuracy(labels({2, 0, 1, 2}), labels({0, 1, 2, 0}));
    EXPECT_EQ(r.ac, 1.0);
    EXPECT_EQ(r.permutation, (std::vector<int>{1, 2, 0}));
}

TEST(Accuracy, ThreeOfFive) {
    EXPECT_DOUBLE_EQ(accuracy(labels({0, 0, 1, 1, 1}), labels({0, 1, 1, 1, 0})).ac, 3.0 / 5.0);
}

TEST(Accuracy, DifferentClusterCountsArePadded) {
    const auto r = accuracy(labels({0, 0, 0, 0}), labels({0, 1, 2, 3}));
    EXPECT_EQ(r.confusion.rows(), 4);
    EXPECT_DOUBLE_EQ(r.ac, 0.25);
}

TEST(Accuracy, LengthMismatchThrows) {
    EXPECT_THROW(accuracy(labels({0, 1}), labels({0})), InvalidInput);
}

TEST(Accuracy, EqualsBruteForceMaximum) {
    Rng rng = make_rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + trial % 6;
        const std::size_t n = 5 + static_cast<std::size_t>(uniform01(rng) * 40);
        const auto p = random_labels(rng, n, k);
        const auto t = random_labels(rng, n, k);
        const auto r = accuracy(LabelVector(p, k), LabelVector(t, k));
        const auto best = oracle::brute_force_matches(p, t, k);
        ASSERT_EQ(r.ac, static_cast<double>(best) / static_cast<double>(n)) << trial;
        ASSERT_EQ(static_cast<int>(r.permutation.size()), k);
        std::vector<int> sorted = r.permutation;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < k; ++i) ASSERT_EQ(sorted[static_cast<std::size_t>(i)], i);
    }
}

TEST(Accuracy, AssignmentHandlesTiesAndZeros) {
    const auto r = max_weight_assignment(DenseMatrix::Zero(3, 3));
    std::vector<int> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2}));
    EXPECT_THROW(max_weight_assignment(DenseMatrix::Zero(2, 3)), InvalidInput);
}

TEST(Nmi, Identical) {
    EXPECT_NEAR(nmi(labels({0, 1, 1, 2}), labels({0, 1, 1, 2})), 1.0, 1e-15);
}

TEST(Nmi, ConstantPredictionIsZero) {
    EXPECT_EQ(nmi(labels({0, 0, 0, 0}), labels({0, 0, 1, 1})), 0.0);
}

TEST(Nmi, IndependentPartitionsAreZero) {
    EXPECT_NEAR(nmi(labels({0, 0, 1, 1}), labels({0, 1, 0, 1})), 0.0, 1e-15);
}

TEST(Nmi, BothSingleClusterIsOne) {
    EXPECT_EQ(nmi(labels({0, 0, 0}), labels({0, 0, 0})), 1.0);
}

TEST(Nmi, KnownValue) {
    // pred (0,0,1,1) vs truth (0,0,0,1): I = 1.5 ln2 - 0.75 ln3,
    // H(pred) = ln2, H(truth) = 2 ln2 - 0.75 ln3.
    const double ln2 = std::log(2.0), ln3 = std::log(3.0);
    const double expected = (1.5 * ln2 - 0.75 * ln3) / std::sqrt(ln2 * (2 * ln2 - 0.75 * ln3));
    EXPECT_NEAR(nmi(labels({0, 0, 1, 1}), labels({0, 0, 0, 1})), expected, 1e-14);
}

TEST(Nmi, BoundedSymmetricAndRelabelInvariant) {
    Rng rng = make_rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + trial % 5;
        const auto p = random_labels(rng, 30, k);
        const auto t = random_labels(rng, 30, k);
        const double v = nmi(LabelVector(p), LabelVector(t));
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
        ASSERT_NEAR(v, nmi(LabelVector(t), LabelVector(p)), 1e-12);

        std::vector<int> perm(static_cast<std::size_t>(k));
        std::iota(perm.rbegin(), perm.rend(), 0);
        std::vector<int> relabeled(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) relabeled[i] = perm[static_cast<std::size_t>(p[i])];
        ASSERT_NEAR(v, nmi(LabelVector(relabeled), LabelVector(t)), 1e-12);
        ASSERT_EQ(accuracy(LabelVector(p, k), LabelVector(t, k)).ac,
                  accuracy(LabelVector(relabeled, k), LabelVector(t, k)).ac);
    }
}

TEST(Evaluate, CombinesMetrics) {
    const auto r = evaluate(labels({1, 1, 0, 0}), labels({0, 0, 1, 1}));
    EXPECT_EQ(r.ac, 1.0);
    EXPECT_NEAR(r.nmi, 1.0, 1e-15);
}

TEST(KMeans, SeparatedCloudsAreFound) {
    DenseMatrix x(20, 2);
    const DenseMatrix noise = synthetic::gaussian_matrix(20, 2, 3, 0.1);
    std::vector<int> truth(20);
    for (Eigen::Index i = 0; i < 20; ++i) {
        const bool far = i >= 10;
        x(i, 0) = (far ? 100.0 : 0.0) + noise(i, 0);
        x(i, 1) = noise(i, 1);
        truth[static_cast<std::size_t>(i)] = far ? 1 : 0;
    }
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto r = kmeans(x, 2, seed);
        EXPECT_EQ(accuracy(r.labels, LabelVector(truth)).ac, 1.0);
    }
}

TEST(KMeans, SingleCluster) {
    const auto r = kmeans(synthetic::gaussian_matrix(10, 3, 1), 1, 0);
    for (int l : r.labels.values()) EXPECT_EQ(l, 0);
}

TEST(KMeans, EveryPointItsOwnCluster) {
    const auto r = kmeans(synthetic::gaussian_matrix(8, 2, 2), 8, 0);
    EXPECT_EQ(r.wcss.back(), 0.0);
    std::vector<int> sorted = r.labels.values();
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 8; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

TEST(KMeans, DuplicatePointsStillFillEveryCluster) {
    DenseMatrix x = DenseMatrix::Zero(6, 2);
    x(5, 0) = 1.0;
    const auto r = kmeans(x, 3, 4);
    std::vector<int> counts(3, 0);
    for (int l : r.labels.values()) ++counts[static_cast<std::size_t>(l)];
    for (int c : counts) EXPECT_GT(c, 0);
}

TEST(KMeans, WcssNonIncreasing) {
    const auto ds = synthetic::gaussian_blobs(40, 4, 3, 0.6, 8);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto r = kmeans(ds.features, 4, seed);
        for (std::size_t i = 1; i < r.wcss.size(); ++i)
            ASSERT_LE(r.wcss[i], r.wcss[i - 1] * (1.0 + 1e-12)) << seed;
    }
}

TEST(KMeans, RejectsBadK) {
    EXPECT_THROW(kmeans(DenseMatrix::Zero(3, 2), 0, 0), InvalidInput);
    EXPECT_THROW(kmeans(DenseMatrix::Zero(3, 2), 4, 0), InvalidInput);
}
