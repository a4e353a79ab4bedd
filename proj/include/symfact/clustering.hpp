#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "symfact/error.hpp"
#include "symfact/linalg.hpp"
#include "symfact/random.hpp"

namespace symfact {

/// 0-based cluster ids for n points, all below num_clusters().
class LabelVector {
public:
    LabelVector() = default;

    explicit LabelVector(std::vector<int> labels, int num_clusters = 0) : labels_(std::move(labels)) {
        int top = -1;
        for (int l : labels_) {
            if (l < 0) throw InvalidInput("LabelVector: negative label");
            top = std::max(top, l);
        }
        k_ = std::max(num_clusters, top + 1);
    }

    std::size_t size() const noexcept { return labels_.size(); }
    int num_clusters() const noexcept { return k_; }
    int operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<int>& values() const noexcept { return labels_; }

    bool operator==(const LabelVector& o) const { return labels_ == o.labels_; }

private:
    std::vector<int> labels_;
    int k_ = 0;
};

/// Row-wise argmax over signed entries: a large negative value means "not
/// this cluster". Ties go to the lowest column.
inline LabelVector assign_labels(const FactorMatrix& h) {
    if (h.cols() < 1) throw InvalidInput("assign_labels: factor has no columns");
    require_finite(h, "assign_labels");
    std::vector<int> labels(static_cast<std::size_t>(h.rows()));
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index j = 1; j < h.cols(); ++j)
            if (h(i, j) > h(i, best)) best = j;
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return LabelVector(std::move(labels), static_cast<int>(h.cols()));
}

using CountMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// C(p, t) = #{i : pred_i = p, truth_i = t}, padded to k x k with
// k = max(#pred clusters, #truth clusters).
inline CountMatrix confusion_matrix(const LabelVector& pred, const LabelVector& truth) {
    if (pred.size() != truth.size())
        throw InvalidInput("confusion_matrix: " + std::to_string(pred.size()) + " predictions vs " +
                           std::to_string(truth.size()) + " truth labels");
    const int k = std::max(pred.num_clusters(), truth.num_clusters());
    CountMatrix c = CountMatrix::Zero(k, k);
    for (std::size_t i = 0; i < pred.size(); ++i) ++c(pred[i], truth[i]);
    return c;
}

/// Maximum-weight perfect matching on a square weight matrix (Hungarian
/// method with potentials, O(k^3)). Returns assignment[row] = column.
inline std::vector<int> max_weight_assignment(const DenseMatrix& weight) {
    const int k = static_cast<int>(weight.rows());
    if (weight.cols() != k) throw InvalidInput("max_weight_assignment: matrix must be square");
    if (k == 0) return {};
    const double inf = std::numeric_limits<double>::infinity();
    const double top = weight.maxCoeff();

    // Minimize cost = top - weight. Rows/columns are 1-based below; index 0 is
    // the virtual start column.
    auto cost = [&](int r, int c) { return top - weight(r - 1, c - 1); };
    std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
    std::vector<int> match(k + 1, 0), way(k + 1, 0);
    for (int r = 1; r <= k; ++r) {
        match[0] = r;
        int c0 = 0;
        std::vector<double> minv(k + 1, inf);
        std::vector<char> used(k + 1, 0);
        do {
            used[c0] = 1;
            const int r0 = match[c0];
            double delta = inf;
            int c1 = 0;
            for (int c = 1; c <= k; ++c) {
                if (used[c]) continue;
                const double cur = cost(r0, c) - u[r0] - v[c];
                if (cur < minv[c]) {
                    minv[c] = cur;
                    way[c] = c0;
                }
                if (minv[c] < delta) {
                    delta = minv[c];
                    c1 = c;
                }
            }
            for (int c = 0; c <= k; ++c) {
                if (used[c]) {
                    u[match[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            c0 = c1;
        } while (match[c0] != 0);
        do {
            const int c1 = way[c0];
            match[c0] = match[c1];
            c0 = c1;
        } while (c0 != 0);
    }

    std::vector<int> assignment(static_cast<std::size_t>(k), -1);
    for (int c = 1; c <= k; ++c) assignment[static_cast<std::size_t>(match[c] - 1)] = c - 1;
    return assignment;
}

struct AccuracyResult {
    double ac = 0.0;
    std::vector<int> permutation;  // predicted cluster -> truth cluster
    CountMatrix confusion;
};

/// Fraction of points whose predicted cluster, mapped through the best
/// one-to-one relabeling, equals the true cluster.
inline AccuracyResult accuracy(const LabelVector& pred, const LabelVector& truth) {
    AccuracyResult out;
    out.confusion = confusion_matrix(pred, truth);
    if (pred.size() == 0) return out;
    out.permutation = max_weight_assignment(out.confusion.cast<double>());
    long long matched = 0;
    for (std::size_t p = 0; p < out.permutation.size(); ++p)
        matched += out.confusion(static_cast<Eigen::Index>(p), out.permutation[p]);
    out.ac = static_cast<double>(matched) / static_cast<double>(pred.size());
    return out;
}

/// I(pred; truth) / sqrt(H(pred) H(truth)) with natural logs.
/// Two single-cluster partitions score 1; otherwise a zero entropy scores 0.
inline double nmi(const LabelVector& pred, const LabelVector& truth) {
    if (pred.size() != truth.size())
        throw InvalidInput("nmi: " + std::to_string(pred.size()) + " predictions vs " +
                           std::to_string(truth.size()) + " truth labels");
    if (pred.size() == 0) throw InvalidInput("nmi: empty labelings");
    const CountMatrix joint = confusion_matrix(pred, truth);
    const double n = static_cast<double>(pred.size());
    const Eigen::Matrix<long long, Eigen::Dynamic, 1> rows = joint.rowwise().sum();
    const Eigen::Matrix<long long, 1, Eigen::Dynamic> cols = joint.colwise().sum();

    auto entropy = [n](auto const& counts) {
        double h = 0.0;
        for (Eigen::Index i = 0; i < counts.size(); ++i) {
            if (counts(i) == 0) continue;
            const double q = static_cast<double>(counts(i)) / n;
            h -= q * std::log(q);
        }
        return h;
    };
    const double hp = entropy(rows);
    const double ht = entropy(cols);
    if (hp == 0.0 && ht == 0.0) return 1.0;
    if (hp == 0.0 || ht == 0.0) return 0.0;

    // Same partition up to relabeling: every nonempty row and column of the
    // joint table has exactly one nonzero cell.
    const auto nonzero = (joint.array() != 0).template cast<int>();
    if ((nonzero.rowwise().sum() <= 1).all() && (nonzero.colwise().sum() <= 1).all()) return 1.0;

    double mi = 0.0;
    for (Eigen::Index p = 0; p < joint.rows(); ++p) {
        for (Eigen::Index t = 0; t < joint.cols(); ++t) {
            const long long c = joint(p, t);
            if (c == 0) continue;
            const double pj = static_cast<double>(c) / n;
            mi += pj * std::log(static_cast<double>(c) * n /
                                (static_cast<double>(rows(p)) * static_cast<double>(cols(t))));
        }
    }
    return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

struct ClusteringReport {
    LabelVector predicted;
    double ac = 0.0;
    double nmi = 0.0;
    CountMatrix confusion;
    std::vector<int> permutation;
};

inline ClusteringReport evaluate(const LabelVector& pred, const LabelVector& truth) {
    auto acc = accuracy(pred, truth);
    return {pred, acc.ac, nmi(pred, truth), std::move(acc.confusion), std::move(acc.permutation)};
}

// ---------------------------------------------------------------------------
// k-means baseline
// ---------------------------------------------------------------------------

struct KMeansResult {
    LabelVector labels;
    DenseMatrix centroids;     // k x m
    std::vector<double> wcss;  // after each assignment step
    int iterations = 0;
};

/// Lloyd's algorithm from a seeded k-means++ start. An emptied cluster is
/// re-seeded with the point farthest from its own centroid.
inline KMeansResult kmeans(const DenseMatrix& x, int k, std::uint64_t seed, int max_iter = 300) {
    const Eigen::Index n = x.rows();
    if (k < 1 || k > n)
        throw InvalidInput("kmeans: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) +
                           "]");
    require_finite(x, "kmeans");
    Rng rng = make_rng(seed);

    DenseMatrix centers(k, x.cols());
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    Eigen::Index first = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(uniform01(rng) * n));
    centers.row(0) = x.row(first);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], (x.row(i) - centers.row(c - 1)).squaredNorm());
            total += d2[i];
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = uniform01(rng) * total;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2[i];
                if (target < 0.0 && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(uniform01(rng) * n));
        }
        centers.row(c) = x.row(pick);
    }

    KMeansResult out;
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
    for (int it = 1; it <= max_iter; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (x.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (x.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[i] != best) changed = true;
            labels[i] = best;
            dist[i] = best_d;
        }

        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (int l : labels) ++counts[l];
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            Eigen::Index far = -1;
            for (Eigen::Index i = 0; i < n; ++i)
                if (counts[labels[i]] > 1 && (far < 0 || dist[i] > dist[far])) far = i;
            --counts[labels[far]];
            labels[far] = c;
            dist[far] = 0.0;
            counts[c] = 1;
            changed = true;
        }

        centers.setZero();
        for (Eigen::Index i = 0; i < n; ++i) centers.row(labels[i]) += x.row(i);
        for (int c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(counts[c]);

        double w = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) w += (x.row(i) - centers.row(labels[i])).squaredNorm();
        out.wcss.push_back(w);
        out.iterations = it;
        if (!changed) break;
    }

    out.labels = LabelVector(std::move(labels), k);
    out.centroids = std::move(centers);
    return out;
}

}  // namespace symfact
