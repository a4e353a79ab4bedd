#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "symfact/error.hpp"
#include "symfact/linalg.hpp"

namespace symfact {

// Samples are the rows of `features`.
struct Dataset {
    DenseMatrix features;
    std::optional<std::vector<int>> truth_labels;

    Eigen::Index size() const noexcept { return features.rows(); }

    void validate() const {
        if (features.rows() < 2) throw InvalidInput("Dataset: need at least 2 samples");
        require_finite(features, "Dataset");
        if (truth_labels) {
            if (static_cast<Eigen::Index>(truth_labels->size()) != features.rows())
                throw InvalidInput("Dataset: label count does not match sample count");
            for (int l : *truth_labels)
                if (l < 0) throw InvalidInput("Dataset: negative label");
        }
    }
};

struct Similarity {
    enum class Kind { inner_product, cosine, rbf };

    Kind kind = Kind::inner_product;
    double sigma = 1.0;  // rbf bandwidth

    static Similarity inner_product() { return {Kind::inner_product, 1.0}; }
    static Similarity cosine() { return {Kind::cosine, 1.0}; }
    static Similarity rbf(double sigma) { return {Kind::rbf, sigma}; }
};

/// Pairwise similarity of the rows of X. Each unordered pair is evaluated
/// once and written to both triangles. Negative values are kept.
inline SymmetricMatrix build_similarity(const Dataset& data, const Similarity& sim) {
    data.validate();
    const DenseMatrix& x = data.features;
    const Eigen::Index n = x.rows();

    if (sim.kind == Similarity::Kind::rbf && !(sim.sigma > 0.0))
        throw InvalidInput("build_similarity: rbf sigma must be positive");

    Vector norms;
    if (sim.kind == Similarity::Kind::cosine) {
        norms = x.rowwise().norm();
        for (Eigen::Index i = 0; i < n; ++i)
            if (norms(i) == 0.0)
                throw InvalidInput("build_similarity: row " + std::to_string(i) +
                                   " has zero norm under cosine similarity");
    }

    const double inv_two_sigma_sq = 1.0 / (2.0 * sim.sigma * sim.sigma);
    DenseMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            double v = 0.0;
            switch (sim.kind) {
                case Similarity::Kind::inner_product:
                    v = x.row(i).dot(x.row(j));
                    break;
                case Similarity::Kind::cosine:
                    v = x.row(i).dot(x.row(j)) / (norms(i) * norms(j));
                    break;
                case Similarity::Kind::rbf:
                    v = std::exp(-(x.row(i) - x.row(j)).squaredNorm() * inv_two_sigma_sq);
                    break;
            }
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    return SymmetricMatrix(std::move(a));
}

struct Laplacian {
    SymmetricMatrix degree;     // D, diagonal row sums of A
    SymmetricMatrix laplacian;  // L = D - A
};

inline Laplacian laplacian(const SymmetricMatrix& a) {
    const DenseMatrix& m = a.dense();
    // Summed in index order so equal rows of A give equal degrees.
    Vector d = m.rowwise().sum();
    DenseMatrix l = -m;
    l.diagonal() += d;
    return {SymmetricMatrix::diagonal(d), SymmetricMatrix(std::move(l))};
}

/// Everything the solvers need from the graph: the similarity A, its degree
/// matrix and Laplacian, and the target M = A - lambda_reg * L.
struct GraphRegularizedTarget {
    SymmetricMatrix similarity;
    SymmetricMatrix degree;
    SymmetricMatrix laplacian;
    double lambda_reg = 0.0;
    SymmetricMatrix target;
};

inline GraphRegularizedTarget regularized_target(const SymmetricMatrix& a, double lambda_reg) {
    if (!(lambda_reg >= 0.0) || !std::isfinite(lambda_reg))
        throw InvalidInput("regularized_target: lambda_reg must be finite and >= 0");
    auto [d, l] = laplacian(a);
    DenseMatrix m = a.dense() - lambda_reg * l.dense();
    return {a, std::move(d), std::move(l), lambda_reg, SymmetricMatrix(std::move(m))};
}

// sum_{i,j} A_ij ||h^i - h^j||^2, evaluated pair by pair.
inline double pairwise_smoothness(const SymmetricMatrix& a, const FactorMatrix& h) {
    if (h.rows() != a.size()) throw InvalidInput("pairwise_smoothness: shape mismatch");
    const Eigen::Index n = a.size();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            sum += a(i, j) * (h.row(i) - h.row(j)).squaredNorm();
    return sum;
}

// trace(H^T L H).
inline double laplacian_quadratic_form(const SymmetricMatrix& l, const FactorMatrix& h) {
    if (h.rows() != l.size()) throw InvalidInput("laplacian_quadratic_form: shape mismatch");
    return (h.transpose() * l.dense() * h).trace();
}

// ||A - H H^T||_F^2 + lambda * sum_{i,j} A_ij ||h^i - h^j||^2, the
// graph-regularized objective before the Laplacian rewrite.
inline double regularized_objective(const SymmetricMatrix& a, double lambda_reg,
                                    const FactorMatrix& h) {
    if (h.rows() != a.size()) throw InvalidInput("regularized_objective: shape mismatch");
    return (a.dense() - h * h.transpose()).squaredNorm() +
           lambda_reg * pairwise_smoothness(a, h);
}

}  // namespace symfact
