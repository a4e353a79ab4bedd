#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "symfact/graph.hpp"
#include "symfact/linalg.hpp"
#include "symfact/random.hpp"

namespace symfact::synthetic {

inline DenseMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                   double scale = 1.0) {
    Rng rng = make_rng(seed);
    DenseMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = scale * normal(rng);
    return out;
}

inline DenseMatrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                  double lo = -1.0, double hi = 1.0) {
    Rng rng = make_rng(seed);
    DenseMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = uniform(rng, lo, hi);
    return out;
}

// Symmetric matrix with i.i.d. uniform(-1, 1) upper triangle.
inline SymmetricMatrix random_symmetric(Eigen::Index n, std::uint64_t seed) {
    const DenseMatrix u = uniform_matrix(n, n, seed);
    DenseMatrix s(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) s(i, j) = s(j, i) = u(i, j);
    return SymmetricMatrix(std::move(s));
}

struct PlantedFactor {
    FactorMatrix factor;      // H_bar
    SymmetricMatrix target;   // H_bar H_bar^T
};

// M = H_bar H_bar^T with Gaussian H_bar (n x k), scaled by 1 / sqrt(n) so
// that M has O(1) spectral norm.
inline PlantedFactor planted_psd(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
    FactorMatrix h = gaussian_matrix(n, k, seed, 1.0 / std::sqrt(static_cast<double>(n)));
    SymmetricMatrix m = SymmetricMatrix::symmetrize(h * h.transpose());
    return {std::move(h), std::move(m)};
}

// Planted PSD target plus symmetric Gaussian noise of the given entry scale.
inline SymmetricMatrix noisy_low_rank(Eigen::Index n, Eigen::Index k, double noise,
                                      std::uint64_t seed) {
    DenseMatrix m = planted_psd(n, k, seed).target.dense();
    const DenseMatrix g = gaussian_matrix(n, n, seed + 0x1000, noise);
    m += 0.5 * (g + g.transpose());
    return SymmetricMatrix::symmetrize(std::move(m));
}

/// `per_cluster` points around each of k centers on the unit circle (first
/// two coordinates; remaining dimensions are pure noise), with isotropic
/// Gaussian spread `noise`. Labels are the generating center.
inline Dataset gaussian_blobs(Eigen::Index per_cluster, int k, Eigen::Index dim, double noise,
                              std::uint64_t seed) {
    Rng rng = make_rng(seed);
    const Eigen::Index n = per_cluster * k;
    Dataset ds;
    ds.features = DenseMatrix::Zero(n, dim);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int c = 0; c < k; ++c) {
        const double angle = 6.283185307179586 * c / k;
        for (Eigen::Index p = 0; p < per_cluster; ++p) {
            const Eigen::Index i = c * per_cluster + p;
            labels[static_cast<std::size_t>(i)] = c;
            for (Eigen::Index d = 0; d < dim; ++d) {
                double center = 0.0;
                if (d == 0) center = std::cos(angle);
                if (d == 1) center = std::sin(angle);
                ds.features(i, d) = center + noise * normal(rng);
            }
        }
    }
    ds.truth_labels = std::move(labels);
    return ds;
}

}  // namespace symfact::synthetic
