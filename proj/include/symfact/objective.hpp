#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "symfact/error.hpp"
#include "symfact/linalg.hpp"

namespace symfact {

namespace detail {

inline void check_factor(const SymmetricMatrix& m, const FactorMatrix& h, const char* who) {
    if (h.rows() != m.size())
        throw InvalidInput(std::string(who) + ": factor has " + std::to_string(h.rows()) +
                           " rows, target is " + std::to_string(m.size()) + "x" +
                           std::to_string(m.size()));
}

}  // namespace detail

// f(H) = ||M - H H^T||_F^2
inline double objective(const SymmetricMatrix& m, const FactorMatrix& h) {
    detail::check_factor(m, h, "objective");
    return (m.dense() - h * h.transpose()).squaredNorm();
}

// E = ||M - H H^T||_F^2 / ||M||_F^2; for M = 0 the unnormalized error.
inline double relative_error(const SymmetricMatrix& m, const FactorMatrix& h) {
    const double denom = m.dense().squaredNorm();
    const double f = objective(m, h);
    return denom > 0.0 ? f / denom : f;
}

// ||M - H P^T||_F^2 + mu ||H - P||_F^2
inline double split_objective(const SymmetricMatrix& m, const FactorMatrix& h,
                              const FactorMatrix& p, double mu) {
    detail::check_factor(m, h, "split_objective");
    if (p.rows() != h.rows() || p.cols() != h.cols())
        throw InvalidInput("split_objective: H and P shapes differ");
    if (!(mu > 0.0)) throw InvalidInput("split_objective: mu must be positive");
    return (m.dense() - h * p.transpose()).squaredNorm() + mu * (h - p).squaredNorm();
}

// grad f(H) = 4 (H H^T H - M H)
inline DenseMatrix gradient(const SymmetricMatrix& m, const FactorMatrix& h) {
    detail::check_factor(m, h, "gradient");
    const DenseMatrix gram = h.transpose() * h;
    return 4.0 * (h * gram - m.dense() * h);
}

/// Local smoothness estimate L = 4 sigma_max(H H^T - M) + 8 sigma_max(H^T H).
///
/// sigma_max of the symmetric n x n term is its largest eigenvalue magnitude,
/// taken from shifted power iteration; H^T H is k x k PSD and solved exactly.
/// `power` carries warm starts between calls; its vectors are updated in place.
inline double lipschitz_constant(const SymmetricMatrix& m, const FactorMatrix& h,
                                 PowerIterationOptions& power) {
    detail::check_factor(m, h, "lipschitz_constant");
    const auto residual = SymmetricMatrix::symmetrize(h * h.transpose() - m.dense());
    const auto ext = extreme_eigenvalues(residual, power);
    power.start_max = ext.vec_max;
    power.start_min = ext.vec_min;

    double gram_max = 0.0;
    if (h.cols() > 0) {
        const auto eig = jacobi_eigh(SymmetricMatrix::symmetrize(h.transpose() * h));
        gram_max = std::max(0.0, eig.values(0));
    }
    return 4.0 * ext.largest_magnitude() + 8.0 * gram_max;
}

inline double lipschitz_constant(const SymmetricMatrix& m, const FactorMatrix& h) {
    PowerIterationOptions power;
    return lipschitz_constant(m, h, power);
}

/// Smallest splitting penalty that forces H = P at critical points of the
/// split problem started from P0 = H0:
///   (||M||_F + ||M - H0 P0^T||_F - sigma_n(M)) / 2.
/// sigma_n(M) comes from power iteration; if that run did not converge the
/// estimate is replaced by minus the largest eigenvalue magnitude.
inline double penalty_lower_bound(const SymmetricMatrix& m, const FactorMatrix& h0,
                                  const FactorMatrix& p0,
                                  const PowerIterationOptions& power = {}) {
    detail::check_factor(m, h0, "penalty_lower_bound");
    if (p0.rows() != h0.rows() || p0.cols() != h0.cols() || p0 != h0)
        throw InvalidInput("penalty_lower_bound: requires P0 == H0");
    const auto ext = extreme_eigenvalues(m, power);
    const double sigma_n = ext.converged ? ext.lambda_min : -ext.largest_magnitude();
    return 0.5 * (m.frobenius_norm() + (m.dense() - h0 * p0.transpose()).norm() - sigma_n);
}

// ||(H - H_next) / t||_F
inline double gradient_mapping_norm(const FactorMatrix& h, const FactorMatrix& h_next, double t) {
    if (!(t > 0.0)) throw InvalidInput("gradient_mapping_norm: t must be positive");
    if (h.rows() != h_next.rows() || h.cols() != h_next.cols())
        throw InvalidInput("gradient_mapping_norm: shape mismatch");
    return (h - h_next).norm() / t;
}

inline double gradient_mapping_norm(const SymmetricMatrix& m, const FactorMatrix& h,
                                    const FactorMatrix& h_next, double t) {
    detail::check_factor(m, h, "gradient_mapping_norm");
    return gradient_mapping_norm(h, h_next, t);
}

/// Starting factor: entries uniform(0, 1) * sqrt(max(lambda_max(M), 1e-6) / k),
/// drawn row by row from `seed`, so H0 H0^T has the spectral scale of M.
inline FactorMatrix initial_factor(const SymmetricMatrix& m, Eigen::Index k, std::uint64_t seed) {
    if (k < 1 || k > m.size())
        throw InvalidInput("initial_factor: k=" + std::to_string(k) + " outside [1, " +
                           std::to_string(m.size()) + "]");
    const double lmax = extreme_eigenvalues(m).lambda_max;
    const double scale = std::sqrt(std::max(lmax, 1e-6) / static_cast<double>(k));
    Rng rng = make_rng(seed);
    FactorMatrix h(m.size(), k);
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < k; ++j) h(i, j) = uniform01(rng) * scale;
    return h;
}

}  // namespace symfact
