#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "symfact/error.hpp"
#include "symfact/linalg.hpp"

namespace symfact {

/// Feasible set for the projected-gradient solver.
struct ConstraintSpec {
    enum class Kind { unconstrained, nonnegative, unit_row_norm, row_sparsity, orthogonal };

    Kind kind = Kind::unconstrained;
    int sparsity = 0;  // row_sparsity only: nonzeros kept per row

    static ConstraintSpec unconstrained() { return {Kind::unconstrained, 0}; }
    static ConstraintSpec nonnegative() { return {Kind::nonnegative, 0}; }
    static ConstraintSpec unit_row_norm() { return {Kind::unit_row_norm, 0}; }
    static ConstraintSpec row_sparsity(int s) { return {Kind::row_sparsity, s}; }
    static ConstraintSpec orthogonal() { return {Kind::orthogonal, 0}; }

    void validate(Eigen::Index n, Eigen::Index k) const {
        if (kind == Kind::row_sparsity && (sparsity < 1 || sparsity > k))
            throw InvalidInput("row_sparsity: s=" + std::to_string(sparsity) + " outside [1, " +
                               std::to_string(k) + "]");
        if (kind == Kind::orthogonal && n < k)
            throw InvalidInput("orthogonal constraint needs n >= k");
    }

    bool operator==(const ConstraintSpec&) const = default;
};

inline std::string_view to_string(ConstraintSpec::Kind kind) {
    switch (kind) {
        case ConstraintSpec::Kind::unconstrained: return "unconstrained";
        case ConstraintSpec::Kind::nonnegative: return "nonnegative";
        case ConstraintSpec::Kind::unit_row_norm: return "unit_row_norm";
        case ConstraintSpec::Kind::row_sparsity: return "row_sparsity";
        case ConstraintSpec::Kind::orthogonal: return "orthogonal";
    }
    return "unknown";
}

inline ConstraintSpec::Kind parse_constraint_kind(std::string_view name) {
    using K = ConstraintSpec::Kind;
    for (K k : {K::unconstrained, K::nonnegative, K::unit_row_norm, K::row_sparsity, K::orthogonal})
        if (to_string(k) == name) return k;
    throw InvalidInput("unknown constraint '" + std::string(name) + "'");
}

struct ProjectionStats {
    std::size_t frozen_rows = 0;  // unit_row_norm rows kept from the current iterate
    bool perturbed = false;       // orthogonal retry after rank deficiency
};

/// Nearest point of the feasible set to `stepped` (the gradient step from
/// `current`).
///
///  - nonnegative:   entrywise max(., 0)
///  - unit_row_norm: each row scaled to unit length; a zero row is replaced by
///                   the matching row of `current`
///  - row_sparsity:  per row, the s largest magnitudes survive; ties go to the
///                   lower column index
///  - orthogonal:    polar factor U V^T; a rank-deficient input is perturbed by
///                   1e-10 ||stepped||_F seeded noise and retried once
inline FactorMatrix project(const FactorMatrix& current, const ConstraintSpec& c,
                            const DenseMatrix& stepped, std::uint64_t perturb_seed = 0,
                            ProjectionStats* stats = nullptr) {
    require_finite(stepped, "project");
    c.validate(stepped.rows(), stepped.cols());
    const Eigen::Index n = stepped.rows();
    const Eigen::Index k = stepped.cols();

    switch (c.kind) {
        case ConstraintSpec::Kind::unconstrained:
            return stepped;

        case ConstraintSpec::Kind::nonnegative:
            return stepped.cwiseMax(0.0);

        case ConstraintSpec::Kind::unit_row_norm: {
            FactorMatrix out(n, k);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double norm = stepped.row(i).norm();
                if (norm > 0.0) {
                    out.row(i) = stepped.row(i) / norm;
                    continue;
                }
                const bool can_freeze = current.rows() == n && current.cols() == k &&
                                        std::abs(current.row(i).norm() - 1.0) <= 1e-8;
                if (!can_freeze)
                    throw InvalidInput("unit_row_norm: row " + std::to_string(i) +
                                       " is zero and has no feasible previous value");
                out.row(i) = current.row(i);
                if (stats) ++stats->frozen_rows;
            }
            return out;
        }

        case ConstraintSpec::Kind::row_sparsity: {
            FactorMatrix out = FactorMatrix::Zero(n, k);
            std::vector<Eigen::Index> cols(static_cast<std::size_t>(k));
            for (Eigen::Index i = 0; i < n; ++i) {
                std::iota(cols.begin(), cols.end(), Eigen::Index{0});
                std::stable_sort(cols.begin(), cols.end(), [&](Eigen::Index a, Eigen::Index b) {
                    return std::abs(stepped(i, a)) > std::abs(stepped(i, b));
                });
                for (int j = 0; j < c.sparsity; ++j) out(i, cols[j]) = stepped(i, cols[j]);
            }
            return out;
        }

        case ConstraintSpec::Kind::orthogonal: {
            try {
                return polar_orthogonal_factor(stepped);
            } catch (const SingularMatrix&) {
                const double amp = 1e-10 * stepped.norm();
                if (!(amp > 0.0)) throw;
                Rng rng = make_rng(perturb_seed);
                DenseMatrix jittered = stepped;
                for (Eigen::Index j = 0; j < k; ++j)
                    for (Eigen::Index i = 0; i < n; ++i) jittered(i, j) += amp * uniform(rng, -1.0, 1.0);
                if (stats) stats->perturbed = true;
                return polar_orthogonal_factor(jittered);
            }
        }
    }
    return stepped;
}

// Membership test used by tests and the solver's feasibility checks.
inline bool is_feasible(const FactorMatrix& h, const ConstraintSpec& c, double tol = 1e-10) {
    switch (c.kind) {
        case ConstraintSpec::Kind::unconstrained:
            return h.allFinite();
        case ConstraintSpec::Kind::nonnegative:
            return h.allFinite() && (h.size() == 0 || h.minCoeff() >= 0.0);
        case ConstraintSpec::Kind::unit_row_norm:
            for (Eigen::Index i = 0; i < h.rows(); ++i)
                if (std::abs(h.row(i).norm() - 1.0) > tol) return false;
            return true;
        case ConstraintSpec::Kind::row_sparsity:
            for (Eigen::Index i = 0; i < h.rows(); ++i)
                if ((h.row(i).array() != 0.0).count() > c.sparsity) return false;
            return true;
        case ConstraintSpec::Kind::orthogonal: {
            const auto k = h.cols();
            return (h.transpose() * h - DenseMatrix::Identity(k, k)).norm() <= tol;
        }
    }
    return false;
}

}  // namespace symfact
