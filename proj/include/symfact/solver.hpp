#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symfact/constraints.hpp"
#include "symfact/error.hpp"
#include "symfact/linalg.hpp"
#include "symfact/objective.hpp"

namespace symfact {

/// One step of the column-wise solver, reported to SolverConfig::on_column.
struct ColumnStep {
    int sweep = 0;
    Eigen::Index column = 0;
    char factor = 'h';     // 'h' or 'p'
    double before = 0.0;   // split objective before the update
    double after = 0.0;    // and after it
    double moved_sq = 0.0; // ||x - x+||^2 for the updated column
    double mu = 0.0;
};

struct SolverConfig {
    // Splitting penalty; when absent, mu_margin times the lower bound
    // computed from the starting point.
    std::optional<double> mu_penalty;
    double mu_margin = 1.01;
    int max_iter = 1000;
    double rel_tol = 1e-8;
    std::uint64_t seed = 0;
    // Column-wise solver: clamp every updated column at zero.
    bool nonneg_columns = false;
    // Projected gradient: constant stepsize instead of 1 / (2 L_i).
    std::optional<double> fixed_step;
    std::function<void(const ColumnStep&)> on_column;

    void validate() const {
        if (mu_penalty && !(*mu_penalty > 0.0)) throw InvalidInput("mu_penalty must be > 0");
        if (!(mu_margin > 1.0)) throw InvalidInput("mu_margin must be > 1");
        if (max_iter < 1) throw InvalidInput("max_iter must be >= 1");
        if (!(rel_tol > 0.0)) throw InvalidInput("rel_tol must be > 0");
        if (fixed_step && !(*fixed_step > 0.0)) throw InvalidInput("fixed_step must be > 0");
    }
};

// Empty optionals are columns that do not apply to the solver that wrote
// the record.
struct TraceRecord {
    int iter = 0;
    double objective = 0.0;  // split objective (column-wise) or f(H) (gradient)
    double rel_error = 0.0;  // ||M - H H^T||^2 / ||M||^2
    std::optional<double> stepsize;
    std::optional<double> lipschitz;
    std::optional<double> split_gap;  // ||H - P||_F
    double wall_ms = 0.0;
    double step_sq = 0.0;       // ||H_k - H_{k-1}||_F^2
    double grad_norm_sq = 0.0;  // ||grad f(H_k)||_F^2
};

struct SolveTrace {
    std::vector<TraceRecord> records;
    bool converged = false;
    std::size_t frozen_rows = 0;  // unit_row_norm zero-row events
    std::size_t perturbations = 0;

    int iterations() const { return records.empty() ? 0 : records.back().iter; }
    const TraceRecord& final() const { return records.back(); }
};

struct FactorPair {
    FactorMatrix h;
    FactorMatrix p;
};

struct ColumnwiseResult {
    FactorPair factors;
    SolveTrace trace;
    double mu = 0.0;
};

struct PgdResult {
    FactorMatrix h;
    SolveTrace trace;
};

namespace detail {

inline void check_rank(const SymmetricMatrix& m, Eigen::Index k) {
    if (k < 1 || k > m.size())
        throw InvalidInput("k=" + std::to_string(k) + " outside [1, " + std::to_string(m.size()) +
                           "]");
}

inline void check_finite_iterate(double f, const FactorMatrix& h, int iter) {
    if (!std::isfinite(f) || !h.allFinite())
        throw NumericFailure("non-finite value at iteration " + std::to_string(iter));
}

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace detail

// Given y = M_bar x, returns (y + mu x) / (||x||^2 + mu), clamped at
// zero when `nonneg`. This is the exact minimizer of
// ||M_bar - z x^T||^2 + mu ||z - x||^2 over z (over z >= 0 when clamped).
inline Vector column_update_from_product(const Vector& mbar_x, const Vector& x, double mu,
                                         bool nonneg) {
    if (!(mu > 0.0)) throw InvalidInput("column_update: mu must be > 0");
    Vector z = (mbar_x + mu * x) / (x.squaredNorm() + mu);
    if (nonneg) z = z.cwiseMax(0.0);
    return z;
}

/// (M_bar + mu I) p / (||p||^2 + mu), optionally clamped at zero.
inline Vector column_update(const SymmetricMatrix& mbar, const Vector& p, double mu,
                            bool nonneg = false) {
    if (p.size() != mbar.size()) throw InvalidInput("column_update: shape mismatch");
    return column_update_from_product(mbar.dense() * p, p, mu, nonneg);
}

/// Column-wise splitting solver for min ||M - H P^T||^2 + mu ||H - P||^2
/// from H0 = P0.
///
/// Each sweep updates h_i then p_i for i = 0..k-1 by exact column
/// minimization against M_bar = M - sum_{j != i} h_j p_j^T. The residual
/// M - H P^T is carried across columns with two rank-one updates, so a sweep
/// costs O(n^2 k). The p-update uses M_bar^T, which equals M_bar whenever
/// H = P.
inline ColumnwiseResult solve_columnwise(const SymmetricMatrix& m, Eigen::Index k,
                                         const SolverConfig& cfg) {
    cfg.validate();
    detail::check_rank(m, k);

    ColumnwiseResult out;
    FactorMatrix h = initial_factor(m, k, cfg.seed);
    FactorMatrix p = h;
    out.mu = cfg.mu_penalty ? *cfg.mu_penalty : cfg.mu_margin * penalty_lower_bound(m, h, p);
    const double mu = out.mu;
    const bool nonneg = cfg.nonneg_columns;
    DenseMatrix residual = m.dense() - h * p.transpose();
    auto split_value = [&](const DenseMatrix& r, const FactorMatrix& hh, const FactorMatrix& pp) {
        return r.squaredNorm() + mu * (hh - pp).squaredNorm();
    };

    const double f0 = split_value(residual, h, p);
    out.trace.records.push_back({0, f0, relative_error(m, h), std::nullopt, std::nullopt, 0.0,
                                 0.0, 0.0, gradient(m, h).squaredNorm()});

    double f_prev = f0;
    for (int sweep = 1; sweep <= cfg.max_iter; ++sweep) {
        const auto start = detail::Clock::now();
        const FactorMatrix h_prev = h;

        for (Eigen::Index i = 0; i < k; ++i) {
            const Vector hi = h.col(i);
            const Vector pi = p.col(i);

            const Vector mbar_p = residual * pi + hi * pi.squaredNorm();
            const Vector hi_new = column_update_from_product(mbar_p, pi, mu, nonneg);
            const Vector mbar_t_h = residual.transpose() * hi_new + pi * hi.dot(hi_new);
            const Vector pi_new = column_update_from_product(mbar_t_h, hi_new, mu, nonneg);

            if (cfg.on_column) {
                const double before = split_value(residual, h, p);
                DenseMatrix r_mid = residual + (hi - hi_new) * pi.transpose();
                FactorMatrix h_mid = h;
                h_mid.col(i) = hi_new;
                const double mid = split_value(r_mid, h_mid, p);
                cfg.on_column({sweep, i, 'h', before, mid, (hi - hi_new).squaredNorm(), mu});
                r_mid.noalias() += hi_new * (pi - pi_new).transpose();
                FactorMatrix p_mid = p;
                p_mid.col(i) = pi_new;
                const double after = split_value(r_mid, h_mid, p_mid);
                cfg.on_column({sweep, i, 'p', mid, after, (pi - pi_new).squaredNorm(), mu});
            }

            residual.noalias() += hi * pi.transpose();
            residual.noalias() -= hi_new * pi_new.transpose();
            h.col(i) = hi_new;
            p.col(i) = pi_new;
        }

        const double f = split_value(residual, h, p);
        detail::check_finite_iterate(f, h, sweep);
        const double e = relative_error(m, h);
        out.trace.records.push_back({sweep, f, e, std::nullopt, std::nullopt, (h - p).norm(),
                                     detail::ms_since(start), (h - h_prev).squaredNorm(),
                                     gradient(m, h).squaredNorm()});
        if (std::abs(f_prev - f) <= cfg.rel_tol * (1.0 + f0)) {
            out.trace.converged = true;
            break;
        }
        f_prev = f;
    }

    out.factors = {std::move(h), std::move(p)};
    return out;
}

/// Projected gradient descent H+ = P(H - t grad f(H)) over the constraint set,
/// with t = 1 / (2 L_i) and L_i re-estimated at every iterate (or a constant
/// t when cfg.fixed_step is set). The start H0 is projected once so every
/// iterate is feasible.
inline PgdResult solve_pgd(const SymmetricMatrix& m, Eigen::Index k, const ConstraintSpec& c,
                           const SolverConfig& cfg) {
    cfg.validate();
    detail::check_rank(m, k);
    c.validate(m.size(), k);

    PgdResult out;
    ProjectionStats stats;
    const FactorMatrix raw = initial_factor(m, k, cfg.seed);
    FactorMatrix h = project(raw, c, raw, cfg.seed, &stats);

    double f = objective(m, h);
    DenseMatrix g = gradient(m, h);
    const double f0 = f;
    const double m_norm_sq = m.dense().squaredNorm();
    auto rel = [&](double v) { return m_norm_sq > 0.0 ? v / m_norm_sq : v; };
    out.trace.records.push_back({0, f, rel(f), std::nullopt, std::nullopt, std::nullopt, 0.0, 0.0,
                                 g.squaredNorm()});

    PowerIterationOptions power;
    power.seed = cfg.seed ^ 0x9e3779b97f4a7c15ULL;

    for (int it = 1; it <= cfg.max_iter; ++it) {
        const auto start = detail::Clock::now();
        std::optional<double> lip;
        double t = 0.0;
        if (cfg.fixed_step) {
            t = *cfg.fixed_step;
        } else {
            lip = lipschitz_constant(m, h, power);
            if (!(*lip > 0.0)) {
                if (g.squaredNorm() == 0.0) {
                    out.trace.converged = true;
                    break;
                }
                throw NumericFailure("Lipschitz estimate is zero with a nonzero gradient");
            }
            t = 1.0 / (2.0 * *lip);
        }

        stats.perturbed = false;
        FactorMatrix h_next = project(h, c, h - t * g, cfg.seed + static_cast<std::uint64_t>(it),
                                      &stats);
        if (stats.perturbed) ++out.trace.perturbations;

        const double f_next = objective(m, h_next);
        detail::check_finite_iterate(f_next, h_next, it);
        DenseMatrix g_next = gradient(m, h_next);

        out.trace.records.push_back({it, f_next, rel(f_next), t, lip, std::nullopt,
                                     detail::ms_since(start), (h_next - h).squaredNorm(),
                                     g_next.squaredNorm()});
        h = std::move(h_next);
        g = std::move(g_next);
        const double change = std::abs(f - f_next);
        f = f_next;
        if (change <= cfg.rel_tol * (1.0 + f0)) {
            out.trace.converged = true;
            break;
        }
    }

    out.trace.frozen_rows = stats.frozen_rows;
    out.h = std::move(h);
    return out;
}

}  // namespace symfact
