#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symfact/error.hpp"
#include "symfact/random.hpp"

namespace symfact {

// Row-major storage would match the CSV layout, but Eigen's column-major
// default keeps column access (h_i, p_i) contiguous for the solvers.
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// n x k cluster-indicator matrix (H, P). Mixed signs allowed.
using FactorMatrix = DenseMatrix;

inline bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

inline void require_finite(const DenseMatrix& m, const char* what) {
    if (!m.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entry");
}

inline double max_abs(const DenseMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Dense n x n matrix with exact symmetry.
///
/// Construction rejects non-square or non-finite input and input whose
/// asymmetry exceeds 1e-12 of its largest entry; accepted input is replaced
/// by (S + S^T) / 2, which is bitwise symmetric.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;

    explicit SymmetricMatrix(DenseMatrix s) : m_(std::move(s)) {
        check_shape_and_finite();
        const double scale = max_abs(m_);
        const double asym = max_abs(m_ - m_.transpose());
        if (asym > 1e-12 * scale) {
            throw InvalidInput("SymmetricMatrix: asymmetry " + std::to_string(asym) +
                               " exceeds tolerance");
        }
        average_triangles();
    }

    // For products that are symmetric in exact arithmetic (H H^T - M, H^T H)
    // but whose rounding error can exceed the relative tolerance above after
    // cancellation. Skips the asymmetry check.
    static SymmetricMatrix symmetrize(DenseMatrix s) {
        SymmetricMatrix out;
        out.m_ = std::move(s);
        out.check_shape_and_finite();
        out.average_triangles();
        return out;
    }

    static SymmetricMatrix identity(Eigen::Index n) {
        return SymmetricMatrix(DenseMatrix::Identity(n, n));
    }
    static SymmetricMatrix zero(Eigen::Index n) {
        return SymmetricMatrix(DenseMatrix::Zero(n, n));
    }
    static SymmetricMatrix diagonal(const Vector& d) {
        return SymmetricMatrix(DenseMatrix(d.asDiagonal()));
    }

    Eigen::Index size() const noexcept { return m_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    const DenseMatrix& dense() const noexcept { return m_; }
    double frobenius_norm() const { return m_.norm(); }

private:
    void check_shape_and_finite() const {
        if (m_.rows() != m_.cols()) {
            throw InvalidInput("SymmetricMatrix: matrix is " + std::to_string(m_.rows()) + "x" +
                               std::to_string(m_.cols()) + ", expected square");
        }
        require_finite(m_, "SymmetricMatrix");
    }

    void average_triangles() {
        const Eigen::Index n = m_.rows();
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = j + 1; i < n; ++i) {
                const double v = 0.5 * (m_(i, j) + m_(j, i));
                m_(i, j) = v;
                m_(j, i) = v;
            }
        }
    }

    DenseMatrix m_;
};

// ---------------------------------------------------------------------------
// Extreme eigenvalues by shifted power iteration
// ---------------------------------------------------------------------------

struct PowerIterationOptions {
    double tol = 1e-10;
    int max_iter = 5000;
    std::uint64_t seed = 0x5eed;
    // Warm starts for the two runs; a random start is drawn when absent or
    // when the size does not match.
    std::optional<Vector> start_max;
    std::optional<Vector> start_min;
};

struct ExtremeEigenvalues {
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    bool converged = true;
    int iterations = 0;  // total over both runs
    Vector vec_max;
    Vector vec_min;

    double largest_magnitude() const { return std::max(std::abs(lambda_max), std::abs(lambda_min)); }
};

namespace detail {

struct PowerRun {
    double rayleigh = 0.0;
    Vector vec;
    bool converged = false;
    int iterations = 0;
};

inline Vector random_unit_vector(Eigen::Index n, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(rng, -1.0, 1.0);
    const double nv = v.norm();
    if (nv == 0.0) {
        v.setZero();
        v(0) = 1.0;
        return v;
    }
    return v / nv;
}

// Dominant eigenpair of the PSD operator x -> sign * S x + shift * x.
inline PowerRun power_run(const DenseMatrix& s, double sign, double shift, Vector v, double tol,
                          int max_iter) {
    PowerRun run;
    double prev = 0.0;
    Vector w(v.size());
    for (int it = 1; it <= max_iter; ++it) {
        w.noalias() = s * v;
        w = sign * w + shift * v;
        const double rho = v.dot(w);
        run.iterations = it;
        run.rayleigh = rho;
        const double nw = w.norm();
        if (nw == 0.0) {
            // v lies in the null space of a PSD operator: rho = 0 is exact.
            run.vec = v;
            run.converged = true;
            return run;
        }
        const bool done = it > 1 && std::abs(rho - prev) <= tol * std::max(1.0, std::abs(rho));
        v = w / nw;
        prev = rho;
        if (done) {
            run.converged = true;
            break;
        }
    }
    run.vec = std::move(v);
    return run;
}

}  // namespace detail

// Largest and smallest eigenvalues of S. Both runs iterate on a PSD shift of S
// (S + cI and cI - S with c the Gershgorin radius), so neither is confused by
// eigenvalues of equal magnitude and opposite sign.
inline ExtremeEigenvalues extreme_eigenvalues(const SymmetricMatrix& s,
                                              const PowerIterationOptions& opt = {}) {
    if (!(opt.tol > 0.0)) throw InvalidInput("extreme_eigenvalues: tol must be positive");
    if (opt.max_iter < 1) throw InvalidInput("extreme_eigenvalues: max_iter must be >= 1");
    const DenseMatrix& m = s.dense();
    const Eigen::Index n = m.rows();
    ExtremeEigenvalues out;
    if (n == 0) return out;

    const double c = m.cwiseAbs().rowwise().sum().maxCoeff();
    if (c == 0.0) {
        out.vec_max = detail::random_unit_vector(n, opt.seed);
        out.vec_min = out.vec_max;
        return out;
    }

    auto start = [&](const std::optional<Vector>& warm, std::uint64_t seed) {
        if (warm && warm->size() == n && warm->norm() > 0.0) return Vector(*warm / warm->norm());
        return detail::random_unit_vector(n, seed);
    };

    auto top = detail::power_run(m, 1.0, c, start(opt.start_max, opt.seed), opt.tol, opt.max_iter);
    auto bottom = detail::power_run(m, -1.0, c, start(opt.start_min, opt.seed + 1), opt.tol,
                                    opt.max_iter);

    out.lambda_max = std::clamp(top.rayleigh - c, -c, c);
    out.lambda_min = std::clamp(c - bottom.rayleigh, -c, c);
    if (out.lambda_min > out.lambda_max) std::swap(out.lambda_min, out.lambda_max);
    out.converged = top.converged && bottom.converged;
    out.iterations = top.iterations + bottom.iterations;
    out.vec_max = std::move(top.vec);
    out.vec_min = std::move(bottom.vec);
    return out;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver
// ---------------------------------------------------------------------------

struct EigenDecomposition {
    Vector values;        // descending
    DenseMatrix vectors;  // column j pairs with values(j)
};

/// Full eigendecomposition of a small symmetric matrix by cyclic Jacobi
/// rotations. Sweeps until the off-diagonal Frobenius mass is at most
/// 1e-14 * ||S||_F. Eigenvalues come back in descending order; equal values
/// keep their diagonal order.
inline EigenDecomposition jacobi_eigh(const SymmetricMatrix& s) {
    DenseMatrix a = s.dense();
    const Eigen::Index n = a.rows();
    DenseMatrix v = DenseMatrix::Identity(n, n);

    const double target = 1e-14 * a.norm();
    auto off_norm = [&] {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                if (i != j) sum += a(i, j) * a(i, j);
        return std::sqrt(sum);
    };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps && off_norm() > target; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation zeroing a(p,q); t is the smaller root of
                // t^2 + 2 theta t - 1 = 0.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cs = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * cs;

                for (Eigen::Index r = 0; r < n; ++r) {
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = cs * arp - sn * arq;
                    a(r, q) = sn * arp + cs * arq;
                }
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double apr = a(p, r);
                    const double aqr = a(q, r);
                    a(p, r) = cs * apr - sn * aqr;
                    a(q, r) = sn * apr + cs * aqr;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = cs * vrp - sn * vrq;
                    v(r, q) = sn * vrp + cs * vrq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.values(j) = a(order[j], order[j]);
        out.vectors.col(j) = v.col(order[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orthogonal polar factor
// ---------------------------------------------------------------------------

/// Q = U V^T from the thin SVD B = U S V^T: the matrix with orthonormal
/// columns nearest to B in Frobenius norm.
inline DenseMatrix polar_orthogonal_factor(const DenseMatrix& b) {
    if (b.rows() < b.cols())
        throw InvalidInput("polar_orthogonal_factor: need rows >= cols");
    require_finite(b, "polar_orthogonal_factor");
    const Eigen::Index k = b.cols();
    if (k == 0) return b;

    const Eigen::JacobiSVD<DenseMatrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    if (!(sigma(0) > 0.0) || sigma(k - 1) <= 1e-12 * sigma(0))
        throw SingularMatrix("polar_orthogonal_factor: matrix is rank deficient");
    return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace symfact
