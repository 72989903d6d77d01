#include "bla/linalg.hpp"

#include <cmath>
#include <limits>

namespace bla {

MomentState weighted_moment_update(const MomentState& prev,
                                   const SymMatrix& batch_sum_a,
                                   const Matrix& batch_sum_b,
                                   std::uint64_t r, std::uint64_t n_batch) {
    if (n_batch == 0) {
        throw std::invalid_argument("weighted_moment_update: empty batch");
    }
    if (prev.a_hat.dim() != batch_sum_a.dim() ||
        prev.b_hat.rows() != batch_sum_b.rows() ||
        prev.b_hat.cols() != batch_sum_b.cols() ||
        prev.a_hat.dim() != prev.b_hat.rows()) {
        throw std::invalid_argument("weighted_moment_update: dimension mismatch");
    }
    const double denom = static_cast<double>(r) + static_cast<double>(n_batch);
    const double keep = static_cast<double>(r) / denom;
    const double take = 1.0 / denom;
    MomentState next;
    next.a_hat = SymMatrix::blend(keep, prev.a_hat, take, batch_sum_a);
    next.b_hat = keep * prev.b_hat + take * batch_sum_b;
    return next;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
            s += 2.0 * a(i, j) * a(i, j);
        }
    }
    return std::sqrt(s);
}

} // namespace

EigenBounds extreme_eigenvalues(const SymMatrix& m, double tol, int max_sweeps) {
    if (tol <= 0.0) {
        throw std::invalid_argument("extreme_eigenvalues: tol must be positive");
    }
    const Eigen::Index n = m.dim();
    if (n == 0) {
        throw std::invalid_argument("extreme_eigenvalues: empty matrix");
    }
    Matrix a = m.mat();
    if (n == 1) {
        return {a(0, 0), a(0, 0)};
    }

    const double scale = a.norm();
    if (scale == 0.0) {
        return {0.0, 0.0};
    }
    // Off-diagonal mass bounds the eigenvalue perturbation, so this stop
    // criterion delivers the requested tolerance directly.
    const double target = tol * std::max(1.0, scale) / static_cast<double>(n);

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= target) {
            break;
        }
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= std::numeric_limits<double>::min()) {
                    continue;
                }
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0)
                    ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                    : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // Rotate rows and columns p, q in place.
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    EigenBounds bounds{a.diagonal().minCoeff(), a.diagonal().maxCoeff()};
    if (sweep == max_sweeps && off_diagonal_norm(a) > target) {
        throw EigenConvergenceError("extreme_eigenvalues: sweep cap reached", bounds);
    }
    return bounds;
}

double step_size(double lambda_min, double lambda_max, double factor) {
    if (factor <= 0.0 || factor > 2.0) {
        throw std::invalid_argument("step_size: factor must be in (0, 2]");
    }
    const double sum = lambda_max + lambda_min;
    if (sum <= 0.0) {
        throw std::invalid_argument("step_size: lambda_max + lambda_min <= 0 (singular or empty moment matrix)");
    }
    return factor / sum;
}

RichardsonResult richardson_solve(const SymMatrix& a, const Matrix& b,
                                  const Matrix& w0, double mu,
                                  int max_iters, double tol,
                                  const RichardsonObserver& observer) {
    if (a.dim() != b.rows() || w0.rows() != b.rows() || w0.cols() != b.cols()) {
        throw std::invalid_argument("richardson_solve: dimension mismatch");
    }
    if (max_iters < 1) {
        throw std::invalid_argument("richardson_solve: max_iters must be positive");
    }

    // Stall window: on a numerically singular system the update norm
    // bottoms out at the null-space floor mu*|b_null| and stops shrinking,
    // while the iterate keeps drifting along the null directions. Progress
    // below 0.001% over 1000 iterations marks that floor.
    constexpr int stall_window = 1000;
    constexpr double stall_ratio = 0.99999;

    Matrix w = w0;
    Matrix update(b.rows(), b.cols());
    double min_update = std::numeric_limits<double>::infinity();
    double window_norm = std::numeric_limits<double>::infinity();
    bool stalled = false;
    int iter = 0;
    while (iter < max_iters) {
        update.noalias() = b;
        update.noalias() -= a.mat() * w;
        update *= mu;
        const double norm = update.norm();
        if (norm < min_update) {
            min_update = norm;
        } else if (norm > 10.0 * min_update && norm > tol) {
            throw RichardsonDivergence("richardson_solve: update norm grew 10x above its minimum (spectral radius >= 1?)");
        }
        if (norm < tol) {
            break;
        }
        if (iter % stall_window == 0) {
            if (norm >= stall_ratio * window_norm) {
                stalled = true;
                break;
            }
            window_norm = norm;
        }
        w += update;
        ++iter;
        if (observer) {
            observer(iter, w);
        }
    }
    return {std::move(w), iter, stalled};
}

} // namespace bla
