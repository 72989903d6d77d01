#pragma once

#include "bla/matrix.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>

namespace bla {

/// Running second-moment matrix and cross-moment matrix for one layer's
/// linear regression. a_hat is input x input (bias slot included), b_hat
/// is input x output.
struct MomentState {
    SymMatrix a_hat;
    Matrix b_hat;

    static MomentState zero(Eigen::Index in_dim, Eigen::Index out_dim) {
        return {SymMatrix::zero(in_dim), Matrix::Zero(in_dim, out_dim)};
    }
};

/**
 * Blends the carried-over moment estimate with raw sums over the current
 * batch:
 *
 *   a <- r/(r+n) * prev.a + 1/(r+n) * batch_sum_a     (same for b)
 *
 * r = 0 discards the previous state entirely; r = n weights it equally
 * with the batch mean, so earlier estimates are forgotten at rate 1/2.
 * Batch sums must be raw (not divided by the batch size).
 */
MomentState weighted_moment_update(const MomentState& prev,
                                   const SymMatrix& batch_sum_a,
                                   const Matrix& batch_sum_b,
                                   std::uint64_t r, std::uint64_t n_batch);

struct EigenBounds {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

/// Thrown when the eigenvalue sweep cap is reached; carries the best
/// estimates found so far.
class EigenConvergenceError : public std::runtime_error {
public:
    EigenConvergenceError(const std::string& what, EigenBounds best)
        : std::runtime_error(what), best_(best) {}
    EigenBounds best() const { return best_; }

private:
    EigenBounds best_;
};

/**
 * Extreme eigenvalues of a dense symmetric matrix by cyclic Jacobi
 * rotations (no eigenvectors accumulated). Sized for the moment matrices
 * this library produces, at most a few hundred rows.
 *
 * Returns estimates with |est - true| <= tol * max(1, |true|).
 */
EigenBounds extreme_eigenvalues(const SymMatrix& m, double tol = 1e-6,
                                int max_sweeps = 50);

/// Richardson gain centered on the spectrum: factor / (lambda_max + lambda_min).
/// factor just under 2 keeps the eigenvalues of I - mu*A inside the unit ball
/// with a margin.
double step_size(double lambda_min, double lambda_max, double factor = 1.95);

class RichardsonDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RichardsonResult {
    Matrix w;
    int iters = 0;
    /// The update norm stopped shrinking before reaching tol: the residual
    /// lives (numerically) in the null space of a, where more iterations
    /// would only drift the iterate, so the solve stopped at the floor.
    bool stalled = false;
};

/// Observer invoked after each iterate update; used by tests to track the
/// convergence rate. Null by default.
using RichardsonObserver = std::function<void(int iter, const Matrix& w)>;

/**
 * Stationary iteration  w <- w + mu (b - a w)  until the Frobenius norm of
 * the update drops below tol, stops shrinking, or max_iters is reached.
 * Columns of b are solved simultaneously and independently.
 *
 * Converges geometrically to a^-1 b whenever the eigenvalues of I - mu*a
 * lie strictly inside the unit ball, which the step_size gain guarantees
 * for nonsingular PSD a. A growing update norm (10x above its running
 * minimum) signals a spectral-radius violation and raises
 * RichardsonDivergence. On a numerically singular system the update norm
 * plateaus at the null-space floor instead of reaching tol; progress under
 * 0.001% across a 1000-iteration window stops the solve there (stalled in
 * the result), returning the iterate whose reachable components have
 * converged. The window only fires when the per-iteration decay is above
 * ~(1 - 1e-8), far slower than any nonsingular system this library feeds
 * the solver.
 */
RichardsonResult richardson_solve(const SymMatrix& a, const Matrix& b,
                                  const Matrix& w0, double mu,
                                  int max_iters, double tol,
                                  const RichardsonObserver& observer = nullptr);

} // namespace bla
