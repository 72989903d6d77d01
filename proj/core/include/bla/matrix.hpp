#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace bla {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * Dense symmetric matrix built from outer-product sums and linear blends.
 *
 * Both constructions preserve exact entrywise symmetry in floating point
 * (entry (i,j) and entry (j,i) are computed from the same operands), so
 * symmetry is an invariant here, not a tolerance.
 */
class SymMatrix {
public:
    SymMatrix() = default;

    static SymMatrix zero(Eigen::Index dim) {
        SymMatrix s;
        s.m_ = Matrix::Zero(dim, dim);
        return s;
    }

    static SymMatrix identity(Eigen::Index dim) {
        SymMatrix s;
        s.m_ = Matrix::Identity(dim, dim);
        return s;
    }

    /// Wraps an existing dense matrix; rejects asymmetric input.
    static SymMatrix from_dense(Matrix m) {
        if (m.rows() != m.cols()) {
            throw std::invalid_argument("SymMatrix: matrix is not square");
        }
        if ((m.array() != m.transpose().array()).any()) {
            throw std::invalid_argument("SymMatrix: matrix is not symmetric");
        }
        SymMatrix s;
        s.m_ = std::move(m);
        return s;
    }

    /// Accumulates v * v^T.
    void add_outer(const Vector& v) {
        if (v.size() != m_.rows()) {
            throw std::invalid_argument("SymMatrix::add_outer: dimension mismatch");
        }
        m_.noalias() += v * v.transpose();
    }

    /// alpha * a + beta * b, entrywise.
    static SymMatrix blend(double alpha, const SymMatrix& a, double beta, const SymMatrix& b) {
        if (a.dim() != b.dim()) {
            throw std::invalid_argument("SymMatrix::blend: dimension mismatch");
        }
        SymMatrix s;
        s.m_ = alpha * a.m_ + beta * b.m_;
        return s;
    }

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& mat() const { return m_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

private:
    Matrix m_;
};

} // namespace bla
