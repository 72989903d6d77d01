#pragma once

#include "bla/matrix.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace test {

/**
 * Symmetric positive definite matrix with a controlled spectrum: Q^T D Q
 * with Q from a QR factorization of a gaussian matrix and D uniform on
 * [1, condition]. Returned via from_dense after explicit symmetrization.
 */
inline bla::SymMatrix random_spd(Eigen::Index n, double condition, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    bla::Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<bla::Matrix> qr(g);
    bla::Matrix q = qr.householderQ();
    std::uniform_real_distribution<double> lam(1.0, condition);
    bla::Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = lam(rng);
    bla::Matrix a = q.transpose() * d.asDiagonal() * q;
    a = ((a + a.transpose()) / 2.0).eval();
    return bla::SymMatrix::from_dense(a);
}

/// Regularized incomplete gamma P(a, x), series expansion (x < a + 1).
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper gamma Q(a, x), Lentz continued fraction (x >= a + 1).
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

/// P(chi2 with dof degrees of freedom >= stat).
inline double chi_square_pvalue(double stat, double dof) {
    if (stat < 0.0 || dof <= 0.0) throw std::invalid_argument("chi_square_pvalue: bad input");
    if (stat == 0.0) return 1.0;
    double a = dof / 2.0;
    double x = stat / 2.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

} // namespace test
