#include "pencil_lab/random.hpp"

#include <cmath>

namespace pencil_lab {

double uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

double standard_normal(Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

ComplexVector complex_gaussian_vector(Rng& rng, Eigen::Index n) {
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = standard_normal(rng);
        const double im = standard_normal(rng);
        v(i) = Complex(re, im);
    }
    return v;
}

ComplexVector random_unit_vector(Rng& rng, Eigen::Index n) {
    ComplexVector v = complex_gaussian_vector(rng, n);
    double nrm = v.norm();
    while (nrm == 0.0) {
        v = complex_gaussian_vector(rng, n);
        nrm = v.norm();
    }
    return v / nrm;
}

ComplexMatrix complex_gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = standard_normal(rng);
            const double im = standard_normal(rng);
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

RealMatrix real_gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    RealMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = standard_normal(rng);
    }
    return m;
}

ComplexMatrix random_unitary(Rng& rng, Eigen::Index n) {
    if (n == 0) return ComplexMatrix(0, 0);
    Eigen::HouseholderQR<ComplexMatrix> qr(complex_gaussian_matrix(rng, n, n));
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double a = std::abs(r(j, j));
        if (a > 0.0) q.col(j) *= r(j, j) / a;
    }
    return q;
}

ComplexMatrix random_conditioned(Rng& rng, Eigen::Index n, double cond_cap) {
    if (n == 0) return ComplexMatrix(0, 0);
    const ComplexMatrix u = random_unitary(rng, n);
    const ComplexMatrix v = random_unitary(rng, n);
    RealVector s(n);
    const double log_cap = std::log(std::max(cond_cap, 1.0));
    for (Eigen::Index i = 0; i < n; ++i) s(i) = std::exp(uniform(rng, 0.0, log_cap));
    return u * s.cast<Complex>().asDiagonal() * v.adjoint();
}

ComplexMatrix random_psd(Rng& rng, Eigen::Index n, Eigen::Index rank, bool real) {
    ComplexMatrix f = real ? ComplexMatrix(real_gaussian_matrix(rng, n, rank).cast<Complex>())
                           : complex_gaussian_matrix(rng, n, rank);
    return hermitian_part(f * f.adjoint());
}

ComplexMatrix random_skew(Rng& rng, Eigen::Index n, bool real) {
    ComplexMatrix g = real ? ComplexMatrix(real_gaussian_matrix(rng, n, n).cast<Complex>())
                           : complex_gaussian_matrix(rng, n, n);
    return skew_part(g);
}

}  // namespace pencil_lab
