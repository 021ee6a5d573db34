#include "pencil_lab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "pencil_lab/errors.hpp"

namespace pencil_lab {

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
        }
    }
    return true;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("hermitian_part: matrix is not square");
    const Eigen::Index n = m.rows();
    ComplexMatrix h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = Complex(m(i, i).real(), 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Complex v = (m(i, j) + std::conj(m(j, i))) * 0.5;
            h(i, j) = v;
            h(j, i) = std::conj(v);
        }
    }
    return h;
}

ComplexMatrix skew_part(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("skew_part: matrix is not square");
    const Eigen::Index n = m.rows();
    ComplexMatrix s(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s(i, i) = Complex(0.0, m(i, i).imag());
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Complex v = (m(i, j) - std::conj(m(j, i))) * 0.5;
            s(i, j) = v;
            s(j, i) = -std::conj(v);
        }
    }
    return s;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& h) {
    if (h.rows() == 0) return RealVector();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double lambda_min(const ComplexMatrix& h) {
    const RealVector ev = hermitian_eigenvalues(h);
    return ev.size() == 0 ? 0.0 : ev(0);
}

double lambda_max(const ComplexMatrix& h) {
    const RealVector ev = hermitian_eigenvalues(h);
    return ev.size() == 0 ? 0.0 : ev(ev.size() - 1);
}

bool is_positive_definite(const ComplexMatrix& h) {
    if (h.rows() == 0) return true;
    Eigen::LLT<ComplexMatrix> llt(hermitian_part(h));
    if (llt.info() != Eigen::Success) return false;
    // LLT only rejects nonpositive pivots; a zero-ish pivot still means singular.
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (!(l(i, i).real() > 0.0)) return false;
    }
    return true;
}

RealVector singular_values(const ComplexMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return RealVector();
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    return svd.singularValues();
}

double spectral_norm(const ComplexMatrix& m) {
    const RealVector s = singular_values(m);
    return s.size() == 0 ? 0.0 : s(0);
}

double sigma_min(const ComplexMatrix& m) {
    const RealVector s = singular_values(m);
    if (s.size() < std::min(m.rows(), m.cols()) || s.size() == 0) return 0.0;
    return s(s.size() - 1);
}

std::size_t numerical_rank(const ComplexMatrix& m, double tol) {
    const RealVector s = singular_values(m);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol) ++r;
    }
    return r;
}

double default_rank_tolerance(const ComplexMatrix& m, double safety) {
    const double dim = static_cast<double>(std::max(m.rows(), m.cols()));
    return dim * spectral_norm(m) * kEps * safety;
}

ComplexMatrix null_space(const ComplexMatrix& m, double tol) {
    const Eigen::Index n = m.cols();
    if (n == 0) return ComplexMatrix(0, 0);
    if (m.rows() == 0) return ComplexMatrix::Identity(n, n);
    Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol) ++r;
    }
    return svd.matrixV().rightCols(n - r);
}

ComplexMatrix vstack(const std::vector<ComplexMatrix>& blocks) {
    if (blocks.empty()) return ComplexMatrix(0, 0);
    const Eigen::Index cols = blocks.front().cols();
    Eigen::Index rows = 0;
    for (const auto& b : blocks) {
        if (b.cols() != cols) throw DimensionError("vstack: column counts differ");
        rows += b.rows();
    }
    ComplexMatrix out(rows, cols);
    Eigen::Index r = 0;
    for (const auto& b : blocks) {
        out.middleRows(r, b.rows()) = b;
        r += b.rows();
    }
    return out;
}

ComplexMatrix block_diag(const std::vector<ComplexMatrix>& blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    ComplexMatrix out = ComplexMatrix::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

std::vector<Complex> polynomial_roots(const std::vector<Complex>& ascending, double rel_tol) {
    double cmax = 0.0;
    for (const auto& c : ascending) cmax = std::max(cmax, std::abs(c));
    if (cmax == 0.0) throw PreconditionError("polynomial_roots: zero polynomial");

    std::size_t hi = ascending.size();
    while (hi > 0 && std::abs(ascending[hi - 1]) <= rel_tol * cmax) --hi;
    std::size_t lo = 0;
    while (lo < hi && ascending[lo] == Complex(0.0)) ++lo;

    std::vector<Complex> roots(lo, Complex(0.0));
    const std::size_t deg = hi - 1 - lo;
    if (deg == 0) return roots;

    // Companion matrix of the monic polynomial c[lo..hi-1] / lead.
    const Complex lead = ascending[hi - 1];
    ComplexMatrix comp = ComplexMatrix::Zero(deg, deg);
    for (std::size_t i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < deg; ++i) comp(i, deg - 1) = -ascending[lo + i] / lead;
    Eigen::ComplexEigenSolver<ComplexMatrix> es(comp, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) roots.push_back(es.eigenvalues()(i));
    return roots;
}

Complex quadratic_form(const ComplexMatrix& m, const ComplexVector& x) {
    return x.dot(m * x);  // Eigen's dot conjugates the first argument
}

}  // namespace pencil_lab
