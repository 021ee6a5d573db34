#include "pencil_lab/matpoly.hpp"

#include <cmath>
#include <sstream>

#include "pencil_lab/kcf.hpp"
#include "pencil_lab/random.hpp"

namespace pencil_lab {

MatrixPolynomial::MatrixPolynomial(std::vector<ComplexMatrix> coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.size() < 2) throw PreconditionError("MatrixPolynomial: degree must be >= 1");
    const Eigen::Index n = coefficients_.front().rows();
    for (std::size_t j = 0; j < coefficients_.size(); ++j) {
        const ComplexMatrix& a = coefficients_[j];
        if (a.rows() != n || a.cols() != n) {
            throw DimensionError("MatrixPolynomial: coefficient A" + std::to_string(j) + " is not " +
                                 std::to_string(n) + "x" + std::to_string(n));
        }
        if (!all_finite(a)) throw PreconditionError("MatrixPolynomial: non-finite entry in A" + std::to_string(j));
    }
}

MatrixPolynomial MatrixPolynomial::psd_validated(std::vector<ComplexMatrix> coefficients, std::optional<double> tol) {
    for (auto& a : coefficients) a = hermitian_part(a);
    MatrixPolynomial p(std::move(coefficients));
    for (std::size_t j = 0; j < p.coefficients_.size(); ++j) {
        const ComplexMatrix& a = p.coefficients_[j];
        if (a.rows() == 0) continue;
        const double t = tol.value_or(default_psd_tolerance(a));
        const double lmin = lambda_min(a);
        if (lmin < -t) throw PoshRejection("A" + std::to_string(j), lmin, t);
    }
    p.psd_validated_ = true;
    return p;
}

ComplexMatrix MatrixPolynomial::at(Complex z) const {
    ComplexMatrix out = coefficients_.back();
    for (int j = degree() - 1; j >= 0; --j) out = z * out + coefficients_[static_cast<std::size_t>(j)];
    return out;
}

namespace {

void require_validated(const MatrixPolynomial& p, const char* op) {
    if (!p.is_psd_validated()) {
        throw PreconditionError(std::string(op) + ": polynomial must be psd-validated (MatrixPolynomial::psd_validated)");
    }
}

void put(ComplexMatrix& m, Eigen::Index n, int bi, int bj, const ComplexMatrix& block) {
    m.block(bi * n, bj * n, n, n) = block;
}

}  // namespace

PoshPencil linearize_odd(const MatrixPolynomial& p) {
    require_validated(p, "linearize_odd");
    const int d = p.degree();
    if (d % 2 == 0) throw PreconditionError("linearize_odd: degree is even; use linearize_even");
    const int delta = (d + 1) / 2;
    const Eigen::Index n = p.size(), N = d * n;
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix j1 = ComplexMatrix::Zero(N, N), j2 = j1, r1 = j1, r2 = j1;
    for (int j = 0; j <= delta - 2; ++j) {
        put(j1, n, 2 * j, 2 * j + 1, id);
        put(j1, n, 2 * j + 1, 2 * j, -id);
        put(j2, n, 2 * j + 1, 2 * j + 2, -id);
        put(j2, n, 2 * j + 2, 2 * j + 1, id);
    }
    for (int j = 0; j <= delta - 1; ++j) {
        put(r1, n, 2 * j, 2 * j, p[2 * j + 1]);
        put(r2, n, 2 * j, 2 * j, p[2 * j]);
    }
    return PoshPencil(j1, r1, j2, r2);
}

PoshPencil linearize_even(const MatrixPolynomial& p) {
    require_validated(p, "linearize_even");
    const int d = p.degree();
    if (d % 2 != 0) throw PreconditionError("linearize_even: degree is odd; use linearize_odd");
    Eigen::LLT<ComplexMatrix> llt(p[0]);
    if (p.size() > 0 && (llt.info() != Eigen::Success || !is_positive_definite(p[0]))) {
        throw PreconditionError("linearize_even: A0 is not positive definite (only invertible A0 is supported)");
    }
    const int delta = d / 2;
    const Eigen::Index n = p.size(), N = d * n;
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix j1 = ComplexMatrix::Zero(N, N), j2 = j1, r1 = j1, r2 = j1;
    for (int j = 0; j <= delta - 2; ++j) {
        put(j1, n, 2 * j + 1, 2 * j + 2, -id);
        put(j1, n, 2 * j + 2, 2 * j + 1, id);
    }
    for (int j = 0; j <= delta - 1; ++j) {
        put(j2, n, 2 * j, 2 * j + 1, id);
        put(j2, n, 2 * j + 1, 2 * j, -id);
        put(r2, n, 2 * j + 1, 2 * j + 1, p[2 * j + 1]);
    }
    put(r1, n, 0, 0, hermitian_part(llt.solve(id)));
    for (int j = 1; j <= delta - 1; ++j) put(r1, n, 2 * j - 1, 2 * j - 1, p[2 * j]);
    put(r1, n, d - 1, d - 1, p[d]);
    return PoshPencil(j1, r1, j2, r2);
}

PoshPencil linearize_cubic(const MatrixPolynomial& p) {
    require_validated(p, "linearize_cubic");
    if (p.degree() != 3) throw PreconditionError("linearize_cubic: degree must be 3");
    if (!is_positive_definite(p[0])) throw PreconditionError("linearize_cubic: A0 is not positive definite");
    if (!is_positive_definite(p[3])) throw PreconditionError("linearize_cubic: A3 is not positive definite");
    const Eigen::Index n = p.size(), N = 3 * n;
    ComplexMatrix j1 = ComplexMatrix::Zero(N, N), j2 = j1, r1 = j1, r2 = j1;
    put(j1, n, 0, 1, -p[3]);
    put(j1, n, 1, 0, p[3]);
    put(r1, n, 1, 1, p[2]);
    put(r1, n, 2, 2, p[0]);
    put(j2, n, 1, 2, p[0]);
    put(j2, n, 2, 1, -p[0]);
    put(r2, n, 0, 0, p[3]);
    put(r2, n, 1, 1, p[1]);
    return PoshPencil(j1, r1, j2, r2);
}

PoshPencil linearize(const MatrixPolynomial& p) {
    return p.degree() % 2 == 1 ? linearize_odd(p) : linearize_even(p);
}

PolynomialIndex polynomial_index(const MatrixPolynomial& p) {
    PolynomialIndex out;
    out.bound = p.degree();
    out.computed = structural_index(linearize(p).pencil());
    return out;
}

std::vector<ExtendedComplex> polynomial_eigenvalues(const MatrixPolynomial& p, std::uint64_t seed) {
    return generalized_eigenvalues(linearize(p).pencil(), seed);
}

const char* to_string(CubicConclusion c) {
    switch (c) {
        case CubicConclusion::lhp_certified: return "lhp_certified";
        case CubicConclusion::region_excluded_only: return "region_excluded_only";
        case CubicConclusion::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

CubicStabilityReport cubic_stability(const MatrixPolynomial& p) {
    if (p.degree() != 3) throw PreconditionError("cubic_stability: degree must be 3");
    CubicStabilityReport rep;
    const ComplexMatrix a0 = hermitian_part(p[0]), a1 = hermitian_part(p[1]);
    const ComplexMatrix a2 = hermitian_part(p[2]), a3 = hermitian_part(p[3]);
    auto tol = [](const ComplexMatrix& m) { return default_psd_tolerance(m); };

    std::vector<std::string> failed;
    if (!is_positive_definite(a3)) failed.push_back("A3 > 0");
    if (!is_positive_definite(a2)) failed.push_back("A2 > 0");
    if (!is_positive_definite(a0)) failed.push_back("A0 > 0");
    if (lambda_min(a1) < -tol(a1)) failed.push_back("A1 >= 0");
    if (!is_positive_definite(a1 + a2)) failed.push_back("A2 + A1 > 0");
    rep.hypotheses_hold = failed.empty();
    for (const auto& f : failed) rep.notes.push_back("hypothesis fails: " + f);

    const ComplexMatrix d32 = a2 - a3, d10 = a1 - a0;
    rep.pos2_holds = lambda_min(d32) >= -std::max(tol(a2), tol(a3)) && lambda_min(d10) >= -std::max(tol(a1), tol(a0));

    if (rep.hypotheses_hold) {
        const Eigen::Index n = p.size();
        const Complex i(0.0, 1.0);
        ComplexMatrix h0 = ComplexMatrix::Zero(2 * n, 2 * n), h1 = h0;
        h0.topLeftCorner(n, n) = a3;
        h0.bottomRightCorner(n, n) = a1 + a2;
        h1.topRightCorner(n, n) = -i * a3;
        h1.bottomLeftCorner(n, n) = i * a3;
        rep.beta_star = definite_sup(h0, h1);
        if (rep.beta_star.defined()) {
            const double b = rep.beta_star.as_double();
            rep.excluded_plus = PacmanRegion{b, Sign::plus, 1.0};
            rep.excluded_minus = PacmanRegion{b, Sign::minus, 1.0};
        }
        rep.conclusion = rep.pos2_holds ? CubicConclusion::lhp_certified : CubicConclusion::region_excluded_only;
        if (!rep.pos2_holds) rep.notes.push_back("A2 >= A3 and A1 >= A0 fails; only the excluded region is certified");
    }
    return rep;
}

MgtVerdict mgt_stability(double a, double b, double c, const ComplexMatrix& t) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) throw PreconditionError("mgt_stability: a, b, c must be positive");
    if (t.rows() != t.cols()) throw DimensionError("mgt_stability: T must be square");
    if (!is_positive_definite(t)) throw PreconditionError("mgt_stability: T must be Hermitian positive definite");
    const Eigen::Index n = t.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix th = hermitian_part(t);
    MgtVerdict v{CubicConclusion::inconclusive, MatrixPolynomial::psd_validated({c * th, b * th, a * id, id}), ""};
    if (a > 1.0 && b > c) {
        v.conclusion = CubicConclusion::lhp_certified;
        v.reason = "a > 1 and b > c";
    } else {
        v.reason = a > 1.0 ? "b > c fails" : "a > 1 fails";
    }
    return v;
}

double cubic_quartic_value(const MatrixPolynomial& p, const ComplexVector& x1, const ComplexVector& x2,
                           const ComplexVector& x3) {
    const double f = (quadratic_form(p[2], x2) + quadratic_form(p[0], x3)).real();
    const double g = (quadratic_form(p[3], x1) + quadratic_form(p[1], x2)).real();
    const double h = x2.dot(p[3] * x1).real();
    const double k = x2.dot(p[0] * x3).real();
    return -f * g + 4.0 * h * k;
}

std::vector<Complex> rayleigh_roots(const MatrixPolynomial& p, const ComplexVector& x) {
    // Hermitian coefficients: the forms are real, so keep only the real parts.
    std::vector<Complex> c;
    for (const auto& a : p.coefficients()) c.push_back(quadratic_form(a, x).real());
    return polynomial_roots(c, 1e-14);
}

bool is_regular_polynomial(const MatrixPolynomial& p, std::uint64_t seed) {
    Rng rng = make_stream(seed, 0x9017);
    const Eigen::Index n = p.size();
    if (n == 0) return true;
    for (int k = 0; k < 3; ++k) {
        const Complex z = std::polar(uniform(rng, 0.5, 2.0), uniform(rng, 0.0, 2.0 * M_PI));
        double bound = 0.0;
        for (int j = 0; j <= p.degree(); ++j) bound += spectral_norm(p[j]) * std::pow(std::abs(z), j);
        if (sigma_min(p.at(z)) > 64.0 * static_cast<double>(n) * kEps * bound) return true;
    }
    return false;
}

}  // namespace pencil_lab
