#include "pencil_lab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "pencil_lab/kcf.hpp"
#include "pencil_lab/random.hpp"

namespace pencil_lab {

namespace {

std::string describe_lambda_min(const std::string& coefficient, double lmin, double tol) {
    std::ostringstream os;
    os << "Hermitian part " << coefficient << " is not positive semidefinite: lambda_min = " << lmin
       << " < -" << tol;
    return os.str();
}

}  // namespace

PoshRejection::PoshRejection(std::string coefficient, double lambda_min, double tolerance)
    : PreconditionError(describe_lambda_min(coefficient, lambda_min, tolerance)),
      coefficient_(std::move(coefficient)),
      lambda_min_(lambda_min),
      tolerance_(tolerance) {}

NumericalAmbiguity::NumericalAmbiguity(const std::string& what, std::vector<double> singular_values, double tolerance)
    : Error(what), singular_values_(std::move(singular_values)), tolerance_(tolerance) {}

const char* to_string(Convention c) { return c == Convention::plus ? "plus" : "minus"; }

Pencil::Pencil(ComplexMatrix lead, ComplexMatrix constant, Convention convention)
    : lead_(std::move(lead)), constant_(std::move(constant)), convention_(convention) {
    if (lead_.rows() != constant_.rows() || lead_.cols() != constant_.cols()) {
        throw DimensionError("Pencil: lead and constant coefficients have different dimensions");
    }
    if (!all_finite(lead_) || !all_finite(constant_)) {
        throw PreconditionError("Pencil: coefficients contain NaN or Inf");
    }
}

// The sign adapter pair. lambda*L + C == lambda*E - A with E = L, A = -C.
Pencil Pencil::to_plus() const {
    if (convention_ == Convention::plus) return *this;
    return Pencil(lead_, -constant_, Convention::plus);
}

Pencil Pencil::to_minus() const {
    if (convention_ == Convention::minus) return *this;
    return Pencil(lead_, -constant_, Convention::minus);
}

ComplexMatrix Pencil::at(Complex z) const {
    return convention_ == Convention::plus ? ComplexMatrix(z * lead_ + constant_) : ComplexMatrix(z * lead_ - constant_);
}

Pencil Pencil::adjoint() const { return Pencil(lead_.adjoint(), constant_.adjoint(), convention_); }

Pencil reversal(const Pencil& p) {
    const Pencil m = p.to_minus();
    return Pencil::minus(m.constant(), m.lead()).with_convention(p.convention());
}

HermitianSplit hermitian_split(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("hermitian_split: matrix is not square");
    return HermitianSplit{skew_part(m), hermitian_part(m)};
}

double default_psd_tolerance(const ComplexMatrix& herm) {
    const RealVector ev = hermitian_eigenvalues(herm);
    double rho = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) rho = std::max(rho, std::abs(ev(i)));
    return 64.0 * kEps * rho;
}

namespace {

bool exactly_skew(const ComplexMatrix& j) {
    if (j.rows() != j.cols()) return false;
    for (Eigen::Index r = 0; r < j.rows(); ++r) {
        for (Eigen::Index c = r; c < j.cols(); ++c) {
            if (j(r, c) != -std::conj(j(c, r))) return false;
        }
    }
    return true;
}

bool exactly_hermitian(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) return false;
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = r; c < h.cols(); ++c) {
            if (h(r, c) != std::conj(h(c, r))) return false;
        }
    }
    return true;
}

}  // namespace

PoshPencil::PoshPencil(ComplexMatrix j1, ComplexMatrix r1, ComplexMatrix j2, ComplexMatrix r2,
                       std::optional<double> psd_tolerance)
    : j1_(std::move(j1)), r1_(std::move(r1)), j2_(std::move(j2)), r2_(std::move(r2)) {
    const Eigen::Index n = j1_.rows();
    for (const ComplexMatrix* m : {&j1_, &r1_, &j2_, &r2_}) {
        if (m->rows() != n || m->cols() != n) throw DimensionError("PoshPencil: coefficients must all be n x n");
        if (!all_finite(*m)) throw PreconditionError("PoshPencil: coefficients contain NaN or Inf");
    }
    if (!exactly_skew(j1_)) throw PreconditionError("PoshPencil: j1 is not skew-Hermitian");
    if (!exactly_skew(j2_)) throw PreconditionError("PoshPencil: j2 is not skew-Hermitian");
    if (!exactly_hermitian(r1_)) throw PreconditionError("PoshPencil: r1 is not Hermitian");
    if (!exactly_hermitian(r2_)) throw PreconditionError("PoshPencil: r2 is not Hermitian");

    const double tol1 = psd_tolerance.value_or(default_psd_tolerance(r1_));
    const double tol2 = psd_tolerance.value_or(default_psd_tolerance(r2_));
    const double l1 = lambda_min(r1_);
    if (l1 < -tol1) throw PoshRejection("r1", l1, tol1);
    const double l2 = lambda_min(r2_);
    if (l2 < -tol2) throw PoshRejection("r2", l2, tol2);
    psd_tolerance_ = std::max(tol1, tol2);
}

bool PoshPencil::is_real() const {
    for (const ComplexMatrix* m : {&j1_, &r1_, &j2_, &r2_}) {
        if (m->imag().cwiseAbs().maxCoeff() != 0.0) return false;
    }
    return true;
}

double PoshPencil::scale() const {
    if (size() == 0) return 1.0;
    const double s = std::max({spectral_norm(j1_), spectral_norm(r1_), spectral_norm(j2_), spectral_norm(r2_)});
    return s > 0.0 ? s : 1.0;
}

Pencil PoshPencil::pencil() const { return Pencil::plus(j1_ + r1_, j2_ + r2_); }

PoshPencil validate_posh(const Pencil& p, std::optional<double> tol) {
    if (!p.square()) throw DimensionError("validate_posh: pencil is not square");
    const Pencil plus = p.to_plus();
    HermitianSplit s1 = hermitian_split(plus.lead());
    HermitianSplit s2 = hermitian_split(plus.constant());
    return PoshPencil(std::move(s1.skew), std::move(s1.herm), std::move(s2.skew), std::move(s2.herm), tol);
}

Pencil DhPencil::pencil() const { return Pencil::minus(e, (j - r) * q); }

DhValidation validate_dh(const DhPencil& p, double tol) {
    DhValidation v;
    const Eigen::Index n = p.e.rows();
    for (const ComplexMatrix* m : {&p.e, &p.j, &p.r, &p.q}) {
        if (m->rows() != n || m->cols() != n) {
            v.ok = false;
            v.failures.push_back("dimensions differ");
            return v;
        }
    }
    if (!exactly_skew(p.j)) {
        v.ok = false;
        v.failures.push_back("J is not skew-Hermitian");
    }
    const double rnorm = std::max(spectral_norm(p.r), 1.0);
    if ((p.r - p.r.adjoint()).cwiseAbs().maxCoeff() > tol * rnorm) {
        v.ok = false;
        v.failures.push_back("R is not Hermitian");
    } else if (lambda_min(p.r) < -tol * rnorm) {
        v.ok = false;
        v.failures.push_back("R is not positive semidefinite");
    }
    const ComplexMatrix qe = p.q.adjoint() * p.e;
    const double qnorm = std::max(spectral_norm(qe), 1.0);
    if ((qe - qe.adjoint()).cwiseAbs().maxCoeff() > tol * qnorm) {
        v.ok = false;
        v.failures.push_back("Q^*E is not Hermitian");
    } else if (lambda_min(qe) < -tol * qnorm) {
        v.ok = false;
        v.failures.push_back("Q^*E is not positive semidefinite");
    }
    return v;
}

Complex ExtendedComplex::value() const {
    if (infinite_) throw PreconditionError("ExtendedComplex: value of the point at infinity");
    return value_;
}

bool is_regular_probe(const Pencil& p, std::uint64_t seed) {
    if (!p.square()) return false;
    const Eigen::Index n = p.rows();
    if (n == 0) return true;
    const Pencil m = p.to_minus();
    const double ne = spectral_norm(m.lead());
    const double na = spectral_norm(m.constant());
    const double scale = (ne > 0.0 && na > 0.0) ? na / ne : 1.0;
    Rng rng = make_stream(seed, 0);
    int deficient = 0;
    for (int k = 0; k < 3; ++k) {
        const double r = std::sqrt(uniform(rng, 0.0, 1.0));
        const double theta = uniform(rng, 0.0, 2.0 * M_PI);
        const Complex z = std::polar(r * scale, theta);
        const ComplexMatrix mz = z * m.lead() - m.constant();
        const double tol = 64.0 * static_cast<double>(n) * kEps * (std::abs(z) * ne + na);
        if (sigma_min(mz) <= tol) ++deficient;
    }
    return deficient < 3;
}

namespace {

// Number of infinite eigenvalues of a regular lambda E - A from the rank staircase
// at infinity; nullopt when a rank call there is ambiguous.
std::optional<std::size_t> infinite_eigenvalue_count(const ComplexMatrix& e, const ComplexMatrix& a) {
    const double n = static_cast<double>(e.rows());
    const RankPolicy policy;
    try {
        const StaircaseCounts s = staircase_at_infinity(e, a, n * spectral_norm(e) * kEps * policy.safety,
                                                        n * spectral_norm(a) * kEps * policy.safety,
                                                        policy.gap_threshold);
        std::size_t count = 0;
        for (int sigma : s.infinite_sizes) count += static_cast<std::size_t>(sigma);
        return count;
    } catch (const NumericalAmbiguity&) {
        return std::nullopt;
    }
}

}  // namespace

// QZ resolves an infinite eigenvalue in a Jordan block of size s only to beta ~ eps^(1/s),
// so the count comes from the staircase and the pairs nearest infinity (chordally) get it.
std::vector<ExtendedComplex> generalized_eigenvalues(const Pencil& p, std::uint64_t seed) {
    if (!p.square()) throw DimensionError("generalized_eigenvalues: pencil is not square");
    if (!is_regular_probe(p, seed)) {
        throw SingularPencilError("generalized_eigenvalues: pencil is singular (rank deficient at 3 random shifts)");
    }
    const Pencil m = p.to_minus();
    const std::vector<QzPair> qz = qz_pairs(m.lead(), m.constant());
    std::vector<bool> infinite(qz.size(), false);
    if (const auto count = infinite_eigenvalue_count(m.lead(), m.constant()); count && *count <= qz.size()) {
        std::vector<std::size_t> order(qz.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto chordal = [&qz](std::size_t k) {
            const double h = std::hypot(std::abs(qz[k].alpha), std::abs(qz[k].beta));
            return h == 0.0 ? 0.0 : std::abs(qz[k].beta) / h;
        };
        std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return chordal(i) < chordal(j); });
        for (std::size_t k = 0; k < *count; ++k) infinite[order[k]] = true;
    } else {
        const double beta_tol = 16.0 * static_cast<double>(m.rows()) * kEps * m.lead().norm();
        for (std::size_t k = 0; k < qz.size(); ++k) infinite[k] = std::abs(qz[k].beta) <= beta_tol;
    }
    std::vector<ExtendedComplex> out;
    out.reserve(qz.size());
    for (std::size_t k = 0; k < qz.size(); ++k) {
        out.push_back(infinite[k] ? ExtendedComplex::infinity() : ExtendedComplex::finite(qz[k].alpha / qz[k].beta));
    }
    return out;
}

std::vector<QzPair> qz_pairs(const ComplexMatrix& e, const ComplexMatrix& a) {
    if (e.rows() != e.cols() || a.rows() != e.rows() || a.cols() != e.cols()) {
        throw DimensionError("qz_pairs: coefficients must be square and of equal size");
    }
    const lapack_int n = static_cast<lapack_int>(e.rows());
    std::vector<QzPair> out;
    if (n == 0) return out;

    // zggev solves A x = lambda B x, i.e. det(lambda E - A) = 0 with B = E.
    ComplexMatrix aa = a;
    ComplexMatrix bb = e;
    std::vector<Complex> alpha(n), beta(n);
    Complex dummy;
    const lapack_int info = LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', 'N', n, aa.data(), n, bb.data(), n, alpha.data(),
                                          beta.data(), &dummy, 1, &dummy, 1);
    if (info != 0) throw Error("qz_pairs: QZ failed to converge");
    out.reserve(n);
    for (lapack_int i = 0; i < n; ++i) out.push_back(QzPair{alpha[i], beta[i]});
    return out;
}

std::vector<Complex> finite_eigenvalues(const Pencil& p, std::uint64_t seed) {
    std::vector<Complex> out;
    for (const auto& ev : generalized_eigenvalues(p, seed)) {
        if (ev.is_finite()) out.push_back(ev.value());
    }
    return out;
}

}  // namespace pencil_lab
