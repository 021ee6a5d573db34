#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pencil_lab/errors.hpp"
#include "pencil_lab/linalg.hpp"

namespace pencil_lab {

/// Sign convention of a pencil.
///   plus:  P(lambda) = lambda * lead + constant      (posH theory)
///   minus: L(lambda) = lambda * E - A                (Kronecker machinery)
enum class Convention { plus, minus };

const char* to_string(Convention c);

/// A matrix pencil with an explicit sign convention. Immutable.
///
/// `to_plus()` / `to_minus()` are the only places in the library where signs of
/// the constant coefficient are flipped; every other routine converts through them.
class Pencil {
public:
    Pencil(ComplexMatrix lead, ComplexMatrix constant, Convention convention);

    static Pencil plus(ComplexMatrix lead, ComplexMatrix constant) {
        return Pencil(std::move(lead), std::move(constant), Convention::plus);
    }
    static Pencil minus(ComplexMatrix e, ComplexMatrix a) {
        return Pencil(std::move(e), std::move(a), Convention::minus);
    }

    const ComplexMatrix& lead() const noexcept { return lead_; }
    const ComplexMatrix& constant() const noexcept { return constant_; }
    Convention convention() const noexcept { return convention_; }

    Eigen::Index rows() const noexcept { return lead_.rows(); }
    Eigen::Index cols() const noexcept { return lead_.cols(); }
    bool square() const noexcept { return rows() == cols(); }

    Pencil to_plus() const;
    Pencil to_minus() const;
    Pencil with_convention(Convention c) const { return c == Convention::plus ? to_plus() : to_minus(); }

    /// Evaluate the pencil at a finite point.
    ComplexMatrix at(Complex z) const;

    /// Coefficient-wise conjugate transpose (same convention).
    Pencil adjoint() const;

private:
    ComplexMatrix lead_;
    ComplexMatrix constant_;
    Convention convention_;
};

/// rev L(lambda) = lambda A - E for L = lambda E - A; the result keeps the input's convention.
Pencil reversal(const Pencil& p);

struct HermitianSplit {
    ComplexMatrix skew;  // J = (m - m^*)/2
    ComplexMatrix herm;  // R = (m + m^*)/2
};

HermitianSplit hermitian_split(const ComplexMatrix& m);

/// 64 * eps * max |eigenvalue(herm)|
double default_psd_tolerance(const ComplexMatrix& herm);

/// lambda (J1 + R1) + (J2 + R2) with skew-Hermitian J_i and PSD Hermitian R_i.
class PoshPencil {
public:
    /// Validates exact skewness/Hermitian symmetry and PSD-ness of r1, r2 within
    /// `psd_tolerance` (default per coefficient: default_psd_tolerance).
    PoshPencil(ComplexMatrix j1, ComplexMatrix r1, ComplexMatrix j2, ComplexMatrix r2,
               std::optional<double> psd_tolerance = std::nullopt);

    const ComplexMatrix& j1() const noexcept { return j1_; }
    const ComplexMatrix& r1() const noexcept { return r1_; }
    const ComplexMatrix& j2() const noexcept { return j2_; }
    const ComplexMatrix& r2() const noexcept { return r2_; }
    double psd_tolerance() const noexcept { return psd_tolerance_; }
    Eigen::Index size() const noexcept { return j1_.rows(); }

    /// True when all four coefficients have zero imaginary parts.
    bool is_real() const;

    /// max of the spectral norms of the four matrices (1 if all vanish).
    double scale() const;

    /// The plus-convention pencil lambda (J1 + R1) + (J2 + R2).
    Pencil pencil() const;

private:
    ComplexMatrix j1_, r1_, j2_, r2_;
    double psd_tolerance_;
};

/// Split both coefficients and accept if both Hermitian parts are PSD within tol.
/// Throws PoshRejection naming the offending coefficient ("r1" or "r2").
PoshPencil validate_posh(const Pencil& p, std::optional<double> tol = std::nullopt);

/// lambda E - (J - R) Q
struct DhPencil {
    ComplexMatrix e, j, r, q;

    Pencil pencil() const;  // minus convention
};

struct DhValidation {
    bool ok = true;
    std::vector<std::string> failures;
};

/// Check J skew (exact), R Hermitian PSD within tol*||R||, Q^*E Hermitian and PSD within tol*||Q^*E||.
DhValidation validate_dh(const DhPencil& p, double tol = 1e-10);

/// Complex number or the point at infinity.
class ExtendedComplex {
public:
    static ExtendedComplex finite(Complex z) { return ExtendedComplex(z, false); }
    static ExtendedComplex infinity() { return ExtendedComplex(Complex(0.0), true); }

    bool is_infinite() const noexcept { return infinite_; }
    bool is_finite() const noexcept { return !infinite_; }
    /// Throws PreconditionError when infinite.
    Complex value() const;

private:
    ExtendedComplex(Complex z, bool inf) : value_(z), infinite_(inf) {}
    Complex value_;
    bool infinite_;
};

inline constexpr std::uint64_t kDefaultProbeSeed = 0x5eed0f9e9c11ULL;

/// Random-shift determinant probe: rank of z*E - A at three random shifts drawn
/// from the unit disk scaled by ||A|| / ||E||. Singular iff all three are deficient.
bool is_regular_probe(const Pencil& p, std::uint64_t seed = kDefaultProbeSeed);

/// All n generalized eigenvalues via QZ, infinite ones tagged. Throws
/// SingularPencilError when the probe declares the pencil singular.
std::vector<ExtendedComplex> generalized_eigenvalues(const Pencil& p, std::uint64_t seed = kDefaultProbeSeed);

struct QzPair {
    Complex alpha;
    Complex beta;
};

/// Raw QZ output for lambda E - A (eigenvalue alpha/beta). No regularity probe.
std::vector<QzPair> qz_pairs(const ComplexMatrix& e, const ComplexMatrix& a);

/// Finite generalized eigenvalues only.
std::vector<Complex> finite_eigenvalues(const Pencil& p, std::uint64_t seed = kDefaultProbeSeed);

}  // namespace pencil_lab
