#pragma once

// Matrix polynomials sum_j lambda^j A_j with PSD Hermitian coefficients, their
// posH linearizations, index bounds and cubic stability certificates.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pencil_lab/core.hpp"
#include "pencil_lab/numrange.hpp"

namespace pencil_lab {

class MatrixPolynomial {
public:
    /// Coefficients A_0..A_d, all square of one size, d >= 1.
    explicit MatrixPolynomial(std::vector<ComplexMatrix> coefficients);

    /// Symmetrizes each coefficient and requires lambda_min >= -tol (default
    /// per coefficient: default_psd_tolerance). Throws PoshRejection("A<j>").
    static MatrixPolynomial psd_validated(std::vector<ComplexMatrix> coefficients,
                                          std::optional<double> tol = std::nullopt);

    int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
    Eigen::Index size() const noexcept { return coefficients_.front().rows(); }
    const std::vector<ComplexMatrix>& coefficients() const noexcept { return coefficients_; }
    const ComplexMatrix& operator[](int j) const { return coefficients_.at(static_cast<std::size_t>(j)); }
    bool is_psd_validated() const noexcept { return psd_validated_; }

    ComplexMatrix at(Complex z) const;

private:
    std::vector<ComplexMatrix> coefficients_;
    bool psd_validated_ = false;
};

/// Block-tridiagonal posH linearization for odd d. Refuses even d.
PoshPencil linearize_odd(const MatrixPolynomial& p);

/// posH linearization for even d with A_0^{-1} in the top-left block. Refuses
/// odd d and A_0 not positive definite.
PoshPencil linearize_even(const MatrixPolynomial& p);

/// 3n x 3n posH linearization containing only the coefficients. Needs d = 3, A_0, A_3 > 0.
PoshPencil linearize_cubic(const MatrixPolynomial& p);

/// linearize_odd or linearize_even by parity.
PoshPencil linearize(const MatrixPolynomial& p);

struct PolynomialIndex {
    int computed = 0;
    int bound = 0;
};

PolynomialIndex polynomial_index(const MatrixPolynomial& p);

/// Eigenvalues of P through the posH linearization (infinite ones tagged).
std::vector<ExtendedComplex> polynomial_eigenvalues(const MatrixPolynomial& p, std::uint64_t seed = kDefaultProbeSeed);

enum class CubicConclusion { lhp_certified, region_excluded_only, inconclusive };
const char* to_string(CubicConclusion c);

struct CubicStabilityReport {
    Threshold beta_star;        // defined only when hypotheses hold
    bool pos2_holds = false;    // A_2 >= A_3 and A_1 >= A_0
    bool hypotheses_hold = false;
    CubicConclusion conclusion = CubicConclusion::inconclusive;
    std::optional<PacmanRegion> excluded_plus, excluded_minus;
    std::vector<std::string> notes;
};

CubicStabilityReport cubic_stability(const MatrixPolynomial& p);

struct MgtVerdict {
    CubicConclusion conclusion = CubicConclusion::inconclusive;
    MatrixPolynomial polynomial;
    std::string reason;
};

/// lambda^3 I + a lambda^2 I + b lambda T + c T; certified iff a > 1 and b > c.
MgtVerdict mgt_stability(double a, double b, double c, const ComplexMatrix& t);

/// The bracketed quartic of the cubic proof at x = (x1, x2, x3); <= 0 under pos2.
double cubic_quartic_value(const MatrixPolynomial& p, const ComplexVector& x1, const ComplexVector& x2,
                           const ComplexVector& x3);

/// Roots of the scalar polynomial x^* P(lambda) x for unit x (degree-d Rayleigh roots).
std::vector<Complex> rayleigh_roots(const MatrixPolynomial& p, const ComplexVector& x);

/// Random-point probe: regular iff sigma_min(P(z)) is clearly nonzero at one of three points.
bool is_regular_polynomial(const MatrixPolynomial& p, std::uint64_t seed = kDefaultProbeSeed);

}  // namespace pencil_lab
