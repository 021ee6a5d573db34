#pragma once

// Small dense linear-algebra helpers shared by all modules. Everything here is a
// thin layer over Eigen; nothing in this header knows about pencils.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace pencil_lab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kEps = 2.220446049250313e-16;

bool all_finite(const ComplexMatrix& m);

/// (m + m^*)/2 with exact Hermitian symmetry.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// (m - m^*)/2 with exact skew-Hermitian symmetry.
ComplexMatrix skew_part(const ComplexMatrix& m);

/// Eigenvalues of the Hermitian part of h, ascending.
RealVector hermitian_eigenvalues(const ComplexMatrix& h);
double lambda_min(const ComplexMatrix& h);
double lambda_max(const ComplexMatrix& h);

/// Positive definiteness by Cholesky of the Hermitian part.
bool is_positive_definite(const ComplexMatrix& h);

double spectral_norm(const ComplexMatrix& m);
RealVector singular_values(const ComplexMatrix& m);
double sigma_min(const ComplexMatrix& m);

/// Number of singular values above tol.
std::size_t numerical_rank(const ComplexMatrix& m, double tol);

/// Default absolute rank tolerance max(rows, cols) * sigma_max * eps * safety.
double default_rank_tolerance(const ComplexMatrix& m, double safety = 16.0);

/// Orthonormal basis of the numerical null space (columns).
ComplexMatrix null_space(const ComplexMatrix& m, double tol);

/// Vertical concatenation.
ComplexMatrix vstack(const std::vector<ComplexMatrix>& blocks);

/// Block-diagonal concatenation (blocks may be rectangular or empty).
ComplexMatrix block_diag(const std::vector<ComplexMatrix>& blocks);

/// Kronecker product.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Roots of sum_k c[k] z^k (ascending coefficients). Leading coefficients whose
/// magnitude is below rel_tol * max|c| are dropped; trailing zeros give roots at 0.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& ascending, double rel_tol = 0.0);

/// Quadratic form x^* m x.
Complex quadratic_form(const ComplexMatrix& m, const ComplexVector& x);

}  // namespace pencil_lab
