#pragma once

// Equivalence of a Kronecker structure to dissipative Hamiltonian pencils
// lambda E - (J - R) Q, and explicit block-wise realizations.

#include <optional>
#include <string>
#include <vector>

#include "pencil_lab/core.hpp"
#include "pencil_lab/kcf.hpp"

namespace pencil_lab {

enum class DhVariant { general_q, q_identity };
enum class DhCondition { spectrum_lhp, imaginary_semisimple, zero_multiplicity, index_bound, minimal_indices };

const char* to_string(DhVariant v);
const char* to_string(DhCondition c);

struct DhVerdict {
    DhVariant variant = DhVariant::general_q;
    bool holds = true;
    std::vector<DhCondition> violated_conditions;
    std::optional<std::string> witness;  // first offending eigenvalue or index datum
};

/// Eigenvalues with |Re| <= tol * (1 + |lambda|) count as lying on the imaginary axis.
inline constexpr double kAxisTolerance = 1e-8;

DhVerdict check_dh_equivalence(const KroneckerStructure& ks, DhVariant variant);

/// Eigenvalues closed under conjugation with matching partial multiplicities.
bool is_self_conjugate(const KroneckerStructure& ks, double tol = 1e-8);

/// Block-diagonal realization: LHP Jordan blocks, imaginary-axis blocks,
/// infinite blocks, singular pairs. Real when the structure is self-conjugate.
/// Throws PreconditionError naming the violated conditions.
DhPencil realize_dh(const KroneckerStructure& ks, DhVariant variant);

/// M = upper bidiagonal with lambda0 on the diagonal and Re(lambda0) above; returns
/// (J, R) = ((M - M^*)/2, -(M + M^*)/2).
std::pair<ComplexMatrix, ComplexMatrix> jordan_dh_block(Complex lambda0, int size);

/// Real 2 size x 2 size analogue with Lambda = [[alpha, beta], [-beta, alpha]].
std::pair<ComplexMatrix, ComplexMatrix> real_jordan_dh_block(double alpha, double beta, int size);

}  // namespace pencil_lab
