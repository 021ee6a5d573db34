#pragma once

// Independent references and instance generators: Routh-Hurwitz, scalarized
// determinant roots, canonical-block assembly, named examples, random families.

#include <cstdint>
#include <string>
#include <vector>

#include "pencil_lab/core.hpp"
#include "pencil_lab/dh.hpp"
#include "pencil_lab/kcf.hpp"
#include "pencil_lab/matpoly.hpp"
#include "pencil_lab/random.hpp"

namespace pencil_lab {

struct BlockSpec {
    enum class Kind { right_singular, left_singular, finite_jordan, infinite };
    Kind kind = Kind::finite_jordan;
    int size = 1;              // epsilon, eta, rho or sigma
    Complex value = 0.0;       // finite_jordan only

    static BlockSpec right(int eps) { return {Kind::right_singular, eps, 0.0}; }
    static BlockSpec left(int eta) { return {Kind::left_singular, eta, 0.0}; }
    static BlockSpec jordan(Complex lambda0, int rho) { return {Kind::finite_jordan, rho, lambda0}; }
    static BlockSpec infinite(int sigma) { return {Kind::infinite, sigma, 0.0}; }

    Eigen::Index rows() const;
    Eigen::Index cols() const;
};

/// Canonical (E, A) of one block in minus convention lambda E - A.
std::pair<ComplexMatrix, ComplexMatrix> canonical_block(const BlockSpec& b);

/// Ground truth of a block list (eigenvalues grouped by exact equality).
KroneckerStructure structure_of_blocks(const std::vector<BlockSpec>& blocks);

struct AssembledPencil {
    Pencil pencil;
    KroneckerStructure truth;
};

inline constexpr Eigen::Index kAssembleSizeCap = 64;

/// S * blockdiag * T with random S, T of condition <= cap (identity when cap <= 1).
AssembledPencil assemble_pencil(const std::vector<BlockSpec>& blocks, double transform_condition_cap,
                                std::uint64_t seed);

enum class RhVerdict { strict_lhp, closed_lhp_marginal, unstable };
const char* to_string(RhVerdict v);

/// Routh-Hurwitz table on descending real coefficients.
RhVerdict routh_hurwitz(const std::vector<double>& descending);

inline constexpr Eigen::Index kScalarizeCap = 64;

/// Roots of det P(lambda) by evaluation at n*d + 1 points on a scaled circle,
/// inverse DFT, and companion roots. Refuses det identically zero.
std::vector<Complex> scalarized_roots(const MatrixPolynomial& p);

// Printed examples.
PoshPencil ex_unstable();
PoshPencil ex_jja(double alpha, double beta);
PoshPencil ex_jjb(double alpha, double beta);
PoshPencil conjecture(double t);
PoshPencil mgt_pencil(double a, double b, double c, const ComplexMatrix& t);
/// lambda blkdiag(M, K - N) + [[D + G, K + N], [-K + N, 0]].
PoshPencil brake(const ComplexMatrix& m, const ComplexMatrix& d, const ComplexMatrix& g, const ComplexMatrix& k,
                 const ComplexMatrix& n);
/// Index-3 and index-4 examples over singular / regular skew pairs.
PoshPencil chain3();
PoshPencil chain4();

/// Dispatch by name with scalar parameters: ex_unstable, ex_jja(alpha, beta),
/// ex_jjb(alpha, beta), conjecture(t), mgt(a, b, c[, n]) with T = I_n.
PoshPencil paper_example(const std::string& name, const std::vector<double>& params = {});

// Random families.
struct PoshOptions {
    bool real = false;
    Eigen::Index r1_rank = -1;  // -1: full rank
    Eigen::Index r2_rank = -1;
};

PoshPencil random_posh(Rng& rng, Eigen::Index n, const PoshOptions& opts = {});

/// Unitary congruence U^* X U applied to all four coefficients.
PoshPencil congruence(const PoshPencil& pp, const ComplexMatrix& u);

PoshPencil direct_sum(const std::vector<PoshPencil>& parts);

struct SingularPoshInstance {
    PoshPencil pencil;
    std::vector<int> minimal_indices;  // right and left lists are both this
};

/// Regular posH part plus skew blocks [[0, L_eps], [-L_eps^*, 0]] and common
/// kernel vectors, hidden by a random unitary congruence.
SingularPoshInstance random_singular_posh(Rng& rng, Eigen::Index max_size = 10);

struct SkewChainInstance {
    PoshPencil pencil;
    int kappa = 0;  // index of lambda J1 + J2
    int max_right_minimal = -1;
};

/// posH pencil over a skew pair of known index kappa and right minimal indices <= kappa - 1.
SkewChainInstance random_skew_chain_posh(Rng& rng, int kappa, Eigen::Index max_size = 10);

/// posH pencil with a semisimple eigenvalue lambda0 > 0 on a common kernel of R1, R2.
PoshPencil random_posh_with_positive_eigenvalue(Rng& rng, Eigen::Index n, double lambda0, bool real);

struct PolynomialOptions {
    bool real = false;
    bool a0_definite = false;
    bool allow_rank_deficient = true;
};

MatrixPolynomial random_psd_polynomial(Rng& rng, Eigen::Index n, int d, const PolynomialOptions& opts = {});

/// Random block list of total size <= max_size for the canonical-form oracle.
std::vector<BlockSpec> random_block_specs(Rng& rng, Eigen::Index max_size);

/// Random structure satisfying check_dh_equivalence for the variant.
KroneckerStructure random_admissible_structure(Rng& rng, DhVariant variant, Eigen::Index max_size = 8,
                                               bool self_conjugate = false);

}  // namespace pencil_lab
