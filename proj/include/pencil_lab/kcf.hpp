#pragma once

// Kronecker structure of a (possibly rectangular, possibly singular) pencil
// lambda E - A by a rank-revealing staircase.

#include <cstddef>
#include <optional>
#include <vector>

#include "pencil_lab/core.hpp"

namespace pencil_lab {

struct RankPolicy {
    double safety = 16.0;          // kappa in max(rows, cols) * ||M|| * eps * kappa
    double gap_threshold = 1e3;    // sigma_r / sigma_{r+1} below this is ambiguous
    std::optional<double> absolute_tolerance;  // overrides the relative rule
    std::size_t size_cap = 512;
};

struct RankDecision {
    std::vector<double> singular_values;  // nonincreasing
    std::size_t rank = 0;
    double gap_ratio = 0.0;  // +inf when there is no interior gap to judge
    double tolerance_used = 0.0;

    bool ambiguous(double threshold) const { return gap_ratio < threshold; }
};

/// Rank of m with absolute tolerance tol. Does not throw on ambiguity; callers decide.
RankDecision decide_rank(const ComplexMatrix& m, double tol);

struct FiniteEigenstructure {
    Complex value;
    std::vector<int> partial_multiplicities;  // ascending
};

struct KroneckerStructure {
    std::vector<int> right_minimal_indices;  // ascending
    std::vector<int> left_minimal_indices;   // ascending
    std::vector<FiniteEigenstructure> finite_eigenstructure;  // sorted by (re, im)
    std::vector<int> infinite_block_sizes;   // ascending
    int index = 0;
    bool regular = true;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;

    // Tolerances actually used; reports surface these.
    double lead_tolerance = 0.0;
    double constant_tolerance = 0.0;
    double cluster_radius = 0.0;

    /// Sum of all finite partial multiplicities.
    int finite_degree() const;
};

/// Full structure of p (any convention; minus form is used internally).
/// Throws NumericalAmbiguity when a rank call falls inside the gap threshold or
/// the computed counts are inconsistent at every clustering radius.
KroneckerStructure kronecker_structure(const Pencil& p, const RankPolicy& policy = {});

int structural_index(const Pencil& p, const RankPolicy& policy = {});

struct MinimalIndices {
    std::vector<int> right;
    std::vector<int> left;
};

MinimalIndices minimal_index_lists(const Pencil& p, const RankPolicy& policy = {});

/// Integer data equal and eigenvalues matched within eig_tol * (1 + |lambda|).
bool same_structure(const KroneckerStructure& a, const KroneckerStructure& b, double eig_tol = 1e-6);

/// Counts from one staircase sweep on (E, A).
struct StaircaseCounts {
    std::vector<int> right_indices;
    std::vector<int> infinite_sizes;
    ComplexMatrix e_rest;  // E restricted to the remaining (full column rank E) part
    ComplexMatrix a_rest;
    double tol_e = 0.0;    // tolerances grown by the deflation steps, valid for e_rest / a_rest
    double tol_a = 0.0;
};

/// One staircase sweep on lambda E - A. Rank calls on E use tol_e, on A tol_a.
StaircaseCounts staircase_at_infinity(ComplexMatrix e, ComplexMatrix a, double tol_e, double tol_a,
                                      double gap_threshold);

}  // namespace pencil_lab
