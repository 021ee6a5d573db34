#pragma once

// Seeded random streams. Every stochastic routine derives its generators from an
// explicit seed plus a stream index, so results do not depend on how work is split
// across threads.

#include <cstdint>
#include <random>

#include "pencil_lab/linalg.hpp"

namespace pencil_lab {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

/// Generator for stream `index` of the family identified by `seed`.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix_seed(seed ^ mix_seed(index + 0x632be59bd9b4e019ULL)));
}

double uniform(Rng& rng, double lo, double hi);
double standard_normal(Rng& rng);

/// Vector with i.i.d. standard complex Gaussian entries.
ComplexVector complex_gaussian_vector(Rng& rng, Eigen::Index n);

/// Uniform draw from the unit sphere of C^n (rotation invariant).
ComplexVector random_unit_vector(Rng& rng, Eigen::Index n);

ComplexMatrix complex_gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
RealMatrix real_gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// Haar-like unitary from the QR factorization of a Gaussian matrix.
ComplexMatrix random_unitary(Rng& rng, Eigen::Index n);

/// U diag(s) V^* with log-uniform singular values in [1, cond_cap].
ComplexMatrix random_conditioned(Rng& rng, Eigen::Index n, double cond_cap);

/// Random Hermitian PSD matrix of given rank (rank == n gives positive definite).
ComplexMatrix random_psd(Rng& rng, Eigen::Index n, Eigen::Index rank, bool real = false);

/// Random skew-Hermitian matrix.
ComplexMatrix random_skew(Rng& rng, Eigen::Index n, bool real = false);

}  // namespace pencil_lab
