#pragma once

// Numerical range W(P) = { mu : x^* P(mu) x = 0 for some x != 0 } of a pencil in
// plus convention, definiteness thresholds, and the excluded "pacman" regions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pencil_lab/core.hpp"

namespace pencil_lab {

enum class Evidence { exact, sampled, heuristic };
const char* to_string(Evidence e);

/// A supremum that may be finite, +inf, or not defined at all.
struct Threshold {
    enum class Kind { finite, infinite, undefined };
    Kind kind = Kind::undefined;
    double value = 0.0;

    static Threshold finite(double v) { return Threshold{Kind::finite, v}; }
    static Threshold infinite() { return Threshold{Kind::infinite, 0.0}; }
    static Threshold undefined() { return Threshold{}; }

    bool defined() const noexcept { return kind != Kind::undefined; }
    bool is_infinite() const noexcept { return kind == Kind::infinite; }
    /// +inf for infinite; throws PreconditionError when undefined.
    double as_double() const;
};

/// sup { beta >= 0 : h0 + beta * h1 > 0 } for Hermitian h0, h1 by Cholesky bisection.
/// Undefined when h0 is not positive definite. Bracket width <= bisect_tol on return;
/// the returned value is the definite end of the bracket.
Threshold definite_sup(const ComplexMatrix& h0, const ComplexMatrix& h1, double bisect_tol = 1e-10);

struct BetaThresholds {
    Threshold beta_plus;
    Threshold beta_minus;
    std::optional<double> lower_bound;  // sigma_min(t R1 + R2) / ||J1||
    std::optional<double> strip_bound;  // sigma_min(R2) / ||J1||, scaled variant only
    double t = 1.0;
};

BetaThresholds beta_thresholds(const PoshPencil& pp, double bisect_tol = 1e-10);
BetaThresholds beta_thresholds_scaled(const PoshPencil& pp, double t, double bisect_tol = 1e-10);

enum class Sign { plus, minus };
const char* to_string(Sign s);

/// {Re z > 0, 0 <= +-Im z < beta, 0 <= +-arg z < arctan(beta / scale)}; beta may be +inf.
struct PacmanRegion {
    double beta = 0.0;
    Sign sign = Sign::plus;
    double scale = 1.0;  // t of the scaled thresholds
};

bool pacman_excludes(const PacmanRegion& region, Complex z);

/// Membership in the region shrunk by a relative margin (used when testing
/// sampled points against the boundary).
bool pacman_excludes_shrunk(const PacmanRegion& region, Complex z, double margin);

/// Regions implied by the thresholds (finite or infinite ones only).
std::vector<PacmanRegion> pacman_regions(const BetaThresholds& b);

inline constexpr double kDiscardCutoff = 1e-12;
inline constexpr double kResidualBound = 1e-10;

/// mu = -(x^* C x) / (x^* L x) for the plus-convention pencil lambda L + C.
/// nullopt when |x^* L x| <= kDiscardCutoff * ||L|| * ||x||^2.
std::optional<Complex> rayleigh_point(const Pencil& p, const ComplexVector& x);

struct NumRangeSample {
    std::vector<Complex> points;
    std::size_t discarded = 0;
    std::uint64_t seed = 0;
    std::size_t sample_count = 0;
};

inline constexpr std::size_t kSampleChunk = 4096;

/// n_samples uniform unit vectors; draw i uses stream (seed, i / kSampleChunk).
NumRangeSample sample_numerical_range(const Pencil& p, std::size_t n_samples, std::uint64_t seed);

/// Orthonormal basis of the intersection of kernels (columns; possibly zero columns).
ComplexMatrix common_kernel(const std::vector<ComplexMatrix>& matrices, std::optional<double> tol = std::nullopt);

struct DefiniteCombination {
    double alpha = 0.0, beta = 0.0, gamma = 0.0;  // unit vector
    double lambda_min = 0.0;                       // of alpha h1 + beta h2 + gamma h3, > 0
};

/// Grid search on the unit sphere followed by local ascent of lambda_min. A
/// returned combination is a certificate; nullopt proves nothing.
std::optional<DefiniteCombination> find_definite_combination(const ComplexMatrix& h1, const ComplexMatrix& h2,
                                                             const ComplexMatrix& h3, int grid = 26);

struct ChainEntry {
    std::optional<bool> holds;  // nullopt: inconclusive
    Evidence evidence = Evidence::heuristic;
    std::string detail;
};

/// (a) ker R1 and ker R2 intersect trivially, (b) W misses (0, inf), (c) W != C,
/// (d) no common isotropic vector, (e) regular.
struct NocommonReport {
    ChainEntry a, b, c, d, e;
    bool real_input = false;
    std::vector<std::string> warnings;
};

NocommonReport nocommon_chain_report(const PoshPencil& pp, std::size_t sample_budget = 10000,
                                     std::uint64_t seed = kDefaultProbeSeed);

}  // namespace pencil_lab
