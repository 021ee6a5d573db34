#pragma once

// Left-half-plane certificates for posH pencils built on the quartic condition
//   -(x^* R1 x)(x^* R2 x) + (x^* J1 x)(x^* J2 x) <= 0   for all x,
// which we call EE-JJx below.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pencil_lab/core.hpp"
#include "pencil_lab/numrange.hpp"

namespace pencil_lab {

/// Left-hand side of EE-JJx at x (a real number).
double eejjx_value(const PoshPencil& pp, const ComplexVector& x);

/// Default tolerance: 1e-10 * scale^2 for unit x.
double eejjx_tolerance(const PoshPencil& pp);

bool eejjx_by_norms(const PoshPencil& pp);

inline constexpr Eigen::Index kKroneckerCap = 64;

/// lambda_max(J1 (x) J2 - R1 (x) R2) <= tol. Refuses n > kKroneckerCap.
bool eejjx_by_kronecker(const PoshPencil& pp, std::optional<double> tol = std::nullopt);

/// Finite eigenvalues of lambda J1 + J2 real, nonpositive and semisimple, infinity
/// semisimple, minimal indices zero.
bool eejjx_by_spectral(const PoshPencil& pp);

struct EejjxWitness {
    ComplexVector x;  // unit vector
    double value = 0.0;
};

/// Random draws (80% of budget) then coordinate-pair ascent (20%). Returns a
/// unit x with eejjx_value > eejjx_tolerance, or nullopt (inconclusive).
std::optional<EejjxWitness> eejjx_falsify(const PoshPencil& pp, std::size_t budget, std::uint64_t seed);

struct RealEejjxWitness {
    RealVector xi, eta;
    double value = 0.0;  // -4 (xi'J1 eta)(xi'J2 eta) - (xi'R1 xi + eta'R1 eta)(xi'R2 xi + eta'R2 eta)
};

/// Real-pair form of EE-JJx for real coefficients; refuses complex input.
std::optional<RealEejjxWitness> eejjx_real_form(const PoshPencil& pp, std::size_t budget, std::uint64_t seed);

double eejjx_real_value(const PoshPencil& pp, const RealVector& xi, const RealVector& eta);

enum class EejjxStatus {
    proved_by_norms,
    proved_by_kronecker,
    proved_by_spectral,
    proved_by_polynomial_structure,  // supplied by the caller (cubic coefficient test)
    falsified,
    unknown
};
enum class HypothesisRoute { no_isotropic, skew_numrange_lhp, skew_structure, none };
enum class Conclusion { numrange_in_lhp, eigenvalues_in_lhp, none };

const char* to_string(EejjxStatus s);
const char* to_string(HypothesisRoute r);
const char* to_string(Conclusion c);

inline bool is_proved(EejjxStatus s) {
    return s != EejjxStatus::falsified && s != EejjxStatus::unknown;
}

struct LhpCertificate {
    EejjxStatus eejjx_status = EejjxStatus::unknown;
    std::optional<EejjxWitness> witness;
    HypothesisRoute hypothesis_route = HypothesisRoute::none;
    Conclusion conclusion = Conclusion::none;
    Evidence evidence = Evidence::heuristic;  // of the route
    std::vector<std::string> notes;
};

struct LhpOptions {
    std::size_t falsify_budget = 10000;
    std::size_t sample_budget = 10000;
    std::uint64_t seed = kDefaultProbeSeed;
    bool eejjx_proved_externally = false;
};

LhpCertificate lhp_certificate(const PoshPencil& pp, const LhpOptions& opts = {});

/// Points with |z| > tol and |arg z| < pi/d - tol_angle.
std::vector<Complex> sector_membership(const std::vector<Complex>& points, int d, double tol = 1e-8,
                                       double tol_angle = 1e-8);

struct RegularityReport {
    bool p_regular = false;
    bool r1r2_regular = false;  // lambda R1 + R2
    bool j1j2_regular = false;  // lambda J1 + J2
    bool r1j2_regular = false;  // lambda R1 + J2
    bool r2j1_regular = false;  // lambda R2 + J1
    Eigen::Index triple_kernel_j1 = 0;  // dim ker J1 cap ker R1 cap ker R2
    Eigen::Index triple_kernel_j2 = 0;
    std::vector<Complex> positive_real_eigenvalues;  // of P, when regular
    std::vector<std::string> conclusions;
    bool consistent = true;  // every implication checked against computed data
};

RegularityReport regularity_conditions_report(const PoshPencil& pp, std::uint64_t seed = kDefaultProbeSeed);

}  // namespace pencil_lab
