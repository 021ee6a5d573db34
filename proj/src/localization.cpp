#include "pencil_lab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pencil_lab/kcf.hpp"
#include "pencil_lab/random.hpp"

namespace pencil_lab {

const char* to_string(EejjxStatus s) {
    switch (s) {
        case EejjxStatus::proved_by_norms: return "proved_by_norms";
        case EejjxStatus::proved_by_kronecker: return "proved_by_kronecker";
        case EejjxStatus::proved_by_spectral: return "proved_by_spectral";
        case EejjxStatus::proved_by_polynomial_structure: return "proved_by_polynomial_structure";
        case EejjxStatus::falsified: return "falsified";
        case EejjxStatus::unknown: return "unknown";
    }
    return "unknown";
}

const char* to_string(HypothesisRoute r) {
    switch (r) {
        case HypothesisRoute::no_isotropic: return "no_isotropic";
        case HypothesisRoute::skew_numrange_lhp: return "skew_numrange_lhp";
        case HypothesisRoute::skew_structure: return "skew_structure";
        case HypothesisRoute::none: return "none";
    }
    return "none";
}

const char* to_string(Conclusion c) {
    switch (c) {
        case Conclusion::numrange_in_lhp: return "numrange_in_lhp";
        case Conclusion::eigenvalues_in_lhp: return "eigenvalues_in_lhp";
        case Conclusion::none: return "none";
    }
    return "none";
}

double eejjx_value(const PoshPencil& pp, const ComplexVector& x) {
    const double r1 = quadratic_form(pp.r1(), x).real();
    const double r2 = quadratic_form(pp.r2(), x).real();
    const Complex j1 = quadratic_form(pp.j1(), x);
    const Complex j2 = quadratic_form(pp.j2(), x);
    // Both skew forms are purely imaginary, so their product is real.
    return -r1 * r2 + (j1 * j2).real();
}

double eejjx_tolerance(const PoshPencil& pp) {
    const double s = pp.scale();
    return 1e-10 * s * s;
}

bool eejjx_by_norms(const PoshPencil& pp) {
    if (pp.size() == 0) return true;
    return lambda_min(pp.r1()) * lambda_min(pp.r2()) >= spectral_norm(pp.j1()) * spectral_norm(pp.j2());
}

bool eejjx_by_kronecker(const PoshPencil& pp, std::optional<double> tol) {
    if (pp.size() > kKroneckerCap) {
        throw PreconditionError("eejjx_by_kronecker: n exceeds 64 (Kronecker product too large); use eejjx_by_norms "
                                "or eejjx_falsify instead");
    }
    if (pp.size() == 0) return true;
    const ComplexMatrix m = hermitian_part(kron(pp.j1(), pp.j2()) - kron(pp.r1(), pp.r2()));
    return lambda_max(m) <= tol.value_or(eejjx_tolerance(pp));
}

// The spectral conditions alone do not bound the cross terms a_i b_j (i != j) of
// (x^* iJ1 x)(x^* iJ2 x) in the Hermitian canonical form; iJ1 and iJ2 must also be
// semidefinite of one common sign.
bool eejjx_by_spectral(const PoshPencil& pp) {
    if (pp.size() == 0) return true;
    const Complex i(0.0, 1.0);
    const ComplexMatrix h1 = hermitian_part(i * pp.j1()), h2 = hermitian_part(i * pp.j2());
    const double t1 = default_psd_tolerance(h1), t2 = default_psd_tolerance(h2);
    const bool same_sign = (lambda_min(h1) >= -t1 && lambda_min(h2) >= -t2) ||
                           (lambda_max(h1) <= t1 && lambda_max(h2) <= t2);
    if (!same_sign) return false;
    KroneckerStructure ks;
    try {
        ks = kronecker_structure(Pencil::plus(pp.j1(), pp.j2()));
    } catch (const NumericalAmbiguity&) {
        return false;
    }
    for (int e : ks.right_minimal_indices) {
        if (e != 0) return false;
    }
    for (int e : ks.left_minimal_indices) {
        if (e != 0) return false;
    }
    for (int s : ks.infinite_block_sizes) {
        if (s != 1) return false;
    }
    for (const auto& f : ks.finite_eigenstructure) {
        const double tol = 1e-8 * (1.0 + std::abs(f.value));
        if (std::abs(f.value.imag()) > tol || f.value.real() > tol) return false;
        for (int r : f.partial_multiplicities) {
            if (r != 1) return false;
        }
    }
    return true;
}

namespace {

// Shared driver: 80% random draws, 20% coordinate-pair ascent from the best draw.
template <class Draw, class Value, class Perturb>
std::pair<double, std::vector<double>> falsify_driver(std::size_t budget, std::uint64_t seed, Draw draw, Value value,
                                                      Perturb perturb, std::vector<double> start) {
    const std::size_t n_random = budget - budget / 5;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> best_x = std::move(start);
    for (std::size_t k0 = 0; k0 < n_random; k0 += 1024) {
        Rng rng = make_stream(seed, k0 / 1024);
        const std::size_t stop = std::min(n_random, k0 + 1024);
        for (std::size_t k = k0; k < stop; ++k) {
            std::vector<double> x = draw(rng);
            const double v = value(x);
            if (v > best) best = v, best_x = std::move(x);
        }
    }
    Rng rng = make_stream(seed, 0xa5cef);
    double step = 0.5;
    int stalls = 0;
    for (std::size_t k = n_random; k < budget && !best_x.empty(); ++k) {
        std::vector<double> x = perturb(rng, best_x, step);
        const double v = value(x);
        if (v > best) {
            best = v, best_x = std::move(x);
            stalls = 0;
        } else if (++stalls >= 20) {
            step = std::max(step * 0.5, 1e-8);
            stalls = 0;
        }
    }
    return {best, best_x};
}

// Interleaved (re, im) or (xi, eta) storage, normalized to unit length.
void normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s > 0.0) {
        for (double& x : v) x /= s;
    }
}

std::vector<double> pair_perturb(Rng& rng, const std::vector<double>& x, double step, std::size_t coords,
                                 std::size_t stride) {
    std::vector<double> y = x;
    std::uniform_int_distribution<std::size_t> pick(0, coords - 1);
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (coords > 1) {
        while (j == i) j = pick(rng);
    }
    for (std::size_t c : {i, j}) {
        for (std::size_t s = 0; s < stride; ++s) y[c * stride + s] += step * standard_normal(rng);
    }
    normalize(y);
    return y;
}

ComplexVector as_complex(const std::vector<double>& v) {
    ComplexVector x(static_cast<Eigen::Index>(v.size() / 2));
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = Complex(v[2 * k], v[2 * k + 1]);
    return x;
}

}  // namespace

std::optional<EejjxWitness> eejjx_falsify(const PoshPencil& pp, std::size_t budget, std::uint64_t seed) {
    const Eigen::Index n = pp.size();
    if (n == 0 || budget == 0) return std::nullopt;
    const double tol = eejjx_tolerance(pp);
    auto draw = [n](Rng& rng) {
        std::vector<double> v(2 * n);
        for (double& x : v) x = standard_normal(rng);
        normalize(v);
        return v;
    };
    auto value = [&pp](const std::vector<double>& v) { return eejjx_value(pp, as_complex(v)); };
    auto perturb = [n](Rng& rng, const std::vector<double>& x, double step) {
        return pair_perturb(rng, x, step, static_cast<std::size_t>(n), 2);
    };
    auto [best, best_x] = falsify_driver(budget, seed, draw, value, perturb, {});
    if (best > tol) return EejjxWitness{as_complex(best_x), best};
    return std::nullopt;
}

double eejjx_real_value(const PoshPencil& pp, const RealVector& xi, const RealVector& eta) {
    const RealMatrix j1 = pp.j1().real(), j2 = pp.j2().real(), r1 = pp.r1().real(), r2 = pp.r2().real();
    const double a = xi.dot(j1 * eta), b = xi.dot(j2 * eta);
    const double c = xi.dot(r1 * xi) + eta.dot(r1 * eta);
    const double d = xi.dot(r2 * xi) + eta.dot(r2 * eta);
    return -4.0 * a * b - c * d;
}

std::optional<RealEejjxWitness> eejjx_real_form(const PoshPencil& pp, std::size_t budget, std::uint64_t seed) {
    if (!pp.is_real()) throw PreconditionError("eejjx_real_form: coefficients are not real");
    const Eigen::Index n = pp.size();
    if (n == 0 || budget == 0) return std::nullopt;
    const double tol = eejjx_tolerance(pp);
    auto split = [n](const std::vector<double>& v) {
        RealVector xi(n), eta(n);
        for (Eigen::Index k = 0; k < n; ++k) xi(k) = v[2 * k], eta(k) = v[2 * k + 1];
        return std::pair{xi, eta};
    };
    auto draw = [n](Rng& rng) {
        std::vector<double> v(2 * n);
        for (double& x : v) x = standard_normal(rng);
        normalize(v);
        return v;
    };
    auto value = [&](const std::vector<double>& v) {
        auto [xi, eta] = split(v);
        return eejjx_real_value(pp, xi, eta);
    };
    auto perturb = [n](Rng& rng, const std::vector<double>& x, double step) {
        return pair_perturb(rng, x, step, static_cast<std::size_t>(n), 2);
    };
    auto [best, best_x] = falsify_driver(budget, seed ^ 0x7265616cULL, draw, value, perturb, {});
    if (best > tol) {
        auto [xi, eta] = split(best_x);
        return RealEejjxWitness{xi, eta, best};
    }
    return std::nullopt;
}

namespace {

bool finite_spectrum_in_closed_lhp(const KroneckerStructure& ks, double scale) {
    for (const auto& f : ks.finite_eigenstructure) {
        if (f.value.real() > 1e-8 * std::max(scale, 1.0) * (1.0 + std::abs(f.value))) return false;
    }
    return true;
}

}  // namespace

LhpCertificate lhp_certificate(const PoshPencil& pp, const LhpOptions& opts) {
    LhpCertificate cert;
    if (opts.eejjx_proved_externally) {
        cert.eejjx_status = EejjxStatus::proved_by_polynomial_structure;
    } else if (eejjx_by_norms(pp)) {
        cert.eejjx_status = EejjxStatus::proved_by_norms;
    } else if (pp.size() <= kKroneckerCap && eejjx_by_kronecker(pp)) {
        cert.eejjx_status = EejjxStatus::proved_by_kronecker;
    } else if (eejjx_by_spectral(pp)) {
        cert.eejjx_status = EejjxStatus::proved_by_spectral;
    } else if (auto w = eejjx_falsify(pp, opts.falsify_budget, opts.seed)) {
        cert.eejjx_status = EejjxStatus::falsified;
        cert.witness = std::move(w);
    } else {
        cert.eejjx_status = EejjxStatus::unknown;
        cert.notes.push_back("EE-JJx: no prover succeeded and the falsifier found no witness");
    }
    if (!is_proved(cert.eejjx_status)) return cert;

    // Route (a): no common isotropic vector.
    const NocommonReport chain = nocommon_chain_report(pp, 0, opts.seed);
    if (chain.d.holds == true) {
        cert.hypothesis_route = HypothesisRoute::no_isotropic;
        cert.conclusion = Conclusion::numrange_in_lhp;
        cert.evidence = chain.d.evidence;
        cert.notes.push_back("no common isotropic vector: " + chain.d.detail);
        return cert;
    }
    if (!chain.d.holds) cert.notes.push_back("common isotropic vector question undecided: " + chain.d.detail);

    const bool p_regular = chain.e.holds.value_or(false);
    if (!p_regular) {
        cert.notes.push_back("pencil not shown regular; remaining routes need regularity");
        return cert;
    }

    // Route via the structure of lambda J1 + J2.
    try {
        const KroneckerStructure sk = kronecker_structure(Pencil::plus(pp.j1(), pp.j2()));
        bool zero_indices = true;
        for (int e : sk.right_minimal_indices) zero_indices = zero_indices && e == 0;
        for (int e : sk.left_minimal_indices) zero_indices = zero_indices && e == 0;
        if (zero_indices && finite_spectrum_in_closed_lhp(sk, pp.scale())) {
            cert.hypothesis_route = HypothesisRoute::skew_structure;
            cert.conclusion = Conclusion::eigenvalues_in_lhp;
            cert.evidence = Evidence::exact;
            return cert;
        }
    } catch (const NumericalAmbiguity& err) {
        cert.notes.push_back(std::string("skew pencil structure ambiguous: ") + err.what());
    }

    // Route (b): sampled W(lambda J1 + J2) in the closed left half-plane.
    if (opts.sample_budget > 0) {
        const NumRangeSample s = sample_numerical_range(Pencil::plus(pp.j1(), pp.j2()), opts.sample_budget, opts.seed);
        bool inside = true;
        for (const Complex& mu : s.points) {
            if (mu.real() > 1e-8 * std::max(pp.scale(), 1.0) * (1.0 + std::abs(mu))) {
                inside = false;
                break;
            }
        }
        if (inside && !s.points.empty()) {
            cert.hypothesis_route = HypothesisRoute::skew_numrange_lhp;
            cert.conclusion = Conclusion::numrange_in_lhp;
            cert.evidence = Evidence::sampled;
            cert.notes.push_back("W(lambda J1 + J2) in the closed left half-plane on samples only");
        }
    }
    return cert;
}

std::vector<Complex> sector_membership(const std::vector<Complex>& points, int d, double tol, double tol_angle) {
    if (d < 1) throw PreconditionError("sector_membership: degree must be >= 1");
    std::vector<Complex> out;
    const double bound = M_PI / d - tol_angle;
    for (const Complex& z : points) {
        if (std::abs(z) > tol && std::abs(std::arg(z)) < bound) out.push_back(z);
    }
    return out;
}

RegularityReport regularity_conditions_report(const PoshPencil& pp, std::uint64_t seed) {
    RegularityReport rep;
    const Pencil p = pp.pencil();
    rep.p_regular = is_regular_probe(p, seed);
    rep.r1r2_regular = is_regular_probe(Pencil::plus(pp.r1(), pp.r2()), seed);
    rep.j1j2_regular = is_regular_probe(Pencil::plus(pp.j1(), pp.j2()), seed);
    rep.r1j2_regular = is_regular_probe(Pencil::plus(pp.r1(), pp.j2()), seed);
    rep.r2j1_regular = is_regular_probe(Pencil::plus(pp.r2(), pp.j1()), seed);
    rep.triple_kernel_j1 = common_kernel({pp.j1(), pp.r1(), pp.r2()}).cols();
    rep.triple_kernel_j2 = common_kernel({pp.j2(), pp.r1(), pp.r2()}).cols();

    const double scale = pp.scale();
    if (rep.p_regular) {
        for (const Complex& z : finite_eigenvalues(p, seed)) {
            const double tol = 1e-8 * (1.0 + std::abs(z));
            if (std::abs(z.imag()) <= tol && z.real() > tol) rep.positive_real_eigenvalues.push_back(z);
        }
    }

    auto fail = [&rep](const std::string& what) {
        rep.consistent = false;
        rep.conclusions.push_back("INCONSISTENT: " + what);
    };

    if (!rep.p_regular) {
        rep.conclusions.push_back("(i) P singular: triples (J_i, R1, R2) must share a kernel");
        if (rep.triple_kernel_j1 == 0 || rep.triple_kernel_j2 == 0) fail("singular P without triple common kernels");
    }
    if (rep.r1r2_regular) {
        rep.conclusions.push_back("(ii) lambda R1 + R2 regular: P regular, no eigenvalues on (0, inf)");
        if (!rep.p_regular) fail("(ii) P reported singular");
        if (!rep.positive_real_eigenvalues.empty()) fail("(ii) positive real eigenvalue present");
    }
    if (rep.j1j2_regular) {
        rep.conclusions.push_back("(iii) lambda J1 + J2 regular: P regular, positive real eigenvalues shared");
        if (!rep.p_regular) fail("(iii) P reported singular");
        if (!rep.positive_real_eigenvalues.empty()) {
            const std::vector<ExtendedComplex> sk = generalized_eigenvalues(Pencil::plus(pp.j1(), pp.j2()), seed);
            for (const Complex& z : rep.positive_real_eigenvalues) {
                bool found = false;
                for (const auto& w : sk) {
                    if (w.is_finite() && std::abs(w.value() - z) <= 1e-6 * (1.0 + std::abs(z))) found = true;
                }
                if (!found) fail("(iii) positive real eigenvalue missing from lambda J1 + J2");
            }
        }
    }
    for (int item = 0; item < 2; ++item) {
        const bool reg = item == 0 ? rep.r1j2_regular : rep.r2j1_regular;
        if (!reg) continue;
        rep.conclusions.push_back(item == 0 ? "(iv) lambda R1 + J2 regular: P regular, (alpha J1 + J2) x = 0"
                                            : "(v) lambda R2 + J1 regular: P regular, (alpha J1 + J2) x = 0");
        if (!rep.p_regular) fail("P reported singular under (iv)/(v)");
        for (const Complex& z : rep.positive_real_eigenvalues) {
            const double alpha = z.real();
            Eigen::JacobiSVD<ComplexMatrix> svd(p.at(alpha), Eigen::ComputeFullV);
            const ComplexVector x = svd.matrixV().col(svd.matrixV().cols() - 1);
            if ((alpha * pp.j1() + pp.j2()).operator*(x).norm() > 1e-6 * scale * (1.0 + alpha)) {
                fail("eigenvector of a positive real eigenvalue not annihilated by alpha J1 + J2");
            }
        }
    }
    return rep;
}

}  // namespace pencil_lab
