#include "pencil_lab/numrange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pencil_lab/kcf.hpp"
#include "pencil_lab/random.hpp"

namespace pencil_lab {

const char* to_string(Evidence e) {
    switch (e) {
        case Evidence::exact: return "exact";
        case Evidence::sampled: return "sampled";
        case Evidence::heuristic: return "heuristic";
    }
    return "heuristic";
}

const char* to_string(Sign s) { return s == Sign::plus ? "plus" : "minus"; }

double Threshold::as_double() const {
    switch (kind) {
        case Kind::finite: return value;
        case Kind::infinite: return std::numeric_limits<double>::infinity();
        case Kind::undefined: break;
    }
    throw PreconditionError("Threshold: value requested for an undefined threshold");
}

namespace {

double smallest_positive_singular_value(const ComplexMatrix& m) {
    const RealVector s = singular_values(m);
    if (s.size() == 0 || s(0) == 0.0) return 0.0;
    const double tol = default_rank_tolerance(m);
    double best = s(0);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol) best = s(i);
    }
    return best;
}

}  // namespace

Threshold definite_sup(const ComplexMatrix& h0, const ComplexMatrix& h1, double bisect_tol) {
    if (!is_positive_definite(h0)) return Threshold::undefined();
    if (h1.cwiseAbs().maxCoeff() == 0.0) return Threshold::infinite();
    // Past this cap a negative eigendirection of h1 must win unless h1 >= 0.
    const double cap = 1.0 + 2.0 * spectral_norm(h0) / std::max(smallest_positive_singular_value(h1), kEps);
    if (is_positive_definite(h0 + cap * h1)) return Threshold::infinite();
    double lo = 0.0, hi = cap;
    while (hi - lo > bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (is_positive_definite(h0 + mid * h1)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return Threshold::finite(lo);
}

BetaThresholds beta_thresholds_scaled(const PoshPencil& pp, double t, double bisect_tol) {
    if (!(t > 0.0)) throw PreconditionError("beta_thresholds_scaled: t must be positive");
    const Complex i(0.0, 1.0);
    const ComplexMatrix h0 = hermitian_part(t * pp.r1() + pp.r2());
    const ComplexMatrix ij1 = hermitian_part(i * pp.j1());
    BetaThresholds b;
    b.t = t;
    b.beta_plus = definite_sup(h0, ij1, bisect_tol);
    b.beta_minus = definite_sup(h0, -ij1, bisect_tol);
    const double nj1 = spectral_norm(pp.j1());
    if (nj1 > 0.0 && b.beta_plus.defined()) b.lower_bound = sigma_min(h0) / nj1;
    if (nj1 > 0.0 && is_positive_definite(pp.r2())) b.strip_bound = sigma_min(pp.r2()) / nj1;
    return b;
}

BetaThresholds beta_thresholds(const PoshPencil& pp, double bisect_tol) {
    BetaThresholds b = beta_thresholds_scaled(pp, 1.0, bisect_tol);
    b.strip_bound.reset();
    return b;
}

bool pacman_excludes(const PacmanRegion& region, Complex z) { return pacman_excludes_shrunk(region, z, 0.0); }

bool pacman_excludes_shrunk(const PacmanRegion& region, Complex z, double margin) {
    const double im = region.sign == Sign::plus ? z.imag() : -z.imag();
    const double re = z.real();
    if (!(re > margin * std::abs(z))) return false;
    if (im < 0.0) return false;
    const double beta = region.beta;
    if (!std::isinf(beta) && !(im < beta * (1.0 - margin))) return false;
    const double arg_bound = std::isinf(beta) ? M_PI / 2.0 : std::atan(beta / region.scale);
    return std::atan2(im, re) < arg_bound * (1.0 - margin);
}

std::vector<PacmanRegion> pacman_regions(const BetaThresholds& b) {
    std::vector<PacmanRegion> out;
    if (b.beta_plus.defined()) out.push_back(PacmanRegion{b.beta_plus.as_double(), Sign::plus, b.t});
    if (b.beta_minus.defined()) out.push_back(PacmanRegion{b.beta_minus.as_double(), Sign::minus, b.t});
    return out;
}

std::optional<Complex> rayleigh_point(const Pencil& p, const ComplexVector& x) {
    if (!p.square()) throw DimensionError("rayleigh_point: pencil is not square");
    if (x.size() != p.cols()) throw DimensionError("rayleigh_point: vector length does not match pencil");
    const double xx = x.squaredNorm();
    if (xx == 0.0) throw PreconditionError("rayleigh_point: zero vector");
    const Pencil pl = p.to_plus();
    const Complex den = quadratic_form(pl.lead(), x);
    const double nl = spectral_norm(pl.lead());
    if (std::abs(den) <= kDiscardCutoff * nl * xx) return std::nullopt;
    return -quadratic_form(pl.constant(), x) / den;
}

NumRangeSample sample_numerical_range(const Pencil& p, std::size_t n_samples, std::uint64_t seed) {
    if (!p.square()) throw DimensionError("sample_numerical_range: pencil is not square");
    const Pencil pl = p.to_plus();
    const ComplexMatrix& lead = pl.lead();
    const ComplexMatrix& cst = pl.constant();
    const double nl = spectral_norm(lead);
    const double bound = kResidualBound * (nl + spectral_norm(cst));

    NumRangeSample out;
    out.seed = seed;
    out.sample_count = n_samples;
    out.points.reserve(n_samples);
    const Eigen::Index n = p.rows();
    for (std::size_t start = 0; start < n_samples; start += kSampleChunk) {
        Rng rng = make_stream(seed, start / kSampleChunk);
        const std::size_t stop = std::min(n_samples, start + kSampleChunk);
        for (std::size_t k = start; k < stop; ++k) {
            const ComplexVector x = random_unit_vector(rng, n);
            const Complex den = quadratic_form(lead, x);
            if (std::abs(den) <= kDiscardCutoff * nl) {
                ++out.discarded;
                continue;
            }
            const Complex num = quadratic_form(cst, x);
            const Complex mu = -num / den;
            // Re-verify at emission; anything failing the residual bound counts as discarded.
            if (!(std::abs(mu * den + num) <= bound) || !std::isfinite(mu.real()) || !std::isfinite(mu.imag())) {
                ++out.discarded;
                continue;
            }
            out.points.push_back(mu);
        }
    }
    return out;
}

ComplexMatrix common_kernel(const std::vector<ComplexMatrix>& matrices, std::optional<double> tol) {
    if (matrices.empty()) throw PreconditionError("common_kernel: no matrices");
    const ComplexMatrix stacked = vstack(matrices);
    const double t = tol.value_or(default_rank_tolerance(stacked));
    return null_space(stacked, t);
}

namespace {

double combo_lambda_min(const ComplexMatrix& h1, const ComplexMatrix& h2, const ComplexMatrix& h3, double th,
                        double ph) {
    const double a = std::sin(th) * std::cos(ph), b = std::sin(th) * std::sin(ph), c = std::cos(th);
    return lambda_min(a * h1 + b * h2 + c * h3);
}

}  // namespace

std::optional<DefiniteCombination> find_definite_combination(const ComplexMatrix& h1, const ComplexMatrix& h2,
                                                             const ComplexMatrix& h3, int grid) {
    const Eigen::Index n = h1.rows();
    if (n < 2) throw PreconditionError("find_definite_combination: requires n >= 2");
    if (h2.rows() != n || h3.rows() != n) throw DimensionError("find_definite_combination: sizes differ");
    grid = std::max(grid, 4);
    const ComplexMatrix g1 = hermitian_part(h1), g2 = hermitian_part(h2), g3 = hermitian_part(h3);
    const double scale = std::max({spectral_norm(g1), spectral_norm(g2), spectral_norm(g3)});
    if (scale == 0.0) return std::nullopt;

    double best = -std::numeric_limits<double>::infinity(), bt = 0.0, bp = 0.0;
    const double dth = M_PI / (grid - 1), dph = 2.0 * M_PI / grid;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const double th = i * dth, ph = j * dph;
            const double v = combo_lambda_min(g1, g2, g3, th, ph);
            if (v > best) best = v, bt = th, bp = ph;
        }
    }
    // Compass search on (theta, phi).
    double step = std::max(dth, dph);
    while (step > 1e-7) {
        bool moved = false;
        const double cand[4][2] = {{bt + step, bp}, {bt - step, bp}, {bt, bp + step}, {bt, bp - step}};
        for (const auto& c : cand) {
            const double v = combo_lambda_min(g1, g2, g3, c[0], c[1]);
            if (v > best) {
                best = v, bt = c[0], bp = c[1];
                moved = true;
                break;
            }
        }
        if (!moved) step *= 0.5;
    }
    DefiniteCombination dc{std::sin(bt) * std::cos(bp), std::sin(bt) * std::sin(bp), std::cos(bt), 0.0};
    const ComplexMatrix m = dc.alpha * g1 + dc.beta * g2 + dc.gamma * g3;
    dc.lambda_min = lambda_min(m);
    if (!(dc.lambda_min > 64.0 * kEps * scale) || !is_positive_definite(m)) return std::nullopt;
    return dc;
}

namespace {

// 0 in W(h1 + i h2)?  0 is outside iff max_theta lambda_min(cos h1 + sin h2) > 0; the
// scan is Lipschitz-certified so a negative bound proves membership.
std::optional<bool> zero_in_range(const ComplexMatrix& h1, const ComplexMatrix& h2, std::string& detail) {
    const double lip = std::hypot(spectral_norm(h1), spectral_norm(h2));
    if (lip == 0.0) {
        detail = "restricted forms vanish identically";
        return true;
    }
    const double zero_tol = 64.0 * kEps * lip * static_cast<double>(std::max<Eigen::Index>(h1.rows(), 1));
    for (int pts = 64; pts <= (1 << 15); pts *= 2) {
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < pts; ++k) {
            const double th = 2.0 * M_PI * k / pts;
            const ComplexMatrix m = std::cos(th) * h1 + std::sin(th) * h2;
            const double v = lambda_min(m);
            if (v > zero_tol && is_positive_definite(m)) {
                std::ostringstream os;
                os << "definite rotation found at theta = " << th;
                detail = os.str();
                return false;
            }
            best = std::max(best, v);
        }
        if (best + lip * M_PI / pts < 0.0) {
            std::ostringstream os;
            os << "Lipschitz-certified scan over " << pts << " angles";
            detail = os.str();
            return true;
        }
        if (std::abs(best) <= zero_tol && pts >= 4096) {
            detail = "origin on the boundary of the restricted numerical range within tolerance";
            return true;
        }
    }
    detail = "scan undecided";
    return std::nullopt;
}

bool psd_within(const ComplexMatrix& h, double tol) { return h.rows() == 0 || lambda_min(h) >= -tol; }

// mu = alpha + i beta is outside W(P) if either Hermitian form in (mu) is definite.
bool certified_outside(const PoshPencil& pp, Complex mu) {
    const Complex i(0.0, 1.0);
    const double a = mu.real(), b = mu.imag();
    const ComplexMatrix re = hermitian_part(a * pp.r1() + b * (i * pp.j1()) + pp.r2());
    const ComplexMatrix im = hermitian_part(a * (i * pp.j1()) - b * pp.r1() + i * pp.j2());
    return is_positive_definite(re) || is_positive_definite(-re) || is_positive_definite(im) ||
           is_positive_definite(-im);
}

std::optional<Complex> outside_point(const PoshPencil& pp) {
    if (pp.size() < 2) {
        // Scalar case: W is the single eigenvalue or everything.
        return std::nullopt;
    }
    const Complex i(0.0, 1.0);
    const ComplexMatrix ij1 = hermitian_part(i * pp.j1());
    const ComplexMatrix ij2 = hermitian_part(i * pp.j2());
    const ComplexMatrix& r1 = pp.r1();
    const ComplexMatrix& r2 = pp.r2();

    auto from_real_form = [](const DefiniteCombination& dc, double h3_norm) -> std::optional<Complex> {
        // a R1 + b iJ1 + c R2 > 0  ->  mu = (a + i b) / c
        double c = dc.gamma;
        if (std::abs(c) < 1e-8) c = (c < 0 ? -1.0 : 1.0) * dc.lambda_min / (2.0 * (h3_norm + 1.0));
        if (c == 0.0) return std::nullopt;
        return Complex(dc.alpha / c, dc.beta / c);
    };
    auto from_imag_form = [](const DefiniteCombination& dc, double h3_norm) -> std::optional<Complex> {
        // a R1 + b iJ1 + c iJ2 > 0  ->  alpha = b / c, beta = -a / c
        double c = dc.gamma;
        if (std::abs(c) < 1e-8) c = (c < 0 ? -1.0 : 1.0) * dc.lambda_min / (2.0 * (h3_norm + 1.0));
        if (c == 0.0) return std::nullopt;
        return Complex(dc.beta / c, -dc.alpha / c);
    };

    std::vector<std::optional<Complex>> candidates;
    if (auto dc = find_definite_combination(r1, ij1, r2)) candidates.push_back(from_real_form(*dc, spectral_norm(r2)));
    if (auto dc = find_definite_combination(r1, ij1, ij2)) candidates.push_back(from_imag_form(*dc, spectral_norm(ij2)));
    // Reversal: lambda (J2 + R2) + (J1 + R1); a point nu outside gives 1/nu.
    if (auto dc = find_definite_combination(r2, ij2, r1)) {
        if (auto nu = from_real_form(*dc, spectral_norm(r1)); nu && std::abs(*nu) > 0.0) candidates.push_back(1.0 / *nu);
    }
    if (auto dc = find_definite_combination(r2, ij2, ij1)) {
        if (auto nu = from_imag_form(*dc, spectral_norm(ij1)); nu && std::abs(*nu) > 0.0) candidates.push_back(1.0 / *nu);
    }
    for (const auto& c : candidates) {
        if (c && std::isfinite(c->real()) && std::isfinite(c->imag()) && certified_outside(pp, *c)) return c;
    }
    return std::nullopt;
}

void propagate(NocommonReport& r) {
    // Forward: a => b => c => d => e.  Backward: not e => not d => ... (complex field).
    ChainEntry* chain[5] = {&r.a, &r.b, &r.c, &r.d, &r.e};
    const char* names = "abcde";
    for (int k = 0; k < 4; ++k) {
        if (chain[k]->holds == true && !chain[k + 1]->holds) {
            chain[k + 1]->holds = true;
            chain[k + 1]->evidence = chain[k]->evidence;
            chain[k + 1]->detail = std::string("implied by (") + names[k] + ")";
        }
    }
    for (int k = 4; k > 0; --k) {
        if (chain[k]->holds == false && !chain[k - 1]->holds) {
            chain[k - 1]->holds = false;
            chain[k - 1]->evidence = chain[k]->evidence;
            chain[k - 1]->detail = std::string("implied by failure of (") + names[k] + ")";
        }
    }
}

}  // namespace

NocommonReport nocommon_chain_report(const PoshPencil& pp, std::size_t sample_budget, std::uint64_t seed) {
    NocommonReport rep;
    rep.real_input = pp.is_real();
    const Eigen::Index n = pp.size();
    if (n == 2) {
        rep.warnings.push_back(
            "n = 2: the joint numerical range of three Hermitian matrices need not be convex, so a missing "
            "definite combination says even less than usual");
    }
    const Complex i(0.0, 1.0);

    // (a)
    const ComplexMatrix z = common_kernel({pp.r1(), pp.r2()});
    rep.a.holds = z.cols() == 0;
    rep.a.evidence = Evidence::exact;
    {
        std::ostringstream os;
        os << "dim(ker R1 cap ker R2) = " << z.cols();
        rep.a.detail = os.str();
    }

    // (e)
    try {
        const KroneckerStructure ks = kronecker_structure(pp.pencil());
        rep.e.holds = ks.regular;
        rep.e.evidence = Evidence::exact;
        rep.e.detail = ks.regular ? "staircase: regular" : "staircase: singular";
    } catch (const NumericalAmbiguity& err) {
        rep.e.holds = is_regular_probe(pp.pencil(), seed);
        rep.e.evidence = Evidence::heuristic;
        rep.e.detail = std::string("random-shift probe (staircase ambiguous: ") + err.what() + ")";
    }

    if (z.cols() > 0) {
        const ComplexMatrix h1 = hermitian_part(z.adjoint() * (-i * pp.j1()) * z);
        const ComplexMatrix h2 = hermitian_part(z.adjoint() * (-i * pp.j2()) * z);
        const double tol = 64.0 * kEps * std::max({spectral_norm(h1), spectral_norm(h2), 1.0}) *
                           static_cast<double>(std::max<Eigen::Index>(n, 1));

        // (b): alpha h1 + h2 definite for every alpha > 0, on the common kernel.
        auto trivial_common = [&](const ComplexMatrix& x, const ComplexMatrix& y) {
            return common_kernel({x, y}, tol).cols() == 0;
        };
        const bool same_sign = (psd_within(h1, tol) && psd_within(h2, tol)) ||
                               (psd_within(-h1, tol) && psd_within(-h2, tol));
        rep.b.holds = same_sign && trivial_common(h1, h2);
        rep.b.evidence = Evidence::exact;
        rep.b.detail = rep.b.holds.value() ? "restricted skew forms are jointly definite for all alpha > 0"
                                           : "some alpha > 0 makes alpha h1 + h2 indefinite on the common kernel";

        // (d)
        if (rep.real_input) {
            rep.d.holds = false;
            rep.d.evidence = Evidence::exact;
            rep.d.detail = "real kernel vector of R1, R2 is isotropic for every real coefficient";
        } else {
            std::string detail;
            const std::optional<bool> zero_in = zero_in_range(h1, h2, detail);
            if (zero_in) {
                rep.d.holds = !*zero_in;
                rep.d.evidence = detail.find("tolerance") != std::string::npos ? Evidence::heuristic : Evidence::exact;
            }
            rep.d.detail = detail;
        }
    }

    // (c)
    if (!rep.b.holds.value_or(false)) {
        if (auto mu = outside_point(pp)) {
            rep.c.holds = true;
            rep.c.evidence = Evidence::exact;
            std::ostringstream os;
            os << "definite combination certifies " << mu->real() << (mu->imag() < 0 ? " - " : " + ")
               << std::abs(mu->imag()) << "i outside W";
            rep.c.detail = os.str();
        }
    }

    propagate(rep);
    if (!rep.c.holds) {
        rep.c.evidence = Evidence::heuristic;
        rep.c.detail = "no definite combination found; inconclusive";
    }

    // Sampled corroboration: no retained point may sit on (0, inf) when (b) holds.
    if (sample_budget > 0 && rep.b.holds == true) {
        const NumRangeSample s = sample_numerical_range(pp.pencil(), sample_budget, seed);
        std::size_t hits = 0;
        for (const Complex& mu : s.points) {
            if (mu.real() > 0.0 && std::abs(mu.imag()) <= 1e-12 * std::abs(mu)) ++hits;
        }
        if (hits > 0) {
            std::ostringstream os;
            os << hits << " sampled points lie on the positive real axis within 1e-12 despite (b)";
            rep.warnings.push_back(os.str());
        }
    }
    return rep;
}

}  // namespace pencil_lab
