#include <gtest/gtest.h>

#include "pencil_lab/localization.hpp"
#include "pencil_lab/matpoly.hpp"
#include "pencil_lab/oracles.hpp"
#include "pencil_lab/random.hpp"
#include "test_util.hpp"

using namespace pencil_lab;
using namespace pencil_lab::test;

namespace {

const Complex I(0.0, 1.0);

ComplexMatrix zeros(Eigen::Index n) { return ComplexMatrix::Zero(n, n); }
ComplexMatrix eye(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

// Random posH pencil with skew parts scaled by s, so small s tends to satisfy EE-JJx.
PoshPencil damped(Rng& rng, Eigen::Index n, double s, bool real) {
    const PoshPencil b = random_posh(rng, n, {real, -1, -1});
    return PoshPencil(s * b.j1(), b.r1(), s * b.j2(), b.r2());
}

ComplexMatrix real_orthogonal(Rng& rng, Eigen::Index n) {
    const RealMatrix q = Eigen::HouseholderQR<RealMatrix>(real_gaussian_matrix(rng, n, n)).householderQ();
    return q.cast<Complex>();
}

bool any_prover(const PoshPencil& pp) {
    return eejjx_by_norms(pp) || eejjx_by_kronecker(pp) || eejjx_by_spectral(pp);
}

}  // namespace

TEST(EejjxNorms, Examples) {
    EXPECT_TRUE(eejjx_by_norms(PoshPencil(skew2(), eye(2), skew2(), eye(2))));
    EXPECT_FALSE(eejjx_by_norms(PoshPencil(skew2(), zeros(2), skew2(), eye(2))));
    const auto p = MatrixPolynomial::psd_validated({eye(2), diag({2.0, 1.0}), diag({1.0, 3.0}), eye(2)});
    EXPECT_FALSE(eejjx_by_norms(linearize_cubic(p)));
}

TEST(EejjxKronecker, Examples) {
    EXPECT_TRUE(eejjx_by_kronecker(PoshPencil(skew2(), eye(2), skew2(), eye(2))));
    const ComplexMatrix j = 2.0 * skew2();
    EXPECT_FALSE(eejjx_by_kronecker(PoshPencil(j, eye(2), j, eye(2))));
    EXPECT_TRUE(eejjx_by_kronecker(PoshPencil(zeros(2), eye(2), j, diag({1.0, 0.0}))));
    EXPECT_THROW(eejjx_by_kronecker(PoshPencil(zeros(65), eye(65), zeros(65), eye(65))), PreconditionError);
}

TEST(EejjxKronecker, LargestEigenvalueIsThree) {
    const ComplexMatrix j = 2.0 * skew2();
    const ComplexMatrix m = kron(j, j) - kron(eye(2), eye(2));
    EXPECT_NEAR(lambda_max(m), 3.0, 1e-12);
}

TEST(EejjxSpectral, Examples) {
    EXPECT_TRUE(eejjx_by_spectral(PoshPencil(diag({I, 2.0 * I}), zeros(2), diag({3.0 * I, 0.5 * I}), zeros(2))));
    EXPECT_FALSE(eejjx_by_spectral(PoshPencil(scalar(I), scalar(0.0), scalar(-I), scalar(0.0))));
    EXPECT_TRUE(eejjx_by_spectral(PoshPencil(zeros(2), eye(2), zeros(2), eye(2))));
}

// Real, nonpositive, semisimple spectrum with mixed sign characteristic:
// iJ1 = diag(1, -1), iJ2 = diag(1, -10) has eigenvalues -1, -10, yet x = (1, 0.5)
// gives forms 0.75 and -1.5, so x^* J1 x x^* J2 x > 0.
TEST(EejjxSpectral, MixedSignCharacteristicIsNotAProof) {
    const PoshPencil pp(diag({-I, I}), zeros(2), diag({-I, 10.0 * I}), zeros(2));
    const ComplexVector x = dense({{1.0}, {0.5}});
    EXPECT_GT(eejjx_value(pp, x), 0.0);
    EXPECT_FALSE(eejjx_by_spectral(pp));
    EXPECT_TRUE(eejjx_falsify(pp, 2000, 4).has_value());
    EXPECT_TRUE(eejjx_by_spectral(PoshPencil(diag({-I, -I}), zeros(2), diag({-I, -10.0 * I}), zeros(2))));
}

TEST(EejjxFalsify, Examples) {
    EXPECT_FALSE(eejjx_falsify(PoshPencil(skew2(), eye(2), skew2(), eye(2)), 2000, 1).has_value());
    EXPECT_FALSE(eejjx_falsify(PoshPencil(scalar(I), scalar(0.0), scalar(I), scalar(0.0)), 2000, 1).has_value());
    const PoshPencil bad(scalar(I), scalar(0.0), scalar(-I), scalar(0.0));
    const auto w = eejjx_falsify(bad, 2000, 1);
    ASSERT_TRUE(w.has_value());
    EXPECT_NEAR(w->x.norm(), 1.0, 1e-12);
    EXPECT_NEAR(w->value, 1.0, 1e-12);
    EXPECT_NEAR(eejjx_value(bad, w->x), w->value, 1e-14);
}

TEST(EejjxRealForm, Examples) {
    EXPECT_FALSE(eejjx_real_form(PoshPencil(zeros(3), eye(3), zeros(3), eye(3)), 2000, 2).has_value());
    EXPECT_THROW(eejjx_real_form(PoshPencil(scalar(I), scalar(0.0), scalar(I), scalar(0.0)), 100, 2),
                 PreconditionError);

    const ComplexMatrix j = 2.0 * skew2();
    const PoshPencil pp(j, eye(2), -j, eye(2));
    const auto w = eejjx_real_form(pp, 4000, 2);
    ASSERT_TRUE(w.has_value());
    EXPECT_NEAR(eejjx_real_value(pp, w->xi, w->eta), w->value, 1e-12);
    const ComplexVector x = w->xi.cast<Complex>() + I * w->eta.cast<Complex>();
    EXPECT_GT(eejjx_value(pp, x), eejjx_tolerance(pp) * std::pow(x.squaredNorm(), 2));
    EXPECT_NEAR(eejjx_value(pp, x), w->value, 1e-10 * std::pow(x.squaredNorm(), 2));
}

TEST(EejjxRealForm, ExJjbWitnessesReevaluate) {
    const PoshPencil pp = ex_jjb(1.0, 0.0);
    if (const auto w = eejjx_real_form(pp, 4000, 3)) {
        EXPECT_GT(eejjx_real_value(pp, w->xi, w->eta), 0.0);
        const ComplexVector x = w->xi.cast<Complex>() + I * w->eta.cast<Complex>();
        EXPECT_GT(eejjx_value(pp, x), 0.0);
    }
}

// Real-form and complex-form witnesses agree on real instances.
TEST(EejjxRealForm, AgreesWithComplexFalsifier) {
    for (int k = 0; k < 40; ++k) {
        Rng rng = make_stream(51, static_cast<std::uint64_t>(k));
        const PoshPencil pp = damped(rng, 2 + k % 4, k % 2 ? 3.0 : 0.05, true);
        const auto wr = eejjx_real_form(pp, 4000, 510 + static_cast<std::uint64_t>(k));
        if (wr) {
            const ComplexVector x = wr->xi.cast<Complex>() + I * wr->eta.cast<Complex>();
            EXPECT_GT(eejjx_value(pp, x), 0.0) << "instance " << k;
            EXPECT_FALSE(any_prover(pp)) << "instance " << k;
        }
        if (any_prover(pp)) {
            EXPECT_FALSE(wr.has_value()) << "instance " << k;
        }
    }
}

TEST(LhpCertificate, DissipativeHamiltonianCase) {
    // R1, R2 share a real kernel, so only the skew-structure route is open.
    const PoshPencil pp(zeros(2), diag({1.0, 0.0}), skew2(), diag({1.0, 0.0}));
    const auto c = lhp_certificate(pp);
    EXPECT_TRUE(is_proved(c.eejjx_status));
    EXPECT_EQ(c.hypothesis_route, HypothesisRoute::skew_structure);
    EXPECT_EQ(c.conclusion, Conclusion::eigenvalues_in_lhp);
    EXPECT_EQ(c.evidence, Evidence::exact);

    Rng rng = make_stream(52, 0);
    const auto d = lhp_certificate(PoshPencil(zeros(3), random_psd(rng, 3, 3), random_skew(rng, 3), random_psd(rng, 3, 3)));
    EXPECT_NE(d.conclusion, Conclusion::none);
}

TEST(LhpCertificate, ConjectureWithRightHalfPlaneEigenvaluesGetsNoConclusion) {
    const PoshPencil pp = conjecture(0.1);
    const auto c = lhp_certificate(pp);
    EXPECT_EQ(c.conclusion, Conclusion::none);
    const auto ev = finite_eigenvalues(pp.pencil());
    EXPECT_TRUE(std::any_of(ev.begin(), ev.end(), [](Complex z) { return z.real() > 1e-3; }));
}

TEST(LhpCertificate, ExternalProofFlag) {
    const auto p = MatrixPolynomial::psd_validated({eye(2), diag({2.0, 3.0}), diag({2.0, 3.0}), eye(2)});
    ASSERT_EQ(cubic_stability(p).conclusion, CubicConclusion::lhp_certified);
    LhpOptions opts;
    opts.eejjx_proved_externally = true;
    const PoshPencil lin = linearize_cubic(p);
    const auto c = lhp_certificate(lin, opts);
    EXPECT_EQ(c.eejjx_status, EejjxStatus::proved_by_polynomial_structure);
    EXPECT_NE(c.conclusion, Conclusion::none);
    for (Complex z : finite_eigenvalues(lin.pencil())) EXPECT_LE(z.real(), 1e-8 * lin.scale());
}

TEST(SectorMembership, Examples) {
    EXPECT_TRUE(sector_membership({Complex(-3.0)}, 1).empty());
    EXPECT_EQ(sector_membership({Complex(1.0)}, 1).size(), 1u);
    const double s = std::sqrt(3.0) / 2.0;
    EXPECT_TRUE(sector_membership({Complex(-1.0), Complex(0.5, s), Complex(0.5, -s)}, 3).empty());
    EXPECT_TRUE(sector_membership({Complex(0.0)}, 2).empty());
    EXPECT_THROW(sector_membership({}, 0), PreconditionError);
}

TEST(RegularityReport, Examples) {
    Rng rng = make_stream(53, 0);
    const auto a = regularity_conditions_report(PoshPencil(random_skew(rng, 3), eye(3), random_skew(rng, 3), eye(3)));
    EXPECT_TRUE(a.r1r2_regular);
    EXPECT_TRUE(a.p_regular);
    EXPECT_TRUE(a.positive_real_eigenvalues.empty());
    EXPECT_TRUE(a.consistent);

    const PoshPencil base = random_posh(rng, 3);
    const PoshPencil sing = direct_sum({base, PoshPencil(scalar(0.0), scalar(0.0), scalar(0.0), scalar(0.0))});
    const auto b = regularity_conditions_report(sing);
    EXPECT_FALSE(b.p_regular);
    EXPECT_GE(b.triple_kernel_j1, 1);
    EXPECT_GE(b.triple_kernel_j2, 1);
    EXPECT_TRUE(b.consistent);

    const auto c = regularity_conditions_report(ex_jja(1.5, 0.0));
    EXPECT_TRUE(c.j1j2_regular);
    ASSERT_EQ(c.positive_real_eigenvalues.size(), 1u);
    EXPECT_NEAR(std::abs(c.positive_real_eigenvalues[0] - 1.5), 0.0, 1e-12);
    EXPECT_TRUE(c.consistent);
}

TEST(Provers, SoundAgainstFalsifierAndNormsImplyKronecker) {
    int proved = 0;
    for (int k = 0; k < 200; ++k) {
        Rng rng = make_stream(54, static_cast<std::uint64_t>(k));
        const double s = k % 4 == 0 ? 2.0 : 0.02 * (1 + k % 5);
        const PoshPencil pp = damped(rng, 2 + k % 5, s, k % 3 == 0);
        const bool norms = eejjx_by_norms(pp), kr = eejjx_by_kronecker(pp);
        if (norms) {
            EXPECT_TRUE(kr) << "instance " << k;
        }
        if (norms || kr || eejjx_by_spectral(pp)) {
            ++proved;
            EXPECT_FALSE(eejjx_falsify(pp, 10000, 540 + static_cast<std::uint64_t>(k)).has_value()) << "instance " << k;
        }
    }
    EXPECT_GT(proved, 100);
}

TEST(LhpCertificate, ConclusionsAgreeWithSamplesAndEigenvalues) {
    int numrange = 0, eigen = 0;
    for (int k = 0; k < 80; ++k) {
        Rng rng = make_stream(55, static_cast<std::uint64_t>(k));
        const Eigen::Index n = 2 + k % 4;
        PoshPencil pp = damped(rng, n, k % 3 == 0 ? 1.0 : 0.05, k % 2 == 0);
        if (k % 5 == 0) {
            // J1 = 0 with a shared real kernel of R1, R2: route (a) is closed.
            const ComplexMatrix zero1 = zeros(1);
            pp = congruence(PoshPencil(zeros(n), block_diag({random_psd(rng, n - 1, n - 1, true), zero1}),
                                       random_skew(rng, n, true), block_diag({random_psd(rng, n - 1, n - 1, true), zero1})),
                            real_orthogonal(rng, n));
        }
        LhpOptions opts;
        opts.falsify_budget = 2000;
        opts.sample_budget = 2000;
        const auto c = lhp_certificate(pp, opts);
        if (c.conclusion != Conclusion::none) {
            EXPECT_TRUE(is_proved(c.eejjx_status));
        }
        if (c.conclusion == Conclusion::numrange_in_lhp) {
            EXPECT_NE(c.hypothesis_route, HypothesisRoute::skew_structure);
            ++numrange;
            for (Complex mu : sample_numerical_range(pp.pencil(), 5000, 550 + static_cast<std::uint64_t>(k)).points) {
                EXPECT_LE(mu.real(), 1e-8 * pp.scale() * (1.0 + std::abs(mu))) << "instance " << k;
            }
        }
        if (c.conclusion == Conclusion::eigenvalues_in_lhp) {
            EXPECT_EQ(c.hypothesis_route, HypothesisRoute::skew_structure);
            ++eigen;
        }
        if (c.conclusion != Conclusion::none && is_regular_probe(pp.pencil())) {
            for (Complex z : finite_eigenvalues(pp.pencil())) EXPECT_LE(z.real(), 1e-8 * pp.scale()) << "instance " << k;
        }
    }
    EXPECT_GT(numrange, 20);
    EXPECT_GT(eigen, 0);
}

TEST(RegularityReport, RegularDissipationExcludesPositiveRealEigenvalues) {
    int checked = 0;
    for (int k = 0; k < 100; ++k) {
        Rng rng = make_stream(56, static_cast<std::uint64_t>(k));
        const Eigen::Index n = 2 + k % 5;
        const PoshPencil pp = random_posh(rng, n, {k % 2 == 0, k % 3 ? n - 1 : 1, k % 4 ? n - 1 : 1});
        if (!is_regular_probe(Pencil::plus(pp.r1(), pp.r2())) || !is_regular_probe(pp.pencil())) continue;
        ++checked;
        for (Complex z : finite_eigenvalues(pp.pencil())) {
            const double tol = 1e-8 * (1.0 + std::abs(z));
            EXPECT_FALSE(std::abs(z.imag()) <= tol && z.real() > tol) << "instance " << k << " " << z;
        }
        EXPECT_TRUE(regularity_conditions_report(pp).consistent);
    }
    EXPECT_GT(checked, 50);
}
