#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pencil_lab/core.hpp"
#include "pencil_lab/oracles.hpp"
#include "pencil_lab/random.hpp"
#include "test_util.hpp"

using namespace pencil_lab;
using namespace pencil_lab::test;

namespace {
const Complex I(0.0, 1.0);
}

TEST(HermitianSplit, SkewPlusIdentity) {
    const auto s = hermitian_split(dense({{1.0, 1.0}, {-1.0, 1.0}}));
    EXPECT_EQ(s.skew, skew2());
    EXPECT_EQ(s.herm, ComplexMatrix(ComplexMatrix::Identity(2, 2)));
}

TEST(HermitianSplit, HermitianInputHasZeroSkewPart) {
    const ComplexMatrix h = dense({{2.0, 1.0 + I}, {1.0 - I, 3.0}});
    const auto s = hermitian_split(h);
    EXPECT_EQ(max_abs(s.skew), 0.0);
    EXPECT_EQ(s.herm, h);
}

TEST(HermitianSplit, ScalarI) {
    const auto s = hermitian_split(scalar(I));
    EXPECT_EQ(s.skew(0, 0), I);
    EXPECT_EQ(s.herm(0, 0), Complex(0.0));
}

TEST(HermitianSplit, NonSquareIsDimensionError) {
    EXPECT_THROW(hermitian_split(ComplexMatrix::Zero(2, 3)), DimensionError);
}

// The ulp is taken at the largest component of the pair m(i, j), m(j, i): both
// enter each entry, and no exactly structured split can do better (see below).
TEST(HermitianSplit, ReconstructsWithinTwoUlpAndIsExactlyStructured) {
    auto ulp = [](double x) { return std::abs(std::nextafter(x, HUGE_VAL) - x); };
    for (int k = 0; k < 200; ++k) {
        Rng rng = make_stream(11, static_cast<std::uint64_t>(k));
        const Eigen::Index n = 1 + k % 7;
        const ComplexMatrix m = complex_gaussian_matrix(rng, n, n) * std::pow(10.0, k % 9 - 4);
        const auto s = hermitian_split(m);
        EXPECT_TRUE((s.skew + s.skew.adjoint()).isZero(0.0));
        EXPECT_TRUE((s.herm - s.herm.adjoint()).isZero(0.0));
        const ComplexMatrix sum = s.skew + s.herm;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const double big = std::max({std::abs(m(i, j).real()), std::abs(m(i, j).imag()),
                                             std::abs(m(j, i).real()), std::abs(m(j, i).imag())});
                EXPECT_LE(std::abs(sum(i, j).real() - m(i, j).real()), 2.0 * ulp(big));
                EXPECT_LE(std::abs(sum(i, j).imag() - m(i, j).imag()), 2.0 * ulp(big));
            }
        }
    }
}

TEST(HermitianSplit, TinyEntryFacingLargeOneIsLimitedByTheLargeOne) {
    const ComplexMatrix m = dense({{0.0, 1e-20}, {1.0, 0.0}});
    const auto s = hermitian_split(m);
    EXPECT_LE(std::abs((s.skew + s.herm)(0, 1) - m(0, 1)), 2.0 * std::abs(std::nextafter(1.0, 2.0) - 1.0));
    EXPECT_EQ((s.skew + s.herm)(1, 0), m(1, 0));
}

TEST(Pencil, RejectsNonFiniteAndMismatchedCoefficients) {
    ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(Pencil::plus(bad, ComplexMatrix::Identity(2, 2)), PreconditionError);
    EXPECT_THROW(Pencil::plus(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)), DimensionError);
}

TEST(Pencil, ConventionConversionIsInvolutive) {
    Rng rng = make_stream(12, 0);
    const Pencil m = Pencil::minus(complex_gaussian_matrix(rng, 3, 4), complex_gaussian_matrix(rng, 3, 4));
    const Pencil back = m.to_plus().to_minus();
    EXPECT_EQ(back.lead(), m.lead());
    EXPECT_EQ(back.constant(), m.constant());
    EXPECT_EQ(back.convention(), Convention::minus);
    const Complex z(0.3, -1.2);
    EXPECT_TRUE(m.at(z).isApprox(m.to_plus().at(z)));
}

TEST(ValidatePosh, ExUnstableAccepted) {
    const PoshPencil pp = ex_unstable();
    EXPECT_EQ(pp.r1(), diag({0.0, 0.0, 1.0}));
    EXPECT_EQ(pp.r2(), diag({1.0, 0.0, 0.0}));
}

TEST(ValidatePosh, NegativeLeadRejectedNamingR1) {
    try {
        validate_posh(Pencil::plus(scalar(-1.0), scalar(0.0)));
        FAIL() << "expected rejection";
    } catch (const PoshRejection& e) {
        EXPECT_EQ(e.coefficient(), "r1");
        EXPECT_DOUBLE_EQ(e.lambda_min(), -1.0);
    }
}

TEST(ValidatePosh, IdentityPencilHasZeroSkewParts) {
    const PoshPencil pp = validate_posh(Pencil::plus(ComplexMatrix::Identity(3, 3), ComplexMatrix::Identity(3, 3)));
    EXPECT_EQ(max_abs(pp.j1()), 0.0);
    EXPECT_EQ(max_abs(pp.j2()), 0.0);
}

TEST(ValidatePosh, InvariantUnderConjugateTranspose) {
    int accepted = 0;
    for (int k = 0; k < 200; ++k) {
        Rng rng = make_stream(13, static_cast<std::uint64_t>(k));
        const Eigen::Index n = 2 + k % 4;
        // Half the draws are posH by construction, the rest generic.
        Pencil p = k % 2 ? random_posh(rng, n, {false, n - 1, n}).pencil()
                         : Pencil::plus(complex_gaussian_matrix(rng, n, n), complex_gaussian_matrix(rng, n, n));
        auto ok = [](const Pencil& q) {
            try {
                validate_posh(q);
                return true;
            } catch (const PoshRejection&) {
                return false;
            }
        };
        const bool a = ok(p), b = ok(p.adjoint());
        EXPECT_EQ(a, b) << "instance " << k;
        accepted += a;
    }
    EXPECT_GT(accepted, 50);
}

TEST(Reversal, SwapsCoefficients) {
    const Pencil r = reversal(Pencil::minus(scalar(1.0), scalar(2.0)));
    EXPECT_EQ(r.lead()(0, 0), Complex(2.0));
    EXPECT_EQ(r.constant()(0, 0), Complex(1.0));
    Rng rng = make_stream(14, 0);
    const ComplexMatrix e = complex_gaussian_matrix(rng, 2, 2), a = complex_gaussian_matrix(rng, 2, 2);
    const Pencil ra = reversal(Pencil::minus(e, a));
    EXPECT_EQ(ra.lead(), a);
    EXPECT_EQ(ra.constant(), e);
}

TEST(Reversal, IsAnInvolution) {
    const Pencil p = ex_unstable().pencil();
    const Pencil rr = reversal(reversal(p));
    EXPECT_EQ(rr.lead(), p.lead());
    EXPECT_EQ(rr.constant(), p.constant());
    EXPECT_EQ(rr.convention(), p.convention());
}

TEST(Eigenvalues, Diagonal) {
    const auto ev = finite_eigenvalues(Pencil::minus(ComplexMatrix::Identity(2, 2), diag({-1.0, -2.0})));
    EXPECT_TRUE(same_multiset(ev, {-1.0, -2.0}, 1e-12));
}

TEST(Eigenvalues, ExUnstableIsCubeRootsOfMinusOne) {
    const auto ev = generalized_eigenvalues(ex_unstable().pencil());
    std::vector<Complex> fin;
    for (const auto& z : ev) {
        ASSERT_TRUE(z.is_finite());
        fin.push_back(z.value());
    }
    const double s = std::sqrt(3.0) / 2.0;
    EXPECT_TRUE(same_multiset(fin, {-1.0, Complex(0.5, s), Complex(0.5, -s)}, 1e-8));
    EXPECT_EQ(std::count_if(fin.begin(), fin.end(), [](Complex z) { return z.real() > 0.0; }), 2);
}

TEST(Eigenvalues, ZeroLeadGivesInfinity) {
    const auto ev = generalized_eigenvalues(Pencil::plus(scalar(0.0), scalar(1.0)));
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_TRUE(ev[0].is_infinite());
    EXPECT_THROW(ev[0].value(), PreconditionError);
}

TEST(Eigenvalues, SingularPencilRejected) {
    EXPECT_FALSE(is_regular_probe(Pencil::plus(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2))));
    EXPECT_THROW(generalized_eigenvalues(Pencil::plus(diag({1.0, 0.0}), diag({1.0, 0.0}))), SingularPencilError);
}

TEST(Eigenvalues, ReversalGivesReciprocals) {
    for (int k = 0; k < 50; ++k) {
        Rng rng = make_stream(15, static_cast<std::uint64_t>(k));
        const Pencil p = Pencil::minus(complex_gaussian_matrix(rng, 6, 6), complex_gaussian_matrix(rng, 6, 6));
        std::vector<Complex> inv;
        for (Complex z : finite_eigenvalues(p)) inv.push_back(1.0 / z);
        const auto rev = finite_eigenvalues(reversal(p));
        ASSERT_EQ(rev.size(), inv.size());
        for (Complex w : inv) {
            double best = HUGE_VAL;
            for (Complex r : rev) best = std::min(best, std::abs(r - w) / std::abs(w));
            EXPECT_LE(best, 1e-8);
        }
    }
}

TEST(Eigenvalues, ZeroAndInfinitySwapUnderReversal) {
    const Pencil p = Pencil::minus(diag({1.0, 0.0, 1.0}), diag({0.0, 1.0, 2.0}));
    int zeros = 0, infs = 0;
    for (const auto& z : generalized_eigenvalues(reversal(p))) {
        if (z.is_infinite()) ++infs;
        else if (std::abs(z.value()) < 1e-12) ++zeros;
    }
    EXPECT_EQ(zeros, 1);
    EXPECT_EQ(infs, 1);
}

TEST(DhValidation, AcceptsAStandardDhPencilAndFlagsBrokenOnes) {
    DhPencil p{ComplexMatrix::Identity(2, 2), skew2(), diag({1.0, 0.5}), ComplexMatrix::Identity(2, 2)};
    EXPECT_TRUE(validate_dh(p).ok);
    DhPencil bad = p;
    bad.r = diag({1.0, -0.5});
    EXPECT_FALSE(validate_dh(bad).ok);
    bad = p;
    bad.j(0, 1) = 2.0;
    EXPECT_FALSE(validate_dh(bad).ok);
    bad = p;
    bad.q = dense({{1.0, 1.0}, {0.0, 1.0}});
    EXPECT_FALSE(validate_dh(bad).ok);
}
