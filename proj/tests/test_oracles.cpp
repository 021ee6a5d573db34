#include <gtest/gtest.h>

#include <cmath>

#include "pencil_lab/kcf.hpp"
#include "pencil_lab/oracles.hpp"
#include "test_util.hpp"

using namespace pencil_lab;
using namespace pencil_lab::test;

namespace {

const Complex I(0.0, 1.0);

bool has_eigenvalue(const Pencil& p, Complex z, double tol) {
    for (Complex w : finite_eigenvalues(p)) {
        if (std::abs(w - z) <= tol) return true;
    }
    return false;
}

// Sign of the real parts of the companion roots, the reference for Routh-Hurwitz.
RhVerdict companion_verdict(const std::vector<double>& descending, double tol) {
    double worst = -HUGE_VAL;
    for (Complex z : companion_roots(descending)) worst = std::max(worst, z.real());
    if (worst > tol) return RhVerdict::unstable;
    if (worst >= -tol) return RhVerdict::closed_lhp_marginal;
    return RhVerdict::strict_lhp;
}

}  // namespace

TEST(Assemble, IdentityTransformsGiveTheCanonicalPencil) {
    const auto a = assemble_pencil({BlockSpec::jordan(-1.0, 1)}, 1.0, 1);
    EXPECT_LE(max_abs(a.pencil.lead() - scalar(1.0)), 0.0);
    EXPECT_LE(max_abs(a.pencil.constant() - scalar(-1.0)), 0.0);
    ASSERT_EQ(a.truth.finite_eigenstructure.size(), 1u);
    EXPECT_EQ(a.truth.finite_eigenstructure[0].value, Complex(-1.0));
    EXPECT_EQ(a.truth.finite_eigenstructure[0].partial_multiplicities, std::vector<int>{1});
    EXPECT_TRUE(same_multiset(finite_eigenvalues(a.pencil), {-1.0}, 1e-14));
}

TEST(Assemble, SingularBlocksAndInfiniteChain) {
    const auto s = assemble_pencil({BlockSpec::right(1), BlockSpec::left(1)}, 1.0, 2);
    EXPECT_EQ(s.pencil.rows(), 3);
    EXPECT_EQ(s.pencil.cols(), 3);
    EXPECT_EQ(s.truth.right_minimal_indices, std::vector<int>{1});
    EXPECT_EQ(s.truth.left_minimal_indices, std::vector<int>{1});
    EXPECT_FALSE(s.truth.regular);

    const auto n = assemble_pencil({BlockSpec::infinite(3)}, 1.0, 3);
    EXPECT_EQ(n.truth.index, 3);
    EXPECT_EQ(structural_index(n.pencil), 3);
}

TEST(Assemble, BlockShapes) {
    EXPECT_EQ(BlockSpec::right(2).rows(), 2);
    EXPECT_EQ(BlockSpec::right(2).cols(), 3);
    EXPECT_EQ(BlockSpec::left(2).rows(), 3);
    EXPECT_EQ(BlockSpec::left(2).cols(), 2);
    EXPECT_EQ(BlockSpec::right(0).rows(), 0);
    EXPECT_EQ(BlockSpec::right(0).cols(), 1);
    EXPECT_EQ(BlockSpec::jordan(2.0, 3).rows(), 3);
    EXPECT_EQ(BlockSpec::infinite(2).cols(), 2);
}

TEST(Assemble, GroundTruthRecoveredOnRandomLists) {
    for (int k = 0; k < 60; ++k) {
        Rng rng = make_stream(71, static_cast<std::uint64_t>(k));
        const auto specs = random_block_specs(rng, 10);
        const auto a = assemble_pencil(specs, 100.0, static_cast<std::uint64_t>(k));
        const auto got = kronecker_structure(a.pencil);
        EXPECT_TRUE(same_structure(got, a.truth)) << "instance " << k;
    }
}

TEST(RouthHurwitz, Examples) {
    EXPECT_EQ(routh_hurwitz({1, 2, 2, 1}), RhVerdict::strict_lhp);
    EXPECT_EQ(routh_hurwitz({1, 1, 1, 1}), RhVerdict::closed_lhp_marginal);
    EXPECT_EQ(routh_hurwitz({1, 0, 0, 1}), RhVerdict::unstable);
    EXPECT_EQ(routh_hurwitz({1, 3, 3, 1}), RhVerdict::strict_lhp);
    EXPECT_EQ(routh_hurwitz({1, 0, 1}), RhVerdict::closed_lhp_marginal);
    EXPECT_EQ(routh_hurwitz({1, -1}), RhVerdict::unstable);
    EXPECT_THROW(routh_hurwitz({0, 1, 1}), PreconditionError);
    EXPECT_THROW(routh_hurwitz({-1, 1, 1}), PreconditionError);
}

TEST(RouthHurwitz, AgreesWithCompanionRoots) {
    int disagreements = 0, unstable = 0;
    for (int k = 0; k < 10000; ++k) {
        Rng rng = make_stream(72, static_cast<std::uint64_t>(k));
        std::vector<double> c(k % 2 == 0 ? 4 : 5);
        c[0] = 1.0;
        for (std::size_t j = 1; j < c.size(); ++j) c[j] = uniform(rng, -1.0, 4.0);
        const RhVerdict want = companion_verdict(c, 1e-8);
        if (want == RhVerdict::unstable) ++unstable;
        if (routh_hurwitz(c) != want) {
            ++disagreements;
            ADD_FAILURE() << "instance " << k;
        }
    }
    EXPECT_EQ(disagreements, 0);
    EXPECT_GT(unstable, 1000);
    EXPECT_LT(unstable, 9000);
}

TEST(Scalarize, Examples) {
    const double h = std::sqrt(3.0) / 2.0;
    const auto cube = MatrixPolynomial({scalar(1.0), scalar(0.0), scalar(0.0), scalar(1.0)});
    EXPECT_TRUE(same_multiset(scalarized_roots(cube), {-1.0, Complex(0.5, h), Complex(0.5, -h)}, 1e-10));

    const auto d = MatrixPolynomial({diag({1.0, 2.0}), diag({1.0, 1.0})});
    EXPECT_TRUE(same_multiset(scalarized_roots(d), {-1.0, -2.0}, 1e-10));

    const auto singular = MatrixPolynomial({diag({1.0, 0.0}), diag({1.0, 0.0})});
    EXPECT_THROW(scalarized_roots(singular), PreconditionError);
}

TEST(Scalarize, RankDeficientLeadDropsTheDegree) {
    // det(diag(lambda + 1, 2)) has one root.
    const auto p = MatrixPolynomial({diag({1.0, 2.0}), diag({1.0, 0.0})});
    EXPECT_TRUE(same_multiset(scalarized_roots(p), {-1.0}, 1e-10));
}

TEST(NamedExamples, ConjectureTranscription) {
    const PoshPencil p0 = conjecture(0.0);
    EXPECT_TRUE(has_eigenvalue(p0.pencil(), -0.1, 1e-6));
    EXPECT_LE(max_abs(p0.r1()), 0.0);
    EXPECT_LE(max_abs(p0.r2()), 0.0);

    const PoshPencil p = conjecture(1.0);
    ComplexMatrix r2 = ComplexMatrix::Ones(4, 4);
    r2.diagonal().setConstant(5.0);
    EXPECT_LE(max_abs(p.r2() - r2), 0.0);
    EXPECT_LE(max_abs(p.r1() - ComplexMatrix::Ones(4, 4)), 0.0);

    const ComplexMatrix j1 = dense({{0, 0, 1, 0}, {0, 0, 0, 1}, {-1, 0, 0, 0}, {0, -1, 0, 0}});
    const ComplexMatrix j2 = dense({{0, 0, 0.1, -1}, {0, 0, 0, 0.1}, {-0.1, 0, 0, 0}, {1, -0.1, 0, 0}});
    EXPECT_LE(max_abs(p.j1() - j1), 0.0);
    EXPECT_LE(max_abs(p.j2() - j2), 0.0);
    EXPECT_THROW(conjecture(-0.5), PreconditionError);
}

TEST(NamedExamples, ConjectureIsPoshAndLeavesTheLeftHalfPlane) {
    bool rhp = false;
    for (int k = 0; k <= 60; ++k) {
        const double t = 0.05 * k;
        const PoshPencil p = conjecture(t);
        EXPECT_NO_THROW(validate_posh(p.pencil()));
        if (t > 0.0) {
            EXPECT_GT(lambda_min(p.r2()), 0.0);
        }
        for (Complex z : finite_eigenvalues(p.pencil())) rhp = rhp || z.real() > 1e-8;
    }
    EXPECT_TRUE(rhp);
}

TEST(NamedExamples, NamedEigenvalues) {
    const double h = std::sqrt(3.0) / 2.0;
    EXPECT_TRUE(same_multiset(finite_eigenvalues(ex_unstable().pencil()), {-1.0, Complex(0.5, h), Complex(0.5, -h)},
                              1e-10));
    EXPECT_TRUE(has_eigenvalue(ex_jja(-0.3, 0.7).pencil(), Complex(-0.3, 0.7), 1e-12));
    EXPECT_TRUE(has_eigenvalue(ex_jja(0.4, 0.0).pencil(), 0.4, 1e-12));
    // The printed matrices give det = beta^2 + (lambda + alpha)^2.
    EXPECT_TRUE(same_multiset(finite_eigenvalues(ex_jjb(-0.2, 1.5).pencil()), {Complex(0.2, 1.5), Complex(0.2, -1.5)},
                              1e-10));
    EXPECT_THROW(ex_jjb(0.0, -1.0), PreconditionError);
}

TEST(NamedExamples, DispatchByName) {
    EXPECT_LE(max_abs(paper_example("ex_unstable").j1() - ex_unstable().j1()), 0.0);
    EXPECT_LE(max_abs(paper_example("ex_jjb", {0.5, 1.0}).j2() - ex_jjb(0.5, 1.0).j2()), 0.0);
    EXPECT_LE(max_abs(paper_example("conjecture", {2.0}).r2() - conjecture(2.0).r2()), 0.0);
    EXPECT_EQ(paper_example("mgt", {2.0, 2.0, 1.0, 2.0}).size(), 6);
    EXPECT_THROW(paper_example("ex_jja", {1.0}), PreconditionError);
    EXPECT_THROW(paper_example("nonexistent"), PreconditionError);
}

TEST(NamedExamples, BrakeLayout) {
    const ComplexMatrix m = diag({2.0}), d = diag({0.5}), g = scalar(I), k = diag({3.0}), n = scalar(0.25 * I);
    const PoshPencil b = brake(m, d, g, k, n);
    const Pencil expect = Pencil::plus(dense({{2.0, 0.0}, {0.0, 3.0 - 0.25 * I}}),
                                       dense({{0.5 + I, 3.0 + 0.25 * I}, {-3.0 + 0.25 * I, 0.0}}));
    EXPECT_LE(max_abs(b.pencil().lead() - expect.lead()), 1e-15);
    EXPECT_LE(max_abs(b.pencil().constant() - expect.constant()), 1e-15);
    EXPECT_THROW(brake(m, d, g, k, ComplexMatrix::Zero(2, 2)), DimensionError);
}

TEST(Generators, Contracts) {
    for (int k = 0; k < 20; ++k) {
        Rng rng = make_stream(73, static_cast<std::uint64_t>(k));
        const PoshPencil pp = random_posh(rng, 1 + k % 5, {k % 2 == 0, 1, -1});
        EXPECT_NO_THROW(validate_posh(pp.pencil()));
        EXPECT_LE(numerical_rank(pp.r1(), 1e-10), 1);
        if (k % 2 == 0) {
            EXPECT_LE(max_abs(pp.j1().imag()), 0.0);
        }

        const double lambda0 = uniform(rng, 0.2, 5.0);
        const PoshPencil pos = random_posh_with_positive_eigenvalue(rng, 2 + k % 4, lambda0, k % 2 == 0);
        EXPECT_TRUE(has_eigenvalue(pos.pencil(), lambda0, 1e-8 * (1.0 + lambda0))) << "instance " << k;

        const auto sing = random_singular_posh(rng, 8);
        const auto ks = kronecker_structure(sing.pencil.pencil());
        EXPECT_EQ(ks.right_minimal_indices, sing.minimal_indices) << "instance " << k;
        EXPECT_EQ(ks.left_minimal_indices, sing.minimal_indices) << "instance " << k;

        const int kappa = 1 + k % 4;
        const auto chain = random_skew_chain_posh(rng, kappa, 10);
        EXPECT_EQ(structural_index(Pencil::plus(chain.pencil.j1(), chain.pencil.j2())), kappa) << "instance " << k;
    }
}

TEST(Generators, CongruenceAndDirectSum) {
    Rng rng = make_stream(74, 0);
    const PoshPencil a = random_posh(rng, 3), b = ex_unstable();
    const ComplexMatrix u = random_unitary(rng, 3);
    const PoshPencil c = congruence(a, u);
    EXPECT_LE(max_abs(c.r2() - u.adjoint() * a.r2() * u), 1e-14);
    const PoshPencil s = direct_sum({a, b});
    EXPECT_EQ(s.size(), 6);
    EXPECT_LE(max_abs(s.j1().topRightCorner(3, 3)), 0.0);
    EXPECT_LE(max_abs(s.j2().bottomRightCorner(3, 3) - b.j2()), 0.0);
}
