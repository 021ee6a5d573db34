#include <gtest/gtest.h>

#include "pencil_lab/dh.hpp"
#include "pencil_lab/kcf.hpp"
#include "pencil_lab/oracles.hpp"
#include "pencil_lab/random.hpp"
#include "test_util.hpp"

using namespace pencil_lab;
using namespace pencil_lab::test;

namespace {

const Complex I(0.0, 1.0);

bool has(const DhVerdict& v, DhCondition c) {
    return std::find(v.violated_conditions.begin(), v.violated_conditions.end(), c) != v.violated_conditions.end();
}

}  // namespace

TEST(DhCheck, StableScalarHoldsForBothVariants) {
    const auto ks = kronecker_structure(Pencil::minus(scalar(1.0), scalar(-1.0)));
    EXPECT_TRUE(check_dh_equivalence(ks, DhVariant::general_q).holds);
    EXPECT_TRUE(check_dh_equivalence(ks, DhVariant::q_identity).holds);
}

TEST(DhCheck, UnstableScalarFailsSpectrum) {
    const auto v = check_dh_equivalence(kronecker_structure(Pencil::minus(scalar(1.0), scalar(1.0))), DhVariant::general_q);
    EXPECT_FALSE(v.holds);
    EXPECT_TRUE(has(v, DhCondition::spectrum_lhp));
    ASSERT_TRUE(v.witness.has_value());
}

TEST(DhCheck, JordanBlockAtZeroOnlyAdmittedWithGeneralQ) {
    const auto ks = structure_of_blocks({BlockSpec::jordan(0.0, 2)});
    EXPECT_TRUE(check_dh_equivalence(ks, DhVariant::general_q).holds);
    const auto v = check_dh_equivalence(ks, DhVariant::q_identity);
    EXPECT_FALSE(v.holds);
    EXPECT_TRUE(has(v, DhCondition::imaginary_semisimple));
}

TEST(DhCheck, IndexAndMinimalIndexConditions) {
    EXPECT_TRUE(has(check_dh_equivalence(structure_of_blocks({BlockSpec::infinite(3)}), DhVariant::general_q),
                    DhCondition::index_bound));
    EXPECT_TRUE(has(check_dh_equivalence(structure_of_blocks({BlockSpec::right(2), BlockSpec::left(0)}),
                                         DhVariant::general_q),
                    DhCondition::minimal_indices));
    EXPECT_TRUE(has(check_dh_equivalence(structure_of_blocks({BlockSpec::right(1), BlockSpec::left(0)}),
                                         DhVariant::q_identity),
                    DhCondition::minimal_indices));
    EXPECT_TRUE(has(check_dh_equivalence(structure_of_blocks({BlockSpec::right(0)}), DhVariant::general_q),
                    DhCondition::minimal_indices));
    EXPECT_TRUE(has(check_dh_equivalence(structure_of_blocks({BlockSpec::jordan(0.0, 3)}), DhVariant::general_q),
                    DhCondition::zero_multiplicity));
    EXPECT_TRUE(has(check_dh_equivalence(structure_of_blocks({BlockSpec::jordan(2.0 * I, 2)}), DhVariant::general_q),
                    DhCondition::imaginary_semisimple));
}

TEST(DhRealize, ComplexJordanScalar) {
    const double a = -0.7, b = 1.3;
    const DhPencil p = realize_dh(structure_of_blocks({BlockSpec::jordan(Complex(a, b), 1)}), DhVariant::q_identity);
    EXPECT_EQ(p.e, scalar(1.0));
    EXPECT_EQ(p.q, scalar(1.0));
    EXPECT_EQ(p.j, scalar(Complex(0.0, b)));
    EXPECT_EQ(p.r, scalar(-a));
}

TEST(DhRealize, ImaginaryScalar) {
    const DhPencil p = realize_dh(structure_of_blocks({BlockSpec::jordan(Complex(0.0, 2.5), 1)}), DhVariant::q_identity);
    EXPECT_EQ(p.e, scalar(1.0));
    EXPECT_EQ(p.j, scalar(Complex(0.0, 2.5)));
    EXPECT_EQ(p.r, scalar(0.0));
    EXPECT_EQ(p.q, scalar(1.0));
}

TEST(DhRealize, MinimalIndexPairZeroOne) {
    const DhPencil p = realize_dh(structure_of_blocks({BlockSpec::right(1), BlockSpec::left(0)}), DhVariant::general_q);
    EXPECT_EQ(p.e, diag({1.0, 0.0}));
    EXPECT_EQ(p.r, ComplexMatrix(ComplexMatrix::Zero(2, 2)));
    EXPECT_EQ(p.j, skew2());
    EXPECT_EQ(p.q, diag({0.0, 1.0}));
}

TEST(DhRealize, RefusesInadmissibleStructure) {
    EXPECT_THROW(realize_dh(structure_of_blocks({BlockSpec::jordan(1.0, 1)}), DhVariant::general_q), PreconditionError);
}

TEST(DhRealize, BlockOrderIsLhpAxisInfiniteSingular) {
    const auto ks = structure_of_blocks({BlockSpec::right(0), BlockSpec::left(0), BlockSpec::infinite(1),
                                         BlockSpec::jordan(Complex(0.0, 3.0), 1), BlockSpec::jordan(-2.0, 1)});
    const DhPencil p = realize_dh(ks, DhVariant::q_identity);
    ASSERT_EQ(p.e.rows(), 4);
    EXPECT_EQ(p.r(0, 0), Complex(2.0));            // lambda + 2
    EXPECT_EQ(p.j(1, 1), Complex(0.0, 3.0));       // lambda - 3i
    EXPECT_EQ(p.e(2, 2), Complex(0.0));            // infinite
    EXPECT_EQ(p.r(2, 2), Complex(1.0));
    EXPECT_EQ(p.e(3, 3), Complex(0.0));            // singular pair
    EXPECT_EQ(p.r(3, 3), Complex(0.0));
}

TEST(DhRealize, SelfConjugateStructureGivesRealMatrices) {
    const auto ks = structure_of_blocks({BlockSpec::jordan(Complex(-1.0, 2.0), 2), BlockSpec::jordan(Complex(-1.0, -2.0), 2),
                                         BlockSpec::jordan(Complex(0.0, 1.5), 1), BlockSpec::jordan(Complex(0.0, -1.5), 1),
                                         BlockSpec::jordan(-0.5, 1)});
    ASSERT_TRUE(is_self_conjugate(ks));
    const DhPencil p = realize_dh(ks, DhVariant::q_identity);
    for (const ComplexMatrix* m : {&p.e, &p.j, &p.r, &p.q}) EXPECT_EQ(m->imag().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_TRUE(validate_dh(p).ok);
    EXPECT_TRUE(same_structure(kronecker_structure(p.pencil()), ks));
}

TEST(DhRealize, SubcaseOneJordanDissipationIsPositiveDefinite) {
    for (double alpha : {-0.1, -1.0, -10.0}) {
        for (int n = 1; n <= 12; ++n) {
            for (double beta : {0.0, 0.8}) {
                const auto [j, r] = jordan_dh_block(Complex(alpha, beta), n);
                EXPECT_TRUE((j + j.adjoint()).isZero(0.0));
                EXPECT_GT(lambda_min(r), 0.0) << "alpha " << alpha << " n " << n;
            }
            if (n <= 6) {
                const auto [j, r] = real_jordan_dh_block(alpha, 0.8, n);
                EXPECT_GT(lambda_min(r), 0.0) << "real block alpha " << alpha << " n " << n;
            }
        }
    }
}

TEST(DhCheck, QIdentityImpliesGeneralQ) {
    int q_identity = 0;
    for (int k = 0; k < 400; ++k) {
        Rng rng = make_stream(31, static_cast<std::uint64_t>(k));
        const auto ks = k % 2 ? structure_of_blocks(random_block_specs(rng, 8))
                              : random_admissible_structure(rng, DhVariant::q_identity, 8, k % 4 == 0);
        if (check_dh_equivalence(ks, DhVariant::q_identity).holds) {
            ++q_identity;
            EXPECT_TRUE(check_dh_equivalence(ks, DhVariant::general_q).holds) << "instance " << k;
        }
    }
    EXPECT_GT(q_identity, 150);
}

TEST(DhRealize, RoundTripOnRandomAdmissibleStructures) {
    for (int k = 0; k < 200; ++k) {
        Rng rng = make_stream(32, static_cast<std::uint64_t>(k));
        const DhVariant v = k % 2 ? DhVariant::general_q : DhVariant::q_identity;
        const auto ks = random_admissible_structure(rng, v, 8, k % 3 == 0);
        ASSERT_TRUE(check_dh_equivalence(ks, v).holds);
        const DhPencil p = realize_dh(ks, v);
        const auto val = validate_dh(p);
        EXPECT_TRUE(val.ok) << "instance " << k;
        EXPECT_TRUE((p.j + p.j.adjoint()).isZero(0.0));
        EXPECT_GE(lambda_min(p.r), -1e-10 * std::max(1.0, spectral_norm(p.r)));
        EXPECT_TRUE(same_structure(kronecker_structure(p.pencil()), ks)) << "instance " << k;
    }
}
