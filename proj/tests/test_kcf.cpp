#include <gtest/gtest.h>

#include <numeric>

#include "pencil_lab/kcf.hpp"
#include "pencil_lab/oracles.hpp"
#include "pencil_lab/random.hpp"
#include "test_util.hpp"

using namespace pencil_lab;
using namespace pencil_lab::test;

namespace {

ComplexMatrix jordan_zero(Eigen::Index n) {
    ComplexMatrix j = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k + 1 < n; ++k) j(k, k + 1) = 1.0;
    return j;
}

std::vector<int> multiplicities_at(const KroneckerStructure& ks, Complex z) {
    for (const auto& f : ks.finite_eigenstructure) {
        if (std::abs(f.value - z) < 1e-6) return f.partial_multiplicities;
    }
    return {};
}

}  // namespace

TEST(Kcf, ZeroPencil) {
    const auto ks = kronecker_structure(Pencil::minus(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2)));
    EXPECT_EQ(ks.right_minimal_indices, (std::vector<int>{0, 0}));
    EXPECT_EQ(ks.left_minimal_indices, (std::vector<int>{0, 0}));
    EXPECT_TRUE(ks.finite_eigenstructure.empty());
    EXPECT_FALSE(ks.regular);
}

TEST(Kcf, JordanBlockAtZero) {
    const auto ks = kronecker_structure(Pencil::minus(ComplexMatrix::Identity(2, 2), jordan_zero(2)));
    EXPECT_TRUE(ks.regular);
    ASSERT_EQ(ks.finite_eigenstructure.size(), 1u);
    EXPECT_LT(std::abs(ks.finite_eigenstructure[0].value), 1e-12);
    EXPECT_EQ(ks.finite_eigenstructure[0].partial_multiplicities, (std::vector<int>{2}));
    EXPECT_EQ(ks.index, 0);
}

TEST(Kcf, SkewChainExamplesHaveIndexThreeAndFour) {
    EXPECT_EQ(kronecker_structure(chain3().pencil()).index, 3);
    EXPECT_EQ(structural_index(chain4().pencil()), 4);
}

TEST(Kcf, StructuralIndexOfSimpleBlocks) {
    EXPECT_EQ(structural_index(Pencil::minus(ComplexMatrix::Identity(3, 3), diag({1.0, 2.0, 3.0}))), 0);
    EXPECT_EQ(structural_index(Pencil::minus(jordan_zero(2), ComplexMatrix::Identity(2, 2))), 2);
}

TEST(Kcf, SingularBlockAndTranspose) {
    const auto [e, a] = canonical_block(BlockSpec::right(1));
    ASSERT_EQ(e.rows(), 1);
    ASSERT_EQ(e.cols(), 2);
    const auto ks = kronecker_structure(Pencil::minus(e, a));
    EXPECT_EQ(ks.right_minimal_indices, (std::vector<int>{1}));
    EXPECT_TRUE(ks.left_minimal_indices.empty());
    const auto kt = kronecker_structure(Pencil::minus(e.transpose(), a.transpose()));
    EXPECT_TRUE(kt.right_minimal_indices.empty());
    EXPECT_EQ(kt.left_minimal_indices, (std::vector<int>{1}));
    const auto ml = minimal_index_lists(Pencil::minus(e, a));
    EXPECT_EQ(ml.right, (std::vector<int>{1}));
}

TEST(Kcf, PoshWithCommonKernelVectorHasEqualZeroIndices) {
    Rng rng = make_stream(21, 0);
    const PoshPencil base = random_posh(rng, 3);
    const PoshPencil pp = congruence(direct_sum({base, PoshPencil(scalar(0.0), scalar(0.0), scalar(0.0), scalar(0.0))}),
                                     random_unitary(rng, 4));
    const auto ks = kronecker_structure(pp.pencil());
    EXPECT_EQ(ks.right_minimal_indices, (std::vector<int>{0}));
    EXPECT_EQ(ks.left_minimal_indices, (std::vector<int>{0}));
}

TEST(Kcf, DecideRankFlagsNarrowGaps) {
    const RankDecision d = decide_rank(diag({1.0, 1e-13, 1e-15}), 1e-14);
    EXPECT_EQ(d.rank, 2u);
    EXPECT_TRUE(std::is_sorted(d.singular_values.rbegin(), d.singular_values.rend()));
    EXPECT_TRUE(d.ambiguous(1e3));
    const RankDecision clear = decide_rank(diag({1.0, 1.0, 1e-17}), 1e-14);
    EXPECT_EQ(clear.rank, 2u);
    EXPECT_FALSE(clear.ambiguous(1e3));
}

TEST(Kcf, AmbiguityIsReported) {
    RankPolicy p;
    p.gap_threshold = 1e300;
    EXPECT_THROW(kronecker_structure(ex_unstable().pencil(), p), NumericalAmbiguity);
}

TEST(Kcf, ConjectureAtZeroHasTwoSizeTwoBlocks) {
    const auto ks = kronecker_structure(conjecture(0.0).pencil());
    EXPECT_EQ(multiplicities_at(ks, -0.1), (std::vector<int>{2, 2}));
}

class AssembledPencils : public ::testing::TestWithParam<int> {};

// Dimension accounting, regularity and index agree with the block data; the
// oracle recovers the exact block data.
TEST_P(AssembledPencils, StructureMatchesAssembly) {
    Rng rng = make_stream(22, static_cast<std::uint64_t>(GetParam()));
    const auto ap = assemble_pencil(random_block_specs(rng, 10), 100.0, 2200 + static_cast<std::uint64_t>(GetParam()));
    const auto ks = kronecker_structure(ap.pencil);
    ASSERT_TRUE(same_structure(ks, ap.truth));

    auto sum = [](const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); };
    int jordan = 0;
    for (const auto& f : ks.finite_eigenstructure) jordan += sum(f.partial_multiplicities);
    const int p = static_cast<int>(ks.right_minimal_indices.size());
    const int q = static_cast<int>(ks.left_minimal_indices.size());
    const int eps = sum(ks.right_minimal_indices), eta = sum(ks.left_minimal_indices);
    const int inf = sum(ks.infinite_block_sizes);
    EXPECT_EQ(eps + eta + q + jordan + inf, ap.pencil.rows());
    EXPECT_EQ(eps + p + eta + jordan + inf, ap.pencil.cols());

    EXPECT_EQ(ks.regular, p == 0 && q == 0 && ap.pencil.rows() == ap.pencil.cols());
    const int max_inf = ks.infinite_block_sizes.empty() ? 0 : ks.infinite_block_sizes.back();
    EXPECT_EQ(ks.index, max_inf);
    if (ap.pencil.square()) {
        EXPECT_EQ(ks.regular, is_regular_probe(ap.pencil));
    }
}

// Infinite blocks of p are the Jordan blocks at 0 of its reversal and vice versa.
TEST_P(AssembledPencils, ReversalDuality) {
    Rng rng = make_stream(23, static_cast<std::uint64_t>(GetParam()));
    const auto ap = assemble_pencil(random_block_specs(rng, 10), 100.0, 2300 + static_cast<std::uint64_t>(GetParam()));
    const auto ks = kronecker_structure(ap.pencil);
    const auto kr = kronecker_structure(reversal(ap.pencil));
    EXPECT_EQ(ks.infinite_block_sizes, multiplicities_at(kr, 0.0));
    EXPECT_EQ(kr.infinite_block_sizes, multiplicities_at(ks, 0.0));
    EXPECT_EQ(ks.right_minimal_indices, kr.right_minimal_indices);
    EXPECT_EQ(ks.left_minimal_indices, kr.left_minimal_indices);
}

INSTANTIATE_TEST_SUITE_P(Random, AssembledPencils, ::testing::Range(0, 150));

TEST(Kcf, SingularPoshMinimalIndexListsCoincide) {
    for (int k = 0; k < 100; ++k) {
        Rng rng = make_stream(24, static_cast<std::uint64_t>(k));
        const auto inst = random_singular_posh(rng);
        const auto ks = kronecker_structure(inst.pencil.pencil());
        EXPECT_EQ(ks.right_minimal_indices, ks.left_minimal_indices) << "instance " << k;
        EXPECT_EQ(ks.right_minimal_indices, inst.minimal_indices) << "instance " << k;
    }
}
