#include "pencil_lab/kcf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pencil_lab {

namespace {

std::vector<double> to_std(const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

RankDecision decide_from(const RealVector& s, double tol) {
    RankDecision d;
    d.singular_values = to_std(s);
    d.tolerance_used = tol;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol) ++d.rank;
    }
    d.gap_ratio = std::numeric_limits<double>::infinity();
    const std::size_t k = d.singular_values.size();
    if (d.rank > 0 && d.rank < k) {
        const double below = d.singular_values[d.rank];
        if (below > 0.0) d.gap_ratio = d.singular_values[d.rank - 1] / below;
    }
    return d;
}

void require_clear(const RankDecision& d, double threshold, const char* where) {
    if (!d.ambiguous(threshold)) return;
    std::ostringstream os;
    os << where << ": ambiguous rank decision, sigma_" << d.rank << "/sigma_" << d.rank + 1 << " = " << d.gap_ratio
       << " below gap threshold " << threshold << " (tolerance " << d.tolerance_used << ")";
    throw NumericalAmbiguity(os.str(), d.singular_values, d.tolerance_used);
}

[[noreturn]] void inconsistent(const std::string& what, double tol) { throw NumericalAmbiguity(what, {}, tol); }

double relative_tolerance(Eigen::Index rows, Eigen::Index cols, double norm, const RankPolicy& policy) {
    if (policy.absolute_tolerance) return *policy.absolute_tolerance;
    return static_cast<double>(std::max(rows, cols)) * norm * kEps * policy.safety;
}

}  // namespace

RankDecision decide_rank(const ComplexMatrix& m, double tol) {
    if (m.rows() == 0 || m.cols() == 0) {
        RankDecision d;
        d.tolerance_used = tol;
        d.gap_ratio = std::numeric_limits<double>::infinity();
        return d;
    }
    return decide_from(singular_values(m), tol);
}

int KroneckerStructure::finite_degree() const {
    int s = 0;
    for (const auto& f : finite_eigenstructure) {
        for (int r : f.partial_multiplicities) s += r;
    }
    return s;
}

// Each sweep: V0 spans ker E, n_i = rank(A V0); rotate rows so A V0 is compressed
// to its top n_i rows, then drop those rows and the V0 columns.
// m_i - n_i blocks L_{i-1}; n_i - m_{i+1} blocks N_i.
StaircaseCounts staircase_at_infinity(ComplexMatrix e, ComplexMatrix a, double tol_e, double tol_a,
                                      double gap_threshold) {
    std::vector<int> m, n;
    // First-order error growth: against the input-level perturbation, a basis
    // computed across a gap sigma is off by tol / sigma, which enters the deflated
    // blocks times their norms. Contributions add up step by step.
    const double tol_e0 = tol_e, tol_a0 = tol_a;
    while (e.cols() > 0) {
        const Eigen::Index r = e.rows();
        const Eigen::Index c = e.cols();
        ComplexMatrix v;
        std::size_t rank_e = 0;
        double norm_e = 0.0, theta = 0.0;
        if (r == 0) {
            v = ComplexMatrix::Identity(c, c);
        } else {
            Eigen::JacobiSVD<ComplexMatrix> svd(e, Eigen::ComputeFullV);
            const RankDecision d = decide_from(svd.singularValues(), tol_e);
            require_clear(d, gap_threshold, "staircase (lead)");
            rank_e = d.rank;
            v = svd.matrixV();
            norm_e = svd.singularValues()(0);
            if (rank_e > 0) theta += tol_e0 / svd.singularValues()(static_cast<Eigen::Index>(rank_e) - 1);
        }
        const Eigen::Index mi = c - static_cast<Eigen::Index>(rank_e);
        if (mi == 0) break;
        const ComplexMatrix v1 = v.leftCols(static_cast<Eigen::Index>(rank_e));
        const ComplexMatrix av0 = a * v.rightCols(mi);

        Eigen::Index ni = 0;
        ComplexMatrix u = ComplexMatrix::Identity(r, r);
        if (r > 0) {
            Eigen::JacobiSVD<ComplexMatrix> svd(av0, Eigen::ComputeFullU);
            const RankDecision d = decide_from(svd.singularValues(), tol_a);
            require_clear(d, gap_threshold, "staircase (constant)");
            ni = static_cast<Eigen::Index>(d.rank);
            u = svd.matrixU();
            if (ni > 0) theta += tol_a0 / svd.singularValues()(ni - 1);
        }
        const double norm_a = r > 0 && c > 0 ? spectral_norm(a) : 0.0;
        tol_e += norm_e * theta;
        tol_a += norm_a * theta;
        m.push_back(static_cast<int>(mi));
        n.push_back(static_cast<int>(ni));

        const ComplexMatrix ue = u.adjoint() * e * v1;
        const ComplexMatrix ua = u.adjoint() * a * v1;
        e = ue.bottomRows(r - ni);
        a = ua.bottomRows(r - ni);
    }

    StaircaseCounts out;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const int right = m[k] - n[k];
        const int next = k + 1 < m.size() ? m[k + 1] : 0;
        const int inf = n[k] - next;
        if (right < 0 || inf < 0) inconsistent("staircase: nonmonotone rank profile", tol_e);
        out.right_indices.insert(out.right_indices.end(), right, static_cast<int>(k));
        out.infinite_sizes.insert(out.infinite_sizes.end(), inf, static_cast<int>(k + 1));
    }
    out.e_rest = std::move(e);
    out.a_rest = std::move(a);
    out.tol_e = tol_e;
    out.tol_a = tol_a;
    return out;
}

namespace {

// Partial multiplicities of lambda0 for the regular pencil lambda E - A: the
// infinite structure of the reversed shifted pencil lambda (A - lambda0 E) - E.
std::vector<int> partial_multiplicities_at(const ComplexMatrix& e, const ComplexMatrix& a, Complex lambda0,
                                           double norm_e, double norm_a, Eigen::Index dim, const RankPolicy& policy,
                                           double inherited_e, double inherited_a) {
    const ComplexMatrix lead = a - lambda0 * e;
    const double tol_lead = std::max(relative_tolerance(dim, dim, norm_a + std::abs(lambda0) * norm_e, policy),
                                     inherited_a + std::abs(lambda0) * inherited_e);
    const double tol_const = std::max(relative_tolerance(dim, dim, norm_e, policy), inherited_e);
    const StaircaseCounts s = staircase_at_infinity(lead, e, tol_lead, tol_const, policy.gap_threshold);
    if (!s.right_indices.empty()) inconsistent("finite structure: shifted regular part reported singular", tol_lead);
    return s.infinite_sizes;
}

struct Cluster {
    std::vector<Complex> members;
    Complex mean;
};

std::vector<Cluster> cluster_eigenvalues(const std::vector<Complex>& values, double radius) {
    // Single linkage with per-pair radius * (1 + max |lambda|).
    const std::size_t k = values.size();
    std::vector<int> label(k, -1);
    int next = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (label[i] >= 0) continue;
        label[i] = next;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const std::size_t j = stack.back();
            stack.pop_back();
            for (std::size_t l = 0; l < k; ++l) {
                if (label[l] >= 0) continue;
                const double scale = 1.0 + std::max(std::abs(values[j]), std::abs(values[l]));
                if (std::abs(values[j] - values[l]) <= radius * scale) {
                    label[l] = next;
                    stack.push_back(l);
                }
            }
        }
        ++next;
    }
    std::vector<Cluster> out(next);
    for (std::size_t i = 0; i < k; ++i) out[label[i]].members.push_back(values[i]);
    for (auto& c : out) {
        Complex s(0.0);
        for (const auto& z : c.members) s += z;
        c.mean = s / static_cast<double>(c.members.size());
    }
    return out;
}

}  // namespace

KroneckerStructure kronecker_structure(const Pencil& p, const RankPolicy& policy) {
    const Pencil mp = p.to_minus();
    const Eigen::Index rows = mp.rows();
    const Eigen::Index cols = mp.cols();
    if (static_cast<std::size_t>(std::max(rows, cols)) > policy.size_cap) {
        throw PreconditionError("kronecker_structure: pencil exceeds the configured size cap");
    }
    const double norm_e = spectral_norm(mp.lead());
    const double norm_a = spectral_norm(mp.constant());
    const double tol_e = relative_tolerance(rows, cols, norm_e, policy);
    const double tol_a = relative_tolerance(rows, cols, norm_a, policy);

    KroneckerStructure ks;
    ks.rows = rows;
    ks.cols = cols;
    ks.lead_tolerance = tol_e;
    ks.constant_tolerance = tol_a;

    StaircaseCounts right = staircase_at_infinity(mp.lead(), mp.constant(), tol_e, tol_a, policy.gap_threshold);
    ks.right_minimal_indices = right.right_indices;
    ks.infinite_block_sizes = right.infinite_sizes;

    // Left structure: right structure of the adjoint of what remains.
    StaircaseCounts left = staircase_at_infinity(right.e_rest.adjoint(), right.a_rest.adjoint(), right.tol_e,
                                                 right.tol_a, policy.gap_threshold);
    if (!left.infinite_sizes.empty()) inconsistent("kronecker_structure: infinite blocks left after first sweep", tol_e);
    ks.left_minimal_indices = left.right_indices;

    const ComplexMatrix e_reg = left.e_rest.adjoint();
    const ComplexMatrix a_reg = left.a_rest.adjoint();
    if (e_reg.rows() != e_reg.cols()) inconsistent("kronecker_structure: regular part is not square", tol_e);

    // Dimension accounting, rows and columns separately.
    Eigen::Index acc_rows = e_reg.rows(), acc_cols = e_reg.cols();
    for (int eps : ks.right_minimal_indices) acc_rows += eps, acc_cols += eps + 1;
    for (int eta : ks.left_minimal_indices) acc_rows += eta + 1, acc_cols += eta;
    for (int s : ks.infinite_block_sizes) acc_rows += s, acc_cols += s;
    if (acc_rows != rows || acc_cols != cols) inconsistent("kronecker_structure: block sizes do not add up", tol_e);

    const Eigen::Index k = e_reg.rows();
    if (k > 0) {
        std::vector<Complex> values;
        for (const auto& [alpha, beta] : qz_pairs(e_reg, a_reg)) {
            if (beta == Complex(0.0)) inconsistent("kronecker_structure: regular part has an infinite eigenvalue", tol_e);
            values.push_back(alpha / beta);
        }
        // QZ scatters a size-k Jordan block by about eps^(1/k). Try radii from coarse
        // to fine and keep the first clustering whose multiplicities account for
        // exactly its members: a split Jordan block passes that test member by member,
        // while merging distinct eigenvalues fails it at the cluster mean.
        bool accepted = false;
        for (double radius = 1e-1; radius >= 1e-6 * 0.9999 && !accepted; radius /= 10.0) {
            std::vector<FiniteEigenstructure> fin;
            bool ok = true;
            for (const Cluster& c : cluster_eigenvalues(values, radius)) {
                std::vector<int> pm;
                try {
                    pm = partial_multiplicities_at(e_reg, a_reg, c.mean, norm_e, norm_a, std::max(rows, cols), policy,
                                                   left.tol_e, left.tol_a);
                } catch (const NumericalAmbiguity&) {
                    ok = false;
                    break;
                }
                int total = 0;
                for (int r : pm) total += r;
                if (total != static_cast<int>(c.members.size())) {
                    ok = false;
                    break;
                }
                fin.push_back(FiniteEigenstructure{c.mean, pm});
            }
            if (ok) {
                accepted = true;
                ks.cluster_radius = radius;
                ks.finite_eigenstructure = std::move(fin);
            }
        }
        if (!accepted) inconsistent("kronecker_structure: no clustering radius gives consistent multiplicities", tol_e);
    }

    std::sort(ks.right_minimal_indices.begin(), ks.right_minimal_indices.end());
    std::sort(ks.left_minimal_indices.begin(), ks.left_minimal_indices.end());
    std::sort(ks.infinite_block_sizes.begin(), ks.infinite_block_sizes.end());
    for (auto& f : ks.finite_eigenstructure) std::sort(f.partial_multiplicities.begin(), f.partial_multiplicities.end());
    std::sort(ks.finite_eigenstructure.begin(), ks.finite_eigenstructure.end(), [](const auto& x, const auto& y) {
        if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
        return x.value.imag() < y.value.imag();
    });
    ks.index = ks.infinite_block_sizes.empty() ? 0 : ks.infinite_block_sizes.back();
    ks.regular = rows == cols && ks.right_minimal_indices.empty() && ks.left_minimal_indices.empty();
    return ks;
}

int structural_index(const Pencil& p, const RankPolicy& policy) { return kronecker_structure(p, policy).index; }

MinimalIndices minimal_index_lists(const Pencil& p, const RankPolicy& policy) {
    const KroneckerStructure ks = kronecker_structure(p, policy);
    return MinimalIndices{ks.right_minimal_indices, ks.left_minimal_indices};
}

bool same_structure(const KroneckerStructure& a, const KroneckerStructure& b, double eig_tol) {
    if (a.right_minimal_indices != b.right_minimal_indices) return false;
    if (a.left_minimal_indices != b.left_minimal_indices) return false;
    if (a.infinite_block_sizes != b.infinite_block_sizes) return false;
    if (a.finite_eigenstructure.size() != b.finite_eigenstructure.size()) return false;
    // Greedy nearest matching; eigenvalue order can differ when real parts tie.
    std::vector<bool> used(b.finite_eigenstructure.size(), false);
    for (const auto& fa : a.finite_eigenstructure) {
        std::size_t best = b.finite_eigenstructure.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.finite_eigenstructure.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(fa.value - b.finite_eigenstructure[j].value);
            if (d < best_d) best_d = d, best = j;
        }
        if (best == b.finite_eigenstructure.size()) return false;
        if (best_d > eig_tol * (1.0 + std::abs(fa.value))) return false;
        if (fa.partial_multiplicities != b.finite_eigenstructure[best].partial_multiplicities) return false;
        used[best] = true;
    }
    return true;
}

}  // namespace pencil_lab
