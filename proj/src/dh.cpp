#include "pencil_lab/dh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pencil_lab {

const char* to_string(DhVariant v) {
    return v == DhVariant::general_q ? "general_q" : "q_identity";
}

const char* to_string(DhCondition c) {
    switch (c) {
        case DhCondition::spectrum_lhp: return "spectrum_lhp";
        case DhCondition::imaginary_semisimple: return "imaginary_semisimple";
        case DhCondition::zero_multiplicity: return "zero_multiplicity";
        case DhCondition::index_bound: return "index_bound";
        case DhCondition::minimal_indices: return "minimal_indices";
    }
    return "unknown";
}

namespace {

double axis_tol(Complex z) { return kAxisTolerance * (1.0 + std::abs(z)); }
bool on_axis(Complex z) { return std::abs(z.real()) <= axis_tol(z); }
bool is_zero(Complex z) { return std::abs(z) <= kAxisTolerance; }

std::string fmt(Complex z) {
    std::ostringstream os;
    os.precision(12);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

}  // namespace

DhVerdict check_dh_equivalence(const KroneckerStructure& ks, DhVariant variant) {
    DhVerdict v;
    v.variant = variant;
    auto violate = [&v](DhCondition c, std::string why) {
        if (std::find(v.violated_conditions.begin(), v.violated_conditions.end(), c) == v.violated_conditions.end()) {
            v.violated_conditions.push_back(c);
        }
        if (!v.witness) v.witness = std::move(why);
    };
    for (const auto& f : ks.finite_eigenstructure) {
        const int top = f.partial_multiplicities.empty() ? 0 : f.partial_multiplicities.back();
        if (!on_axis(f.value) && f.value.real() > 0.0) {
            violate(DhCondition::spectrum_lhp, "eigenvalue " + fmt(f.value) + " in the open right half-plane");
        } else if (on_axis(f.value)) {
            if (variant == DhVariant::general_q && is_zero(f.value)) {
                if (top > 2) {
                    violate(DhCondition::zero_multiplicity,
                            "eigenvalue 0 has partial multiplicity " + std::to_string(top) + " > 2");
                }
            } else if (top > 1) {
                violate(DhCondition::imaginary_semisimple,
                        "eigenvalue " + fmt(f.value) + " on the imaginary axis has partial multiplicity " +
                            std::to_string(top));
            }
        }
    }
    if (ks.index > 2) violate(DhCondition::index_bound, "index " + std::to_string(ks.index) + " > 2");
    for (int e : ks.left_minimal_indices) {
        if (e != 0) violate(DhCondition::minimal_indices, "left minimal index " + std::to_string(e) + " != 0");
    }
    const int right_cap = variant == DhVariant::general_q ? 1 : 0;
    for (int e : ks.right_minimal_indices) {
        if (e > right_cap) {
            violate(DhCondition::minimal_indices,
                    "right minimal index " + std::to_string(e) + " > " + std::to_string(right_cap));
        }
    }
    if (ks.left_minimal_indices.size() != ks.right_minimal_indices.size()) {
        violate(DhCondition::minimal_indices, "numbers of left and right minimal indices differ");
    }
    v.holds = v.violated_conditions.empty();
    return v;
}

bool is_self_conjugate(const KroneckerStructure& ks, double tol) {
    for (const auto& f : ks.finite_eigenstructure) {
        if (std::abs(f.value.imag()) <= tol * (1.0 + std::abs(f.value))) continue;
        bool matched = false;
        for (const auto& g : ks.finite_eigenstructure) {
            if (std::abs(g.value - std::conj(f.value)) <= tol * (1.0 + std::abs(f.value)) &&
                g.partial_multiplicities == f.partial_multiplicities) {
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

std::pair<ComplexMatrix, ComplexMatrix> jordan_dh_block(Complex lambda0, int size) {
    const Eigen::Index n = size;
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) m(k, k) = lambda0;
    for (Eigen::Index k = 0; k + 1 < n; ++k) m(k, k + 1) = lambda0.real();
    return {skew_part(m), -hermitian_part(m)};
}

std::pair<ComplexMatrix, ComplexMatrix> real_jordan_dh_block(double alpha, double beta, int size) {
    const Eigen::Index n = 2 * size;
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < size; ++k) {
        m(2 * k, 2 * k) = alpha;
        m(2 * k, 2 * k + 1) = beta;
        m(2 * k + 1, 2 * k) = -beta;
        m(2 * k + 1, 2 * k + 1) = alpha;
        if (k + 1 < size) {
            m(2 * k, 2 * k + 2) = alpha;
            m(2 * k + 1, 2 * k + 3) = alpha;
        }
    }
    return {skew_part(m), -hermitian_part(m)};
}

namespace {

struct Parts {
    std::vector<ComplexMatrix> e, j, r, q;

    void add(ComplexMatrix e_, ComplexMatrix j_, ComplexMatrix r_, ComplexMatrix q_) {
        e.push_back(std::move(e_));
        j.push_back(std::move(j_));
        r.push_back(std::move(r_));
        q.push_back(std::move(q_));
    }
    void add_standard(ComplexMatrix j_, ComplexMatrix r_) {
        const Eigen::Index n = j_.rows();
        add(ComplexMatrix::Identity(n, n), std::move(j_), std::move(r_), ComplexMatrix::Identity(n, n));
    }
};

ComplexMatrix mat2(double a, double b, double c, double d) {
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

ComplexMatrix scalar(Complex z) { return ComplexMatrix::Constant(1, 1, z); }

}  // namespace

DhPencil realize_dh(const KroneckerStructure& ks, DhVariant variant) {
    const DhVerdict verdict = check_dh_equivalence(ks, variant);
    if (!verdict.holds) {
        std::string tags;
        for (auto c : verdict.violated_conditions) tags += std::string(tags.empty() ? "" : ", ") + to_string(c);
        throw PreconditionError("realize_dh: structure is not dH-equivalent (" + std::string(to_string(variant)) +
                                "): " + tags + "; " + verdict.witness.value_or(""));
    }
    const bool real = is_self_conjugate(ks);
    const ComplexMatrix skew2 = mat2(0, 1, -1, 0);
    Parts lhp, axis, inf, sing;

    for (const auto& f : ks.finite_eigenstructure) {
        const Complex z = f.value;
        const bool axis_pt = on_axis(z);
        const bool zero = is_zero(z);
        if (real && std::abs(z.imag()) > kAxisTolerance * (1.0 + std::abs(z)) && z.imag() < 0.0) {
            continue;  // realized together with its conjugate
        }
        for (int rho : f.partial_multiplicities) {
            if (zero) {
                if (rho == 1) {
                    axis.add_standard(scalar(0.0), scalar(0.0));
                } else {  // rho == 2 under general_q
                    axis.add(ComplexMatrix::Identity(2, 2), skew2, ComplexMatrix::Zero(2, 2), mat2(0, 0, 0, 1));
                }
            } else if (axis_pt) {
                const double beta = z.imag();
                if (real) {
                    axis.add_standard(mat2(0, beta, -beta, 0), ComplexMatrix::Zero(2, 2));
                } else {
                    axis.add_standard(scalar(Complex(0.0, beta)), scalar(0.0));
                }
            } else {
                const bool real_value = std::abs(z.imag()) <= kAxisTolerance * (1.0 + std::abs(z));
                if (real && !real_value) {
                    auto [j, r] = real_jordan_dh_block(z.real(), z.imag(), rho);
                    lhp.add_standard(j, r);
                } else {
                    auto [j, r] = jordan_dh_block(real ? Complex(z.real(), 0.0) : z, rho);
                    lhp.add_standard(j, r);
                }
            }
        }
    }
    for (int s : ks.infinite_block_sizes) {
        if (s == 1) {
            inf.add(scalar(0.0), scalar(0.0), scalar(1.0), scalar(1.0));
        } else {
            inf.add(mat2(0, 0, 0, 1), skew2, ComplexMatrix::Zero(2, 2), ComplexMatrix::Identity(2, 2));
        }
    }
    // Pair each right minimal index with a zero left index.
    for (int eps : ks.right_minimal_indices) {
        if (eps == 0) {
            sing.add(scalar(0.0), scalar(0.0), scalar(0.0), scalar(1.0));
        } else {
            sing.add(mat2(1, 0, 0, 0), skew2, ComplexMatrix::Zero(2, 2), mat2(0, 0, 0, 1));
        }
    }

    Parts all;
    for (Parts* p : {&lhp, &axis, &inf, &sing}) {
        for (std::size_t k = 0; k < p->e.size(); ++k) all.add(p->e[k], p->j[k], p->r[k], p->q[k]);
    }
    return DhPencil{block_diag(all.e), block_diag(all.j), block_diag(all.r), block_diag(all.q)};
}

}  // namespace pencil_lab
