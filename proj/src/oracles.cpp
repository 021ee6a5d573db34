#include "pencil_lab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pencil_lab {

Eigen::Index BlockSpec::rows() const {
    switch (kind) {
        case Kind::right_singular: return size;
        case Kind::left_singular: return size + 1;
        default: return size;
    }
}

Eigen::Index BlockSpec::cols() const {
    switch (kind) {
        case Kind::right_singular: return size + 1;
        case Kind::left_singular: return size;
        default: return size;
    }
}

std::pair<ComplexMatrix, ComplexMatrix> canonical_block(const BlockSpec& b) {
    if (b.size < 0 || (b.size == 0 && (b.kind == BlockSpec::Kind::finite_jordan || b.kind == BlockSpec::Kind::infinite))) {
        throw PreconditionError("canonical_block: invalid block size");
    }
    const Eigen::Index k = b.size;
    ComplexMatrix e = ComplexMatrix::Zero(b.rows(), b.cols()), a = e;
    switch (b.kind) {
        case BlockSpec::Kind::right_singular:
            for (Eigen::Index i = 0; i < k; ++i) e(i, i) = 1.0, a(i, i + 1) = 1.0;
            break;
        case BlockSpec::Kind::left_singular:
            for (Eigen::Index i = 0; i < k; ++i) e(i, i) = 1.0, a(i + 1, i) = 1.0;
            break;
        case BlockSpec::Kind::finite_jordan:
            if (!std::isfinite(b.value.real()) || !std::isfinite(b.value.imag())) {
                throw PreconditionError("canonical_block: eigenvalue must be finite");
            }
            for (Eigen::Index i = 0; i < k; ++i) {
                e(i, i) = 1.0;
                a(i, i) = b.value;
                if (i + 1 < k) a(i, i + 1) = 1.0;
            }
            break;
        case BlockSpec::Kind::infinite:
            for (Eigen::Index i = 0; i < k; ++i) {
                a(i, i) = 1.0;
                if (i + 1 < k) e(i, i + 1) = 1.0;
            }
            break;
    }
    return {e, a};
}

KroneckerStructure structure_of_blocks(const std::vector<BlockSpec>& blocks) {
    KroneckerStructure ks;
    std::vector<std::pair<Complex, std::vector<int>>> finite;
    for (const auto& b : blocks) {
        ks.rows += b.rows();
        ks.cols += b.cols();
        switch (b.kind) {
            case BlockSpec::Kind::right_singular: ks.right_minimal_indices.push_back(b.size); break;
            case BlockSpec::Kind::left_singular: ks.left_minimal_indices.push_back(b.size); break;
            case BlockSpec::Kind::infinite: ks.infinite_block_sizes.push_back(b.size); break;
            case BlockSpec::Kind::finite_jordan: {
                auto it = std::find_if(finite.begin(), finite.end(), [&](const auto& f) { return f.first == b.value; });
                if (it == finite.end()) {
                    finite.push_back({b.value, {b.size}});
                } else {
                    it->second.push_back(b.size);
                }
                break;
            }
        }
    }
    std::sort(ks.right_minimal_indices.begin(), ks.right_minimal_indices.end());
    std::sort(ks.left_minimal_indices.begin(), ks.left_minimal_indices.end());
    std::sort(ks.infinite_block_sizes.begin(), ks.infinite_block_sizes.end());
    for (auto& [z, m] : finite) {
        std::sort(m.begin(), m.end());
        ks.finite_eigenstructure.push_back({z, m});
    }
    std::sort(ks.finite_eigenstructure.begin(), ks.finite_eigenstructure.end(), [](const auto& x, const auto& y) {
        return x.value.real() != y.value.real() ? x.value.real() < y.value.real() : x.value.imag() < y.value.imag();
    });
    ks.index = ks.infinite_block_sizes.empty() ? 0 : ks.infinite_block_sizes.back();
    ks.regular = ks.rows == ks.cols && ks.right_minimal_indices.empty() && ks.left_minimal_indices.empty();
    return ks;
}

AssembledPencil assemble_pencil(const std::vector<BlockSpec>& blocks, double transform_condition_cap,
                                std::uint64_t seed) {
    std::vector<ComplexMatrix> es, as;
    for (const auto& b : blocks) {
        auto [e, a] = canonical_block(b);
        es.push_back(std::move(e));
        as.push_back(std::move(a));
    }
    ComplexMatrix e = block_diag(es), a = block_diag(as);
    if (std::max(e.rows(), e.cols()) > kAssembleSizeCap) {
        throw PreconditionError("assemble_pencil: total size exceeds " + std::to_string(kAssembleSizeCap));
    }
    if (transform_condition_cap > 1.0) {
        Rng rng = make_stream(seed, 0);
        const ComplexMatrix s = random_conditioned(rng, e.rows(), transform_condition_cap);
        const ComplexMatrix t = random_conditioned(rng, e.cols(), transform_condition_cap);
        e = s * e * t;
        a = s * a * t;
    }
    return {Pencil::minus(e, a), structure_of_blocks(blocks)};
}

const char* to_string(RhVerdict v) {
    switch (v) {
        case RhVerdict::strict_lhp: return "strict_lhp";
        case RhVerdict::closed_lhp_marginal: return "closed_lhp_marginal";
        case RhVerdict::unstable: return "unstable";
    }
    return "unstable";
}

RhVerdict routh_hurwitz(const std::vector<double>& descending) {
    if (descending.empty() || !(descending.front() > 0.0)) {
        throw PreconditionError("routh_hurwitz: leading coefficient must be positive");
    }
    std::vector<double> c = descending;
    bool marginal = false;
    while (c.size() > 1 && c.back() == 0.0) {  // roots at zero
        c.pop_back();
        marginal = true;
    }
    const std::size_t deg = c.size() - 1;
    if (deg == 0) return marginal ? RhVerdict::closed_lhp_marginal : RhVerdict::strict_lhp;

    double scale = 0.0;
    for (double x : c) scale = std::max(scale, std::abs(x));
    const double eps = 1e-9 * scale;
    const std::size_t width = deg / 2 + 1;
    std::vector<std::vector<double>> rows(deg + 1, std::vector<double>(width + 1, 0.0));
    for (std::size_t i = 0; i <= deg; ++i) rows[i % 2][i / 2] = c[i];

    for (std::size_t r = 2; r <= deg; ++r) {
        auto& prev = rows[r - 1];
        const auto& pp = rows[r - 2];
        double row_scale = 0.0;
        for (double x : prev) row_scale = std::max(row_scale, std::abs(x));
        double parent_scale = row_scale;
        for (double x : pp) parent_scale = std::max(parent_scale, std::abs(x));
        if (row_scale <= 1e-12 * parent_scale) {
            // Zero row: roots symmetric about the origin; differentiate the auxiliary polynomial.
            marginal = true;
            const std::size_t aux_deg = deg - (r - 2);
            for (std::size_t k = 0; k < width; ++k) {
                const long power = static_cast<long>(aux_deg) - 2 * static_cast<long>(k);
                prev[k] = power > 0 ? pp[k] * static_cast<double>(power) : 0.0;
            }
        } else if (std::abs(prev[0]) <= 1e-12 * parent_scale) {
            prev[0] = eps;
        }
        for (std::size_t k = 0; k < width; ++k) {
            rows[r][k] = (prev[0] * pp[k + 1] - pp[0] * prev[k + 1]) / prev[0];
        }
        for (double& x : rows[r]) {
            if (std::abs(x) <= 1e-12 * parent_scale) x = 0.0;
        }
    }
    if (deg >= 1 && rows[deg][0] == 0.0) rows[deg][0] = eps;
    int changes = 0;
    for (std::size_t r = 1; r <= deg; ++r) {
        if ((rows[r][0] > 0.0) != (rows[r - 1][0] > 0.0)) ++changes;
    }
    if (changes > 0) return RhVerdict::unstable;
    return marginal ? RhVerdict::closed_lhp_marginal : RhVerdict::strict_lhp;
}

std::vector<Complex> scalarized_roots(const MatrixPolynomial& p) {
    const Eigen::Index n = p.size();
    const int d = p.degree();
    const Eigen::Index big_n = n * d;
    if (big_n > kScalarizeCap) throw PreconditionError("scalarized_roots: n*d exceeds 64");
    const double na0 = spectral_norm(p[0]), nad = spectral_norm(p[d]);
    const double rho = (na0 > 0.0 && nad > 0.0) ? std::pow(na0 / nad, 1.0 / d) : 1.0;
    const std::size_t m = static_cast<std::size_t>(big_n) + 1;

    double bound = 0.0;
    for (int j = 0; j <= d; ++j) bound += spectral_norm(p[j]) * std::pow(rho, j);
    std::vector<Complex> values(m);
    double vmax = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const Complex z = rho * std::polar(1.0, 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(m));
        values[k] = p.at(z).determinant();
        vmax = std::max(vmax, std::abs(values[k]));
    }
    if (vmax <= 1e-10 * std::pow(std::max(bound, 1e-300), static_cast<double>(n))) {
        throw SingularPencilError("scalarized_roots: det P vanishes at every interpolation point (singular polynomial)");
    }
    // Coefficients of det P(rho w) in w by inverse DFT.
    std::vector<Complex> coeff(m);
    for (std::size_t j = 0; j < m; ++j) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            s += values[k] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(j * k % m) / static_cast<double>(m));
        }
        coeff[j] = s / static_cast<double>(m);
    }
    // Drop rounding noise in the low-order coefficients so exact zero roots survive.
    for (auto& cj : coeff) {
        if (std::abs(cj) <= 1e-13 * vmax) cj = 0.0;
    }
    std::vector<Complex> roots = polynomial_roots(coeff, 1e-10);
    for (auto& r : roots) r *= rho;
    return roots;
}

namespace {

ComplexMatrix dense(std::initializer_list<std::initializer_list<double>> rows) {
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows.begin()->size());
    ComplexMatrix m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

}  // namespace

PoshPencil ex_unstable() {
    return validate_posh(Pencil::plus(dense({{0, -1, 0}, {1, 0, 0}, {0, 0, 1}}),
                                      dense({{1, 0, 0}, {0, 0, 1}, {0, -1, 0}})));
}

PoshPencil ex_jja(double alpha, double beta) {
    const Complex i(0.0, 1.0);
    const double s = beta < 0.0 ? -1.0 : 1.0;
    return PoshPencil(ComplexMatrix::Constant(1, 1, s * i), ComplexMatrix::Zero(1, 1),
                      ComplexMatrix::Constant(1, 1, -s * i * alpha), ComplexMatrix::Constant(1, 1, s * beta));
}

PoshPencil ex_jjb(double alpha, double beta) {
    if (beta < 0.0) throw PreconditionError("ex_jjb: beta must be >= 0");
    return PoshPencil(dense({{0, 1}, {-1, 0}}), ComplexMatrix::Zero(2, 2), dense({{0, alpha}, {-alpha, 0}}),
                      dense({{beta, 0}, {0, beta}}));
}

PoshPencil conjecture(double t) {
    if (t < 0.0) throw PreconditionError("conjecture: t must be >= 0");
    const ComplexMatrix j = dense({{-0.1, 1}, {0, -0.1}});
    ComplexMatrix j1 = ComplexMatrix::Zero(4, 4), j2 = j1;
    j1.topRightCorner(2, 2) = ComplexMatrix::Identity(2, 2);
    j1.bottomLeftCorner(2, 2) = -ComplexMatrix::Identity(2, 2);
    j2.topRightCorner(2, 2) = -j;
    j2.bottomLeftCorner(2, 2) = j.adjoint();
    const ComplexMatrix ones = ComplexMatrix::Ones(4, 4);
    return PoshPencil(j1, t * ones, j2, t * (4.0 * ComplexMatrix::Identity(4, 4) + ones));
}

PoshPencil mgt_pencil(double a, double b, double c, const ComplexMatrix& t) {
    return linearize_cubic(mgt_stability(a, b, c, t).polynomial);
}

PoshPencil brake(const ComplexMatrix& m, const ComplexMatrix& d, const ComplexMatrix& g, const ComplexMatrix& k,
                 const ComplexMatrix& n) {
    const Eigen::Index s = m.rows();
    for (const auto* x : {&m, &d, &g, &k, &n}) {
        if (x->rows() != s || x->cols() != s) throw DimensionError("brake: all matrices must be square of equal size");
    }
    const ComplexMatrix z = ComplexMatrix::Zero(s, s);
    ComplexMatrix j1(2 * s, 2 * s), r1(2 * s, 2 * s), j2(2 * s, 2 * s), r2(2 * s, 2 * s);
    j1 << z, z, z, -n;
    r1 << m, z, z, k;
    j2 << g, k + n, -k + n, z;
    r2 << d, z, z, z;
    return PoshPencil(j1, r1, j2, r2);
}

PoshPencil chain3() {
    ComplexMatrix j1 = ComplexMatrix::Zero(3, 3), j2 = j1, r2 = j1;
    j1(1, 2) = 1.0, j1(2, 1) = -1.0;
    j2(0, 2) = 1.0, j2(2, 0) = -1.0;
    r2(1, 1) = 1.0;
    return PoshPencil(j1, ComplexMatrix::Zero(3, 3), j2, r2);
}

PoshPencil chain4() {
    ComplexMatrix j1 = ComplexMatrix::Zero(4, 4), r1 = j1;
    j1(1, 3) = 1.0, j1(3, 1) = -1.0;
    r1(2, 2) = 1.0;
    const ComplexMatrix j2 = dense({{0, 0, 0, 1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {-1, 0, 0, 0}});
    return PoshPencil(j1, r1, j2, ComplexMatrix::Zero(4, 4));
}

PoshPencil paper_example(const std::string& name, const std::vector<double>& params) {
    auto need = [&](std::size_t k) {
        if (params.size() < k) {
            throw PreconditionError("paper_example: " + name + " needs " + std::to_string(k) + " parameters");
        }
    };
    if (name == "ex_unstable") return ex_unstable();
    if (name == "ex_jja") return need(2), ex_jja(params[0], params[1]);
    if (name == "ex_jjb") return need(2), ex_jjb(params[0], params[1]);
    if (name == "conjecture") return need(1), conjecture(params[0]);
    if (name == "chain3") return chain3();
    if (name == "chain4") return chain4();
    if (name == "mgt") {
        need(3);
        const Eigen::Index n = params.size() > 3 ? static_cast<Eigen::Index>(params[3]) : 1;
        return mgt_pencil(params[0], params[1], params[2], ComplexMatrix::Identity(n, n));
    }
    throw PreconditionError("paper_example: unknown example '" + name +
                            "' (known: ex_unstable, ex_jja, ex_jjb, conjecture, chain3, chain4, mgt)");
}

PoshPencil random_posh(Rng& rng, Eigen::Index n, const PoshOptions& opts) {
    const Eigen::Index k1 = opts.r1_rank < 0 ? n : opts.r1_rank;
    const Eigen::Index k2 = opts.r2_rank < 0 ? n : opts.r2_rank;
    ComplexMatrix j1 = random_skew(rng, n, opts.real), r1 = random_psd(rng, n, k1, opts.real);
    ComplexMatrix j2 = random_skew(rng, n, opts.real), r2 = random_psd(rng, n, k2, opts.real);
    return PoshPencil(j1, r1, j2, r2);
}

PoshPencil congruence(const PoshPencil& pp, const ComplexMatrix& u) {
    auto c = [&u](const ComplexMatrix& x) { return ComplexMatrix(u.adjoint() * x * u); };
    return PoshPencil(skew_part(c(pp.j1())), hermitian_part(c(pp.r1())), skew_part(c(pp.j2())),
                      hermitian_part(c(pp.r2())));
}

PoshPencil direct_sum(const std::vector<PoshPencil>& parts) {
    std::vector<ComplexMatrix> j1, r1, j2, r2;
    for (const auto& p : parts) {
        j1.push_back(p.j1()), r1.push_back(p.r1()), j2.push_back(p.j2()), r2.push_back(p.r2());
    }
    return PoshPencil(block_diag(j1), block_diag(r1), block_diag(j2), block_diag(r2));
}

namespace {

ComplexMatrix real_orthogonal(Rng& rng, Eigen::Index n) {
    Eigen::HouseholderQR<RealMatrix> qr(real_gaussian_matrix(rng, n, n));
    return RealMatrix(qr.householderQ()).cast<Complex>();
}

// lambda [[0, E], [-E^*, 0]] + [[0, A], [-A^*, 0]] for a plus-form block lambda E + A.
PoshPencil skew_embed(const ComplexMatrix& e, const ComplexMatrix& a) {
    const Eigen::Index r = e.rows(), c = e.cols();
    ComplexMatrix j1 = ComplexMatrix::Zero(r + c, r + c), j2 = j1;
    j1.topRightCorner(r, c) = e;
    j1.bottomLeftCorner(c, r) = -e.adjoint();
    j2.topRightCorner(r, c) = a;
    j2.bottomLeftCorner(c, r) = -a.adjoint();
    return PoshPencil(j1, ComplexMatrix::Zero(r + c, r + c), j2, ComplexMatrix::Zero(r + c, r + c));
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

SingularPoshInstance random_singular_posh(Rng& rng, Eigen::Index max_size) {
    std::vector<PoshPencil> parts;
    std::vector<int> indices;
    Eigen::Index size = 0;
    const bool real = uniform(rng, 0.0, 1.0) < 0.5;
    const int n_blocks = uniform_int(rng, 1, 2);
    for (int b = 0; b < n_blocks; ++b) {
        const int eps = uniform_int(rng, 0, 2);
        if (size + 2 * eps + 1 > max_size) break;
        if (eps == 0) {
            parts.push_back(PoshPencil(ComplexMatrix::Zero(1, 1), ComplexMatrix::Zero(1, 1), ComplexMatrix::Zero(1, 1),
                                       ComplexMatrix::Zero(1, 1)));
            size += 1;
        } else {
            auto [e, a] = canonical_block(BlockSpec::right(eps));
            parts.push_back(skew_embed(e, -a));
            size += 2 * eps + 1;
        }
        indices.push_back(eps);
    }
    if (indices.empty()) {
        parts.push_back(PoshPencil(ComplexMatrix::Zero(1, 1), ComplexMatrix::Zero(1, 1), ComplexMatrix::Zero(1, 1),
                                   ComplexMatrix::Zero(1, 1)));
        indices.push_back(0);
        size += 1;
    }
    const Eigen::Index reg = std::min<Eigen::Index>(max_size - size, uniform_int(rng, 1, 4));
    if (reg > 0) {
        // R1 >= 0.25 I keeps J1 + R1 invertible, so this part is regular with a margin.
        const PoshPencil r = random_posh(rng, reg, PoshOptions{real, -1, -1});
        parts.push_back(PoshPencil(r.j1(), r.r1() + 0.25 * ComplexMatrix::Identity(reg, reg), r.j2(), r.r2()));
    }
    const PoshPencil sum = direct_sum(parts);
    const ComplexMatrix u = real ? real_orthogonal(rng, sum.size()) : random_unitary(rng, sum.size());
    std::sort(indices.begin(), indices.end());
    return {congruence(sum, u), indices};
}

SkewChainInstance random_skew_chain_posh(Rng& rng, int kappa, Eigen::Index max_size) {
    if (kappa < 1) throw PreconditionError("random_skew_chain_posh: kappa must be >= 1");
    std::vector<PoshPencil> parts;
    Eigen::Index size = 0;
    int max_right = -1;
    // An infinite block of size kappa, embedded: index exactly kappa.
    {
        auto [e, a] = canonical_block(BlockSpec::infinite(kappa));
        parts.push_back(skew_embed(e, -a));
        size += 2 * kappa;
    }
    // Optional finite part.
    if (size + 2 <= max_size && uniform(rng, 0.0, 1.0) < 0.7) {
        const Eigen::Index m = std::min<Eigen::Index>((max_size - size) / 2, uniform_int(rng, 1, 2));
        const ComplexMatrix a = complex_gaussian_matrix(rng, m, m);
        parts.push_back(skew_embed(ComplexMatrix::Identity(m, m), a));
        size += 2 * m;
    }
    // Optional singular part with index <= kappa - 1.
    if (kappa >= 1 && uniform(rng, 0.0, 1.0) < 0.6) {
        const int eps = uniform_int(rng, 0, kappa - 1);
        if (size + 2 * eps + 1 <= max_size) {
            auto [e, a] = canonical_block(BlockSpec::right(eps));
            parts.push_back(skew_embed(e, -a));
            size += 2 * eps + 1;
            max_right = eps;
        }
    }
    const PoshPencil skew = direct_sum(parts);
    const ComplexMatrix u = random_unitary(rng, skew.size());
    const PoshPencil base = congruence(skew, u);
    const Eigen::Index n = base.size();
    const ComplexMatrix r1 = random_psd(rng, n, uniform_int(rng, 0, static_cast<int>(n)));
    const ComplexMatrix r2 = random_psd(rng, n, uniform_int(rng, 0, static_cast<int>(n)));
    return {PoshPencil(base.j1(), r1, base.j2(), r2), kappa, max_right};
}

PoshPencil random_posh_with_positive_eigenvalue(Rng& rng, Eigen::Index n, double lambda0, bool real) {
    if (!(lambda0 > 0.0)) throw PreconditionError("random_posh_with_positive_eigenvalue: lambda0 must be > 0");
    std::vector<PoshPencil> parts;
    if (real) {
        const ComplexMatrix s = dense({{0, 1}, {-1, 0}});
        parts.push_back(PoshPencil(s, ComplexMatrix::Zero(2, 2), -lambda0 * s, ComplexMatrix::Zero(2, 2)));
    } else {
        const Complex i(0.0, 1.0);
        parts.push_back(PoshPencil(ComplexMatrix::Constant(1, 1, i), ComplexMatrix::Zero(1, 1),
                                   ComplexMatrix::Constant(1, 1, -lambda0 * i), ComplexMatrix::Zero(1, 1)));
    }
    const Eigen::Index rest = n - parts.front().size();
    if (rest > 0) parts.push_back(random_posh(rng, rest, PoshOptions{real, -1, -1}));
    const PoshPencil sum = direct_sum(parts);
    const ComplexMatrix u = real ? real_orthogonal(rng, sum.size()) : random_unitary(rng, sum.size());
    return congruence(sum, u);
}

MatrixPolynomial random_psd_polynomial(Rng& rng, Eigen::Index n, int d, const PolynomialOptions& opts) {
    if (d < 1) throw PreconditionError("random_psd_polynomial: degree must be >= 1");
    std::vector<ComplexMatrix> coeffs;
    for (int j = 0; j <= d; ++j) {
        Eigen::Index rank = n;
        const bool definite = j == 0 && opts.a0_definite;
        if (opts.allow_rank_deficient && !definite) rank = uniform_int(rng, 0, static_cast<int>(n));
        coeffs.push_back(random_psd(rng, n, rank, opts.real));
    }
    if (opts.a0_definite) coeffs[0] += 0.1 * ComplexMatrix::Identity(n, n);
    return MatrixPolynomial::psd_validated(std::move(coeffs));
}

std::vector<BlockSpec> random_block_specs(Rng& rng, Eigen::Index max_size) {
    static const Complex pool[] = {{-1.0, 0.0}, {0.5, 1.0}, {2.0, 0.0}, {-0.3, -0.7}, {0.0, 1.5}, {0.0, 0.0}};
    std::vector<BlockSpec> blocks;
    Eigen::Index rows = 0, cols = 0;
    const int n_blocks = uniform_int(rng, 1, 5);
    for (int b = 0; b < n_blocks; ++b) {
        BlockSpec spec;
        switch (uniform_int(rng, 0, 3)) {
            case 0: spec = BlockSpec::right(uniform_int(rng, 0, 2)); break;
            case 1: spec = BlockSpec::left(uniform_int(rng, 0, 2)); break;
            case 2: spec = BlockSpec::jordan(pool[uniform_int(rng, 0, 5)], uniform_int(rng, 1, 3)); break;
            default: spec = BlockSpec::infinite(uniform_int(rng, 1, 3)); break;
        }
        if (std::max(rows + spec.rows(), cols + spec.cols()) > max_size) continue;
        rows += spec.rows(), cols += spec.cols();
        blocks.push_back(spec);
    }
    if (blocks.empty()) blocks.push_back(BlockSpec::jordan(pool[0], 1));
    return blocks;
}

KroneckerStructure random_admissible_structure(Rng& rng, DhVariant variant, Eigen::Index max_size,
                                               bool self_conjugate) {
    KroneckerStructure ks;
    const bool gq = variant == DhVariant::general_q;
    Eigen::Index size = 0;
    auto room = [&](Eigen::Index k) { return size + k <= max_size; };
    // Well separated candidate eigenvalues (LHP and imaginary axis).
    static const Complex lhp_pool[] = {{-1.0, 0.0}, {-0.5, 2.0}, {-2.0, -1.0}, {-0.3, 0.0}, {-1.5, 1.5}};
    static const double axis_pool[] = {1.0, -2.5, 0.0};
    const int n_items = uniform_int(rng, 1, 5);
    std::map<std::pair<double, double>, std::vector<int>> finite;
    for (int it = 0; it < n_items; ++it) {
        const int kind = uniform_int(rng, 0, 4);
        if (kind == 0) {  // LHP Jordan block
            const Complex z = lhp_pool[uniform_int(rng, 0, 4)];
            const int rho = uniform_int(rng, 1, 3);
            const Eigen::Index cost = (self_conjugate && z.imag() != 0.0) ? 2 * rho : rho;
            if (!room(cost)) continue;
            finite[{z.real(), z.imag()}].push_back(rho);
            if (self_conjugate && z.imag() != 0.0) finite[{z.real(), -z.imag()}].push_back(rho);
            size += cost;
        } else if (kind == 1) {  // imaginary axis
            const double beta = axis_pool[uniform_int(rng, 0, 2)];
            const int rho = (beta == 0.0 && gq) ? uniform_int(rng, 1, 2) : 1;
            const Eigen::Index cost = (self_conjugate && beta != 0.0) ? 2 * rho : rho;
            if (!room(cost)) continue;
            finite[{0.0, beta}].push_back(rho);
            if (self_conjugate && beta != 0.0) finite[{0.0, -beta}].push_back(rho);
            size += cost;
        } else if (kind == 2) {  // infinite
            const int s = uniform_int(rng, 1, 2);
            if (!room(s)) continue;
            ks.infinite_block_sizes.push_back(s);
            size += s;
        } else if (kind == 3) {  // singular pair
            const int eps = gq ? uniform_int(rng, 0, 1) : 0;
            if (!room(eps + 1)) continue;
            ks.right_minimal_indices.push_back(eps);
            ks.left_minimal_indices.push_back(0);
            size += eps + 1;
        } else if (room(1)) {  // simple LHP eigenvalue
            finite[{-1.0, 0.0}].push_back(1);
            size += 1;
        }
    }
    if (size == 0) {
        finite[{-1.0, 0.0}].push_back(1);
        size = 1;
    }
    for (auto& [key, m] : finite) {
        std::sort(m.begin(), m.end());
        ks.finite_eigenstructure.push_back({Complex(key.first, key.second), m});
    }
    std::sort(ks.right_minimal_indices.begin(), ks.right_minimal_indices.end());
    std::sort(ks.infinite_block_sizes.begin(), ks.infinite_block_sizes.end());
    ks.index = ks.infinite_block_sizes.empty() ? 0 : ks.infinite_block_sizes.back();
    ks.regular = ks.right_minimal_indices.empty();
    ks.rows = ks.cols = size;
    return ks;
}

}  // namespace pencil_lab
