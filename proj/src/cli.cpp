#include "pencil_lab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>

#include "pencil_lab/dh.hpp"
#include "pencil_lab/kcf.hpp"
#include "pencil_lab/localization.hpp"
#include "pencil_lab/numrange.hpp"
#include "pencil_lab/random.hpp"

#ifndef PENCIL_LAB_VERSION
#define PENCIL_LAB_VERSION "0.0.0"
#endif

namespace pencil_lab::cli {

using nlohmann::json;

const char* to_string(Input::Kind k) {
    switch (k) {
        case Input::Kind::pencil: return "pencil";
        case Input::Kind::posh: return "posh";
        case Input::Kind::polynomial: return "polynomial";
    }
    return "pencil";
}

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

[[noreturn]] void schema_error(const std::string& name, const std::string& pointer, const std::string& what) {
    throw InputError(name + ": " + (pointer.empty() ? "/" : pointer) + ": " + what);
}

Complex parse_complex(const json& v, const std::string& name, const std::string& ptr) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        schema_error(name, ptr, "expected a complex scalar [re, im]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

ComplexMatrix parse_matrix_value(const json& v, const std::string& ptr, const std::string& name,
                                 std::optional<Eigen::Index> rows) {
    if (!v.is_array()) schema_error(name, ptr, "expected an array of rows");
    const auto r = static_cast<Eigen::Index>(v.size());
    if (rows && r != *rows) {
        schema_error(name, ptr, "expected " + std::to_string(*rows) + " rows, found " + std::to_string(r));
    }
    Eigen::Index c = 0;
    if (r > 0) {
        if (!v[0].is_array()) schema_error(name, ptr + "/0", "expected a row array");
        c = static_cast<Eigen::Index>(v[0].size());
    }
    ComplexMatrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const std::string rp = ptr + "/" + std::to_string(i);
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
            schema_error(name, rp, "expected a row of " + std::to_string(c) + " entries");
        }
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = parse_complex(row[static_cast<std::size_t>(j)], name, rp + "/" + std::to_string(j));
        }
    }
    return m;
}

ComplexMatrix parse_matrix(const json& doc, const std::string& key, const std::string& name,
                           std::optional<Eigen::Index> rows) {
    if (!doc.contains(key)) schema_error(name, "", "missing field \"" + key + "\"");
    return parse_matrix_value(doc.at(key), "/" + key, name, rows);
}

Eigen::Index parse_size(const json& doc, const char* key, const std::string& name) {
    if (!doc.contains(key)) schema_error(name, "", std::string("missing field \"") + key + "\"");
    const json& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        schema_error(name, std::string("/") + key, "expected a nonnegative integer");
    }
    return static_cast<Eigen::Index>(v.get<long long>());
}

// Structured blocks must be skew / Hermitian up to rounding in the file; they are then symmetrized.
ComplexMatrix structured(const ComplexMatrix& m, bool skew, const std::string& name, const std::string& key) {
    const ComplexMatrix s = skew ? skew_part(m) : hermitian_part(m);
    const double dev = (m - s).cwiseAbs().maxCoeff();
    if (m.size() > 0 && dev > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        throw PreconditionError(key + " in " + name + " is not " + (skew ? "skew-Hermitian" : "Hermitian") +
                                " (deviation " + std::to_string(dev) + ")");
    }
    return s;
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

Input parse_input(const std::string& text, const std::string& name) {
    Input in;
    in.name = name;
    try {
        in.document = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte);
        throw InputError(name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": parse error: " + e.what());
    }
    const json& doc = in.document;
    if (!doc.is_object()) schema_error(name, "", "expected a JSON object");

    if (doc.contains("coefficients")) {
        in.kind = Input::Kind::polynomial;
        const Eigen::Index n = parse_size(doc, "n", name);
        const Eigen::Index d = parse_size(doc, "degree", name);
        const json& c = doc.at("coefficients");
        if (!c.is_array() || static_cast<Eigen::Index>(c.size()) != d + 1) {
            schema_error(name, "/coefficients", "expected degree + 1 = " + std::to_string(d + 1) + " matrices");
        }
        std::vector<ComplexMatrix> coeffs;
        for (std::size_t j = 0; j < c.size(); ++j) {
            const std::string ptr = "/coefficients/" + std::to_string(j);
            ComplexMatrix a = parse_matrix_value(c[j], ptr, name, n);
            if (a.cols() != n) schema_error(name, ptr, "expected " + std::to_string(n) + " columns");
            coeffs.push_back(std::move(a));
        }
        in.polynomial = MatrixPolynomial::psd_validated(std::move(coeffs));
        return in;
    }
    if (doc.contains("j1")) {
        in.kind = Input::Kind::posh;
        const Eigen::Index n = parse_size(doc, "n", name);
        ComplexMatrix m[4];
        const char* keys[4] = {"j1", "r1", "j2", "r2"};
        for (int k = 0; k < 4; ++k) {
            m[k] = parse_matrix(doc, keys[k], name, n);
            if (m[k].cols() != n) schema_error(name, std::string("/") + keys[k], "expected n columns");
            m[k] = structured(m[k], k % 2 == 0, name, keys[k]);
        }
        try {
            in.posh = PoshPencil(m[0], m[1], m[2], m[3]);
            in.pencil = in.posh->pencil();
        } catch (const PoshRejection&) {
            // Kept as a plain pencil so `validate` can report the rejection; as_posh rethrows it.
            in.pencil = Pencil::plus(m[0] + m[1], m[2] + m[3]);
        }
        return in;
    }
    if (doc.contains("lead")) {
        in.kind = Input::Kind::pencil;
        const Eigen::Index n = parse_size(doc, "n", name);
        if (!doc.contains("convention") || !doc.at("convention").is_string()) {
            schema_error(name, "/convention", "expected \"plus\" or \"minus\"");
        }
        const std::string conv = doc.at("convention").get<std::string>();
        if (conv != "plus" && conv != "minus") schema_error(name, "/convention", "expected \"plus\" or \"minus\"");
        ComplexMatrix lead = parse_matrix(doc, "lead", name, n);
        ComplexMatrix cst = parse_matrix(doc, "const", name, n);
        if (lead.cols() != cst.cols()) schema_error(name, "/const", "column count differs from lead");
        in.pencil = Pencil(std::move(lead), std::move(cst), conv == "plus" ? Convention::plus : Convention::minus);
        return in;
    }
    schema_error(name, "", "expected a pencil (lead/const), posH (j1/r1/j2/r2) or polynomial (coefficients) document");
}

Input read_input(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_input(ss.str(), path);
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename into " + path + ": " + ec.message());
    }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("PENCIL_LAB_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 0);
        if (end != env && *end == '\0') return v;
        throw InputError(std::string("PENCIL_LAB_SEED: not an unsigned integer: ") + env);
    }
    return kDefaultProbeSeed;
}

namespace {

// ---------- report pieces ----------

json threshold_json(const Threshold& t) {
    if (t.is_infinite()) return "inf";
    if (!t.defined()) return nullptr;
    return t.value;
}

json extended_json(const ExtendedComplex& z) { return z.is_infinite() ? json("inf") : to_json(z.value()); }

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

json fingerprint(const Input& in) {
    json f;
    f["file"] = std::filesystem::path(in.name).filename().string();
    f["kind"] = to_string(in.kind);
    f["hash"] = "fnv1a64:" + hex(fnv1a(in.document.dump()));
    json norms;
    if (in.polynomial) {
        f["n"] = in.polynomial->size();
        f["degree"] = in.polynomial->degree();
        for (int j = 0; j <= in.polynomial->degree(); ++j) norms["A" + std::to_string(j)] = (*in.polynomial)[j].norm();
    } else if (in.posh) {
        f["rows"] = in.posh->size();
        f["cols"] = in.posh->size();
        norms = {{"j1", in.posh->j1().norm()}, {"r1", in.posh->r1().norm()},
                 {"j2", in.posh->j2().norm()}, {"r2", in.posh->r2().norm()}};
    } else {
        f["rows"] = in.pencil->rows();
        f["cols"] = in.pencil->cols();
        norms = {{"lead", in.pencil->lead().norm()}, {"const", in.pencil->constant().norm()}};
    }
    f["frobenius_norms"] = norms;
    return f;
}

// posH view of any pencil-like input; refuses polynomials and non-posH pencils.
PoshPencil as_posh(const Input& in) {
    if (in.posh) return *in.posh;
    if (in.polynomial) throw PreconditionError("expected a pencil file, got a polynomial file (use `lin` first)");
    return validate_posh(*in.pencil);
}

// Pencil view: polynomials go through their posH linearization.
Pencil as_pencil(const Input& in) {
    if (in.polynomial) return linearize(*in.polynomial).pencil();
    return *in.pencil;
}

json posh_json(const PoshPencil& pp) {
    return {{"n", pp.size()},
            {"j1", to_json(pp.j1())},
            {"r1", to_json(pp.r1())},
            {"j2", to_json(pp.j2())},
            {"r2", to_json(pp.r2())}};
}

json kcf_json(const KroneckerStructure& ks) {
    json fin = json::array();
    for (const auto& f : ks.finite_eigenstructure) {
        fin.push_back({{"value", to_json(f.value)}, {"partial_multiplicities", f.partial_multiplicities}});
    }
    return {{"right_minimal_indices", ks.right_minimal_indices},
            {"left_minimal_indices", ks.left_minimal_indices},
            {"infinite_block_sizes", ks.infinite_block_sizes},
            {"finite_eigenstructure", fin},
            {"index", ks.index},
            {"regular", ks.regular},
            {"evidence", to_string(Evidence::exact)},
            {"tolerances",
             {{"lead", ks.lead_tolerance}, {"constant", ks.constant_tolerance}, {"cluster_radius", ks.cluster_radius}}}};
}

json dh_verdict_json(const DhVerdict& v) {
    json tags = json::array();
    for (auto c : v.violated_conditions) tags.push_back(to_string(c));
    json out = {{"variant", to_string(v.variant)}, {"holds", v.holds}, {"violated_conditions", tags}};
    out["witness"] = v.witness ? json(*v.witness) : json(nullptr);
    return out;
}

json beta_json(const BetaThresholds& b) {
    json regions = json::array();
    for (const auto& r : pacman_regions(b)) {
        regions.push_back({{"type", "pacman"}, {"beta", r.beta}, {"sign", to_string(r.sign)}, {"t", r.scale}});
    }
    json out = {{"beta_plus", threshold_json(b.beta_plus)},
                {"beta_minus", threshold_json(b.beta_minus)},
                {"t", b.t},
                {"regions", regions},
                {"evidence", to_string(Evidence::exact)}};
    out["lower_bound"] = b.lower_bound ? json(*b.lower_bound) : json(nullptr);
    out["strip_bound"] = b.strip_bound ? json(*b.strip_bound) : json(nullptr);
    return out;
}

json eig_json(const std::vector<ExtendedComplex>& ev) {
    json list = json::array();
    int finite = 0, infinite = 0, rhp = 0;
    for (const auto& z : ev) {
        list.push_back(extended_json(z));
        if (z.is_infinite()) {
            ++infinite;
        } else {
            ++finite;
            if (z.value().real() > 0.0) ++rhp;
        }
    }
    return {{"eigenvalues", list},
            {"finite", finite},
            {"infinite", infinite},
            {"positive_real_part", rhp},
            {"evidence", to_string(Evidence::exact)}};
}

json certificate_json(const LhpCertificate& c) {
    json out = {{"eejjx_status", to_string(c.eejjx_status)},
                {"hypothesis_route", to_string(c.hypothesis_route)},
                {"conclusion", to_string(c.conclusion)},
                {"evidence", to_string(c.evidence)},
                {"notes", c.notes}};
    if (c.witness) {
        json x = json::array();
        for (Eigen::Index i = 0; i < c.witness->x.size(); ++i) x.push_back(to_json(c.witness->x(i)));
        out["witness"] = {{"x", x}, {"value", c.witness->value}, {"evidence", to_string(Evidence::exact)}};
    } else {
        out["witness"] = nullptr;
    }
    return out;
}

json chain_entry_json(const ChainEntry& e) {
    json out = {{"evidence", to_string(e.evidence)}, {"detail", e.detail}};
    out["holds"] = e.holds ? json(*e.holds) : json(nullptr);
    return out;
}

json nocommon_json(const NocommonReport& r) {
    return {{"a", chain_entry_json(r.a)}, {"b", chain_entry_json(r.b)}, {"c", chain_entry_json(r.c)},
            {"d", chain_entry_json(r.d)}, {"e", chain_entry_json(r.e)}, {"real_input", r.real_input},
            {"warnings", r.warnings}};
}

json regularity_json(const RegularityReport& r) {
    json pos = json::array();
    for (Complex z : r.positive_real_eigenvalues) pos.push_back(to_json(z));
    return {{"p_regular", r.p_regular},
            {"r1r2_regular", r.r1r2_regular},
            {"j1j2_regular", r.j1j2_regular},
            {"r1j2_regular", r.r1j2_regular},
            {"r2j1_regular", r.r2j1_regular},
            {"triple_kernel_j1", r.triple_kernel_j1},
            {"triple_kernel_j2", r.triple_kernel_j2},
            {"positive_real_eigenvalues", pos},
            {"conclusions", r.conclusions},
            {"consistent", r.consistent},
            {"evidence", to_string(Evidence::heuristic)}};
}

json cubic_json(const CubicStabilityReport& r) {
    json out = {{"conclusion", to_string(r.conclusion)},
                {"hypotheses_hold", r.hypotheses_hold},
                {"pos2_holds", r.pos2_holds},
                {"beta_star", threshold_json(r.beta_star)},
                {"notes", r.notes},
                {"evidence", to_string(Evidence::exact)}};
    json regions = json::array();
    for (const auto& reg : {r.excluded_plus, r.excluded_minus}) {
        if (reg) regions.push_back({{"type", "pacman"}, {"beta", reg->beta}, {"sign", to_string(reg->sign)}, {"t", reg->scale}});
    }
    out["excluded_regions"] = regions;
    return out;
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string points_csv(const std::vector<Complex>& pts) {
    std::string s = "re,im\n";
    for (Complex z : pts) s += fmt17(z.real()) + "," + fmt17(z.imag()) + "\n";
    return s;
}

// Static scatter of the cloud with the excluded regions shaded.
std::string render_svg(const std::vector<Complex>& pts, const std::vector<PacmanRegion>& regions) {
    double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
    for (Complex z : pts) {
        x0 = std::min(x0, z.real()), x1 = std::max(x1, z.real());
        y0 = std::min(y0, z.imag()), y1 = std::max(y1, z.imag());
    }
    const double pad = 0.05 * std::max(x1 - x0, y1 - y0);
    x0 -= pad, x1 += pad, y0 -= pad, y1 += pad;
    const double w = 600, h = 600;
    auto sx = [&](double x) { return fmt17(std::round((x - x0) / (x1 - x0) * w * 100) / 100); };
    auto sy = [&](double y) { return fmt17(std::round((y1 - y) / (y1 - y0) * h * 100) / 100); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& r : regions) {
        const double s = r.sign == Sign::plus ? 1.0 : -1.0;
        const double top = std::isinf(r.beta) ? std::max(std::abs(y0), std::abs(y1)) : r.beta;
        const double corner = std::isinf(r.beta) ? 0.0 : r.scale;
        os << "<polygon fill=\"#f4a6a6\" fill-opacity=\"0.5\" points=\"" << sx(0) << "," << sy(0) << " "
           << sx(corner) << "," << sy(s * top) << " " << sx(x1) << "," << sy(s * top) << " " << sx(x1) << ","
           << sy(0) << "\"/>\n";
    }
    os << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(x1) << "\" y2=\"" << sy(0)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(y0) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(y1)
       << "\" stroke=\"black\"/>\n";
    for (Complex z : pts) {
        os << "<circle cx=\"" << sx(z.real()) << "\" cy=\"" << sy(z.imag()) << "\" r=\"1\" fill=\"#1f4e9c\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

// ---------- command plumbing ----------

struct Common {
    std::string input;
    std::string out;
    std::optional<std::uint64_t> seed;
};

struct Context {
    std::ostream& out;
    std::uint64_t seed = kDefaultProbeSeed;
};

json envelope(const std::string& command, const Input& in, std::uint64_t seed) {
    return {{"tool", "pencil-lab"},
            {"version", PENCIL_LAB_VERSION},
            {"command", command},
            {"seed", seed},
            {"input", fingerprint(in)}};
}

void emit(const Common& c, std::ostream& out, const json& report) {
    const std::string text = report.dump(2) + "\n";
    if (c.out.empty()) {
        out << text;
    } else {
        write_atomic(c.out, text);
    }
}

json tolerances_json(const RankPolicy& p) {
    json t = {{"rank_safety", p.safety}, {"gap_threshold", p.gap_threshold}};
    t["absolute_rank_tolerance"] = p.absolute_tolerance ? json(*p.absolute_tolerance) : json(nullptr);
    return t;
}

int error_exit(std::ostream& err, int code, const std::string& kind, const std::string& message, json extra = {}) {
    json e = {{"error", kind}, {"message", message}};
    if (extra.is_object()) e.update(extra);
    err << e.dump() << "\n";
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Analysis of matrix pencils with positive semidefinite Hermitian parts", "pencil-lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", PENCIL_LAB_VERSION);

    Common c;
    RankPolicy rank;
    std::optional<double> abs_tol;
    std::string variant = "both";
    std::size_t samples = 10000, budget = 10000;
    std::string points_out, regions_out, svg_out;
    double t_scale = 1.0;
    bool eejjx_external = false, cubic = false;

    auto common = [&](CLI::App* s, bool with_out = true) {
        s->add_option("input", c.input, "input JSON file")->required();
        if (with_out) s->add_option("--out,-o", c.out, "write the report here (atomic) instead of stdout");
        s->add_option("--seed", c.seed, "random seed (overrides PENCIL_LAB_SEED)");
    };
    auto rank_flags = [&](CLI::App* s) {
        s->add_option("--gap", rank.gap_threshold, "singular value gap ratio below which ranks are ambiguous");
        s->add_option("--safety", rank.safety, "rank tolerance safety factor");
        s->add_option("--abs-tol", abs_tol, "absolute rank tolerance (overrides the relative rule)");
    };

    auto* validate = app.add_subcommand("validate", "check the posH (or PSD coefficient) property");
    common(validate);
    auto* kcf = app.add_subcommand("kcf", "Kronecker structure report");
    common(kcf);
    rank_flags(kcf);
    auto* dh_check = app.add_subcommand("dh-check", "dH-equivalence conditions");
    common(dh_check);
    rank_flags(dh_check);
    dh_check->add_option("--variant", variant, "general_q, q_identity or both")
        ->check(CLI::IsMember({"general_q", "q_identity", "both"}));
    auto* dh_realize = app.add_subcommand("dh-realize", "build a dH pencil with the same Kronecker structure");
    common(dh_realize);
    rank_flags(dh_realize);
    dh_realize->add_option("--variant", variant, "general_q or q_identity")
        ->check(CLI::IsMember({"general_q", "q_identity"}));
    auto* numrange = app.add_subcommand("numrange", "sample the numerical range");
    common(numrange, false);
    numrange->add_option("--samples", samples, "number of random unit vectors");
    numrange->add_option("--out,-o", points_out, "CSV point cloud (re,im); the summary goes to stdout");
    numrange->add_option("--regions", regions_out, "JSON file with the excluded pacman regions");
    numrange->add_option("--svg", svg_out, "static scatter plot with the regions");
    auto* beta = app.add_subcommand("beta", "pacman thresholds");
    common(beta);
    beta->add_option("--t", t_scale, "scaling parameter t > 0")->check(CLI::PositiveNumber);
    auto* certify = app.add_subcommand("certify", "left-half-plane certificate");
    common(certify);
    certify->add_option("--budget", budget, "falsifier evaluations");
    certify->add_option("--samples", samples, "numerical range samples");
    certify->add_flag("--eejjx-proved", eejjx_external, "the isotropy condition is known to hold");
    auto* eig = app.add_subcommand("eig", "generalized eigenvalues");
    common(eig);
    auto* polystab = app.add_subcommand("polystab", "cubic stability certificate");
    common(polystab);
    auto* lin = app.add_subcommand("lin", "posH linearization of a polynomial file");
    common(lin);
    lin->add_flag("--cubic", cubic, "use the coefficient-only cubic linearization");
    auto* report = app.add_subcommand("report", "all applicable analyses");
    common(report);
    rank_flags(report);
    report->add_option("--samples", samples, "numerical range samples");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << PENCIL_LAB_VERSION << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        return error_exit(err, kParseError, "usage", e.what());
    }
    rank.absolute_tolerance = abs_tol;

    try {
        const std::uint64_t seed = resolve_seed(c.seed);
        const Input in = read_input(c.input);
        auto* sub = app.get_subcommands().front();
        const std::string cmd = sub->get_name();
        json rep = envelope(cmd, in, seed);

        if (cmd == "validate") {
            json r;
            if (in.polynomial) {
                r = {{"psd_coefficients", true}, {"degree", in.polynomial->degree()}};
            } else {
                try {
                    const PoshPencil pp = as_posh(in);
                    r = {{"posh", true}, {"psd_tolerance", pp.psd_tolerance()}, {"real", pp.is_real()}};
                } catch (const PoshRejection& e) {
                    r = {{"posh", false},
                         {"coefficient", e.coefficient()},
                         {"lambda_min", e.lambda_min()},
                         {"tolerance", e.tolerance()},
                         {"reason", e.what()}};
                }
            }
            r["evidence"] = to_string(Evidence::exact);
            rep["results"] = r;
        } else if (cmd == "kcf") {
            rep["tolerances"] = tolerances_json(rank);
            rep["results"] = kcf_json(kronecker_structure(as_pencil(in), rank));
        } else if (cmd == "dh-check") {
            const auto ks = kronecker_structure(as_pencil(in), rank);
            json verdicts = json::array();
            for (DhVariant v : {DhVariant::general_q, DhVariant::q_identity}) {
                if (variant == "both" || variant == to_string(v)) verdicts.push_back(dh_verdict_json(check_dh_equivalence(ks, v)));
            }
            rep["tolerances"] = tolerances_json(rank);
            rep["tolerances"]["axis"] = kAxisTolerance;
            rep["results"] = {{"structure", kcf_json(ks)}, {"verdicts", verdicts}, {"evidence", to_string(Evidence::exact)}};
        } else if (cmd == "dh-realize") {
            const DhVariant v = variant == "q_identity" ? DhVariant::q_identity : DhVariant::general_q;
            const auto ks = kronecker_structure(as_pencil(in), rank);
            const DhPencil dp = realize_dh(ks, v);
            const Pencil p = dp.pencil();
            // Loadable as a pencil file; e/j/r/q carry the dH factors.
            json r = {{"n", dp.e.rows()},     {"convention", "minus"},   {"lead", to_json(p.lead())},
                      {"const", to_json(p.constant())}, {"e", to_json(dp.e)}, {"j", to_json(dp.j)},
                      {"r", to_json(dp.r)},   {"q", to_json(dp.q)},      {"variant", to_string(v)}};
            rep["results"] = r;
        } else if (cmd == "numrange") {
            std::vector<Complex> pts;
            std::size_t discarded = 0;
            if (in.polynomial) {
                if (!regions_out.empty()) throw PreconditionError("--regions needs a pencil input");
                Rng rng = make_stream(seed, 0);
                for (std::size_t k = 0; k < samples; ++k) {
                    for (Complex z : rayleigh_roots(*in.polynomial, random_unit_vector(rng, in.polynomial->size()))) {
                        pts.push_back(z);
                    }
                }
            } else {
                const auto s = sample_numerical_range(*in.pencil, samples, seed);
                pts = s.points;
                discarded = s.discarded;
            }
            std::vector<PacmanRegion> regions;
            json rj = json::array();
            if (!regions_out.empty() || (!svg_out.empty() && !in.polynomial)) {
                try {
                    regions = pacman_regions(beta_thresholds(as_posh(in)));
                } catch (const PoshRejection&) {
                    if (!regions_out.empty()) throw;
                }
                for (const auto& r : regions) rj.push_back({{"type", "pacman"}, {"beta", r.beta}, {"sign", to_string(r.sign)}, {"t", r.scale}});
            }
            if (!points_out.empty()) write_atomic(points_out, points_csv(pts));
            if (!regions_out.empty()) write_atomic(regions_out, rj.dump(2) + "\n");
            if (!svg_out.empty()) write_atomic(svg_out, render_svg(pts, regions));
            json r = {{"samples", samples},
                      {"points", pts.size()},
                      {"discarded", discarded},
                      {"regions", rj},
                      {"evidence", to_string(Evidence::sampled)}};
            if (in.polynomial) r["kind"] = "rayleigh_roots";
            if (points_out.empty()) {
                json cloud = json::array();
                for (Complex z : pts) cloud.push_back(to_json(z));
                r["cloud"] = cloud;
            }
            rep["results"] = r;
        } else if (cmd == "beta") {
            const PoshPencil pp = as_posh(in);
            rep["results"] = beta_json(t_scale == 1.0 ? beta_thresholds(pp) : beta_thresholds_scaled(pp, t_scale));
        } else if (cmd == "certify") {
            LhpOptions o;
            o.falsify_budget = budget;
            o.sample_budget = samples;
            o.seed = seed;
            o.eejjx_proved_externally = eejjx_external;
            rep["results"] = certificate_json(lhp_certificate(as_posh(in), o));
        } else if (cmd == "eig") {
            rep["results"] = eig_json(in.polynomial ? polynomial_eigenvalues(*in.polynomial, seed)
                                                    : generalized_eigenvalues(*in.pencil, seed));
        } else if (cmd == "polystab") {
            if (!in.polynomial) throw PreconditionError("polystab needs a polynomial file");
            json r = cubic_json(cubic_stability(*in.polynomial));
            double max_re = -HUGE_VAL;
            for (const auto& z : polynomial_eigenvalues(*in.polynomial, seed)) {
                if (z.is_finite()) max_re = std::max(max_re, z.value().real());
            }
            r["max_real_part"] = std::isfinite(max_re) ? json(max_re) : json(nullptr);
            rep["results"] = r;
        } else if (cmd == "lin") {
            if (!in.polynomial) throw PreconditionError("lin needs a polynomial file");
            rep["results"] = posh_json(cubic ? linearize_cubic(*in.polynomial) : linearize(*in.polynomial));
        } else if (cmd == "report") {
            json analyses = json::array(), results;
            auto attempt = [&](const std::string& name, auto&& f) {
                analyses.push_back(name);
                try {
                    results[name] = f();
                } catch (const NumericalAmbiguity& e) {
                    results[name] = {{"error", "numerical_ambiguity"}, {"message", e.what()}};
                } catch (const Error& e) {
                    results[name] = {{"error", "precondition"}, {"message", e.what()}};
                }
            };
            const Pencil p = as_pencil(in);
            attempt("kcf", [&] { return kcf_json(kronecker_structure(p, rank)); });
            attempt("eig", [&] { return eig_json(generalized_eigenvalues(p, seed)); });
            if (in.polynomial) {
                attempt("index", [&] {
                    const auto idx = polynomial_index(*in.polynomial);
                    return json{{"computed", idx.computed}, {"bound", idx.bound}, {"evidence", "exact"}};
                });
                if (in.polynomial->degree() == 3) attempt("polystab", [&] { return cubic_json(cubic_stability(*in.polynomial)); });
            } else {
                attempt("validate", [&] {
                    const PoshPencil pp = as_posh(in);
                    return json{{"posh", true}, {"psd_tolerance", pp.psd_tolerance()}, {"evidence", "exact"}};
                });
                attempt("dh", [&] {
                    const auto ks = kronecker_structure(p, rank);
                    return json::array({dh_verdict_json(check_dh_equivalence(ks, DhVariant::general_q)),
                                        dh_verdict_json(check_dh_equivalence(ks, DhVariant::q_identity))});
                });
                attempt("beta", [&] { return beta_json(beta_thresholds(as_posh(in))); });
                attempt("nocommon", [&] { return nocommon_json(nocommon_chain_report(as_posh(in), samples, seed)); });
                attempt("regularity", [&] { return regularity_json(regularity_conditions_report(as_posh(in), seed)); });
                attempt("certify", [&] {
                    LhpOptions o;
                    o.sample_budget = samples;
                    o.seed = seed;
                    return certificate_json(lhp_certificate(as_posh(in), o));
                });
            }
            rep["analyses"] = analyses;
            rep["tolerances"] = tolerances_json(rank);
            rep["results"] = results;
        }
        emit(c, out, rep);
        return kOk;
    } catch (const InputError& e) {
        return error_exit(err, kParseError, "parse", e.what());
    } catch (const NumericalAmbiguity& e) {
        return error_exit(err, kAmbiguity, "numerical_ambiguity", e.what(),
                          {{"singular_values", e.singular_values()}, {"tolerance", e.tolerance()}});
    } catch (const PoshRejection& e) {
        return error_exit(err, kPrecondition, "precondition", e.what(),
                          {{"coefficient", e.coefficient()}, {"lambda_min", e.lambda_min()}, {"tolerance", e.tolerance()}});
    } catch (const Error& e) {
        return error_exit(err, kPrecondition, "precondition", e.what());
    } catch (const std::exception& e) {
        return error_exit(err, kInternal, "internal", e.what());
    }
}

}  // namespace pencil_lab::cli
