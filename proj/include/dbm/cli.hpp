#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dbm/io.hpp"
#include "dbm/localstruct.hpp"
#include "dbm/report.hpp"

namespace dbm::cli {

struct Options {
    std::string command;
    std::string model;
    std::string out;
    std::string format = "json";
    std::string mode;  // empty: command default
    std::string grid;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    std::vector<std::string> names;
    std::string pair, assoc, P = "0", Q = "0", w, z, f, g, at, k0;
    std::string signature = "calJ";
    std::size_t dim = 4, n = 1, points = 5;
    bool exp = false;
};

namespace detail {

template <class F>
auto with_mode(Mode m, F&& f) {
    if (m == Mode::exact) return f.template operator()<GaussRational>();
    return f.template operator()<cplx>();
}

template <CoefficientField K>
K parse_scalar(const std::string& text) {
    model_json j;
    try {
        j = model_json::parse(text);
    } catch (const model_json::parse_error&) {
        j = text;
    }
    Decoder<K> d([&](const std::string&, const std::string& msg) { throw PreconditionError("bad scalar \"" + text + "\": " + msg); });
    return d.scalar(j, "");
}

inline std::string fmt(cplx z) {
    std::ostringstream os;
    os.precision(12);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

template <CoefficientField K>
std::string fmt(const K& x) {
    if constexpr (is_exact_v<K>) {
        std::ostringstream os;
        os << x;
        return os.str();
    } else {
        return fmt(cplx(x));
    }
}

inline std::string fmt(const CMat& m) {
    std::ostringstream os;
    os << "[";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r) os << "; ";
        for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? ", " : "") << fmt(m(r, c));
    }
    os << "]";
    return os.str();
}

template <CoefficientField K>
std::string fmt(const Mat<K>& m) {
    return RatMat<K>(m).to_string();
}

inline std::vector<int> ints(const std::vector<int>& v) { return v; }

}  // namespace detail

/// Executes one command; never throws.
class Runner {
public:
    explicit Runner(Options o) : o_(std::move(o)) {}

    Report run() {
        rep_.command = o_.command;
        echo_args();
        try {
            tol_.psd = o_.tol;
            if (!o_.grid.empty()) grid_ = GridSpec::parse(o_.grid);
            if (!o_.model.empty()) model_ = ModelFile::load(o_.model);
            mode_ = resolve_mode();
            rep_.config["mode"] = to_string(mode_);
            rep_.config["tol"] = o_.tol;
            rep_.config["grid"] = o_.grid.empty() ? "default" : o_.grid;
            dispatch();
        } catch (const ModelError& e) {
            rep_.error = std::make_pair(std::string("model"), std::string(e.what()));
        } catch (const PreconditionError& e) {
            rep_.error = std::make_pair(std::string("precondition"), std::string(e.what()));
        } catch (const NotRepresentableError& e) {
            rep_.error = std::make_pair(std::string("not_representable"), std::string(e.what()));
        } catch (const DbmError& e) {
            rep_.error = std::make_pair(std::string("internal"), std::string(e.what()));
        } catch (const std::exception& e) {
            rep_.error = std::make_pair(std::string("error"), std::string(e.what()));
        }
        return rep_;
    }

private:
    Options o_;
    Report rep_;
    Tolerances tol_ = default_tolerances();
    GridSpec grid_ = default_grid();
    ModelFile model_;
    Mode mode_ = Mode::exact;

    void echo_args() {
        json& a = rep_.args;
        if (!o_.model.empty()) a["model"] = o_.model;
        if (!o_.names.empty()) a["names"] = o_.names;
        if (!o_.mode.empty()) a["mode"] = o_.mode;
        if (!o_.grid.empty()) a["grid"] = o_.grid;
        a["tol"] = o_.tol;
        const std::string& c = o_.command;
        if (c == "charfn" || c == "gram") a["seed"] = o_.seed;
        if (c == "charfn") {
            if (!o_.k0.empty()) a["k0"] = o_.k0;
            a["dim"] = o_.dim;
            a["n"] = o_.n;
        }
        if (!o_.pair.empty()) a["pair"] = o_.pair;
        if (!o_.assoc.empty()) a["assoc"] = o_.assoc;
        if (c == "db-construct") {
            a["P"] = o_.P;
            a["Q"] = o_.Q;
        }
        if (!o_.w.empty()) a["w"] = o_.w;
        if (!o_.z.empty()) a["z"] = o_.z;
        if (!o_.f.empty()) a["f"] = o_.f;
        if (!o_.g.empty()) a["g"] = o_.g;
        if (!o_.at.empty()) a["at"] = o_.at;
        if (c == "pg") a["signature"] = o_.signature;
        if (c == "gram") a["points"] = o_.points;
        if (c == "factor" || c == "cofactor") a["exp"] = o_.exp;
    }

    Mode resolve_mode() const {
        if (!o_.mode.empty()) return parse_mode(o_.mode);
        const std::string& c = o_.command;
        if (c == "verify" || c == "db-construct" || c == "uniq") return Mode::exact;
        if (c == "factor" || c == "local" || (c == "cofactor" && o_.exp)) return Mode::floating;
        if (c == "charfn") return Mode::exact;
        return o_.model.empty() ? Mode::exact : model_.mode;
    }

    const std::string& name(std::size_t k) const {
        if (o_.names.size() <= k) throw PreconditionError("missing object name (argument " + std::to_string(k + 1) + ")");
        return o_.names[k];
    }

    template <CoefficientField K>
    void put(const std::string& key, const RatMat<K>& m) {
        rep_.result[key] = Encoder<K>::matrix(m);
        rep_.show(key, m.to_string());
    }
    void put(const std::string& key, const CMat& m) {
        rep_.result[key] = Encoder<cplx>::constant(m);
        rep_.show(key, detail::fmt(m));
    }
    template <CoefficientField K>
    void put_const(const std::string& key, const Mat<K>& m) {
        rep_.result[key] = Encoder<K>::constant(m);
        rep_.show(key, detail::fmt(m));
    }

    template <CoefficientField K>
    Mat<K> constant_arg(const std::string& text, std::size_t n) const {
        if (model_.has(text)) return model_.constant<K>(text);
        return Mat<K>::identity(n) * detail::parse_scalar<K>(text);
    }

    template <CoefficientField K>
    RatMat<K> matrix_arg(const std::string& nm) const {
        if (nm.empty()) throw PreconditionError("missing object name");
        return model_.matrix<K>(nm);
    }

    void dispatch() {
        const std::string& c = o_.command;
        auto go = [&](auto&& f) { detail::with_mode(mode_, f); };
        if (c == "classify") go([&]<CoefficientField K>() { classify<K>(); });
        else if (c == "pg") go([&]<CoefficientField K>() { pg<K>(); });
        else if (c == "factor") go([&]<CoefficientField K>() { factor<K>(); });
        else if (c == "cofactor") go([&]<CoefficientField K>() { cofactor<K>(); });
        else if (c == "local") go([&]<CoefficientField K>() { local<K>(); });
        else if (c == "db-check") go([&]<CoefficientField K>() { db_check_cmd<K>(); });
        else if (c == "db-decompose") go([&]<CoefficientField K>() { db_decompose_cmd<K>(); });
        else if (c == "db-construct") go([&]<CoefficientField K>() { db_construct<K>(); });
        else if (c == "kernel") go([&]<CoefficientField K>() { kernel<K>(); });
        else if (c == "gram") go([&]<CoefficientField K>() { gram<K>(); });
        else if (c == "inner-product") go([&]<CoefficientField K>() { inner<K>(); });
        else if (c == "assoc-check") go([&]<CoefficientField K>() { assoc<K>(); });
        else if (c == "charfn") go([&]<CoefficientField K>() { charfn<K>(); });
        else if (c == "verify") go([&]<CoefficientField K>() { verify<K>(); });
        else if (c == "uniq") go([&]<CoefficientField K>() { uniq<K>(); });
        else throw PreconditionError("unknown command \"" + c + "\"");
    }

    template <CoefficientField K>
    void classify() {
        const RatMat<K> F = matrix_arg<K>(name(0));
        Verdict v("classification");
        auto item = [&](Verdict x) { v.add(std::move(x), false); };
        auto guarded = [&](const std::string& label, auto&& fn) {
            try {
                item(fn());
            } catch (const DbmError& e) {
                Verdict x(label);
                x.fail("error", e.what());
                item(x);
            }
        };
        guarded("H2", [&] { return in_hardy2(F); });
        guarded("H2_perp", [&] { return in_hardy2_perp(F); });
        guarded("Smirnov", [&] { return in_smirnov(F); });
        guarded("inner", [&] { return in_inner(F, tol_); });
        guarded("Schur", [&] { return in_schur(F, grid_); });
        if (F.square()) guarded("Caratheodory", [&] { return in_caratheodory(F, grid_).verdict; });
        if (F.square() && F.rows() % 2 == 0) {
            const std::size_t n = F.rows() / 2;
            const auto sig = make_signature<K>(n);
            auto named = [](Verdict x, std::string nm) {
                x.name = std::move(nm);
                return x;
            };
            guarded("P(calJ)", [&] { return named(in_PJ(F, sig.J, grid_), "P(calJ)"); });
            guarded("U(calJ)", [&] { return named(in_UJ(F, sig.J, tol_), "U(calJ)"); });
            guarded("P(j)", [&] { return named(in_PJ(F, sig.j, grid_), "P(j)"); });
            guarded("U(j)", [&] { return named(in_UJ(F, sig.j, tol_), "U(j)"); });
        }
        json members = json::object();
        for (const auto& x : v.items) members[x.name] = x.member;
        rep_.result["memberships"] = members;
        rep_.verdict = v;
    }

    template <CoefficientField K>
    Mat<K> signature_arg(std::size_t rows) const {
        if (rows % 2) throw PreconditionError("size mismatch: expected 2n x 2n");
        const auto sig = make_signature<K>(rows / 2);
        if (o_.signature == "calJ") return sig.J;
        if (o_.signature == "j") return sig.j;
        throw PreconditionError("unknown signature \"" + o_.signature + "\" (expected calJ|j)");
    }

    template <CoefficientField K>
    void pg() {
        const RatMat<K> A = matrix_arg<K>(name(0));
        const Mat<K> J = signature_arg<K>(A.rows());
        const RatMat<K> g = pg_transform(A, J);
        put("pg", g);
        Verdict v = in_inner(g, tol_);
        v.name = "PG inner";
        rep_.verdict = v;
    }

    template <CoefficientField K>
    json steps_json(const std::vector<StepRecord<K>>& steps) {
        json a = json::array();
        for (const auto& s : steps) {
            json j;
            j["pole"] = Encoder<K>::scalar(s.pole);
            j["before"] = s.before;
            j["after"] = s.after;
            j["law_checked"] = s.law_checked;
            j["law_holds"] = s.law_holds;
            a.push_back(j);
        }
        return a;
    }

    template <CoefficientField K>
    json factors_json(const EntireProduct<K>& p) {
        json a = json::array();
        for (const auto& f : p.factors) a.push_back({{"z", Encoder<K>::scalar(f.zk)}, {"order", f.order}, {"P", Encoder<K>::constant(f.P)}});
        return a;
    }

    template <CoefficientField K>
    Verdict entire_check(const std::string& label, const RatMat<K>& base, const EntireProduct<K>& prod,
                         const std::optional<RatMat<K>>& g) {
        Verdict v(label);
        if (g) {
            for (const auto& p : g->poles()) v.fail("pole", "G keeps a pole", p.point);
            return v;
        }
        for (const auto& p : base.poles()) {
            const double r = principal_part_norm([&](cplx z) { return CMat(prod.eval(z) * base.eval(z)); }, p.point, p.order);
            if (r > tol_.residue) v.fail("residual", "principal part of G", p.point, r);
        }
        return v;
    }

    template <CoefficientField K>
    void factor() {
        const RatMat<K> F = matrix_arg<K>(name(0));
        FactorOptions opt;
        opt.mode = o_.exp ? FactorMode::with_exp : FactorMode::plain;
        opt.tol = tol_;
        const auto ff = factorize(F, opt);
        rep_.result["mode"] = to_string(opt.mode);
        rep_.result["steps"] = steps_json(ff.steps);
        rep_.result["factors"] = factors_json(ff.product);
        if (ff.rational_g) put("G", *ff.rational_g);
        rep_.show("steps", std::to_string(ff.steps.size()));
        Verdict v("factorization");
        v.add(entire_check("G entire", F, ff.product, ff.rational_g));
        Verdict law("multiplicity law");
        for (const auto& s : ff.steps)
            if (s.law_checked && !s.law_holds) law.fail("residual", "multiplicities do not shift", to_cplx(s.pole));
        v.add(law);
        rep_.verdict = v;
    }

    template <CoefficientField K>
    void cofactor() {
        std::vector<RatMat<K>> fs;
        for (std::size_t k = 0; k < std::max<std::size_t>(1, o_.names.size()); ++k) fs.push_back(matrix_arg<K>(name(k)));
        FactorOptions opt;
        opt.mode = o_.exp ? FactorMode::with_exp : FactorMode::plain;
        opt.tol = tol_;
        opt.require_regular_at_origin = false;
        const auto co = cofactorize(fs, opt);
        rep_.result["steps"] = steps_json(co.steps);
        rep_.result["factors"] = factors_json(co.product);
        if (opt.mode == FactorMode::plain) put("common_factor", co.product.polynomial_part());
        Verdict v("common factorization");
        for (std::size_t k = 0; k < fs.size(); ++k) {
            std::optional<RatMat<K>> g;
            if (!co.rational_g.empty()) g = co.rational_g[k];
            v.add(entire_check("G entire: " + o_.names[k], fs[k], co.product, g));
        }
        rep_.verdict = v;
    }

    template <CoefficientField K>
    void local() {
        const RatMat<K> F = matrix_arg<K>(name(0));
        if (o_.at.empty()) throw PreconditionError("--at is required");
        const K z0 = detail::parse_scalar<K>(o_.at);
        const auto d = local_smith(F, z0, tol_);
        rep_.result["partial_multiplicities"] = d.partial_mults;
        rep_.result["det_order"] = d.det_order;
        put_const("pole_basis", d.pole_basis);
        put_const("zero_basis", d.zero_basis);
        std::ostringstream pm;
        for (int r : d.partial_mults) pm << r << " ";
        rep_.show("partial_multiplicities", pm.str());
        Verdict v("local structure");
        if (!d.det_order_consistent) v.fail("residual", "sum of partial multiplicities differs from the order of det F");
        rep_.verdict = v;
    }

    template <CoefficientField K>
    std::pair<RatMat<K>, std::size_t> db_arg(const std::string& nm) const {
        return model_.db_matrix<K>(nm);
    }

    template <CoefficientField K>
    void db_check_cmd() {
        const auto [A, n] = db_arg<K>(name(0));
        auto d = db_check(A, n, tol_);
        if (d.verdict.member) put("phi", d.phi);
        rep_.verdict = d.verdict;
    }

    template <CoefficientField K>
    void db_decompose_cmd() {
        const auto [A, n] = db_arg<K>(name(0));
        auto d = db_check(A, n, tol_);
        if (!d.verdict.member) {
            rep_.verdict = d.verdict;
            return;
        }
        auto dec = db_decompose(d, grid_, tol_);
        put("S", dec.S);
        put("E_minus", dec.pair.E_minus);
        put("E_plus", dec.pair.E_plus);
        put("a11", dec.tilde.b11);
        put("a12", dec.tilde.b12);
        put("a21", dec.tilde.b21);
        put("a22", dec.tilde.b22);
        rep_.verdict = dec.verdict;
    }

    template <CoefficientField K>
    void db_construct() {
        if (o_.pair.empty()) throw PreconditionError("--pair is required");
        const auto p = model_.pair<K>(o_.pair);
        const std::size_t n = p.n();
        const RatMat<K> S = o_.assoc.empty() ? RatMat<K>::identity(n) : matrix_arg<K>(o_.assoc);
        const auto c = construct_db(p, S, constant_arg<K>(o_.P, n), constant_arg<K>(o_.Q, n), grid_, tol_);
        rep_.result["n"] = n;
        put("A", c.db.A);
        put("phi", c.phi);
        rep_.verdict = c.verdict;
    }

    template <CoefficientField K>
    void kernel() {
        const auto p = model_.pair<K>(o_.pair);
        if (o_.w.empty() || o_.z.empty()) throw PreconditionError("--w and --z are required");
        const cplx w = to_cplx(detail::parse_scalar<K>(o_.w)), z = to_cplx(detail::parse_scalar<K>(o_.z));
        put("K", kernel_eval(p, w, z));
        rep_.verdict = pair_validate(p, grid_, tol_);
    }

    template <CoefficientField K>
    void gram() {
        const auto p = model_.pair<K>(o_.pair);
        Rng rng(o_.seed);
        std::vector<cplx> pts;
        std::vector<CMat> vecs;
        for (std::size_t k = 0; k < o_.points; ++k) {
            pts.emplace_back(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
            CMat v(p.n(), 1);
            for (std::size_t r = 0; r < p.n(); ++r) v(r, 0) = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            vecs.push_back(v);
        }
        const CMat g = gram_matrix(p, pts, vecs);
        put("gram", g);
        rep_.result["min_eig"] = min_hermitian_eigenvalue((g + g.adjoint()) * cplx(0.5));
        Verdict v("Gram");
        v.add(pair_validate(p, grid_, tol_));
        v.add(gram_psd(p, pts, vecs, tol_));
        rep_.verdict = v;
    }

    template <CoefficientField K>
    void inner() {
        const auto p = model_.pair<K>(o_.pair);
        const RatMat<K> f = matrix_arg<K>(o_.f), g = matrix_arg<K>(o_.g);
        Verdict v("inner product");
        v.add(space_membership(p, f));
        v.add(space_membership(p, g));
        const K over_pi = inner_product_over_pi(p, f, g);
        const cplx val = std::numbers::pi * to_cplx(over_pi);
        const cplx quad = inner_product_quadrature(p, f, g);
        rep_.result["value_over_pi"] = Encoder<K>::scalar(over_pi);
        rep_.result["value"] = Encoder<cplx>::scalar(val);
        rep_.result["quadrature"] = Encoder<cplx>::scalar(quad);
        rep_.show("value/pi", detail::fmt(over_pi));
        rep_.show("quadrature/pi", detail::fmt(quad / std::numbers::pi));
        Verdict agree("residue value matches quadrature");
        const double r = std::abs(val - quad) / std::max(1.0, std::abs(val));
        if (r > 1e-6) agree.fail("residual", "quadrature differs", std::nullopt, r);
        v.add(agree);
        rep_.verdict = v;
    }

    template <CoefficientField K>
    void assoc() {
        const auto p = model_.pair<K>(o_.pair);
        rep_.verdict = assoc_check(p, matrix_arg<K>(o_.assoc));
    }

    template <CoefficientField K>
    void charfn() {
        K0Operator<K> op;
        if (!o_.k0.empty()) {
            op = model_.k0<K>(o_.k0);
        } else {
            const auto gen = gen_k0(o_.seed, o_.dim, o_.n);
            if constexpr (is_exact_v<K>) op = gen;
            else op = {to_cplx(gen.T), to_cplx(gen.U)};
        }
        const auto cf = char_fn<K>(op.T, op.U, op.n(), tol_);
        put_const("T", op.T);
        put_const("U", op.U);
        rep_.result["n"] = op.n();
        rep_.result["convention"] = to_string(cf.convention);
        if (cf.verdict.find("K0 conditions") && cf.verdict.find("K0 conditions")->member) put("W", cf.W);
        rep_.verdict = cf.verdict;
    }

    template <CoefficientField K>
    void verify() {
        const auto [A, n] = db_arg<K>(name(0));
        Verdict v("identity suite");
        auto d = db_check(A, n, tol_);
        v.add(d.verdict);
        if (!d.verdict.member) {
            rep_.verdict = v;
            return;
        }
        const auto po = phi_of(A, n, tol_);
        Verdict forms("Phi forms agree");
        if (!po.forms_agree) forms.fail("residual", "the two Phi forms differ", std::nullopt, po.residual);
        v.add(forms);
        v.add(sharp_inverse_identity(A, n, tol_));
        v.add(verify_pg_blocks(A, n, grid_, tol_));
        put("phi", po.phi);
        Verdict ex("extract_PQ round trip");
        try {
            const auto e = extract_PQ(po.phi);
            put_const("P", e.params.P);
            put_const("Q", e.params.Q);
            if (e.roundtrip_residual > 1e-9) ex.fail("residual", "round trip differs", std::nullopt, e.roundtrip_residual);
        } catch (const NotRepresentableError& e) {
            ex.note(e.what());
        }
        v.add(ex);
        auto decomposed = [&]<CoefficientField L>(const RatMat<L>& AL) {
            auto dl = db_check(AL, n, tol_);
            auto dec = db_decompose(dl, grid_, tol_);
            v.add(dec.verdict);
            v.add(realpart_identities(AL, n, dec.pair, dec.S, dl.phi, grid_, tol_));
        };
        try {
            decomposed(A);
        } catch (const NotRepresentableError& e) {
            if constexpr (is_exact_v<K>) {
                v.note(std::string("decomposition in float mode: ") + e.what());
                decomposed(to_float(A));
            } else {
                throw;
            }
        }
        rep_.verdict = v;
    }

    template <CoefficientField K>
    void uniq() {
        const auto [A, n] = db_arg<K>(name(0));
        const auto [B, nb] = db_arg<K>(name(1));
        if (n != nb) throw PreconditionError("size mismatch between the two matrices");
        auto u = uniqueness_check(A, B, n, tol_);
        if (u.L) put("L", *u.L);
        rep_.verdict = u.verdict;
    }
};

inline void add_common(CLI::App* app, Options& o) {
    app->add_option("-m,--model", o.model, "model file");
    app->add_option("--tol", o.tol, "PSD slack for sampled tests")->capture_default_str();
    app->add_option("--grid", o.grid, "grid spec, e.g. \"nx=11;ys=0.5,1\"");
    app->add_option("--mode", o.mode, "exact|float")->check(CLI::IsMember({"exact", "float"}));
    app->add_option("--seed", o.seed, "random seed");
    app->add_option("--out", o.out, "write the report to a file");
    app->add_option("--format", o.format, "json|text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
}

/// Parses argv, runs the command and writes the report; returns the exit code (0 pass, 1 fail, 2 error).
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"de Branges matrix toolkit"};
    app.require_subcommand(1);
    Options o;
    struct Spec {
        const char* name;
        const char* help;
    };
    const Spec specs[] = {
        {"classify", "class memberships of a rational matrix"},
        {"pg", "Potapov-Ginzburg transform"},
        {"factor", "factorization G = P F with G entire"},
        {"cofactor", "one common factor for several functions"},
        {"local", "local Smith-McMillan data at a point"},
        {"db-check", "de Branges matrix check"},
        {"db-decompose", "pair and associated function of a de Branges matrix"},
        {"db-construct", "de Branges matrix from (pair, S, P, Q)"},
        {"kernel", "reproducing kernel K_w(z)"},
        {"gram", "Gram matrix at seeded random points"},
        {"inner-product", "inner product in B(E)"},
        {"assoc-check", "associated function test"},
        {"charfn", "characteristic function of a K0 operator"},
        {"verify", "full identity suite for a de Branges matrix"},
        {"uniq", "uniqueness relation between two de Branges matrices"},
    };
    for (const auto& s : specs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, o);
        sub->add_option("names", o.names, "object names");
        const std::string nm = s.name;
        if (nm == "pg") sub->add_option("--signature", o.signature, "calJ|j")->capture_default_str();
        if (nm == "factor" || nm == "cofactor") sub->add_flag("--exp", o.exp, "exponential factors");
        if (nm == "local") sub->add_option("--at", o.at, "point")->required();
        if (nm == "db-construct" || nm == "kernel" || nm == "gram" || nm == "inner-product" || nm == "assoc-check")
            sub->add_option("--pair", o.pair, "pair object")->required();
        if (nm == "db-construct" || nm == "assoc-check") sub->add_option("--assoc", o.assoc, "associated function S");
        if (nm == "db-construct") {
            sub->add_option("--P", o.P, "P (object name or scalar times I)")->capture_default_str();
            sub->add_option("--Q", o.Q, "Q (object name or scalar times I)")->capture_default_str();
        }
        if (nm == "kernel") {
            sub->add_option("--w", o.w, "w")->required();
            sub->add_option("--z", o.z, "z")->required();
        }
        if (nm == "gram") sub->add_option("--points", o.points, "number of points")->capture_default_str();
        if (nm == "inner-product") {
            sub->add_option("--f", o.f, "f")->required();
            sub->add_option("--g", o.g, "g")->required();
        }
        if (nm == "charfn") {
            sub->add_option("--k0", o.k0, "k0_operator object");
            sub->add_option("--dim", o.dim, "N")->capture_default_str();
            sub->add_option("--n", o.n, "n")->capture_default_str();
        }
        sub->callback([&o, nm] { o.command = nm; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }
    Report rep = Runner(o).run();
    const std::string text = o.format == "text" ? rep.to_text() : rep.to_json().dump(2) + "\n";
    if (!o.out.empty()) {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) {
            err << "cannot write " << o.out << "\n";
            return 2;
        }
        f << text;
    } else {
        out << text;
    }
    if (rep.error) err << rep.error->second << "\n";
    return rep.exit_code();
}

}  // namespace dbm::cli
