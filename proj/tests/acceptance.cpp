// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "dbm/dbm.hpp"

using namespace dbm;
using G = GaussRational;

namespace {

const G I_ = G::i();

G q(long p, long d = 1) { return FieldTraits<G>::from_ratio(p, d); }
QPoly zq() { return QPoly::z(); }
QRat cst(const G& v) { return QRat(v); }
QRat lin(const G& root) { return QRat(QPoly::linear_root(root)); }
QRatMat scalar(const QRat& f) { return QRatMat::diag({f}); }
Mat<G> eye(std::size_t n) { return Mat<G>::identity(n); }

QRatMat running() { return QRatMat::from_blocks(scalar(QRat(zq())), scalar(cst(1)), scalar(cst(-1)), scalar(cst(0))); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << "first failure: " << what << "; ";
            pass = false;
        }
    }
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failures;
    std::printf("[%2d] %s  %s  (%s; %.1f s)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
}

// --- corpus -----------------------------------------------------------------

/// [[a/c, -b/c], [b/c, a/c]] with a^2 + b^2 = c^2.
Mat<G> rotation(long a, long b, long c) {
    Mat<G> r(2, 2);
    r(0, 0) = q(a, c);
    r(0, 1) = q(-b, c);
    r(1, 0) = q(b, c);
    r(1, 1) = q(a, c);
    return r;
}

/// E+ = V1 D V2, E- = V1 D^# V2 with D diagonal with roots in C-.
DeBrangesPair<G> rotated_pair(const std::vector<QRat>& d, const Mat<G>& v1, const Mat<G>& v2) {
    const QRatMat D = QRatMat::diag(d);
    return {QRatMat(v1) * D.sharp() * QRatMat(v2), QRatMat(v1) * D * QRatMat(v2)};
}

struct PairCase {
    std::string name;
    DeBrangesPair<G> p;
};

std::vector<PairCase> corpus_pairs() {
    std::vector<PairCase> out;
    out.push_back({"z-i", {scalar(lin(I_)), scalar(lin(-I_))}});
    {
        const QRat ep = lin(-I_) * lin(G(-1) - I_ * G(2));
        out.push_back({"deg2", {scalar(ep.sharp()), scalar(ep)}});
    }
    out.push_back({"rot2", rotated_pair({lin(-I_), lin(-I_ * G(2))}, rotation(3, 4, 5), rotation(5, 12, 13))});
    out.push_back({"mixed2", rotated_pair({lin(-I_), lin(G(-1) - I_) * lin(G(1) - I_ * G(2))}, rotation(3, 4, 5), eye(2))});
    return out;
}

struct Built {
    std::string name;
    DeBrangesPair<G> p;
    QRatMat S;
    Mat<G> P, Q;
    Construction<G> c;
};

std::vector<std::pair<Mat<G>, Mat<G>>> pq_choices(std::size_t n) {
    if (n == 1) return {{eye(1) * G(0), eye(1) * G(0)}, {eye(1), eye(1) * G(0)}, {eye(1) * G(0), eye(1) * G(2)}, {eye(1) * G(3), eye(1) * G(-1)}};
    Mat<G> ph(2, 2), qh(2, 2);
    ph(0, 0) = G(2);
    ph(0, 1) = I_;
    ph(1, 0) = -I_;
    ph(1, 1) = G(1);
    qh(0, 0) = G(1);
    qh(0, 1) = G(1) + I_;
    qh(1, 0) = G(1) - I_;
    qh(1, 1) = G(-1);
    return {{eye(2) * G(0), eye(2) * G(0)}, {eye(2), eye(2) * G(0)}, {eye(2) * G(3), eye(2) * G(-1)}, {eye(2) * G(0), qh}, {ph, qh}};
}

std::vector<Built> build_corpus() {
    std::vector<Built> out;
    for (const auto& pc : corpus_pairs()) {
        const std::size_t n = pc.p.n();
        for (const QRatMat& S : {QRatMat::identity(n), pc.p.E_plus}) {
            for (const auto& [P, Q] : pq_choices(n)) {
                // S = E+ with a non-scalar P or Q leaves a~21, a~22 non-polynomial
                if (n > 1 && !(S == QRatMat::identity(n)) && !(P == eye(n) * P(0, 0) && Q == eye(n) * Q(0, 0))) continue;
                Built b{pc.name + (S == QRatMat::identity(n) ? "/S=I" : "/S=E+"), pc.p, S, P, Q, construct_db(pc.p, S, P, Q)};
                out.push_back(std::move(b));
            }
        }
    }
    return out;
}

struct CharInstance {
    std::uint64_t seed;
    std::size_t N, n;
    CharFn<G> cf;
};

// --- helpers ----------------------------------------------------------------

std::string temp_model_path(const std::string& tag) {
    return (std::filesystem::temp_directory_path() / ("dbm_acceptance_" + tag + ".json")).string();
}

std::pair<int, std::string> run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "dbm_cli");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {rc, out.str() + err.str()};
}

bool hermitian(const Mat<G>& m) { return m == m.adjoint(); }

/// Independent membership test: entries of adj(E) f / det E via float roots and degrees.
bool hardy_by_roots(const QRatMat& E, const QRatMat& f, bool poles_below) {
    const std::size_t n = E.rows();
    const CPoly d = to_cplx(det(E).num());
    // adj(E) f = det(E) E^{-1} f, a polynomial column
    const QRatMat adjf = inverse(E) * f * Rat<G>(det(E).num());
    const std::vector<cplx> rts = detail::companion_roots(d);
    for (std::size_t r = 0; r < n; ++r) {
        if (!adjf(r, 0).is_polynomial()) return false;
        const CPoly num = to_cplx(adjf(r, 0).num());
        if (num.is_zero()) continue;
        // strictly proper
        if (num.degree() >= d.degree()) return false;
        for (cplx rt : rts) {
            const double scale = std::max(1.0, num.abs_bound(std::abs(rt)));
            if (std::abs(num.eval(rt)) <= 1e-8 * scale) continue;  // cancels
            if (std::abs(rt.imag()) < 1e-10) return false;
            if (poles_below ? rt.imag() > 0 : rt.imag() < 0) return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    const auto t_all = std::chrono::steady_clock::now();

    criterion(1, "signature algebra", [](Outcome& o) {
        for (std::size_t n = 1; n <= 4; ++n) {
            const auto s = make_signature<G>(n);
            // (sqrt2 M)* J (sqrt2 M) = 2 j
            o.require(s.sqrt2_M.adjoint() * s.J * s.sqrt2_M == s.j * G(2), "M* J M = j for n=" + std::to_string(n));
            o.require(s.identity_holds(), "signature identities for n=" + std::to_string(n));
        }
        o.detail << "n = 1..4 exact";
    });

    criterion(2, "minimal construction", [](Outcome& o) {
        const DeBrangesPair<G> p{scalar(lin(I_)), scalar(lin(-I_))};
        ModelFile m;
        m.put_pair("E", p);
        m.put_matrix("S", QRatMat::identity(1));
        const std::string path = temp_model_path("c2");
        m.save(path);
        auto [rc, out] = run_cli({"db-construct", "-m", path, "--pair", "E", "--assoc", "S", "--P", "0", "--Q", "0"});
        std::remove(path.c_str());
        o.require(rc == 0, "db-construct exit code " + std::to_string(rc));
        const auto rep = nlohmann::json::parse(out);
        o.require(rep["result"]["A"] == Encoder<G>::matrix(running()), "A = [[z,1],[-1,0]]");
        const QRatMat phi = scalar(cst(I_) * QRat(QPoly(G(1)), QPoly::linear_root(-I_)));
        o.require(rep["result"]["phi"] == Encoder<G>::matrix(phi), "Phi = i/(z+i)");
        const auto J = make_signature<G>(1).J;
        o.require(running().sharp() * J * running() == QRatMat(J), "A^# J A = J");
        for (const G& w : {G(0), G(1) + I_, q(-1, 2) + I_ * G(3), G(2) - I_}) {
            o.require(kernel_column_times_pi(p, w, eye(1)) == QRatMat::identity(1), "pi K_w = 1");
        }
        double kerr = 0.0;
        for (cplx w : {cplx(0.3, 1.0), cplx(-2.0, -0.5)})
            for (cplx z : {cplx(1.0, 1.0), std::conj(w), cplx(0.0, -3.0)}) kerr = std::max(kerr, std::abs(kernel_eval(p, w, z)(0, 0) - 1.0 / std::numbers::pi));
        o.require(kerr < 1e-14, "numeric kernel");
        o.detail << "A, Phi exact; max |K - 1/pi| = " << kerr;
    });

    criterion(3, "Herglotz representation", [](Outcome& o) {
        HerglotzParams<G> h;
        h.P = eye(1) * G(0);
        h.Q = eye(1) * G(0);
        h.density = scalar(QRat(QPoly(G(1)), zq() * zq() + QPoly(G(1))));
        o.require(herglotz_residue_eval(h, I_ * G(2))(0, 0) == q(1, 3), "Phi(2i) = 1/3");
        Rng rng(2024);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const G z = q(rng.integer(-300, 300), 100) + I_ * q(rng.integer(10, 300), 100);
            const cplx exact = to_cplx(herglotz_residue_eval(h, z)(0, 0));
            const cplx quad = herglotz_quadrature(h, to_cplx(z))(0, 0);
            worst = std::max(worst, std::abs(exact - quad) / std::abs(exact));
        }
        o.require(worst < 1e-6, "quadrature agreement");
        const auto e = extract_PQ(herglotz_rational(h));
        o.require(e.params.density == h.density && e.params.P == h.P && e.params.Q == h.Q && e.roundtrip_residual == 0.0, "extract_PQ round trip");
        o.detail << "max rel diff residue/quadrature = " << worst;
    });

    // 50 seeded characteristic functions, N <= 6, n in {1, 2}
    std::vector<CharInstance> inst;
    criterion(4, "U(J) certification of characteristic functions", [&](Outcome& o) {
        int ok = 0;
        for (std::uint64_t s = 1; s <= 50; ++s) {
            const std::size_t n = 1 + s % 2;
            const std::size_t N = 2 * n + (s / 2) % (7 - 2 * n);
            const auto op = gen_k0(s, N, n);
            CharInstance ci{s, N, n, char_fn<G>(op.T, op.U, n)};
            const Verdict* db = ci.cf.verdict.find("de Branges matrix");
            const Verdict* uj = db ? db->find("U(J)") : nullptr;
            bool good = ci.cf.verdict.member && db && db->member && uj && uj->member;
            if (uj) {
                const Verdict* pg = uj->find("PG inner");
                const Verdict* id = uj->find("A^# J A = J");
                good = good && pg && pg->member && id && id->member;
            }
            const Verdict ub = u_block_check(ci.cf.W, n, default_grid(), default_tolerances(), uj);
            int items = 0;
            for (const auto& it : ub.items)
                if (it.name.rfind("(", 0) == 0 && it.member) ++items;
            good = good && ub.member && items == 6;
            o.require(good, "seed " + std::to_string(s));
            ok += good;
            inst.push_back(std::move(ci));
        }
        o.detail << ok << "/50 instances certified";
    });

    std::vector<Built> corpus;
    const auto t_corpus = std::chrono::steady_clock::now();
    try {
        corpus = build_corpus();
    } catch (const std::exception& e) {
        std::printf("corpus construction failed: %s\n", e.what());
    }
    std::fprintf(stderr, "corpus: %zu constructions in %.1f s\n", corpus.size(), seconds_since(t_corpus));

    criterion(5, "U(J) members without real poles have Phi holomorphic on R", [&](Outcome& o) {
        int tested = 0, fails = 0;
        auto check = [&](const RatMat<G>& A, std::size_t n, const Verdict& dbv) {
            const Verdict* uj = dbv.find("U(J)");
            if (!uj || !uj->member || !classify_poles(A).real.empty()) return;
            ++tested;
            const Verdict* ph = dbv.find("Phi holomorphic on R");
            if (!ph || !ph->member) ++fails;
            (void)n;
        };
        for (const auto& ci : inst) {
            const Verdict* db = ci.cf.verdict.find("de Branges matrix");
            if (db) check(ci.cf.W, ci.n, *db);
        }
        // products of characteristic functions with n = 1
        std::vector<const CharInstance*> ones;
        for (const auto& ci : inst)
            if (ci.n == 1) ones.push_back(&ci);
        for (std::size_t k = 0; k + 1 < ones.size() && k < 16; k += 2) {
            const QRatMat prod = ones[k]->cf.W * ones[k + 1]->cf.W;
            check(prod, 1, db_check(prod, 1).verdict);
        }
        for (const auto& b : corpus) check(b.c.db.A, b.p.n(), b.c.db.verdict);
        o.require(fails == 0, std::to_string(fails) + " failures");
        o.require(tested >= 80, "corpus too small");
        o.detail << tested << " U(J) members tested, " << fails << " failures";
    });

    criterion(6, "factorization", [&](Outcome& o) {
        int ok = 0;
        double worst = 0.0;
        for (std::uint64_t s = 1; s <= 25; ++s) {
            Rng rng(1000 + s);
            const std::size_t m = 1 + s % 3;
            QRatMat F;
            for (int attempt = 0;; ++attempt) {
                F = QRatMat(m, m);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < m; ++j) F(i, j) = cst(rng.gaussian_int(2));
                const int npoles = static_cast<int>(rng.integer(1, 3));
                std::vector<G> used;
                for (int k = 0; k < npoles; ++k) {
                    G a;
                    do a = rng.gaussian_int(3);
                    while (a.is_zero() || std::find(used.begin(), used.end(), a) != used.end());
                    used.push_back(a);
                    const int order = static_cast<int>(rng.integer(1, 2));
                    QPoly den(G(1));
                    for (int t = 0; t < order; ++t) den *= QPoly::linear_root(a);
                    for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t j = 0; j < m; ++j)
                            if (rng.integer(0, 1)) F(i, j) = F(i, j) + QRat(QPoly(rng.gaussian_int(2)), den);
                }
                if (!F.poles().empty() && !det(F).is_zero() && !F.at(G(0)).is_zero() && !det(QRatMat(F.at(G(0)))).is_zero()) break;
            }
            int total = 0;
            for (const auto& p : F.poles()) total += p.order;
            const auto ff = factorize(F);
            bool good = total <= 6 && ff.rational_g && ff.rational_g->poles().empty();
            const auto poles = F.poles();
            for (const auto& p : poles) {
                double radius = 0.5;
                for (const auto& o2 : poles)
                    if (&o2 != &p) radius = std::min(radius, 0.4 * std::abs(o2.point - p.point));
                const double r = principal_part_norm([&](cplx z) { return ff.eval_g(z); }, p.point, p.order, radius);
                worst = std::max(worst, r);
                good = good && r < 1e-8;
            }
            // per pole: the chain starts at the local Smith data of F, drops each |k_j| by one per step and ends empty
            for (const auto& p : F.poles()) {
                std::vector<const StepRecord<G>*> chain;
                for (const auto& st : ff.steps)
                    if (std::abs(to_cplx(st.pole) - p.point) < 1e-6) chain.push_back(&st);
                std::vector<int> expect = local_smith(F, chain.empty() ? G(0) : chain.front()->pole).pole_multiplicities();
                good = good && !chain.empty();
                for (const auto* st : chain) {
                    std::vector<int> next;
                    for (int k : expect)
                        if (k > 1) next.push_back(k - 1);
                    good = good && st->law_checked && st->before == expect && st->after == next;
                    expect = next;
                }
                good = good && expect.empty();
            }
            o.require(good, "matrix seed " + std::to_string(s));
            ok += good;
        }
        int co_ok = 0;
        FactorOptions opt;
        opt.require_regular_at_origin = false;
        opt.check_multiplicity_law = false;
        for (const auto& ci : inst) {
            const auto b = blocks_of(to_float(ci.cf.W), ci.n);
            const auto co = cofactorize(std::vector<CRatMat>{b.b11, b.b12, b.b21, b.b22}, opt);
            bool good = co.rational_g.size() == 4;
            for (const auto& g : co.rational_g) good = good && g.poles().empty();
            o.require(good, "cofactorize seed " + std::to_string(ci.seed));
            co_ok += good;
        }
        o.detail << ok << "/25 factorized, max residue norm " << worst << "; " << co_ok << "/" << inst.size() << " common factors";
    });

    criterion(7, "de Branges space", [&](Outcome& o) {
        const auto pairs = corpus_pairs();
        double worst = 0.0;
        int repro = 0;
        for (const auto& pc : pairs) {
            const std::size_t n = pc.p.n();
            const std::vector<G> ws{G(0), G(1) + I_, q(-1, 2) - I_ * G(2)};
            std::vector<QRatMat> span;
            for (const G& w : ws)
                for (std::size_t k = 0; k < n; ++k) {
                    Mat<G> u(n, 1);
                    u(k, 0) = G(1);
                    span.push_back(kernel_column_times_pi(pc.p, w, u));
                }
            for (const auto& f : span)
                for (const G& w : ws)
                    for (std::size_t k = 0; k < n; ++k) {
                        Mat<G> u(n, 1);
                        u(k, 0) = G(1) + I_ * G(static_cast<long>(k));
                        const G lhs = inner_product_over_pi(pc.p, f, kernel_column_times_pi(pc.p, w, u));
                        const G rhs = (u.adjoint() * f.at(w))(0, 0);
                        worst = std::max(worst, std::abs(to_cplx(lhs) - to_cplx(rhs)) * std::numbers::pi);
                        ++repro;
                    }
        }
        o.require(worst <= 1e-9, "reproducing property");
        Rng rng(77);
        double min_eig = INFINITY;
        for (int set = 0; set < 100; ++set) {
            const auto& pc = pairs[static_cast<std::size_t>(rng.integer(0, static_cast<long>(pairs.size()) - 1))];
            const std::size_t k = static_cast<std::size_t>(rng.integer(1, 6));
            std::vector<cplx> pts;
            std::vector<CMat> vs;
            for (std::size_t j = 0; j < k; ++j) {
                pts.emplace_back(rng.uniform(-3, 3), rng.uniform(-3, 3));
                CMat v(pc.p.n(), 1);
                for (std::size_t r = 0; r < pc.p.n(); ++r) v(r, 0) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
                vs.push_back(v);
            }
            const CMat g = gram_matrix(pc.p, pts, vs);
            const double e = min_hermitian_eigenvalue((g + g.adjoint()) * cplx(0.5));
            min_eig = std::min(min_eig, e);
            o.require(e >= -1e-9 && gram_psd(pc.p, pts, vs).member, "Gram set " + std::to_string(set));
        }
        int agree = 0, members = 0, total = 0;
        for (const auto& pc : pairs) {
            const std::size_t n = pc.p.n();
            for (int t = 0; t < 12; ++t) {
                QRatMat f(n, 1);
                const int deg = static_cast<int>(rng.integer(0, 3));
                for (std::size_t r = 0; r < n; ++r) f(r, 0) = QRat(rng.poly(deg, 2));
                const bool ours = space_membership(pc.p, f).member;
                const bool brute = hardy_by_roots(pc.p.E_plus, f, true) && hardy_by_roots(pc.p.E_minus, f, false);
                agree += ours == brute;
                members += ours;
                ++total;
            }
        }
        o.require(agree == total, "membership disagreement");
        o.require(members > 0 && members < total, "membership sample is one-sided");
        o.detail << repro << " reproducing checks, max err " << worst << "; min Gram eig " << min_eig << "; membership " << agree << "/" << total << " agree (" << members << " members)";
    });

    criterion(8, "real part identities on the corpus", [&](Outcome& o) {
        int ok = 0;
        for (const auto& b : corpus) {
            const std::size_t n = b.p.n();
            const auto ph = phi_of(b.c.db.A, n);
            const Verdict v = realpart_identities(b.c.db.A, n, b.p, b.S, ph.phi);
            o.require(v.member, b.name);
            ok += v.member;
        }
        // characteristic functions, decomposed in float mode (their poles are irrational in general)
        int cf_ok = 0, cf_total = 0;
        for (const auto& ci : inst) {
            ++cf_total;
            const auto d = db_check(to_float(ci.cf.W), ci.n);
            const auto dec = db_decompose(d);
            const Verdict v = realpart_identities(d.A, ci.n, dec.pair, dec.S, d.phi);
            o.require(dec.verdict.member && v.member, "charfn seed " + std::to_string(ci.seed));
            cf_ok += dec.verdict.member && v.member;
        }
        o.require(ok > 0, "empty corpus");
        o.detail << ok << "/" << corpus.size() << " constructions, " << cf_ok << "/" << cf_total << " characteristic functions (float)";
    });

    criterion(9, "round trip and uniqueness", [&](Outcome& o) {
        int rt = 0, un = 0, un_total = 0;
        double pq_err = 0.0;
        for (const auto& b : corpus) {
            const std::size_t n = b.p.n();
            o.require(b.c.verdict.member, "construction " + b.name);
            const auto dec = db_decompose(b.c.db);
            // the representation is unique up to a constant left factor; the decomposition picks S(0) = I
            const QRatMat C(inverse(b.S.at(G(0))));
            const bool same = dec.verdict.member && dec.pair.E_plus == C * b.p.E_plus && dec.pair.E_minus == C * b.p.E_minus && dec.S == C * b.S;
            const auto e = extract_PQ(phi_of(b.c.db.A, n).phi);
            const double err = std::max((to_cplx(e.params.P) - to_cplx(b.P)).max_abs(), (to_cplx(e.params.Q) - to_cplx(b.Q)).max_abs());
            pq_err = std::max(pq_err, err);
            o.require(same && err <= 1e-9, "round trip " + b.name);
            rt += same && err <= 1e-9;
        }
        for (std::size_t i = 0; i < corpus.size(); ++i)
            for (std::size_t j = i + 1; j < corpus.size(); ++j) {
                const auto& a = corpus[i];
                const auto& b = corpus[j];
                if (a.name != b.name) continue;
                ++un_total;
                const auto u = uniqueness_check(a.c.db.A, b.c.db.A, a.p.n());
                bool good = u.verdict.member && u.L.has_value();
                if (good) {
                    const QRatMat expect = QRatMat(a.Q - b.Q) + QRatMat(b.P - a.P) * QRat(zq());
                    const Mat<G> l0 = u.L->at(G(0)), l1 = u.L->at(G(1)) - l0;
                    good = *u.L == expect && hermitian(l0) && hermitian(l1);
                }
                o.require(good, "uniqueness " + a.name);
                un += good;
            }
        // non-scalar Q with S = E+ must be rejected
        bool rejected = false;
        try {
            const auto pc = corpus_pairs()[2];
            construct_db(pc.p, pc.p.E_plus, eye(2) * G(0), pq_choices(2).back().second);
        } catch (const PreconditionError&) {
            rejected = true;
        }
        o.require(rejected, "inconsistent S = E+ with matrix Q accepted");
        o.detail << rt << "/" << corpus.size() << " round trips (max P,Q err " << pq_err << "), " << un << "/" << un_total << " uniqueness relations";
    });

    criterion(10, "determinism", [&](Outcome& o) {
        ModelFile m;
        m.put_db_matrix("A", running(), 1);
        m.put_pair("E", corpus_pairs()[1].p);
        QRatMat F(2, 2);
        F(0, 0) = cst(2) + QRat(QPoly(G(1)), QPoly::linear_root(G(1)));
        F(0, 1) = QRat(QPoly(G(1)), QPoly::linear_root(G(2)) * QPoly::linear_root(G(2)));
        F(1, 1) = cst(1);
        m.put_matrix("F", F);
        m.put_matrix("one", QRatMat::identity(1));
        const std::string path = temp_model_path("c10");
        m.save(path);
        const std::vector<std::vector<std::string>> runs{
            {"verify", "-m", path, "A"},
            {"gram", "-m", path, "--pair", "E", "--seed", "5", "--points", "6"},
            {"charfn", "--seed", "3", "--dim", "4", "--n", "1"},
            {"factor", "-m", path, "F"},
            {"classify", "-m", path, "F", "--format", "text"},
            {"inner-product", "-m", path, "--pair", "E", "--f", "one", "--g", "one"},
        };
        int same = 0;
        for (const auto& args : runs) {
            const auto a = run_cli(args), b = run_cli(args);
            const bool eq = a == b && !a.second.empty();
            o.require(eq, args[0]);
            same += eq;
        }
        std::remove(path.c_str());
        o.detail << same << "/" << runs.size() << " commands byte-identical";
    });

    std::printf("total %.1f s, %d failing\n", seconds_since(t_all), failures);
    return failures == 0 ? 0 : 1;
}
