#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dbm/dbm.hpp"

using namespace dbm;
using G = GaussRational;

namespace {

const G I_ = G::i();

QPoly zq() { return QPoly::z(); }
QRat cst(const G& v) { return QRat(v); }
QRat lin(const G& root) { return QRat(QPoly::linear_root(root)); }
QRat inv_lin(const G& root) { return QRat(QPoly(G(1)), QPoly::linear_root(root)); }
QRatMat scalar(const QRat& f) { return QRatMat::diag({f}); }
Mat<G> c1(const G& v) { return Mat<G>::identity(1) * v; }

QRatMat running() { return QRatMat::from_blocks(scalar(QRat(zq())), scalar(cst(1)), scalar(cst(-1)), scalar(cst(0))); }
DeBrangesPair<G> running_pair() { return {scalar(lin(I_)), scalar(lin(-I_))}; }
QRatMat one() { return QRatMat::identity(1); }

struct TempModel {
    std::string path;
    explicit TempModel(const ModelFile& m) {
        path = (std::filesystem::temp_directory_path() / ("dbm_test_" + std::to_string(std::rand()) + ".json")).string();
        m.save(path);
    }
    ~TempModel() { std::remove(path.c_str()); }
};

ModelFile sample_model() {
    ModelFile m;
    m.put_db_matrix("A", running(), 1);
    m.put_pair("E", running_pair());
    m.put_matrix("S", one());
    m.put_matrix("one", one());
    m.put_db_matrix("A_q2", QRatMat::from_blocks(scalar(QRat(zq())), scalar(cst(1)), scalar(QRat(zq() * G(-2) - QPoly(G(1)))), scalar(cst(-2))), 1);
    return m;
}

std::pair<int, std::string> run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "dbm_cli");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {rc, out.str() + err.str()};
}

}  // namespace

TEST_CASE("Phi of a de Branges matrix") {
    const auto ph = phi_of(running(), 1);
    REQUIRE(rat_equal(ph.phi, scalar(cst(I_) * inv_lin(-I_))));
    REQUIRE(ph.forms_agree);
    REQUIRE(sharp_inverse_identity(running(), 1).member);
    REQUIRE(rat_equal(density_of(running_pair(), one()), scalar(QRat(QPoly(G(1)), zq() * zq() + QPoly(G(1))))));
}

TEST_CASE("Herglotz evaluation") {
    HerglotzParams<G> h;
    h.P = c1(G(0));
    h.Q = c1(G(0));
    h.density = one();
    REQUIRE(herglotz_eval(h, G(2) * I_ + G(1))(0, 0) == G(1));
    h.density = QRatMat(1, 1);
    h.P = c1(G(1));
    REQUIRE(herglotz_eval(h, G(4) * I_)(0, 0) == G(4));
    h.Q = c1(G(3));
    REQUIRE(herglotz_eval(h, G(4) * I_)(0, 0) == G(4) + G(3) * I_);
}

TEST_CASE("real part identities and recovered blocks") {
    const auto p = running_pair();
    const auto ph = phi_of(running(), 1);
    REQUIRE(realpart_identities(running(), 1, p, one(), ph.phi).member);
    const auto rb = recover_blocks(p, one(), ph.phi);
    REQUIRE(rb.verdict.member);
    REQUIRE(rat_equal(rb.tilde.b11, scalar(QRat(zq()))));
    REQUIRE(rat_equal(rb.tilde.b12, one()));
    REQUIRE(rat_equal(rb.tilde.b21, scalar(cst(-1))));
    REQUIRE(rb.tilde.b22.is_zero());
    SECTION("Phi + iQ gives the shifted lower row") {
        const auto q = recover_blocks(p, one(), ph.phi + scalar(cst(I_ * G(2))));
        REQUIRE(rat_equal(q.tilde.b21, scalar(QRat(zq() * G(-2) - QPoly(G(1))))));
        REQUIRE(rat_equal(q.tilde.b22, scalar(cst(-2))));
    }
    SECTION("non-associated S is rejected") {
        REQUIRE_THROWS_AS(recover_blocks(p, scalar(QRat(zq() * zq())), ph.phi + scalar(QRat(QPoly(G(1)), zq()))), PreconditionError);
    }
}

TEST_CASE("construction") {
    const auto p = running_pair();
    SECTION("P = Q = 0 gives the running matrix") {
        const auto c = construct_db(p, one(), c1(G(0)), c1(G(0)));
        REQUIRE(c.verdict.member);
        REQUIRE(rat_equal(c.db.A, running()));
        REQUIRE(verify_pg_blocks(c.db.A, 1).member);
    }
    SECTION("uniqueness relation") {
        const auto a = construct_db(p, one(), c1(G(0)), c1(G(0)));
        const auto b = construct_db(p, one(), c1(G(0)), c1(G(2)));
        const auto c = construct_db(p, one(), c1(G(3)), c1(G(0)));
        const auto u = uniqueness_check(a.db.A, b.db.A, 1);
        REQUIRE(u.verdict.member);
        REQUIRE(rat_equal(*u.L, scalar(cst(-2))));
        const auto v = uniqueness_check(a.db.A, c.db.A, 1);
        REQUIRE(v.verdict.member);
        REQUIRE(rat_equal(*v.L, scalar(QRat(zq() * G(3)))));
        REQUIRE(in_UJ(c.db.A, make_signature<G>(1).J).member);
    }
    SECTION("negative P is a precondition failure") {
        REQUIRE_THROWS_AS(construct_db(p, one(), c1(G(-1)), c1(G(0))), PreconditionError);
    }
    SECTION("different upper rows") {
        const QRatMat B = QRatMat::from_blocks(scalar(QRat(zq() * G(2))), scalar(cst(1)), scalar(cst(-1)), scalar(cst(0)));
        REQUIRE_FALSE(uniqueness_check(running(), B, 1).verdict.member);
    }
}

TEST_CASE("model files") {
    const ModelFile m = sample_model();
    const std::string text = m.serialize();
    SECTION("round trip is byte-identical") {
        const ModelFile back = ModelFile::parse(text);
        REQUIRE(back.serialize() == text);
        REQUIRE(rat_equal(back.db_matrix<G>("A").first, running()));
        REQUIRE(back.type_of("E") == "pair");
    }
    SECTION("zero denominator reports a position") {
        const std::string bad = R"({"mode": "exact", "objects": {"X": {"type": "rational_matrix", "rows": 1, "cols": 1,
"entries": [[{"num": ["1"], "den": ["0"]}]]}}, "version": "dbm-model/1"})";
        try {
            ModelFile::parse(bad, "bad.json");
            FAIL("expected a model error");
        } catch (const ModelError& e) {
            const std::string msg = e.what();
            REQUIRE(msg.find("bad.json:2:") == 0);
            REQUIRE(msg.find("zero denominator") != std::string::npos);
        }
    }
    SECTION("unknown field") {
        const std::string bad = R"({"mode": "exact", "objects": {"X": {"type": "constant_matrix", "entries": [["1"]], "bogus": 1}}, "version": "dbm-model/1"})";
        REQUIRE_THROWS_WITH(ModelFile::parse(bad, "m.json"), Catch::Matchers::ContainsSubstring("bogus") && Catch::Matchers::StartsWith("m.json:1:"));
    }
    SECTION("non-integer number in exact mode") {
        const std::string bad = R"({"mode": "exact", "objects": {"X": {"type": "constant_matrix", "entries": [[0.5]]}}, "version": "dbm-model/1"})";
        REQUIRE_THROWS_AS(ModelFile::parse(bad), ModelError);
    }
    SECTION("syntax error") {
        REQUIRE_THROWS_AS(ModelFile::parse("{\"mode\": "), ModelError);
    }
}

TEST_CASE("command line") {
    const TempModel tm(sample_model());
    SECTION("verify") {
        auto [rc, out] = run_cli({"verify", "-m", tm.path, "A"});
        REQUIRE(rc == 0);
        REQUIRE(out.find("\"member\": true") != std::string::npos);
    }
    SECTION("uniq") {
        auto [rc, out] = run_cli({"uniq", "-m", tm.path, "A", "A_q2"});
        REQUIRE(rc == 0);
    }
    SECTION("db-check on a non-de Branges object") {
        auto [rc, out] = run_cli({"db-check", "-m", tm.path, "one"});
        REQUIRE(rc != 0);
    }
    SECTION("inner product") {
        auto [rc, out] = run_cli({"inner-product", "-m", tm.path, "--pair", "E", "--f", "one", "--g", "one", "--format", "text"});
        REQUIRE(rc == 0);
        REQUIRE_FALSE(out.empty());
    }
    SECTION("missing object is an error") {
        auto [rc, out] = run_cli({"verify", "-m", tm.path, "nope"});
        REQUIRE(rc == 2);
    }
    SECTION("reports are deterministic") {
        const std::vector<std::string> args{"charfn", "--seed", "4", "--dim", "4", "--n", "1"};
        auto a = run_cli(args), b = run_cli(args);
        REQUIRE(a.first == b.first);
        REQUIRE(a.second == b.second);
        auto g1 = run_cli({"gram", "-m", tm.path, "--pair", "E", "--seed", "9"});
        auto g2 = run_cli({"gram", "-m", tm.path, "--pair", "E", "--seed", "9"});
        REQUIRE(g1.first == 0);
        REQUIRE(g1.second == g2.second);
    }
}
