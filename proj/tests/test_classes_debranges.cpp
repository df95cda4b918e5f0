#include <catch_amalgamated.hpp>

#include <numbers>

#include "dbm/debranges.hpp"

using namespace dbm;
using G = GaussRational;

namespace {

const G I_ = G::i();

QPoly zq() { return QPoly::z(); }
QRat cst(const G& v) { return QRat(v); }
QRat lin(const G& root) { return QRat(QPoly::linear_root(root)); }
QRat inv_lin(const G& root) { return QRat(QPoly(G(1)), QPoly::linear_root(root)); }
QRatMat scalar(const QRat& f) { return QRatMat::diag({f}); }

// [[z, 1], [-1, 0]]
QRatMat running() { return QRatMat::from_blocks(scalar(QRat(zq())), scalar(cst(1)), scalar(cst(-1)), scalar(cst(0))); }

DeBrangesPair<G> running_pair() { return {scalar(lin(I_)), scalar(lin(-I_))}; }

}  // namespace

TEST_CASE("signature matrices") {
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto s = make_signature<G>(n);
        REQUIRE(s.identity_holds());
        REQUIRE(s.J * s.J == Mat<G>::identity(2 * n));
        REQUIRE(is_signature(s.J));
        REQUIRE(is_signature(s.j));
        const Mat<G> m2 = s.sqrt2_M.adjoint() * s.sqrt2_M;
        REQUIRE(m2 == Mat<G>::identity(2 * n) * G(2));
    }
    const auto s = make_signature<G>(1);
    REQUIRE(s.J(0, 1) == I_);
    REQUIRE(s.J(1, 0) == -I_);
}

TEST_CASE("Hardy and Smirnov classes") {
    const QRatMat a = scalar(inv_lin(-I_)), b = scalar(inv_lin(I_));
    REQUIRE(in_hardy2(a).member);
    REQUIRE_FALSE(in_hardy2(b).member);
    REQUIRE_FALSE(in_hardy2(QRatMat::identity(1)).member);
    REQUIRE(in_hardy2_perp(b).member);
    REQUIRE_FALSE(in_hardy2_perp(a).member);
    REQUIRE(in_hardy2_perp(QRatMat(1, 1)).member);
    REQUIRE(in_smirnov(a).member);
    REQUIRE(in_smirnov(scalar(QRat(QPoly(G(1)), zq()))).member);
    const Verdict no = in_smirnov(b);
    REQUIRE_FALSE(no.member);
    REQUIRE(no.witnesses.front().point);

    SECTION("split of a mixed strictly proper function") {
        const QRatMat f = scalar(inv_lin(-I_ * G(2)) + inv_lin(I_ + G(1)) * cst(G(3)));
        auto [low, up] = hardy_split(f);
        REQUIRE(in_hardy2(low).member);
        REQUIRE(in_hardy2_perp(up).member);
        REQUIRE(rat_equal(low + up, f));
    }
}

TEST_CASE("inner and Schur classes") {
    const QRatMat b = scalar(lin(I_) * inv_lin(-I_));
    REQUIRE(in_inner(b).member);
    REQUIRE(in_inner(scalar(cst(I_))).member);
    REQUIRE_FALSE(in_inner(scalar(lin(-I_) * inv_lin(I_))).member);
    REQUIRE(in_schur(b).member);
    REQUIRE_FALSE(in_schur(scalar(cst(2))).member);
}

TEST_CASE("Caratheodory class") {
    SECTION("identity") {
        auto r = in_caratheodory(QRatMat::identity(1));
        REQUIRE(r.verdict.member);
        REQUIRE(rat_equal(r.params->density, QRatMat::identity(1)));
    }
    SECTION("i/(z+i)") {
        auto r = in_caratheodory(scalar(cst(I_) * inv_lin(-I_)));
        REQUIRE(r.verdict.member);
        REQUIRE(rat_equal(r.params->density, scalar(QRat(QPoly(G(1)), zq() * zq() + QPoly(G(1))))));
    }
    SECTION("point mass") {
        const CRatMat f = RatMat<cplx>::diag({CRat(CPoly(cplx(0.0, 1.0 / std::numbers::pi)), CPoly::linear_root(cplx(0.0)))});
        auto r = in_caratheodory(f);
        REQUIRE(r.verdict.member);
        REQUIRE(r.params->point_masses.size() == 1);
    }
    SECTION("negative real part") {
        REQUIRE_FALSE(in_caratheodory(scalar(cst(-1))).verdict.member);
    }
}

TEST_CASE("J-contractive and J-inner classes") {
    const auto s = make_signature<G>(1);
    const QRatMat A = running();
    REQUIRE(in_UJ(A, s.J).member);
    REQUIRE(in_PJ(A, s.J).member);
    REQUIRE(in_inner(pg_transform(A, s.J)).member);
    REQUIRE(rat_equal(pg_transform(pg_transform(A, s.J), s.J), A));
    REQUIRE(rat_equal(pg_transform(QRatMat::identity(2), s.J), QRatMat::identity(2)));
    const QRat b = lin(I_) * inv_lin(-I_);
    REQUIRE(in_PJ(QRatMat::diag({b, cst(1)}), s.j).member);
    REQUIRE(in_UJ(QRatMat::diag({b, cst(1)}), s.j).member);
    REQUIRE_FALSE(in_PJ(QRatMat::diag({lin(-I_) * inv_lin(I_), cst(1)}), s.j).member);
    // plain J = I: PG(A) = A
    REQUIRE(rat_equal(pg_transform(A, Mat<G>::identity(2)), A));
}

TEST_CASE("de Branges pair and kernel") {
    const auto p = running_pair();
    REQUIRE(pair_validate(p).member);
    SECTION("kernel is 1/pi") {
        for (cplx w : {cplx(1.0, 2.0), cplx(-0.5, 0.3)})
            for (cplx z : {cplx(0.2, -1.0), std::conj(w), cplx(3.0, 0.0)}) REQUIRE(std::abs(kernel_eval(p, w, z)(0, 0) - 1.0 / std::numbers::pi) < 1e-12);
    }
    SECTION("inner products") {
        const QRatMat one = QRatMat::identity(1);
        REQUIRE(inner_product_over_pi(p, one, one) == G(1));
        REQUIRE(std::abs(inner_product_quadrature(p, one, one) - std::numbers::pi) < 1e-8);
        // pi K_w u is the constant u: <f, K_w u> = u^* f(w)
        const Mat<G> u = Mat<G>::identity(1) * (G(2) + I_);
        const auto kc = kernel_column_times_pi(p, G(1) + I_, u);
        REQUIRE(inner_product_over_pi(p, one, kc) == (G(2) + I_).conj());
        REQUIRE_THROWS_AS(inner_product_over_pi(p, scalar(QRat(zq())), one), PreconditionError);
    }
    SECTION("space membership") {
        REQUIRE(space_membership(p, QRatMat::identity(1)).member);
        REQUIRE_FALSE(space_membership(p, scalar(QRat(zq()))).member);
    }
    SECTION("associated functions") {
        REQUIRE(assoc_check(p, QRatMat::identity(1)).member);
        REQUIRE(assoc_check(p, p.E_plus).member);
        REQUIRE_FALSE(assoc_check(p, scalar(QRat(zq() * zq()))).member);
        const auto r = rs_apply(p, scalar(QRat(zq() + QPoly(G(3)))), G(1), QRatMat::identity(1));
        REQUIRE(r.membership.member);
    }
    SECTION("invalid pairs") {
        DeBrangesPair<G> bad{scalar(lin(-I_)), scalar(lin(I_))};
        REQUIRE_FALSE(pair_validate(bad).member);
        REQUIRE_THROWS_AS(pair_validate(DeBrangesPair<G>{scalar(inv_lin(I_)), scalar(cst(1))}), PreconditionError);
    }
}

TEST_CASE("Gram matrices") {
    const DeBrangesPair<G> p{QRatMat::diag({lin(I_), lin(I_ * G(2))}), QRatMat::diag({lin(-I_), lin(-I_ * G(2))})};
    REQUIRE(pair_validate(p).member);
    Rng rng(11);
    std::vector<cplx> pts;
    std::vector<CMat> vs;
    for (int k = 0; k < 6; ++k) {
        pts.emplace_back(rng.uniform(-2, 2), rng.uniform(-2, 2));
        CMat v(2, 1);
        v(0, 0) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        v(1, 0) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        vs.push_back(v);
    }
    REQUIRE(gram_psd(p, pts, vs).member);
}

TEST_CASE("de Branges matrices") {
    const QRatMat A = running();
    SECTION("U basis") {
        const auto u = blocks_of(to_u_basis(A, 1), 1);
        REQUIRE(rat_equal(u.b12, scalar(cst(1) - QRat(zq()) * cst(I_))));
        REQUIRE(rat_equal(to_w_basis(QRatMat::identity(2), 1), QRatMat::identity(2)));
    }
    SECTION("block properties") {
        const Verdict v = u_block_check(A, 1);
        REQUIRE(v.member);
        REQUIRE(v.items.size() == 8);
    }
    SECTION("check and decomposition") {
        const auto d = db_check(A, 1);
        REQUIRE(d.verdict.member);
        REQUIRE(rat_equal(d.phi, scalar(cst(I_) * inv_lin(-I_))));
        const auto dec = db_decompose(d);
        REQUIRE(dec.verdict.member);
        REQUIRE(rat_equal(dec.pair.E_plus, running_pair().E_plus));
        REQUIRE(rat_equal(dec.pair.E_minus, running_pair().E_minus));
        REQUIRE(rat_equal(dec.S, QRatMat::identity(1)));
    }
    SECTION("real pole of Phi") {
        // [[1, 0], [z, 1]]-type shear with a real pole in the corner is rejected
        const QRatMat B = QRatMat::from_blocks(scalar(cst(1)), scalar(cst(0)), scalar(inv_lin(G(0))), scalar(cst(1)));
        REQUIRE_FALSE(db_check(B, 1).verdict.member);
    }
}

TEST_CASE("characteristic functions") {
    SECTION("generator is deterministic and valid") {
        const auto a = gen_k0(7, 4, 1), b = gen_k0(7, 4, 1);
        REQUIRE(a.T == b.T);
        REQUIRE(a.U == b.U);
        REQUIRE_FALSE(a.T == a.T.adjoint());
        REQUIRE(k0_validate(a).member);
    }
    SECTION("self-adjoint T is rejected") {
        Mat<G> T = Mat<G>::identity(2);
        Mat<G> U(2, 2);
        REQUIRE_FALSE(k0_validate(K0Operator<G>{T, U}).member);
    }
    SECTION("certified de Branges matrices") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto op = gen_k0(seed, 4, seed == 3 ? 2 : 1);
            const auto cf = char_fn<G>(op.T, op.U, op.n());
            REQUIRE(cf.verdict.member);
            REQUIRE(u_block_check(cf.W, op.n()).member);
        }
    }
    SECTION("float U from the imaginary part") {
        const auto op = gen_k0(5, 3, 1);
        const auto cf = char_fn<cplx>(to_cplx(op.T), std::nullopt, 1);
        REQUIRE(cf.verdict.member);
    }
}
