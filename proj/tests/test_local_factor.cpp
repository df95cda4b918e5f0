#include <catch_amalgamated.hpp>

#include <cmath>

#include "dbm/factorization.hpp"
#include "dbm/herglotz.hpp"
#include "dbm/localstruct.hpp"

using namespace dbm;
using G = GaussRational;

namespace {

const G I_ = G::i();

QPoly zq() { return QPoly::z(); }
QRat cst(long v) { return QRat(G(v)); }
QRat simple(long num, const G& pole) { return QRat(QPoly(G(num)), QPoly::linear_root(pole)); }
QRat pole_pow(const G& pole, int k) {
    QPoly d(G(1));
    for (int j = 0; j < k; ++j) d *= QPoly::linear_root(pole);
    return QRat(QPoly(G(1)), d);
}

}  // namespace

TEST_CASE("local Smith data") {
    SECTION("diag(1/(z-1), z-1) at 1") {
        const QRatMat F = QRatMat::diag({simple(1, G(1)), QRat(QPoly::linear_root(G(1)))});
        const auto d = local_smith(F, G(1));
        REQUIRE(d.partial_mults == std::vector<int>{-1, 1});
        REQUIRE(d.det_order == 0);
        REQUIRE(d.det_order_consistent);
    }
    SECTION("upper triangular with a double pole") {
        QRatMat F(2, 2);
        F(0, 0) = cst(2) + simple(1, G(1));
        F(0, 1) = pole_pow(G(2), 2);
        F(1, 1) = cst(1);
        const auto d = local_smith(F, G(2));
        REQUIRE(d.partial_mults == std::vector<int>{-2, 2});
        REQUIRE(d.pole_multiplicities() == std::vector<int>{2});
    }
    SECTION("pole vectors span the singular direction") {
        const QRatMat F = QRatMat::diag({cst(1), pole_pow(G(3), 2)});
        const Mat<G> v = pole_vectors(F, G(3));
        REQUIRE(v.cols() == 1);
        REQUIRE(v(0, 0).is_zero());
        REQUIRE(!v(1, 0).is_zero());
    }
    SECTION("regular point has no partial multiplicities") {
        const QRatMat F = QRatMat::diag({simple(1, G(1)), cst(2)});
        const auto d = local_smith(F, G(5));
        REQUIRE(d.partial_mults == std::vector<int>{0, 0});
    }
}

TEST_CASE("single reduction step") {
    SECTION("simple pole") {
        const QRatMat F = QRatMat::diag({simple(1, G(1)), cst(1)});
        auto [f, Ft] = step_reduce(F, G(1));
        REQUIRE(rat_equal(Ft, QRatMat::diag({cst(-1), cst(1)})));
        REQUIRE(Ft.poles().empty());
    }
    SECTION("double pole keeps one order") {
        const QRatMat F = QRatMat::diag({pole_pow(G(1), 2), cst(1)});
        auto [f, Ft] = step_reduce(F, G(1));
        REQUIRE(local_smith(Ft, G(1)).partial_mults == std::vector<int>{-1, 0});
    }
    SECTION("entire at the point") {
        const QRatMat F = QRatMat::diag({cst(1), cst(1)});
        REQUIRE_THROWS_AS(step_reduce(F, G(1)), PreconditionError);
    }
}

TEST_CASE("factorization") {
    SECTION("entire input gives the empty product") {
        const QRatMat F = QRatMat::diag({QRat(zq() + QPoly(G(1))), cst(3)});
        const auto ff = factorize(F);
        REQUIRE(ff.product.empty());
        REQUIRE(rat_equal(*ff.rational_g, F));
    }
    SECTION("two simple poles") {
        const QRatMat F = QRatMat::diag({simple(1, G(1)), simple(1, G(-2))});
        const auto ff = factorize(F);
        REQUIRE(ff.product.factors.size() == 2);
        REQUIRE(ff.rational_g->poles().empty());
        REQUIRE(to_cplx(ff.steps[0].pole) == cplx(1.0, 0.0));
        for (const auto& p : F.poles())
            REQUIRE(principal_part_norm([&](cplx z) { return ff.eval_g(z); }, p.point, p.order) < 1e-9);
    }
    SECTION("multiplicity law on every step") {
        QRatMat F(2, 2);
        F(0, 0) = cst(2) + simple(1, G(1));
        F(0, 1) = pole_pow(G(2), 2);
        F(1, 1) = cst(1);
        const auto ff = factorize(F);
        REQUIRE(ff.steps.size() == 3);
        for (const auto& s : ff.steps) {
            REQUIRE(s.law_checked);
            REQUIRE(s.law_holds);
        }
        REQUIRE(ff.rational_g->is_polynomial());
    }
    SECTION("every factor is I at the origin") {
        const QRatMat F = QRatMat::diag({simple(1, G(1) + I_), simple(2, G(-3))});
        const auto ff = factorize(F);
        const CMat g0 = ff.eval_g(cplx(0.0, 0.0)), f0 = F.eval(cplx(0.0, 0.0));
        REQUIRE((g0 - f0).max_abs() < 1e-14);
    }
    SECTION("exponential factor for a scalar pole") {
        const CRatMat F = to_float(QRatMat::diag({simple(1, G(1))}));
        FactorOptions opt;
        opt.mode = FactorMode::with_exp;
        const auto ff = factorize(F, opt);
        REQUIRE(ff.product.factors.size() == 1);
        for (cplx z : {cplx(0.3, 0.1), cplx(-2.0, 1.0), cplx(3.0, -0.5)}) {
            REQUIRE(std::abs(ff.product.eval(z)(0, 0) - std::exp(z) * (1.0 - z)) < 1e-12);
            REQUIRE(std::abs(ff.eval_g(z)(0, 0) + std::exp(z)) < 1e-10);
        }
        REQUIRE(std::abs(ff.product.factors[0].eval(cplx(1.0, 0.0))(0, 0)) < 1e-14);
    }
    SECTION("preconditions at the origin") {
        REQUIRE_THROWS_AS(factorize(QRatMat::diag({QRat(zq()), cst(1)})), PreconditionError);
        REQUIRE_THROWS_AS(factorize(QRatMat::diag({QRat(QPoly(G(1)), zq()), cst(1)})), PreconditionError);
    }
    SECTION("float mode agrees with exact mode") {
        const QRatMat F = QRatMat::diag({simple(1, G(2)), pole_pow(G(-1), 2)});
        const auto fe = factorize(F);
        const auto ff = factorize(to_float(F));
        for (cplx z : {cplx(0.5, 0.5), cplx(-1.5, 2.0)}) REQUIRE((fe.eval_g(z) - ff.eval_g(z)).max_abs() < 1e-8);
    }
}

TEST_CASE("common factorization") {
    const QRatMat F = QRatMat::diag({simple(1, G(1)), simple(1, G(-2))});
    SECTION("duplicated input matches factorize") {
        const auto co = cofactorize(std::vector<QRatMat>{F, F});
        const auto ff = factorize(F);
        REQUIRE(rat_equal(co.product.polynomial_part(), ff.product.polynomial_part()));
    }
    SECTION("entire companion stays entire") {
        const QRatMat E = QRatMat::diag({QRat(zq()), cst(1)});
        const QRatMat B = QRatMat::diag({cst(1), simple(1, G(2))});
        FactorOptions opt;
        opt.require_regular_at_origin = false;
        const auto co = cofactorize(std::vector<QRatMat>{E, B}, opt);
        REQUIRE(co.product.factors.size() == 1);
        REQUIRE(co.rational_g[0].poles().empty());
        REQUIRE(co.rational_g[1].poles().empty());
    }
}

TEST_CASE("half-plane split") {
    const QRat f(QPoly(G(1)), zq() * zq() + QPoly(G(1)));
    const auto parts = split_half_planes(f);
    REQUIRE(parts.poly.is_zero());
    // 1/(z^2+1) = (i/2)/(z+i) - (i/2)/(z-i)
    REQUIRE(parts.lower == QRat(QPoly(I_ * FieldTraits<G>::from_ratio(1, 2)), QPoly::linear_root(-I_)));
    REQUIRE(parts.upper == QRat(QPoly(-I_ * FieldTraits<G>::from_ratio(1, 2)), QPoly::linear_root(I_)));
    const auto hinted = split_half_planes(f, QPoly::linear_root(-I_));
    REQUIRE(hinted.lower == parts.lower);
    REQUIRE_THROWS_AS(split_half_planes(QRat(QPoly(G(1)), zq())), PreconditionError);
}

TEST_CASE("Herglotz representation") {
    auto params = [](const QRatMat& density, long p, long q) {
        HerglotzParams<G> h;
        h.P = Mat<G>::identity(1) * G(p);
        h.Q = Mat<G>::identity(1) * G(q);
        h.density = density;
        return h;
    };
    const QRatMat delta = QRatMat::diag({QRat(QPoly(G(1)), zq() * zq() + QPoly(G(1)))});
    SECTION("density 1/(1+x^2)") {
        const auto h = params(delta, 0, 0);
        REQUIRE(rat_equal(herglotz_rational(h), QRatMat::diag({QRat(QPoly(I_), QPoly::linear_root(-I_))})));
        REQUIRE(herglotz_residue_eval(h, G(2) * I_)(0, 0) == FieldTraits<G>::from_ratio(1, 3));
        const cplx z(0.3, 0.8);
        REQUIRE(std::abs(herglotz_quadrature(h, z)(0, 0) - cplx(0.0, 1.0) / (z + cplx(0.0, 1.0))) < 1e-8);
    }
    SECTION("constant density") {
        const auto h = params(QRatMat::identity(1), 0, 0);
        REQUIRE(rat_equal(herglotz_rational(h), QRatMat::identity(1)));
        REQUIRE(herglotz_residue_eval(h, G(3) * I_ + G(1))(0, 0) == G(1));
    }
    SECTION("linear part only") {
        const auto h = params(QRatMat(1, 1), 1, 0);
        REQUIRE(herglotz_residue_eval(h, G(5) * I_)(0, 0) == G(5));
    }
    SECTION("extraction round trip") {
        const QRatMat phi = QRatMat::diag({QRat(QPoly(I_), QPoly::linear_root(-I_))});
        for (bool exact : {true, false}) {
            if (exact) {
                const auto e = extract_PQ(phi);
                REQUIRE(rat_equal(e.params.density, delta));
                REQUIRE(e.params.P(0, 0).is_zero());
                REQUIRE(e.params.Q(0, 0).is_zero());
                REQUIRE(e.roundtrip_residual == 0.0);
            } else {
                const auto e = extract_PQ(to_float(phi));
                REQUIRE(e.roundtrip_residual < 1e-12);
            }
        }
    }
    SECTION("point mass at the origin") {
        const CRatMat phi = RatMat<cplx>::diag({CRat(CPoly(cplx(0.0, 1.0 / std::numbers::pi)), CPoly::linear_root(cplx(0.0, 0.0)))});
        const auto e = extract_PQ(phi);
        REQUIRE(e.params.point_masses.size() == 1);
        REQUIRE(std::abs(e.params.point_masses[0].weight(0, 0) * std::numbers::pi - 1.0) < 1e-12);
    }
    SECTION("constant iC") {
        const QRatMat phi = QRatMat::diag({QRat(QPoly(I_ * G(3)))});
        const auto e = extract_PQ(phi);
        REQUIRE(e.params.Q(0, 0) == G(3));
        REQUIRE(e.params.density.is_zero());
    }
}
