#include <catch_amalgamated.hpp>

#include <complex>

#include "dbm/random.hpp"
#include "dbm/ratmat.hpp"

using namespace dbm;

namespace {

const GaussRational I_ = GaussRational::i();

QPoly zq() { return QPoly::z(); }
QRat zr() { return QRat(zq()); }
QRat cst(long v) { return QRat(GaussRational(v)); }

// Multiplicity-expanded product of (z - r) as an independent reconstruction oracle.
CPoly rebuild(const std::vector<Root>& roots, cplx lead) {
    CPoly p(lead);
    for (const auto& r : roots)
        for (int k = 0; k < r.mult; ++k) p *= CPoly::linear_root(r.value);
    return p;
}

bool has_root(const std::vector<Root>& roots, cplx v, int mult) {
    for (const auto& r : roots)
        if (std::abs(r.value - v) < 1e-9 && r.mult == mult) return true;
    return false;
}

}  // namespace

TEST_CASE("Gaussian rationals") {
    GaussRational a(mpq_class(1, 2), mpq_class(-3, 4));
    GaussRational b(2);
    REQUIRE((a * b) == GaussRational(mpq_class(1), mpq_class(-3, 2)));
    REQUIRE((a / a) == GaussRational(1));
    REQUIRE(a.conj().conj() == a);
    REQUIRE(I_ * I_ == GaussRational(-1));
    REQUIRE_THROWS_AS(a / GaussRational(0), std::domain_error);
    REQUIRE(GaussRational::parse_rational("-6/4") == mpq_class(-3, 2));
    REQUIRE_THROWS_WITH(GaussRational::parse_rational("1/0"), Catch::Matchers::ContainsSubstring("zero denominator"));
}

TEST_CASE("polynomial roots") {
    SECTION("z^2 + 1") {
        auto r = roots(CPoly{cplx(1), cplx(0), cplx(1)});
        REQUIRE(r.size() == 2);
        REQUIRE(has_root(r, {0, 1}, 1));
        REQUIRE(has_root(r, {0, -1}, 1));
    }
    SECTION("(z - 1)^2 in both modes") {
        auto rf = roots(CPoly{cplx(1), cplx(-2), cplx(1)});
        REQUIRE(rf.size() == 1);
        REQUIRE(has_root(rf, {1, 0}, 2));
        auto rq = roots(QPoly{GaussRational(1), GaussRational(-2), GaussRational(1)});
        REQUIRE(rq.size() == 1);
        REQUIRE(has_root(rq, {1, 0}, 2));
    }
    SECTION("z^3 - z") {
        auto r = roots(CPoly{cplx(0), cplx(-1), cplx(0), cplx(1)});
        REQUIRE(r.size() == 3);
        REQUIRE(has_root(r, {0, 0}, 1));
        REQUIRE(has_root(r, {1, 0}, 1));
        REQUIRE(has_root(r, {-1, 0}, 1));
    }
    SECTION("triple root found by the derivative test") {
        CPoly p(cplx(1.0));
        for (int k = 0; k < 3; ++k) p *= CPoly::linear_root({0.5, -2.0});
        p *= CPoly::linear_root({3.0, 1.0});
        auto r = roots(p);
        REQUIRE(r.size() == 2);
        REQUIRE(has_root(r, {0.5, -2.0}, 3));
    }
    SECTION("zero polynomial") { REQUIRE_THROWS_WITH(roots(CPoly{}), "indeterminate roots"); }
    SECTION("reconstruction property on random polynomials") {
        Rng rng(11);
        for (int t = 0; t < 40; ++t) {
            QPoly p = rng.poly(static_cast<int>(rng.integer(1, 8)), 5);
            if (t % 3 == 0) p = p * p;
            const CPoly pc = to_cplx(p);
            auto r = roots(p);
            int total = 0;
            for (const auto& x : r) total += x.mult;
            REQUIRE(total == p.degree());
            CPoly back = rebuild(r, pc.lead());
            REQUIRE((back - pc).max_abs_coeff() <= 1e-8 * pc.max_abs_coeff());
            auto rf = roots(pc);
            CPoly backf = rebuild(rf, pc.lead());
            REQUIRE((backf - pc).max_abs_coeff() <= 1e-8 * pc.max_abs_coeff());
        }
    }
    SECTION("Sturm real-root counting") {
        REQUIRE_FALSE(has_real_root(QPoly{GaussRational(1), GaussRational(0), GaussRational(1)}));
        REQUIRE(has_real_root(QPoly{GaussRational(-2), GaussRational(0), GaussRational(1)}));
        // (z - 1)(z - i) has the real root 1.
        REQUIRE(has_real_root(QPoly::linear_root(GaussRational(1)) * QPoly::linear_root(I_)));
        REQUIRE_FALSE(has_real_root(QPoly::linear_root(I_) * QPoly::linear_root(GaussRational(2) - I_)));
    }
}

TEST_CASE("scalar rational functions") {
    SECTION("reduction and monic denominators") {
        QRat f(QPoly{GaussRational(-2), GaussRational(2)}, QPoly{GaussRational(-2), GaussRational(0), GaussRational(2)});
        // (2z-2)/(2z^2-2) = 1/(z+1)
        REQUIRE(f.num() == QPoly{GaussRational(1)});
        REQUIRE(f.den() == QPoly{GaussRational(1), GaussRational(1)});
    }
    SECTION("derivative") {
        REQUIRE((zr() + QRat(I_)).derivative() == cst(1));
        REQUIRE(zr().inverse().derivative() == QRat(QPoly{GaussRational(-1)}, zq() * zq()));
        REQUIRE((zr() * zr()).derivative() == QRat(QPoly{GaussRational(0), GaussRational(2)}));
        CRat g = to_float(zr().inverse());
        CRat dg = g.derivative();
        REQUIRE(std::abs(dg.eval(2.0) + 0.25) < 1e-14);
    }
    SECTION("sharp") {
        REQUIRE((zr() + QRat(I_)).sharp() == zr() - QRat(I_));
    }
    SECTION("float cancellation") {
        CRat a = to_float((zr() - cst(1)) * (zr() + QRat(I_)).inverse());
        CRat b = to_float((zr() + QRat(I_)) * (zr() - cst(1)).inverse());
        CRat p = a * b;
        REQUIRE(p.is_polynomial());
        REQUIRE(std::abs(p.eval(3.0) - 1.0) < 1e-12);
        REQUIRE((a - a).is_zero());
    }
}

TEST_CASE("rational matrix arithmetic") {
    const QRatMat I2 = QRatMat::identity(2);
    SECTION("add, mul, scale") {
        REQUIRE(I2 + QRatMat::zero(2, 2) == I2);
        REQUIRE(QRatMat::diag({zr(), cst(1)}) * QRatMat::diag({cst(1), zr()}) == QRatMat::diag({zr(), zr()}));
        const QRat s = (zr() + QRat(I_)).inverse();
        REQUIRE(I2 * s == QRatMat::diag({s, s}));
        REQUIRE_THROWS_AS(I2 * QRatMat::identity(3), std::invalid_argument);
    }
    SECTION("inverse") {
        REQUIRE(inverse(QRatMat::diag({zr(), cst(1)})) == QRatMat::diag({zr().inverse(), cst(1)}));
        QRatMat u{{cst(1), zr()}, {cst(0), cst(1)}};
        REQUIRE(inverse(u) == QRatMat({{cst(1), -zr()}, {cst(0), cst(1)}}));
        // sqrt(2) M for n = 1 is [[i, -i], [1, 1]]; (sqrt2 M)(sqrt2 M)^* = 2I.
        QRatMat m2{{QRat(I_), QRat(-I_)}, {cst(1), cst(1)}};
        REQUIRE(m2 * m2.sharp() == I2 * GaussRational(2));
        REQUIRE(inverse(m2) == m2.sharp() * GaussRational(mpq_class(1, 2)));
    }
    SECTION("singular matrices carry a null vector") {
        QRatMat s{{zr(), zr() * zr()}, {cst(1), zr()}};
        try {
            inverse(s);
            FAIL("expected SingularMatrixError");
        } catch (const SingularMatrixError& e) {
            // Oracle: S(z) x(z) vanishes at sample points.
            const auto& x = e.null_vector();
            REQUIRE(x.size() == 2);
            for (cplx z : {cplx(0.3, 0.1), cplx(-2.0, 1.5)}) {
                CMat v = s.eval(z) * CMat::column({x[0].eval(z), x[1].eval(z)});
                REQUIRE(v.max_abs() < 1e-12);
                REQUIRE(std::abs(x[0].eval(z)) + std::abs(x[1].eval(z)) > 0.0);
            }
        }
        QRatMat big = QRatMat::identity(4);
        big(3, 3) = cst(0);
        big(3, 0) = cst(0);
        REQUIRE_THROWS_AS(inverse(big), SingularMatrixError);
    }
    SECTION("eval") {
        CMat v = QRatMat::diag({zr().inverse(), cst(1)}).eval(2.0);
        REQUIRE(std::abs(v(0, 0) - 0.5) < 1e-15);
        CMat w = QRatMat({{zr(), cst(1)}, {cst(-1), cst(0)}}).eval(0.0);
        REQUIRE(w == CMat{{0.0, 1.0}, {-1.0, 0.0}});
        QRatMat p{{(zr() - cst(1)).inverse()}};
        REQUIRE_THROWS_AS(p.eval(1.0), PoleEvaluationError);
        try {
            p.eval(1.0);
        } catch (const PoleEvaluationError& e) {
            REQUIRE(std::abs(e.pole() - cplx(1.0)) < 1e-12);
        }
    }
    SECTION("poles") {
        auto p1 = QRatMat::diag({(zr() - cst(1)).inverse(), cst(1)}).poles();
        REQUIRE(p1.size() == 1);
        REQUIRE(std::abs(p1[0].point - cplx(1.0)) < 1e-12);
        REQUIRE(p1[0].order == 1);
        QRatMat f{{(zr() - cst(1)).inverse(), cst(1)}, {cst(0), zr() - cst(1)}};
        auto p2 = f.poles();
        REQUIRE(p2.size() == 1);
        REQUIRE(p2[0].order == 1);
        REQUIRE(QRatMat({{zr(), cst(1)}, {cst(-1), cst(0)}}).poles().empty());
        auto p3 = to_float(QRatMat::diag({((zr() - cst(1)) * (zr() - cst(1))).inverse(), (zr() - cst(1)).inverse()})).poles();
        REQUIRE(p3.size() == 1);
        REQUIRE(p3[0].order == 2);
    }
    SECTION("derivative") {
        QRatMat a{{zr() + QRat(I_), zr().inverse(), zr() * zr()}};
        QRatMat d = a.derivative();
        REQUIRE(d(0, 0) == cst(1));
        REQUIRE(d(0, 1) == QRat(QPoly{GaussRational(-1)}, zq() * zq()));
        REQUIRE(d(0, 2) == QRat(QPoly{GaussRational(0), GaussRational(2)}));
    }
}

TEST_CASE("rational matrix properties on random instances") {
    Rng rng(2024);
    for (int t = 0; t < 100; ++t) {
        QRatMat a = rng.ratmat(2, 2, 1, 1, 3);
        QRatMat b = rng.ratmat(2, 2, 1, 1, 3);
        QRatMat c = rng.ratmat(2, 2, 1, 0, 3);
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a.sharp().sharp() == a);
        REQUIRE((a * b).sharp() == b.sharp() * a.sharp());
    }
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = static_cast<std::size_t>(rng.integer(2, 4));
        QRatMat a = rng.ratmat(n, n, 1, t % 2, 3);
        if (det(a).is_zero()) continue;
        REQUIRE(a * inverse(a) == QRatMat::identity(n));
        if (n > 3 && t % 2 == 1) continue;  // float elimination on rational entries is only used up to 3x3
        CRatMat af = to_float(a);
        REQUIRE(rat_equal(af * inverse(af), CRatMat::identity(n)));
    }
}

TEST_CASE("sharp of J-unitary matrices") {
    // A = [[z, 1], [-1, 0]] is J-unitary for J = [[0, i], [-i, 0]]: A^# = J A^{-1} J.
    QRatMat a{{zr(), cst(1)}, {cst(-1), cst(0)}};
    QRatMat j{{cst(0), QRat(I_)}, {QRat(-I_), cst(0)}};
    REQUIRE(a.sharp() == j * inverse(a) * j);
}
