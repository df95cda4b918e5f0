#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dbm/debranges.hpp"
#include "dbm/herglotz.hpp"

namespace dbm {

template <CoefficientField K>
struct PhiOf {
    RatMat<K> phi;  // [a22 - i a21][a11 + i a12]^{-1}
    RatMat<K> phi_sharp_form;  // [a11^# + i a12^#]^{-1}[a22^# - i a21^#]
    bool forms_agree = false;
    double residual = 0.0;
};

template <CoefficientField K>
PhiOf<K> phi_of(const RatMat<K>& A, std::size_t n, const Tolerances& tol = default_tolerances()) {
    if (A.rows() != 2 * n || A.cols() != 2 * n) throw PreconditionError("size mismatch: expected 2n x 2n");
    const K i = FieldTraits<K>::imag_unit();
    const auto a = blocks_of(A, n);
    PhiOf<K> out;
    try {
        out.phi = (a.b22 - a.b21 * i) * inverse(a.b11 + a.b12 * i);
        out.phi_sharp_form = inverse(a.b11.sharp() + a.b12.sharp() * i) * (a.b22.sharp() - a.b21.sharp() * i);
    } catch (const SingularMatrixError&) {
        throw PreconditionError("a11 + i a12 is identically singular");
    }
    out.forms_agree = rat_equal(out.phi, out.phi_sharp_form, tol.identity);
    out.residual = out.forms_agree ? 0.0 : residual(out.phi, out.phi_sharp_form);
    return out;
}

/// A^# = J A^{-1} J and the block form of A^{-1}.
template <CoefficientField K>
Verdict sharp_inverse_identity(const RatMat<K>& A, std::size_t n, const Tolerances& tol = default_tolerances()) {
    Verdict v("sharp/inverse identities");
    const Mat<K> J = make_signature<K>(n).J;
    RatMat<K> inv;
    try {
        inv = inverse(A);
    } catch (const SingularMatrixError&) {
        v.fail("residual", "A is identically singular");
        return v;
    }
    Verdict s("A^# = J A^{-1} J");
    const RatMat<K> rhs = J * inv * J;
    if (!rat_equal(A.sharp(), rhs, tol.identity)) s.fail("residual", "identity fails", std::nullopt, residual(A.sharp(), rhs));
    v.add(s);
    Verdict b("A^{-1} = [[a22^#, -a12^#], [-a21^#, a11^#]]");
    const auto a = blocks_of(A, n);
    const K m1 = FieldTraits<K>::from_int(-1);
    const RatMat<K> blk = RatMat<K>::from_blocks(a.b22.sharp(), a.b12.sharp() * m1, a.b21.sharp() * m1, a.b11.sharp());
    if (!rat_equal(inv, blk, tol.identity)) b.fail("residual", "identity fails", std::nullopt, residual(inv, blk));
    v.add(b);
    return v;
}

/// Delta = S^# (E+^#)^{-1} E+^{-1} S.
template <CoefficientField K>
RatMat<K> density_of(const DeBrangesPair<K>& p, const RatMat<K>& S, const Tolerances& tol = default_tolerances()) {
    const RatMat<K> d = S.sharp() * inverse(p.E_plus.sharp()) * inverse(p.E_plus) * S;
    if (!rat_equal(d.sharp(), d, tol.identity)) throw InternalInvariantError("density is not self-adjoint: " + d.to_string());
    return d;
}

/// Residue sum for z in C+, the rational continuation elsewhere.
template <CoefficientField K>
Mat<K> herglotz_eval(const HerglotzParams<K>& h, const K& z) {
    if (to_cplx(z).imag() > 0) return herglotz_residue_eval(h, z);
    return herglotz_rational(h).at(z);
}

namespace detail {

inline double trichotomy_scale(const CMat& a, const CMat& b) { return std::max({1.0, a.max_abs(), b.max_abs()}); }

}  // namespace detail

/// Real/imaginary part identities, the quadratic-form identity and the order relation between Re Phi and the density form.
template <CoefficientField K>
Verdict realpart_identities(const RatMat<K>& A, std::size_t n, const DeBrangesPair<K>& p, const RatMat<K>& S,
                            const RatMat<K>& phi, const GridSpec& grid = default_grid(),
                            const Tolerances& tol = default_tolerances()) {
    Verdict v("real part identities");
    const K i = FieldTraits<K>::imag_unit();
    const K half = FieldTraits<K>::from_ratio(1, 2);
    const RatMat<K> delta = density_of(p, S, tol);
    const RatMat<K> ps = phi.sharp();

    Verdict re("(Phi + Phi^#)/2 = S^# (E+^#)^{-1} E+^{-1} S");
    const RatMat<K> lhs_re = (phi + ps) * half;
    if (!rat_equal(lhs_re, delta, tol.identity)) re.fail("residual", "identity fails", std::nullopt, residual(lhs_re, delta));
    v.add(re);

    Verdict im("(Phi - Phi^#)/(2i) = i Delta - i Phi");
    const RatMat<K> lhs_im = (phi - ps) * (half / i);
    const RatMat<K> rhs_im = (delta - phi) * i;
    if (!rat_equal(lhs_im, rhs_im, tol.identity)) im.fail("residual", "identity fails", std::nullopt, residual(lhs_im, rhs_im));
    v.add(im);

    Verdict quad("quadratic form identity");
    {
        const auto a = blocks_of(A, n);
        const RatMat<K> X = a.b11 + a.b12 * i;
        const CMat Jc = to_cplx(make_signature<K>(n).J);
        CMat left(n, 2 * n), right(2 * n, n);
        for (std::size_t k = 0; k < n; ++k) {
            left(k, k) = 1.0;
            left(k, n + k) = cplx(0.0, -1.0);
            right(k, k) = 1.0;
            right(n + k, k) = cplx(0.0, 1.0);
        }
        const CMat two = CMat::identity(n) * cplx(2.0);
        int checked = 0;
        for (int k = 0; k < 40 && checked < 20; ++k) {
            const cplx z(-3.0 + 0.31 * k, (k % 2 ? 1.0 : -1.0) * (0.2 + 0.13 * k));
            try {
                const CMat x = X.eval(z), f = phi.eval(z), az = A.eval(z);
                const CMat l = x.adjoint() * (f + f.adjoint()) * x;
                const CMat r = left * (Jc - az.adjoint() * Jc * az) * right + two;
                const double res = (l - r).max_abs() / detail::trichotomy_scale(l, r);
                if (res > tol.identity) {
                    quad.fail("residual", "identity fails", z, res);
                    break;
                }
                ++checked;
            } catch (const PoleEvaluationError&) {
            } catch (const SingularMatrixError&) {
            } catch (const SingularConstantError&) {
            }
        }
    }
    v.add(quad);

    Verdict tri("Re Phi vs S* E+^{-*} E+^{-1} S");
    auto form = [&](cplx z) {
        const CMat e = inverse(p.E_plus.eval(z)) * S.eval(z);
        return CMat(e.adjoint() * e);
    };
    auto diff = [&](cplx z) {
        const CMat f = phi.eval(z);
        const CMat d = (f + f.adjoint()) * cplx(0.5) - form(z);
        return CMat((d + d.adjoint()) * cplx(0.5));
    };
    auto sweep = [&](const std::vector<cplx>& pts, int sign) {
        for (const cplx z : pts) {
            try {
                const CMat d = diff(z);
                const double scale = std::max(1.0, phi.eval(z).max_abs());
                const double e = sign > 0 ? min_hermitian_eigenvalue(d) : -min_hermitian_eigenvalue(d * cplx(-1.0));
                if (sign > 0 && e < -tol.identity * scale) return tri.fail("min_eig", "Re Phi - form not PSD in C+", z, e), false;
                if (sign < 0 && e > tol.identity * scale) return tri.fail("max_eig", "Re Phi - form not NSD in C-", z, e), false;
                if (sign == 0 && d.max_abs() > tol.identity * scale) return tri.fail("residual", "Re Phi != form on R", z, d.max_abs()), false;
            } catch (const PoleEvaluationError&) {
            } catch (const SingularMatrixError&) {
            } catch (const SingularConstantError&) {
            }
        }
        return true;
    };
    std::vector<cplx> on_r;
    for (const double x : grid.real()) on_r.emplace_back(x, 0.0);
    if (sweep(grid.upper(), 1) && sweep(on_r, 0)) sweep(grid.lower(), -1);
    v.add(tri);
    return v;
}

template <CoefficientField K>
struct RecoveredBlocks {
    Blocks<K> tilde;
    Verdict verdict{"recovered blocks"};
};

/// a~11 = (E+ + E-)/2, a~12 = (E+ - E-)/(2i), a~22 = (S Phi S^{-1} E+ + S Phi^# S^{-1} E-)/2,
/// a~21 = (S Phi^# S^{-1} E- - S Phi S^{-1} E+)/(2i).
template <CoefficientField K>
RecoveredBlocks<K> recover_blocks(const DeBrangesPair<K>& p, const RatMat<K>& S, const RatMat<K>& phi,
                                  const Tolerances& tol = default_tolerances()) {
    const K i = FieldTraits<K>::imag_unit();
    const K half = FieldTraits<K>::from_ratio(1, 2);
    RatMat<K> sinv;
    try {
        sinv = inverse(S);
    } catch (const SingularMatrixError&) {
        throw PreconditionError("det S vanishes identically");
    }
    RecoveredBlocks<K> out;
    auto& t = out.tilde;
    t.b11 = (p.E_plus + p.E_minus) * half;
    t.b12 = (p.E_plus - p.E_minus) * (half / i);
    const RatMat<K> x = S * phi * sinv * p.E_plus;
    const RatMat<K> y = S * phi.sharp() * sinv * p.E_minus;
    t.b22 = (x + y) * half;
    t.b21 = (y - x) * (half / i);
    for (const auto* b : {&t.b21, &t.b22})
        for (const auto& e : b->entries())
            if (!e.is_polynomial()) {
                if constexpr (is_exact_v<K>) {
                    throw PreconditionError("S is not associated / Phi inconsistent: denominator " + e.den().to_string());
                } else {
                    if (!e.poles().empty()) throw PreconditionError("S is not associated / Phi inconsistent: denominator " + e.den().to_string());
                }
            }
    Verdict cross("a~22 = S Re-form S^{-1} a~11 - S Im-form S^{-1} a~12");
    const RatMat<K> re = (phi + phi.sharp()) * half, im = (phi - phi.sharp()) * (half / i);
    const RatMat<K> alt = S * re * sinv * t.b11 - S * im * sinv * t.b12;
    if (!rat_equal(alt, t.b22, tol.identity)) cross.fail("residual", "intermediate form differs", std::nullopt, residual(alt, t.b22));
    out.verdict.add(cross);
    return out;
}

template <CoefficientField K>
struct Construction {
    DBMatrix<K> db;
    RatMat<K> phi;
    HerglotzParams<K> params;
    Verdict verdict{"construction"};
};

/// A = diag(S^{-1}, S^{-1}) [a~] from (E-, E+, S, P, Q).
template <CoefficientField K>
Construction<K> construct_db(const DeBrangesPair<K>& p, const RatMat<K>& S, const Mat<K>& P, const Mat<K>& Q,
                             const GridSpec& grid = default_grid(), const Tolerances& tol = default_tolerances()) {
    const std::size_t n = p.n();
    if (S.rows() != n || P.rows() != n || Q.rows() != n || !P.square() || !Q.square())
        throw PreconditionError("size mismatch: S, P and Q must be n x n");
    Construction<K> out;
    Verdict& v = out.verdict;
    Verdict pre("preconditions");
    pre.add(pair_validate(p, grid, tol));
    pre.add(assoc_check(p, S));
    const CMat pc = to_cplx(P), qc = to_cplx(Q);
    Verdict pq("P >= 0, Q = Q*");
    if (hermitian_defect(pc) > tol.psd || min_hermitian_eigenvalue(pc) < -1e-10) pq.fail("min_eig", "P is not Hermitian PSD", std::nullopt, min_hermitian_eigenvalue((pc + pc.adjoint()) * cplx(0.5)));
    if (hermitian_defect(qc) > tol.psd) pq.fail("residual", "Q is not Hermitian", std::nullopt, hermitian_defect(qc));
    pre.add(pq);
    const RatMat<K> delta = density_of(p, S, tol);
    Verdict dr("density free of real poles");
    for (const auto& x : classify_poles(delta).real) dr.fail("pole", "real pole of the density", x.point);
    pre.add(dr);
    v.add(pre);
    if (!pre.member) throw PreconditionError("construction preconditions fail:\n" + pre.to_text());

    out.params = HerglotzParams<K>{P, Q, delta, {}, p.det_plus()};
    out.phi = herglotz_rational(out.params);
    auto rec = recover_blocks(p, S, out.phi, tol);
    v.add(rec.verdict);
    const RatMat<K> sinv = inverse(S);
    const auto& t = rec.tilde;
    const RatMat<K> A = RatMat<K>::from_blocks(sinv * t.b11, sinv * t.b12, sinv * t.b21, sinv * t.b22);
    out.db = db_check(A, n, tol);
    v.add(out.db.verdict);
    Verdict same("phi_of(A) = Phi");
    const auto po = phi_of(A, n, tol);
    if (!rat_equal(po.phi, out.phi, tol.identity)) same.fail("residual", "Phi of the constructed matrix differs", std::nullopt, residual(po.phi, out.phi));
    v.add(same);
    if (!v.member) throw InternalInvariantError("constructed matrix fails verification:\n" + v.to_text());
    return out;
}

/// PG blocks of W = M* A M and the Cayley transform c = (Phi - I)(Phi + I)^{-1}.
template <CoefficientField K>
Verdict verify_pg_blocks(const RatMat<K>& A, std::size_t n, const GridSpec& grid = default_grid(),
                         const Tolerances& tol = default_tolerances()) {
    Verdict v("PG blocks");
    const auto sig = make_signature<K>(n);
    const RatMat<K> W = to_w_basis(A, n);
    const auto w = blocks_of(W, n);
    Verdict d("det w22 not identically zero");
    if (det(w.b22).is_zero()) {
        d.fail("residual", "det w22 vanishes identically");
        v.add(d);
        return v;
    }
    v.add(d);
    const RatMat<K> I = RatMat<K>::identity(n);
    auto ident = [&](const std::string& name, const RatMat<K>& lhs, const RatMat<K>& rhs) {
        Verdict x(name);
        if (!rat_equal(lhs, rhs, tol.identity)) x.fail("residual", "identity fails on R", std::nullopt, residual(lhs, rhs));
        v.add(x);
    };
    ident("w11 w11^# - w12 w12^# = I", w.b11 * w.b11.sharp() - w.b12 * w.b12.sharp(), I);
    ident("w11 w21^# - w12 w22^# = 0", w.b11 * w.b21.sharp() - w.b12 * w.b22.sharp(), RatMat<K>(n, n));
    ident("w22 w22^# - w21 w21^# = I", w.b22 * w.b22.sharp() - w.b21 * w.b21.sharp(), I);

    Verdict cay("Cayley transform contractive on C+");
    try {
        const RatMat<K> phi = phi_of(A, n, tol).phi;
        const RatMat<K> c = (phi - I) * inverse(phi + I);
        for (const cplx z : grid.upper()) {
            try {
                const double s = spectral_norm(c.eval(z));
                if (s > 1.0 + 1e-9) {
                    cay.fail("norm", "||c(z)|| > 1", z, s);
                    break;
                }
            } catch (const PoleEvaluationError&) {
            }
        }
    } catch (const std::exception& e) {
        cay.fail("error", e.what());
    }
    v.add(cay);

    const RatMat<K> pg = pg_transform(W, sig.j);
    Verdict sm("PG(W) blocks in Smirnov class");
    const auto g = blocks_of(pg, n);
    const char* names[] = {"11", "12", "21", "22"};
    int k = 0;
    for (const auto* b : {&g.b11, &g.b12, &g.b21, &g.b22}) {
        Verdict s = in_smirnov(*b);
        s.name = std::string("block ") + names[k++];
        sm.add(s);
    }
    v.add(sm);
    Verdict inn = in_inner(pg, tol);
    inn.name = "PG(W) inner";
    v.add(inn);
    return v;
}

template <CoefficientField K>
struct Uniqueness {
    std::optional<RatMat<K>> L;
    Verdict verdict{"uniqueness"};
};

/// B = [[I, 0], [L, I]] A with L = L0 + z L1, L0 and L1 Hermitian, L = (Q_A - Q_B) + z (P_B - P_A).
template <CoefficientField K>
Uniqueness<K> uniqueness_check(const RatMat<K>& A, const RatMat<K>& B, std::size_t n,
                               const Tolerances& tol = default_tolerances()) {
    Uniqueness<K> out;
    Verdict& v = out.verdict;
    const K i = FieldTraits<K>::imag_unit();
    const auto a = blocks_of(A, n), b = blocks_of(B, n);
    Verdict top("equal upper rows");
    if (!rat_equal(a.b11, b.b11, tol.identity) || !rat_equal(a.b12, b.b12, tol.identity))
        top.fail("residual", "upper block rows differ", std::nullopt, residual(a.b11, b.b11) + residual(a.b12, b.b12));
    v.add(top);
    if (!top.member) return out;
    RatMat<K> L;
    try {
        L = ((b.b21 - a.b21) + (b.b22 - a.b22) * i) * inverse(a.b11 + a.b12 * i);
    } catch (const SingularMatrixError&) {
        v.fail("residual", "a11 + i a12 is identically singular");
        return out;
    }
    Verdict rel("B = [[I,0],[L,I]] A");
    const RatMat<K> T = RatMat<K>::from_blocks(RatMat<K>::identity(n), RatMat<K>(n, n), L, RatMat<K>::identity(n));
    if (!rat_equal(T * A, B, tol.identity)) rel.fail("residual", "no such L", std::nullopt, residual(T * A, B));
    v.add(rel);
    Verdict lin("L linear with Hermitian coefficients");
    if (!L.is_polynomial() || L.poly_degree() > 1) {
        lin.fail("residual", "L is not a linear polynomial: " + L.to_string());
    } else {
        for (std::size_t k = 0; k < 2; ++k) {
            const CMat c = to_cplx(L.coefficient(k));
            if (hermitian_defect(c) > 1e-9 * std::max(1.0, c.max_abs()))
                lin.fail("residual", "coefficient " + std::to_string(k) + " is not Hermitian", std::nullopt, hermitian_defect(c));
        }
    }
    v.add(lin);
    if (!v.member) return out;
    out.L = L;
    Verdict par("L = (Q_A - Q_B) + z (P_B - P_A)");
    try {
        const auto pa = extract_PQ(phi_of(A, n, tol).phi).params, pb = extract_PQ(phi_of(B, n, tol).phi).params;
        const RatMat<K> expect = RatMat<K>::from_coefficients({pa.Q - pb.Q, pb.P - pa.P});
        if (!rat_equal(expect, L, tol.identity)) par.fail("residual", "parameters disagree", std::nullopt, residual(expect, L));
    } catch (const NotRepresentableError& e) {
        par.note(std::string("parameter comparison skipped: ") + e.what());
    }
    v.add(par);
    return out;
}

}  // namespace dbm
