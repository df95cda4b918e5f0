#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dbm/classes.hpp"
#include "dbm/factorization.hpp"
#include "dbm/random.hpp"

namespace dbm {

/// [E-  E+] with polynomial n x n blocks.
template <CoefficientField K>
struct DeBrangesPair {
    RatMat<K> E_minus, E_plus;

    std::size_t n() const { return E_plus.rows(); }
    /// det E+ (its roots are the C- poles of E+^{-1}); used as an exact half-plane hint.
    Poly<K> det_plus() const { return det(E_plus).num(); }
};

inline DeBrangesPair<cplx> pair_to_float(const DeBrangesPair<GaussRational>& p) { return {to_float(p.E_minus), to_float(p.E_plus)}; }

namespace detail {

template <CoefficientField K>
void require_polynomial(const RatMat<K>& m, const std::string& what) {
    if (!m.is_polynomial()) throw PreconditionError(what + " must have polynomial entries");
}

}  // namespace detail

template <CoefficientField K>
Verdict pair_validate(const DeBrangesPair<K>& p, const GridSpec& grid = default_grid(),
                      const Tolerances& tol = default_tolerances()) {
    Verdict v("de Branges pair");
    if (!p.E_plus.square() || !p.E_minus.square() || p.E_plus.rows() != p.E_minus.rows())
        throw PreconditionError("pair blocks must be square of equal size");
    detail::require_polynomial(p.E_plus, "E+");
    detail::require_polynomial(p.E_minus, "E-");
    const Rat<K> d = det(p.E_plus);
    Verdict dv("det E+ not identically zero");
    if (d.is_zero()) {
        dv.fail("residual", "det E+ vanishes identically");
        v.add(dv);
        return v;
    }
    v.add(dv);
    Verdict inner = in_inner(inverse(p.E_plus) * p.E_minus, tol);
    inner.name = "E+^{-1} E- inner";
    v.add(inner);
    Verdict id("E+ E+^# = E- E-^#");
    const RatMat<K> lhs = p.E_plus * p.E_plus.sharp(), rhs = p.E_minus * p.E_minus.sharp();
    if (!rat_equal(lhs, rhs, tol.identity)) id.fail("residual", "E+ E+^# != E- E-^#", std::nullopt, residual(lhs, rhs));
    v.add(id);
    Verdict psd("E+ E+* - E- E-* >= 0 on C+");
    for (const cplx z : grid.upper()) {
        const CMat ep = p.E_plus.eval(z), em = p.E_minus.eval(z);
        const CMat g = ep * ep.adjoint() - em * em.adjoint();
        const double e = min_hermitian_eigenvalue((g + g.adjoint()) * cplx(0.5));
        if (e < -tol.psd * std::max(1.0, ep.max_abs() * ep.max_abs())) {
            psd.fail("min_eig", "not PSD", z, e);
            break;
        }
    }
    v.add(psd);
    if (v.member && (p.E_plus - p.E_minus).is_zero()) v.note("degenerate pair: the kernel vanishes identically");
    return v;
}

/// K_w(z); the derivative form is used when |z - conj(w)| < 1e-12.
template <CoefficientField K>
CMat kernel_eval(const DeBrangesPair<K>& p, cplx w, cplx z) {
    const CMat epw = p.E_plus.eval(w).adjoint(), emw = p.E_minus.eval(w).adjoint();
    const cplx wb = std::conj(w);
    if (std::abs(z - wb) < 1e-12) {
        const CMat num = p.E_plus.derivative().eval(wb) * epw - p.E_minus.derivative().eval(wb) * emw;
        return num * (1.0 / cplx(0.0, -2.0 * std::numbers::pi));
    }
    const CMat num = p.E_plus.eval(z) * epw - p.E_minus.eval(z) * emw;
    return num * (1.0 / (cplx(0.0, -2.0 * std::numbers::pi) * (z - wb)));
}

/// G[i][j] = v_i* K_{w_j}(w_i) v_j.
template <CoefficientField K>
CMat gram_matrix(const DeBrangesPair<K>& p, const std::vector<cplx>& points, const std::vector<CMat>& vectors) {
    if (points.size() != vectors.size()) throw PreconditionError("points and vectors differ in length");
    const std::size_t k = points.size();
    CMat g(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) g(i, j) = (vectors[i].adjoint() * kernel_eval(p, points[j], points[i]) * vectors[j])(0, 0);
    return g;
}

template <CoefficientField K>
Verdict gram_psd(const DeBrangesPair<K>& p, const std::vector<cplx>& points, const std::vector<CMat>& vectors,
                 const Tolerances& tol = default_tolerances()) {
    Verdict v("Gram PSD");
    const CMat g = gram_matrix(p, points, vectors);
    const double scale = std::max(1.0, g.max_abs());
    const double herm = hermitian_defect(g);
    if (herm > 1e-10 * scale) v.fail("residual", "Gram matrix is not Hermitian", std::nullopt, herm);
    const double e = min_hermitian_eigenvalue((g + g.adjoint()) * cplx(0.5));
    if (e < -tol.psd * scale) v.fail("min_eig", "Gram matrix is not PSD", std::nullopt, e);
    return v;
}

/// f in B(E): E+^{-1} f in H^2 and E-^{-1} f in (H^2)^perp.
template <CoefficientField K>
Verdict space_membership(const DeBrangesPair<K>& p, const RatMat<K>& f) {
    detail::require_polynomial(f, "f");
    Verdict v("B(E) membership");
    Verdict a = in_hardy2(inverse(p.E_plus) * f);
    a.name = "E+^{-1} f in H2";
    v.add(a);
    if (det(p.E_minus).is_zero()) {
        v.fail("residual", "det E- vanishes identically");
        return v;
    }
    Verdict b = in_hardy2_perp(inverse(p.E_minus) * f);
    b.name = "E-^{-1} f in H2_perp";
    v.add(b);
    return v;
}

namespace detail {

/// Sum of the residues of a proper rational function at all of its poles.
template <CoefficientField K>
K residue_sum(const Rat<K>& r) {
    if (r.is_zero() || r.is_polynomial()) return K{};
    const Poly<K> den = r.den();
    return r.num().coeff(static_cast<std::size_t>(den.degree() - 1)) / den.lead();
}

}  // namespace detail

/// <f, g> / pi = 2i * sum of residues in C+ of g^# (E+ E+^#)^{-1} f. Exact in exact mode.
template <CoefficientField K>
K inner_product_over_pi(const DeBrangesPair<K>& p, const RatMat<K>& f, const RatMat<K>& g) {
    const RatMat<K> w = inverse(p.E_plus * p.E_plus.sharp());
    const RatMat<K> h = g.sharp() * w * f;
    if (h.rows() != 1 || h.cols() != 1) throw PreconditionError("inner product needs column vectors");
    const Rat<K>& s = h(0, 0);
    if (s.is_zero()) return K{};
    if (s.relative_degree() > -2) throw PreconditionError("integrand does not decay like o(1/x)");
    const auto parts = split_half_planes(s, std::optional<Poly<K>>(p.det_plus()));
    return FieldTraits<K>::imag_unit() * FieldTraits<K>::from_int(2) * detail::residue_sum(parts.upper);
}

template <CoefficientField K>
cplx inner_product(const DeBrangesPair<K>& p, const RatMat<K>& f, const RatMat<K>& g) {
    return std::numbers::pi * to_cplx(inner_product_over_pi(p, f, g));
}

/// Adaptive quadrature of int g(x)* (E+(x) E+(x)*)^{-1} f(x) dx (cross-check only).
template <CoefficientField K>
cplx inner_product_quadrature(const DeBrangesPair<K>& p, const RatMat<K>& f, const RatMat<K>& g, double tol = 1e-12) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const CRatMat ep = to_float(p.E_plus), ff = to_float(f), gg = to_float(g);
    auto integrand = [&](double x) {
        const cplx z(x, 0.0);
        const CMat e = ep.eval(z);
        return (gg.eval(z).adjoint() * inverse(e * e.adjoint()) * ff.eval(z))(0, 0);
    };
    const double inf = std::numeric_limits<double>::infinity();
    const double re = GK::integrate([&](double x) { return integrand(x).real(); }, -inf, inf, 25, tol);
    const double im = GK::integrate([&](double x) { return integrand(x).imag(); }, -inf, inf, 25, tol);
    return {re, im};
}

/// pi * K_w(z) u as a polynomial column in z (the numerator vanishes at z = conj(w)).
template <CoefficientField K>
RatMat<K> kernel_column_times_pi(const DeBrangesPair<K>& p, const K& w, const Mat<K>& u) {
    const K wb = FieldTraits<K>::conj(w);
    const Mat<K> a = p.E_plus.at(w).adjoint() * u, b = p.E_minus.at(w).adjoint() * u;
    const RatMat<K> num = p.E_plus * RatMat<K>(a) - p.E_minus * RatMat<K>(b);
    // divide by -2i (z - conj(w))
    const K c = FieldTraits<K>::from_int(1) / (FieldTraits<K>::imag_unit() * FieldTraits<K>::from_int(-2));
    RatMat<K> out(num.rows(), 1);
    for (std::size_t r = 0; r < num.rows(); ++r) {
        auto [q, rem] = divmod(num(r, 0).num(), Poly<K>::linear_root(wb));
        if constexpr (is_exact_v<K>) {
            if (!rem.is_zero()) throw InternalInvariantError("kernel numerator does not vanish at conj(w)");
        }
        out(r, 0) = Rat<K>(q * c);
    }
    return out;
}

/// Condition for S to be associated: E+^{-1} S / rho_i in H^2 and E-^{-1} S / rho_{-i} in (H^2)^perp.
/// rho_i = -2 pi i (z + i); the constant factor does not affect membership.
template <CoefficientField K>
Verdict assoc_check(const DeBrangesPair<K>& p, const RatMat<K>& S) {
    detail::require_polynomial(S, "S");
    Verdict v("associated function");
    if (!S.square() || S.rows() != p.n()) throw PreconditionError("S must be n x n");
    if (det(S).is_zero()) {
        v.fail("residual", "det S vanishes identically");
        return v;
    }
    const K i = FieldTraits<K>::imag_unit();
    const Rat<K> inv_rho_i(Poly<K>(FieldTraits<K>::from_int(1)), Poly<K>::linear_root(-i));
    const Rat<K> inv_rho_mi(Poly<K>(FieldTraits<K>::from_int(1)), Poly<K>::linear_root(i));
    Verdict a = in_hardy2(inverse(p.E_plus) * S * inv_rho_i);
    a.name = "E+^{-1} S / rho_i in H2";
    v.add(a);
    if (det(p.E_minus).is_zero()) {
        v.fail("residual", "det E- vanishes identically");
        return v;
    }
    Verdict b = in_hardy2_perp(inverse(p.E_minus) * S * inv_rho_mi);
    b.name = "E-^{-1} S / rho_-i in H2_perp";
    v.add(b);
    return v;
}

template <CoefficientField K>
struct RsResult {
    RatMat<K> value;
    Verdict membership;
};

/// (R_S(w) f)(z) = (f(z) - S(z) S(w)^{-1} f(w)) / (z - w) by exact synthetic division.
template <CoefficientField K>
RsResult<K> rs_apply(const DeBrangesPair<K>& p, const RatMat<K>& S, const K& w, const RatMat<K>& f) {
    detail::require_polynomial(S, "S");
    detail::require_polynomial(f, "f");
    const Mat<K> sw = S.at(w);
    if (rank(sw) < sw.rows()) throw PreconditionError("det S(w) = 0");
    const Mat<K> corr = inverse(sw) * f.at(w);
    const RatMat<K> num = f - S * RatMat<K>(corr);
    RatMat<K> out(num.rows(), num.cols());
    for (std::size_t r = 0; r < num.rows(); ++r)
        for (std::size_t c = 0; c < num.cols(); ++c) {
            auto [q, rem] = divmod(num(r, c).num(), Poly<K>::linear_root(w));
            if constexpr (is_exact_v<K>) {
                if (!rem.is_zero()) throw InternalInvariantError("R_S(w): numerator does not vanish at w");
            } else {
                if (rem.max_abs_coeff() > 1e-8 * std::max(1.0, num(r, c).num().max_abs_coeff()))
                    throw InternalInvariantError("R_S(w): numerator does not vanish at w");
            }
            out(r, c) = Rat<K>(q);
        }
    return {out, space_membership(p, out)};
}

/// sqrt(2) U = A (sqrt(2) M).
template <CoefficientField K>
RatMat<K> to_u_basis(const RatMat<K>& A, std::size_t n) {
    if (A.rows() != 2 * n || A.cols() != 2 * n) throw PreconditionError("size mismatch: expected 2n x 2n");
    return A * make_signature<K>(n).sqrt2_M;
}

/// W = M* A M.
template <CoefficientField K>
RatMat<K> to_w_basis(const RatMat<K>& A, std::size_t n) {
    if (A.rows() != 2 * n || A.cols() != 2 * n) throw PreconditionError("size mismatch: expected 2n x 2n");
    const Mat<K> m = make_signature<K>(n).sqrt2_M;
    return m.adjoint() * A * m * FieldTraits<K>::from_ratio(1, 2);
}

template <CoefficientField K>
struct Blocks {
    RatMat<K> b11, b12, b21, b22;
};

template <CoefficientField K>
Blocks<K> blocks_of(const RatMat<K>& A, std::size_t n) {
    return {A.block(0, 0, n, n), A.block(0, n, n, n), A.block(n, 0, n, n), A.block(n, n, n, n)};
}

/// Phi = -i u22 u12^{-1} (u-form) and [a22 - i a21][a11 + i a12]^{-1} (a-form).
template <CoefficientField K>
std::pair<RatMat<K>, RatMat<K>> phi_forms(const RatMat<K>& A, std::size_t n) {
    const K i = FieldTraits<K>::imag_unit();
    const auto u = blocks_of(to_u_basis(A, n), n);
    const auto a = blocks_of(A, n);
    try {
        RatMat<K> uf = u.b22 * inverse(u.b12) * (-i);
        RatMat<K> af = (a.b22 - a.b21 * i) * inverse(a.b11 + a.b12 * i);
        return {uf, af};
    } catch (const SingularMatrixError&) {
        throw PreconditionError("a11 + i a12 is identically singular");
    }
}

/// The six implications for A in P(J_m) / U(J_m); items are evaluated even when the hypotheses fail.
template <CoefficientField K>
Verdict u_block_check(const RatMat<K>& A, std::size_t n, const GridSpec& grid = default_grid(),
                      const Tolerances& tol = default_tolerances(), const Verdict* uj_known = nullptr) {
    Verdict v("U-basis block properties");
    const auto sig = make_signature<K>(n);
    const K i = FieldTraits<K>::imag_unit();
    Verdict pj = in_PJ(A, sig.J, grid);
    pj.name = "hypothesis: A in P(J)";
    Verdict uj = uj_known ? *uj_known : in_UJ(A, sig.J, tol);
    uj.name = "hypothesis: A in U(J)";
    v.add(pj, false);
    v.add(uj, false);

    const RatMat<K> U = to_u_basis(A, n);  // sqrt(2) U
    const auto u = blocks_of(U, n);
    const auto a_poles = A.poles();
    auto is_a_pole = [&](cplx z) {
        for (const auto& p : a_poles)
            if (detail::same_point(p.point, z, 1e-7)) return true;
        return false;
    };

    Verdict i1("(1) U* J U <= j on C+");
    {
        const CMat Jc = to_cplx(sig.J), jc = to_cplx(sig.j) * cplx(2.0);
        for (const cplx z : grid.upper()) {
            CMat uz;
            try {
                uz = U.eval(z);
            } catch (const PoleEvaluationError&) {
                continue;
            }
            const CMat d = jc - uz.adjoint() * Jc * uz;
            const double e = min_hermitian_eigenvalue((d + d.adjoint()) * cplx(0.5));
            if (e < -tol.psd * std::max(1.0, uz.max_abs() * uz.max_abs())) {
                i1.fail("min_eig", "2j - (sqrt2 U)* J (sqrt2 U) is not PSD", z, e);
                break;
            }
        }
    }
    v.add(i1);

    Verdict i2("(2) u12 invertible on C+");
    std::optional<RatMat<K>> u12inv;
    try {
        u12inv = inverse(u.b12);
        for (const auto& p : classify_poles(*u12inv).upper)
            if (!is_a_pole(p.point)) i2.fail("pole", "u12 is singular", p.point);
    } catch (const SingularMatrixError&) {
        i2.fail("residual", "u12 is identically singular");
    }
    v.add(i2);

    Verdict i3("(3) Phi in C and chi in S");
    if (u12inv) {
        const RatMat<K> phi = u.b22 * *u12inv * (-i);
        auto car = in_caratheodory(phi, grid);
        i3.add(car.verdict);
        Verdict chi = in_schur(RatMat<K>(*u12inv * u.b11), grid);
        chi.name = "chi = u12^{-1} u11 in S";
        i3.add(chi);
    } else {
        i3.fail("residual", "u12 is identically singular");
    }
    v.add(i3);

    Verdict i4("(4) u12^{-1} / rho_i in H2");
    const Rat<K> inv_rho_i(Poly<K>(FieldTraits<K>::from_int(1)), Poly<K>::linear_root(-i));
    if (u12inv) i4.add(in_hardy2(RatMat<K>(*u12inv * inv_rho_i)));
    else i4.fail("residual", "u12 is identically singular");
    v.add(i4);

    Verdict i5("(5) chi = u12^# (u11^#)^{-1} inner");
    Verdict i6("(6) -i (u11^#)^{-1} / rho_i in H2");
    try {
        const RatMat<K> u11s_inv = inverse(u.b11.sharp());
        i5.add(in_inner(RatMat<K>(u.b12.sharp() * u11s_inv), tol));
        i6.add(in_hardy2(RatMat<K>(u11s_inv * (-i) * inv_rho_i)));
    } catch (const SingularMatrixError&) {
        i5.fail("residual", "u11 is identically singular");
        i6.fail("residual", "u11 is identically singular");
    }
    v.add(i5);
    v.add(i6);
    return v;
}

/// A certified de Branges matrix with its Phi.
template <CoefficientField K>
struct DBMatrix {
    RatMat<K> A;
    std::size_t n = 0;
    RatMat<K> phi;
    Verdict verdict{"de Branges matrix"};
};

/// de Branges matrix: A in U(J_m) and Phi free of real poles; both Phi formulas must agree exactly.
template <CoefficientField K>
DBMatrix<K> db_check(const RatMat<K>& A, std::size_t n, const Tolerances& tol = default_tolerances()) {
    DBMatrix<K> out;
    out.A = A;
    out.n = n;
    Verdict& v = out.verdict;
    if (A.rows() != 2 * n || A.cols() != 2 * n) throw PreconditionError("size mismatch: expected 2n x 2n");
    const auto sig = make_signature<K>(n);
    v.add(in_UJ(A, sig.J, tol));
    Verdict pv("Phi holomorphic on R");
    try {
        auto [uf, af] = phi_forms(A, n);
        Verdict agree("Phi u-form = a-form");
        if (!rat_equal(uf, af, tol.identity)) agree.fail("residual", "the two Phi formulas differ", std::nullopt, residual(uf, af));
        v.add(agree);
        out.phi = af;
        for (const auto& p : classify_poles(af).real) pv.fail("pole", "real pole of Phi", p.point);
    } catch (const PreconditionError& e) {
        pv.fail("error", e.what());
    }
    v.add(pv);
    return out;
}

/// Real representation A = diag(S^{-1}, S^{-1}) [a~] with the pair E+- = a~11 +- i a~12.
template <CoefficientField K>
struct Decomposition {
    RatMat<K> S;  // polynomial part of the common factor (plain mode: the whole factor)
    EntireProduct<K> product;
    Blocks<K> tilde;
    DeBrangesPair<K> pair;
    Verdict verdict{"decomposition"};
};

template <CoefficientField K>
Decomposition<K> db_decompose(const DBMatrix<K>& dbm, const GridSpec& grid = default_grid(),
                              const Tolerances& tol = default_tolerances()) {
    const std::size_t n = dbm.n;
    const auto a = blocks_of(dbm.A, n);
    FactorOptions opt;
    opt.mode = FactorMode::plain;
    opt.require_regular_at_origin = false;
    opt.check_multiplicity_law = false;
    opt.tol = tol;
    CoFactored<K> co;
    try {
        co = cofactorize(std::vector<RatMat<K>>{a.b11, a.b12, a.b21, a.b22}, opt);
    } catch (const PreconditionError& e) {
        throw PreconditionError(std::string(e.what()) + " (shift the variable so that 0 is not a pole)");
    }
    Decomposition<K> d;
    d.product = co.product;
    d.S = co.product.polynomial_part();
    d.tilde = {co.rational_g[0], co.rational_g[1], co.rational_g[2], co.rational_g[3]};
    const K i = FieldTraits<K>::imag_unit();
    d.pair.E_plus = d.tilde.b11 + d.tilde.b12 * i;
    d.pair.E_minus = d.tilde.b11 - d.tilde.b12 * i;
    Verdict& v = d.verdict;
    Verdict ent("a~ blocks entire");
    for (const auto* b : {&d.tilde.b11, &d.tilde.b12, &d.tilde.b21, &d.tilde.b22})
        for (const auto& p : b->poles()) ent.fail("pole", "block keeps a pole", p.point);
    v.add(ent);
    if (!ent.member) return d;
    v.add(pair_validate(d.pair, grid, tol));
    v.add(assoc_check(d.pair, d.S));
    Verdict ident("E+ = i sqrt2 S u12");
    const RatMat<K> u12 = blocks_of(to_u_basis(dbm.A, n), n).b12;  // sqrt2 u12
    for (int k = 0; k < 10; ++k) {
        const cplx z(-2.0 + 0.45 * k, 0.3 + 0.2 * k);
        try {
            const CMat lhs = d.pair.E_plus.eval(z);
            const CMat rhs = d.S.eval(z) * u12.eval(z) * cplx(0.0, 1.0);
            const double r = (lhs - rhs).max_abs() / std::max(1.0, lhs.max_abs());
            if (r > 1e-9) {
                ident.fail("residual", "identity fails", z, r);
                break;
            }
        } catch (const PoleEvaluationError&) {
        }
    }
    v.add(ident);
    return d;
}

/// A finite matrix T with (T - T*)/i = U J_m U*.
template <CoefficientField K>
struct K0Operator {
    Mat<K> T, U;
    std::size_t n() const { return U.cols() / 2; }
};

template <CoefficientField K>
Verdict k0_validate(const K0Operator<K>& op, const Tolerances& tol = default_tolerances()) {
    Verdict v("K0 conditions");
    const std::size_t N = op.T.rows();
    if (!op.T.square() || op.U.rows() != N || op.U.cols() % 2 != 0 || op.U.cols() == 0)
        throw PreconditionError("T must be N x N and U of size N x 2n");
    const std::size_t n = op.n();
    const K i = FieldTraits<K>::imag_unit();
    const Mat<K> H = (op.T - op.T.adjoint()) * (FieldTraits<K>::from_int(1) / i);
    const Mat<K> rep = op.U * make_signature<K>(n).J * op.U.adjoint();
    Verdict id("(T - T*)/i = U J U*");
    if constexpr (is_exact_v<K>) {
        if (!(H == rep)) id.fail("residual", "identity fails", std::nullopt, to_cplx(H - rep).max_abs());
    } else {
        const double r = (H - rep).max_abs();
        if (r > 1e-10 * std::max(1.0, H.max_abs())) id.fail("residual", "identity fails", std::nullopt, r);
    }
    v.add(id);
    const auto ev = hermitian_eigenvalues(to_cplx(H));
    const double scale = std::max(1.0, to_cplx(H).max_abs());
    std::size_t pos = 0, neg = 0;
    for (double e : ev) {
        if (e > 1e-9 * scale) ++pos;
        if (e < -1e-9 * scale) ++neg;
    }
    Verdict rk("rank of the imaginary part is 2n");
    if (pos + neg != 2 * n) rk.fail("residual", "rank " + std::to_string(pos + neg) + " != " + std::to_string(2 * n), std::nullopt, static_cast<double>(pos + neg));
    v.add(rk);
    Verdict nd("non-dissipative (indefinite imaginary part)");
    if (pos != n || neg != n) nd.fail("residual", "inertia (" + std::to_string(pos) + "," + std::to_string(neg) + ")");
    v.add(nd);
    Verdict re("no real eigenvalues");
    if constexpr (is_exact_v<K>) {
        // det(z I - T) has no real root
        RatMat<K> zi(N, N);
        for (std::size_t r = 0; r < N; ++r)
            for (std::size_t c = 0; c < N; ++c)
                zi(r, c) = Rat<K>(Poly<K>({-op.T(r, c), r == c ? FieldTraits<K>::from_int(1) : K{}}));
        const Poly<K> cp = det(zi).num();
        if (has_real_root(cp)) {
            for (const auto& r : roots(cp))
                if (detail::near_real(r.value, 1e-7)) re.fail("residual", "real eigenvalue", r.value);
            if (re.member) re.fail("residual", "real eigenvalue");
        }
    } else {
        for (const cplx e : eigenvalues(op.T))
            if (std::abs(e.imag()) <= 1e-9 * std::max(1.0, std::abs(e))) re.fail("residual", "real eigenvalue", e);
    }
    v.add(re);
    (void)tol;
    return v;
}

enum class GramConvention { stated, transposed };

inline std::string to_string(GramConvention c) { return c == GramConvention::stated ? "u_t^*(I-zT)^{-1}u_r" : "u_r^*(I-zT)^{-1}u_t"; }

template <CoefficientField K>
struct CharFn {
    RatMat<K> W;
    K0Operator<K> op;
    GramConvention convention = GramConvention::stated;
    Verdict verdict{"characteristic function"};
};

namespace detail {

template <CoefficientField K>
RatMat<K> char_fn_matrix(const K0Operator<K>& op, GramConvention conv) {
    const std::size_t N = op.T.rows(), m = op.U.cols();
    RatMat<K> izt(N, N);  // I - z T
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c)
            izt(r, c) = Rat<K>(Poly<K>({r == c ? FieldTraits<K>::from_int(1) : K{}, -op.T(r, c)}));
    const RatMat<K> R = inverse(izt);
    RatMat<K> gram = op.U.adjoint() * R * op.U;  // (r,t) = u_r^* R u_t
    if (conv == GramConvention::stated) gram = gram.transpose();
    const K i = FieldTraits<K>::imag_unit();
    const RatMat<K> iz(RatMat<K>::from_coefficients({Mat<K>(m, m), Mat<K>::identity(m) * i}));
    return RatMat<K>::identity(m) + iz * gram * make_signature<K>(m / 2).J;
}

/// U with U J U* = H from the eigendecomposition of H (float only).
inline CMat u_from_imaginary_part(const CMat& H, std::size_t n) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(H));
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    const std::size_t N = H.rows();
    CMat X(N, 2 * n);
    // largest n positive then most negative n
    for (std::size_t k = 0; k < n; ++k) {
        const long ip = static_cast<long>(N) - 1 - static_cast<long>(k), in = static_cast<long>(k);
        for (std::size_t r = 0; r < N; ++r) {
            X(r, k) = vecs(static_cast<long>(r), ip) * std::sqrt(std::max(0.0, vals(ip)));
            X(r, n + k) = vecs(static_cast<long>(r), in) * std::sqrt(std::max(0.0, -vals(in)));
        }
    }
    // U = X M*  (J = M j M*)
    const CMat m = to_cplx(make_signature<GaussRational>(n).sqrt2_M) * cplx(1.0 / std::sqrt(2.0));
    return X * m.adjoint();
}

}  // namespace detail

/// W_T(z) = I + i z Gamma(z) J_m; Gamma(z)[r][t] = u_t^*(I - zT)^{-1}u_r is tried first, then the transpose.
template <CoefficientField K>
CharFn<K> char_fn(const Mat<K>& T, const std::optional<Mat<K>>& U, std::size_t n, const Tolerances& tol = default_tolerances()) {
    CharFn<K> out;
    out.op.T = T;
    if (U) {
        out.op.U = *U;
    } else if constexpr (is_exact_v<K>) {
        throw NotRepresentableError("U from an eigendecomposition needs float mode; pass U explicitly");
    } else {
        const CMat H = (T - T.adjoint()) * cplx(0.0, -1.0);
        out.op.U = detail::u_from_imaginary_part(H, n);
    }
    Verdict k0 = k0_validate(out.op, tol);
    if (!k0.member) {
        out.verdict.add(k0);
        return out;
    }
    out.verdict.add(k0);
    const auto J = make_signature<K>(out.op.n()).J;
    const CMat Jc = to_cplx(J);
    // convention pick: W(x)* J W(x) = J at a few real points, then the exact test once
    auto unitary_on_line = [&](const RatMat<K>& W) {
        for (double x : {0.37, -1.3, 2.9}) {
            try {
                const CMat w = W.eval(cplx(x, 0.0));
                if ((w.adjoint() * Jc * w - Jc).max_abs() > 1e-8 * std::max(1.0, w.max_abs() * w.max_abs())) return false;
            } catch (const PoleEvaluationError&) {
            }
        }
        return true;
    };
    for (GramConvention conv : {GramConvention::stated, GramConvention::transposed}) {
        out.W = detail::char_fn_matrix(out.op, conv);
        out.convention = conv;
        if (unitary_on_line(out.W)) break;
    }
    out.verdict.note("Gram convention: " + to_string(out.convention));
    out.verdict.add(db_check(out.W, out.op.n(), tol).verdict);
    return out;
}

/// Rejection-sampled K0 instance T = H0 + (i/2) U J U* with Gaussian integer H0 = H0*, U.
inline K0Operator<GaussRational> gen_k0(std::uint64_t seed, std::size_t N, std::size_t n, long bound = 2) {
    if (N < 2 * n || n == 0) throw PreconditionError("gen_k0 needs N >= 2n >= 2");
    Rng rng(seed);
    const auto J = make_signature<GaussRational>(n).J;
    const GaussRational half_i(mpq_class(0), mpq_class(1, 2));
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Mat<GaussRational> H0(N, N), U(N, 2 * n);
        for (std::size_t r = 0; r < N; ++r) {
            H0(r, r) = GaussRational(rng.integer(-bound, bound));
            for (std::size_t c = r + 1; c < N; ++c) {
                H0(r, c) = rng.gaussian_int(bound);
                H0(c, r) = H0(r, c).conj();
            }
            for (std::size_t c = 0; c < 2 * n; ++c) U(r, c) = rng.gaussian_int(bound);
        }
        K0Operator<GaussRational> op{H0 + U * J * U.adjoint() * half_i, U};
        if (k0_validate(op).member) return op;
    }
    throw PreconditionError("gen_k0: no K0 instance after 1000 tries (N=" + std::to_string(N) + ", n=" + std::to_string(n) + ")");
}

}  // namespace dbm
