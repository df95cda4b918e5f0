#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dbm/grids.hpp"
#include "dbm/herglotz.hpp"
#include "dbm/verdict.hpp"

namespace dbm {

/// j_m = diag(I, -I), script J_m = [[0, iI], [-iI, 0]] and sqrt(2) M = [[iI, -iI], [I, I]].
template <CoefficientField K>
struct Signature {
    std::size_t n = 0;
    Mat<K> j, J, sqrt2_M;

    std::size_t m() const { return 2 * n; }
    /// M* J M = j, checked as (sqrt2 M)* J (sqrt2 M) = 2 j.
    bool identity_holds() const {
        const Mat<K> lhs = sqrt2_M.adjoint() * J * sqrt2_M;
        const Mat<K> rhs = j * FieldTraits<K>::from_int(2);
        if constexpr (is_exact_v<K>) return lhs == rhs;
        else return (lhs - rhs).max_abs() <= 1e-14;
    }
};

template <CoefficientField K>
Signature<K> make_signature(std::size_t n) {
    if (n < 1) throw PreconditionError("signature needs n >= 1");
    const K i = FieldTraits<K>::imag_unit();
    const K one = FieldTraits<K>::from_int(1);
    const Mat<K> id = Mat<K>::identity(n);
    Signature<K> s;
    s.n = n;
    s.j = Mat<K>(2 * n, 2 * n);
    s.J = Mat<K>(2 * n, 2 * n);
    s.sqrt2_M = Mat<K>(2 * n, 2 * n);
    s.j.set_block(0, 0, id);
    s.j.set_block(n, n, id * (-one));
    s.J.set_block(0, n, id * i);
    s.J.set_block(n, 0, id * (-i));
    s.sqrt2_M.set_block(0, 0, id * i);
    s.sqrt2_M.set_block(0, n, id * (-i));
    s.sqrt2_M.set_block(n, 0, id);
    s.sqrt2_M.set_block(n, n, id);
    return s;
}

/// Orthogonal projections (I + J)/2 and (I - J)/2.
template <CoefficientField K>
std::pair<Mat<K>, Mat<K>> signature_projections(const Mat<K>& J) {
    const K half = FieldTraits<K>::from_ratio(1, 2);
    const Mat<K> id = Mat<K>::identity(J.rows());
    return {(id + J) * half, (id - J) * half};
}

template <CoefficientField K>
bool is_signature(const Mat<K>& J) {
    if (!J.square()) return false;
    const Mat<K> id = Mat<K>::identity(J.rows());
    if constexpr (is_exact_v<K>) return J == J.adjoint() && J * J == id;
    else return (J - J.adjoint()).max_abs() <= 1e-12 && (J * J - id).max_abs() <= 1e-12;
}

namespace detail {

inline void pole_witnesses(Verdict& v, const PoleList& poles, const std::string& where) {
    for (const auto& p : poles) v.fail("pole", "pole of order " + std::to_string(p.order) + " in " + where, p.point);
}

template <CoefficientField K>
void check_strictly_proper(Verdict& v, const RatMat<K>& F) {
    for (std::size_t r = 0; r < F.rows(); ++r)
        for (std::size_t c = 0; c < F.cols(); ++c)
            if (!F(r, c).is_strictly_proper())
                v.fail("decay", "entry (" + std::to_string(r) + "," + std::to_string(c) + ") is not strictly proper");
}

}  // namespace detail

/// H^2: all poles in open C- and every entry strictly proper.
template <CoefficientField K>
Verdict in_hardy2(const RatMat<K>& F) {
    Verdict v("H2");
    const PoleSplit s = classify_poles(F);
    detail::pole_witnesses(v, s.upper, "C+");
    detail::pole_witnesses(v, s.real, "R");
    detail::check_strictly_proper(v, F);
    return v;
}

template <CoefficientField K>
Verdict in_hardy2_perp(const RatMat<K>& F) {
    Verdict v = in_hardy2(F.sharp());
    v.name = "H2_perp";
    // witnesses refer to F^#; map pole locations back to F
    for (auto& w : v.witnesses)
        if (w.point) w.point = std::conj(*w.point);
    return v;
}

/// Smirnov class N+: no poles in open C+; real poles are absorbed by h(z) = prod((z - x_j)/(z + i))^{m_j}.
template <CoefficientField K>
Verdict in_smirnov(const RatMat<K>& F) {
    Verdict v("Smirnov");
    const PoleSplit s = classify_poles(F);
    detail::pole_witnesses(v, s.upper, "C+");
    if (v.member && !s.real.empty()) {
        std::string h = "h(z) =";
        for (const auto& p : s.real)
            h += " ((z - " + std::to_string(p.point.real()) + ")/(z + i))^" + std::to_string(p.order);
        v.note(h);
    }
    return v;
}

/// Rational inner: F^# F = I exactly and no poles in closed C+.
template <CoefficientField K>
Verdict in_inner(const RatMat<K>& F, const Tolerances& tol = default_tolerances()) {
    Verdict v("inner");
    if (!F.square()) return v.fail("shape", "inner test needs a square matrix");
    const PoleSplit s = classify_poles(F);
    detail::pole_witnesses(v, s.upper, "C+");
    detail::pole_witnesses(v, s.real, "R");
    const RatMat<K> prod = F.sharp() * F;
    const RatMat<K> id = RatMat<K>::identity(F.rows());
    if (!rat_equal(prod, id, tol.identity)) v.fail("residual", "F^# F != I", std::nullopt, residual(prod, id));
    return v;
}

/// Schur class: no poles in open C+ and ||F(z)|| <= 1 + 1e-9 on the upper grid.
template <CoefficientField K>
Verdict in_schur(const RatMat<K>& F, const GridSpec& grid = default_grid()) {
    Verdict v("Schur");
    const PoleSplit s = classify_poles(F);
    detail::pole_witnesses(v, s.upper, "C+");
    if (!v.member) return v;
    for (const cplx z : grid.upper()) {
        try {
            const double nrm = spectral_norm(F.eval(z));
            if (nrm > 1.0 + 1e-9) return v.fail("sample", "norm exceeds 1", z, nrm);
        } catch (const PoleEvaluationError&) {
        }
    }
    return v;
}

/// Minimum eigenvalue of the Hermitian part Re F(x) = (F + F*)/2.
inline double min_real_part_eig(const CMat& f) { return min_hermitian_eigenvalue((f + f.adjoint()) * cplx(0.5)); }

template <CoefficientField K>
struct CaratheodoryResult {
    Verdict verdict{"Caratheodory"};
    std::optional<HerglotzParams<K>> params;
};

/// Caratheodory class: poles, real-pole residues, polynomial part and sampled Re F(x) >= 0; returns (P, Q, Delta, masses).
template <CoefficientField K>
CaratheodoryResult<K> in_caratheodory(const RatMat<K>& F, const GridSpec& grid = default_grid(),
                                      const std::optional<Poly<K>>& lower_hint = std::nullopt) {
    CaratheodoryResult<K> out;
    Verdict& v = out.verdict;
    if (!F.square()) {
        v.fail("shape", "Caratheodory test needs a square matrix");
        return out;
    }
    const std::size_t n = F.rows();
    const PoleSplit s = classify_poles(F);
    detail::pole_witnesses(v, s.upper, "C+");
    const CRatMat Ff = to_float(F);
    // real poles: simple with -i Res Hermitian PSD
    for (const auto& p : s.real) {
        if (p.order != 1) {
            v.fail("pole", "real pole of order " + std::to_string(p.order), p.point);
            continue;
        }
        const auto ex = local_expansion(Ff, p.point, 1);
        const CMat w = ex[0] * cplx(0.0, -1.0);
        const double herm = hermitian_defect(w);
        if (herm > 1e-9 * std::max(1.0, w.max_abs())) v.fail("residual", "-i Res is not Hermitian", p.point, herm);
        else if (min_hermitian_eigenvalue(w) < -1e-9) v.fail("min_eig", "negative point mass", p.point, min_hermitian_eigenvalue(w));
    }
    // polynomial part at most linear, P = i * C1 >= 0
    RatMat<K> poly_part(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) poly_part(r, c) = Rat<K>(divmod(F(r, c).num(), F(r, c).den()).first);
    if (poly_part.poly_degree() > 1) {
        v.fail("degree", "polynomial part of degree " + std::to_string(poly_part.poly_degree()));
    } else {
        const CMat P = to_cplx(poly_part.coefficient(1)) * cplx(0.0, 1.0);
        if (hermitian_defect(P) > 1e-9 * std::max(1.0, P.max_abs())) v.fail("residual", "P is not Hermitian", std::nullopt, hermitian_defect(P));
        else if (n > 0 && min_hermitian_eigenvalue(P) < -1e-9) v.fail("min_eig", "P is not PSD", std::nullopt, min_hermitian_eigenvalue(P));
    }
    // Re F(x) >= 0 on whole-line samples, refined around the lowest values
    if (v.member) {
        std::vector<std::pair<double, double>> samples;
        auto sample = [&](double x) {
            try {
                const double e = min_real_part_eig(Ff.eval(cplx(x, 0.0)));
                samples.emplace_back(e, x);
                if (e < -1e-9) v.fail("min_eig", "Re F(x) is not PSD", cplx(x, 0.0), e);
            } catch (const PoleEvaluationError&) {
            }
        };
        const auto base = grid.whole_line(grid.herglotz_real_n);
        for (double x : base) sample(x);
        auto lowest = samples;
        std::sort(lowest.begin(), lowest.end());
        const double h = std::numbers::pi / grid.herglotz_real_n;
        for (std::size_t k = 0; k < std::min<std::size_t>(8, lowest.size()) && v.member; ++k) {
            const double th = std::atan(lowest[k].second);
            for (int d = -4; d <= 4; ++d)
                if (d != 0) sample(std::tan(std::clamp(th + d * h / 4.0, -1.5707, 1.5707)));
        }
    }
    if (v.member) {
        try {
            out.params = extract_PQ(F, lower_hint).params;
        } catch (const NotRepresentableError& e) {
            v.note(std::string("parameters not representable exactly: ") + e.what());
        } catch (const PreconditionError& e) {
            v.fail("residual", e.what());
        }
    }
    return out;
}

/// Potapov-Ginzburg transform [P A + Q][P + Q A]^{-1}.
template <CoefficientField K>
RatMat<K> pg_transform(const RatMat<K>& A, const Mat<K>& J) {
    if (!A.square() || A.rows() != J.rows()) throw PreconditionError("PG transform needs A and J of equal size");
    auto [P, Q] = signature_projections(J);
    const RatMat<K> num = P * A + RatMat<K>(Q);
    const RatMat<K> den = RatMat<K>(P) + Q * A;
    try {
        return num * inverse(den);
    } catch (const SingularMatrixError&) {
        throw PreconditionError("PG transform: P + Q A is identically singular");
    }
}

/// J - A(z)* J A(z) >= 0 on the P(J) grid, skipping poles.
template <CoefficientField K>
Verdict in_PJ(const RatMat<K>& A, const Mat<K>& J, const GridSpec& grid = default_grid()) {
    Verdict v("P(J)");
    const CMat Jc = to_cplx(J);
    const auto poles = A.poles();
    for (const cplx z : grid.pj()) {
        bool skip = false;
        for (const auto& p : poles)
            if (std::abs(z - p.point) < grid.pole_margin) skip = true;
        if (skip) continue;
        CMat a;
        try {
            a = A.eval(z);
        } catch (const PoleEvaluationError&) {
            continue;
        }
        const CMat d = Jc - a.adjoint() * Jc * a;
        const double e = min_hermitian_eigenvalue((d + d.adjoint()) * cplx(0.5));
        if (e < -1e-9 * std::max(1.0, a.max_abs() * a.max_abs())) return v.fail("min_eig", "J - A* J A is not PSD", z, e);
    }
    return v;
}

/// U(J): PG(A) inner, cross-checked by A^# J A = J as an exact identity.
template <CoefficientField K>
Verdict in_UJ(const RatMat<K>& A, const Mat<K>& J, const Tolerances& tol = default_tolerances()) {
    Verdict v("U(J)");
    try {
        Verdict pg = in_inner(pg_transform(A, J), tol);
        pg.name = "PG inner";
        v.add(pg);
    } catch (const PreconditionError& e) {
        v.fail("error", e.what());
    }
    Verdict id("A^# J A = J");
    const RatMat<K> lhs = A.sharp() * J * A;
    if (!rat_equal(lhs, RatMat<K>(J), tol.identity)) id.fail("residual", "A^# J A != J", std::nullopt, residual(lhs, RatMat<K>(J)));
    v.add(id);
    return v;
}

/// Splits a strictly proper F without real poles as F = F+ + F- with F+ in H^2 and F- in (H^2)^perp.
template <CoefficientField K>
std::pair<RatMat<K>, RatMat<K>> hardy_split(const RatMat<K>& F, const std::optional<Poly<K>>& lower_hint = std::nullopt) {
    if (!F.is_strictly_proper()) throw PreconditionError("Hardy split needs a strictly proper function");
    auto parts = split_half_planes(F, lower_hint);
    return {parts.lower, parts.upper};
}

}  // namespace dbm
