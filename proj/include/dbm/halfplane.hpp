#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "dbm/series.hpp"

namespace dbm {

/// Poles of a rational matrix sorted into open upper half plane, real line and open lower half plane.
struct PoleSplit {
    PoleList upper, real, lower;
};

namespace detail {

constexpr double kRealPoleRel = 1e-8;

inline bool near_real(cplx p, double rel) { return std::abs(p.imag()) <= rel * std::max(1.0, std::abs(p)); }

template <CoefficientField K>
void classify_entry(const Rat<K>& f, PoleSplit& out) {
    if (f.is_zero() || f.is_polynomial()) return;
    bool may_be_real = true;
    if constexpr (is_exact_v<K>) may_be_real = has_real_root(f.den());
    auto put = [](PoleList& l, const Root& r) {
        for (auto& q : l)
            if (same_point(q.point, r.value, 1e-8)) {
                q.order = std::max(q.order, r.mult);
                return;
            }
        l.push_back({r.value, r.mult});
    };
    for (const auto& r : f.poles()) {
        if (may_be_real && near_real(r.value, is_exact_v<K> ? 1e-7 : kRealPoleRel)) put(out.real, {cplx(r.value.real(), 0.0), r.mult});
        else if (r.value.imag() > 0) put(out.upper, r);
        else put(out.lower, r);
    }
}

}  // namespace detail

template <CoefficientField K>
PoleSplit classify_poles(const RatMat<K>& F) {
    PoleSplit s;
    for (const auto& e : F.entries()) detail::classify_entry(e, s);
    return s;
}

template <CoefficientField K>
PoleSplit classify_poles(const Rat<K>& f) {
    PoleSplit s;
    detail::classify_entry(f, s);
    return s;
}

/// s*a + t*b = gcd (monic); exact polynomials only.
inline std::tuple<QPoly, QPoly, QPoly> ext_gcd(QPoly a, QPoly b) {
    QPoly s0(GaussRational(1)), s1, t0, t1(GaussRational(1));
    while (!b.is_zero()) {
        auto [q, r] = divmod(a, b);
        a = std::move(b);
        b = std::move(r);
        QPoly s2 = s0 - q * s1, t2 = t0 - q * t1;
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (a.is_zero()) return {a, s0, t0};
    const GaussRational inv = GaussRational(1) / a.lead();
    return {a * inv, s0 * inv, t0 * inv};
}

/// f = polynomial part + part with poles in C- + part with poles in C+.
template <CoefficientField K>
struct HalfPlaneParts {
    Poly<K> poly;
    Rat<K> lower;  // poles in the open lower half plane (an H^2 function when proper)
    Rat<K> upper;  // poles in the open upper half plane
};

namespace detail {

/// Largest divisor of d whose roots are roots of hint.
inline QPoly divisor_supported_on(const QPoly& d, const QPoly& hint) {
    QPoly acc(GaussRational(1)), rem = d;
    for (QPoly g = gcd(rem, hint); g.degree() >= 1; g = gcd(rem, hint)) {
        acc *= g;
        rem = divmod(rem, g).first;
    }
    return acc;
}

inline QPoly rationalized_factor(const std::vector<Root>& roots) {
    std::vector<GaussRational> c;
    const CPoly p = poly_from_roots(roots);
    for (const auto& x : p.coeffs()) {
        auto q = rationalize(x);
        if (!q) throw NotRepresentableError("half-plane factor of the denominator is not defined over Q(i)");
        c.push_back(*q);
    }
    return QPoly(std::move(c));
}

}  // namespace detail

/// Half-plane split of an exact scalar; `lower_hint` (roots in C-) makes the split exact without root finding.
inline HalfPlaneParts<GaussRational> split_half_planes(const QRat& f, const std::optional<QPoly>& lower_hint = std::nullopt) {
    HalfPlaneParts<GaussRational> out;
    auto [q, r] = divmod(f.num(), f.den());
    out.poly = q;
    if (r.is_zero()) return out;
    const QPoly& d = f.den();
    if (has_real_root(d)) throw PreconditionError("real pole; no half-plane split");
    QPoly dm;
    if (lower_hint) {
        dm = detail::divisor_supported_on(d, *lower_hint);
    } else {
        std::vector<Root> low;
        for (const auto& x : roots(d))
            if (x.value.imag() < 0) low.push_back(x);
        dm = detail::rationalized_factor(low);
    }
    auto [dp, rest] = divmod(d, dm);
    if (!rest.is_zero()) throw NotRepresentableError("half-plane factor does not divide the denominator");
    for (const auto& x : roots(dp))
        if (x.value.imag() < 0) throw PreconditionError("hint does not cover every lower half plane pole");
    // r/d = a/dm + b/dp with s*dp + t*dm = 1.
    auto [g, s, t] = ext_gcd(dp, dm);
    if (g.degree() != 0) throw InternalInvariantError("half-plane factors are not coprime");
    const QPoly a = divmod(r * s, dm).second;
    auto [b, brem] = divmod(r - a * dp, dm);
    if (!brem.is_zero()) throw InternalInvariantError("inexact partial fraction split");
    out.lower = QRat(a, dm);
    out.upper = QRat(b, dp);
    return out;
}

namespace detail {

/// Principal part of f at the root rho (multiplicity m) as a rational function with denominator (z - rho)^m.
inline CRat principal_part(const CRat& f, const Root& rho) {
    CPoly rest(cplx(1.0));
    for (const auto& r : f.den_roots())
        if (!same_point(r.value, rho.value, 1e-12))
            for (int k = 0; k < r.mult; ++k) rest *= CPoly::linear_root(r.value - rho.value);
    const auto c = series_divide(f.num().shift(rho.value), rest, rho.mult);
    // sum_j c_j t^{j-m} = (sum_j c_j t^j) / t^m with t = z - rho
    CPoly num;
    const CPoly t = CPoly::linear_root(rho.value);
    CPoly pw(cplx(1.0));
    for (int j = 0; j < rho.mult; ++j) {
        num += pw * c[static_cast<std::size_t>(j)];
        pw *= t;
    }
    return CRat::from_roots(num, {rho});
}

}  // namespace detail

inline HalfPlaneParts<cplx> split_half_planes(const CRat& f, const std::optional<CPoly>& /*lower_hint*/ = std::nullopt) {
    HalfPlaneParts<cplx> out;
    out.poly = divmod(f.num(), f.den()).first;
    for (const auto& r : f.den_roots()) {
        if (detail::near_real(r.value, detail::kRealPoleRel)) throw PreconditionError("real pole; no half-plane split");
        if (r.value.imag() < 0) out.lower += detail::principal_part(f, r);
        else out.upper += detail::principal_part(f, r);
    }
    return out;
}

template <CoefficientField K>
struct MatrixHalfPlaneParts {
    RatMat<K> poly, lower, upper;
};

template <CoefficientField K>
MatrixHalfPlaneParts<K> split_half_planes(const RatMat<K>& F, const std::optional<Poly<K>>& lower_hint = std::nullopt) {
    MatrixHalfPlaneParts<K> out{RatMat<K>(F.rows(), F.cols()), RatMat<K>(F.rows(), F.cols()), RatMat<K>(F.rows(), F.cols())};
    for (std::size_t i = 0; i < F.rows(); ++i)
        for (std::size_t j = 0; j < F.cols(); ++j) {
            auto p = split_half_planes(F(i, j), lower_hint);
            out.poly(i, j) = Rat<K>(p.poly);
            out.lower(i, j) = p.lower;
            out.upper(i, j) = p.upper;
        }
    return out;
}

}  // namespace dbm
