#pragma once

#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dbm/halfplane.hpp"

namespace dbm {

/// Real point x0 carrying the measure jump sigma0; `weight` stores sigma0 / pi = -i * Res_{x0}.
template <CoefficientField K>
struct PointMass {
    K point{};
    Mat<K> weight;
};

/// Phi(z) = iQ - izP + (1/(pi i)) int {1/(x-z) - x/(1+x^2)} dsigma(x), dsigma = Delta(x) dx + point masses.
template <CoefficientField K>
struct HerglotzParams {
    Mat<K> P, Q;
    RatMat<K> density;
    std::vector<PointMass<K>> point_masses;
    std::optional<Poly<K>> lower_hint;  // polynomial whose roots contain the C- poles of the density

    std::size_t size() const { return P.rows(); }
};

namespace detail {

template <CoefficientField K>
K imag_unit() {
    return FieldTraits<K>::imag_unit();
}

template <CoefficientField K>
RatMat<K> mass_term(const PointMass<K>& m) {
    // i W / (z - x0) + i W x0 / (1 + x0^2)
    const K i = imag_unit<K>();
    const K one = FieldTraits<K>::from_int(1);
    const std::size_t n = m.weight.rows();
    RatMat<K> out(n, n);
    const Rat<K> pole(Poly<K>(one), Poly<K>::linear_root(m.point));
    const K c = i * m.point / (one + m.point * m.point);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
            const K w = i * m.weight(r, s);
            out(r, s) = pole * Rat<K>(w) + Rat<K>(m.weight(r, s) * c);
        }
    return out;
}

template <CoefficientField K>
RatMat<K> linear_part(const Mat<K>& P, const Mat<K>& Q) {
    const K i = imag_unit<K>();
    return RatMat<K>::from_coefficients({Q * i, P * (-i)});
}

}  // namespace detail

/// The rational function equal to the integral formula on C+ (and its continuation everywhere).
template <CoefficientField K>
RatMat<K> herglotz_rational(const HerglotzParams<K>& h) {
    const std::size_t n = h.size();
    if (!h.density.is_zero() && h.density.relative_degree() > 0)
        throw PreconditionError("density is not integrable against (1+x^2)^{-1}");
    auto parts = split_half_planes(h.density, h.lower_hint);
    const K i = detail::imag_unit<K>();
    const Mat<K> c = parts.poly.constant_matrix();
    const Mat<K> shift = parts.upper.at(-i) - parts.lower.at(i);
    RatMat<K> phi = detail::linear_part(h.P, h.Q) + RatMat<K>(c + shift) + parts.lower * FieldTraits<K>::from_int(2);
    for (const auto& m : h.point_masses) phi += detail::mass_term(m);
    (void)n;
    return phi;
}

namespace detail {

template <CoefficientField K>
std::vector<K> upper_poles_in_field(const RatMat<K>& d) {
    std::vector<K> out;
    auto push = [&](const K& p) {
        for (const auto& q : out)
            if (same_point(to_cplx(q), to_cplx(p), 1e-9)) return;
        out.push_back(p);
    };
    for (const auto& e : d.entries()) {
        if (e.is_polynomial()) continue;
        if constexpr (is_exact_v<K>) {
            auto rs = exact_roots(e.den());
            if (!rs) throw NotRepresentableError("density pole outside Q(i); use float mode");
            for (const auto& [r, m] : *rs)
                if (r.to_complex().imag() > 0) push(r);
        } else {
            for (const auto& r : e.den_roots())
                if (r.value.imag() > 0) push(r.value);
        }
    }
    return out;
}

}  // namespace detail

/// Residue evaluation at z in C+: 2 * sum of residues of K(x,z) Delta(x) at x = z, x = i and the C+ poles of Delta.
template <CoefficientField K>
Mat<K> herglotz_residue_eval(const HerglotzParams<K>& h, const K& z) {
    const cplx zc = to_cplx(z);
    if (zc.imag() <= 0) throw PreconditionError("residue evaluation needs z in the upper half plane");
    const std::size_t n = h.size();
    const K i = detail::imag_unit<K>();
    const K one = FieldTraits<K>::from_int(1);
    const K half = FieldTraits<K>::from_ratio(1, 2);
    // K(x,z) = 1/(x-z) - (1/2)/(x-i) - (1/2)/(x+i)
    const std::vector<std::pair<K, K>> kernel{{z, one}, {i, -half}, {-i, -half}};
    std::vector<K> centers{z};
    auto add_center = [&](const K& p) {
        for (const auto& q : centers)
            if (detail::same_point(to_cplx(q), to_cplx(p), 1e-12)) return;
        centers.push_back(p);
    };
    add_center(i);
    for (const auto& p : detail::upper_poles_in_field(h.density)) add_center(p);

    Mat<K> res(n, n);
    for (const auto& a : centers) {
        const int s = pole_order_at(h.density, a);
        const auto ex = local_expansion(h.density, a, s + 1);
        for (const auto& [b, w] : kernel) {
            if (detail::same_point(to_cplx(a), to_cplx(b), 1e-12)) {
                res += ex[static_cast<std::size_t>(s)] * w;
            } else {
                // w / (t + a - b) = w sum_j (-1)^j t^j / (a - b)^{j+1}
                const K inv = one / (a - b);
                K pw = w * inv;
                for (int j = 0; j < s; ++j) {
                    res += ex[static_cast<std::size_t>(s - 1 - j)] * pw;
                    pw = -pw * inv;
                }
            }
        }
    }
    Mat<K> out = res * FieldTraits<K>::from_int(2) + h.Q * i - h.P * (i * z);
    for (const auto& m : h.point_masses) out += detail::mass_term(m).at(z);
    return out;
}

/// Adaptive Gauss-Kronrod quadrature of the integral formula over the whole real line (cross-check only).
template <CoefficientField K>
CMat herglotz_quadrature(const HerglotzParams<K>& h, cplx z, double tol = 1e-12) {
    const std::size_t n = h.size();
    const CRatMat d = to_float(h.density);
    CMat out(n, n);
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const CRat& e = d(r, c);
            if (e.is_zero()) continue;
            auto kern = [&](double x) { return (1.0 + x * z) / ((x - z) * (1.0 + x * x)) * e.eval(cplx(x, 0.0)); };
            const double re = GK::integrate([&](double x) { return kern(x).real(); }, -inf, inf, 25, tol);
            const double im = GK::integrate([&](double x) { return kern(x).imag(); }, -inf, inf, 25, tol);
            out(r, c) = cplx(re, im) / cplx(0.0, std::numbers::pi);
        }
    const cplx iu(0.0, 1.0);
    out += to_cplx(h.Q) * iu - to_cplx(h.P) * (iu * z);
    for (const auto& m : h.point_masses) out += to_float(detail::mass_term(m)).eval(z);
    return out;
}

/// Result of reading (P, Q, Delta, point masses) off a Caratheodory candidate.
template <CoefficientField K>
struct ExtractResult {
    HerglotzParams<K> params;
    double roundtrip_residual = 0.0;
};

namespace detail {

/// Simple real poles of a matrix with their residues, in the field K.
template <CoefficientField K>
std::vector<PointMass<K>> real_point_masses(const RatMat<K>& phi, const PoleList& real_poles) {
    std::vector<PointMass<K>> out;
    const std::size_t n = phi.rows();
    for (const auto& p : real_poles) {
        if (p.order != 1) throw PreconditionError("real pole of order " + std::to_string(p.order));
        K x0;
        if constexpr (is_exact_v<K>) {
            auto q = rationalize(cplx(p.point.real(), 0.0));
            bool ok = false;
            if (q)
                for (const auto& e : phi.entries())
                    if (!e.is_polynomial() && e.den()(*q).is_zero()) ok = true;
            if (!ok) throw NotRepresentableError("real pole outside Q; use float mode");
            x0 = *q;
        } else {
            x0 = cplx(p.point.real(), 0.0);
        }
        const auto ex = local_expansion(phi, x0, 1);
        const Mat<K> residue = ex.shift == 1 ? ex[0] : Mat<K>(n, n);
        out.push_back({x0, residue * (-imag_unit<K>())});
    }
    return out;
}

}  // namespace detail

namespace detail {

/// lcm of the entry denominators; its roots are the poles, so the C- poles of (Phi + Phi^#)/2 when Phi has none in C+.
template <CoefficientField K>
Poly<K> denominator_lcm(const RatMat<K>& m) {
    Poly<K> acc(FieldTraits<K>::from_int(1));
    for (const auto& e : m.entries()) {
        if (e.is_zero() || e.is_polynomial()) continue;
        if constexpr (is_exact_v<K>) acc *= divmod(e.den(), gcd(acc, e.den())).first;
        else acc *= e.den();
    }
    return acc;
}

}  // namespace detail

/// Reads (P, Q, Delta) off Phi: P from the linear coefficient, Delta = (Phi + Phi^#)/2, Q from the constant remainder.
template <CoefficientField K>
ExtractResult<K> extract_PQ(const RatMat<K>& phi, const std::optional<Poly<K>>& lower_hint = std::nullopt) {
    if (!phi.square()) throw PreconditionError("extract_PQ needs a square matrix");
    const std::size_t n = phi.rows();
    const K i = detail::imag_unit<K>();
    const PoleSplit ps = classify_poles(phi);
    if (!ps.upper.empty()) throw PreconditionError("not a Caratheodory representation: pole in C+");
    ExtractResult<K> out;
    auto& h = out.params;
    h.lower_hint = lower_hint ? lower_hint : std::optional<Poly<K>>(detail::denominator_lcm(phi));
    h.point_masses = detail::real_point_masses(phi, ps.real);
    RatMat<K> poly_part(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) poly_part(r, c) = Rat<K>(divmod(phi(r, c).num(), phi(r, c).den()).first);
    if (poly_part.poly_degree() > 1) throw PreconditionError("not a Caratheodory representation: polynomial part of degree > 1");
    h.P = poly_part.coefficient(1) * i;
    h.Q = Mat<K>(n, n);
    h.density = (phi + phi.sharp()) * FieldTraits<K>::from_ratio(1, 2);
    const RatMat<K> base = herglotz_rational(h);
    const RatMat<K> rem = (phi - base) * (-i);
    const bool constant = is_exact_v<K> ? rem.is_constant() : [&] {
        for (const auto& e : rem.entries())
            if (!e.is_zero() && e.relative_degree() > 0) return false;
        const CMat a = rem.eval(cplx(0.37, 1.3)), b = rem.eval(cplx(-2.1, 0.4));
        return (a - b).max_abs() <= 1e-8 * std::max(1.0, a.max_abs());
    }();
    if (!constant) throw PreconditionError("not a Caratheodory representation: non-constant remainder " + rem.to_string());
    if constexpr (is_exact_v<K>) {
        h.Q = rem.constant_matrix();
    } else {
        h.Q = rem.eval(cplx(0.37, 1.3));
    }
    if (hermitian_defect(to_cplx(h.Q)) > 1e-9 * std::max(1.0, to_cplx(h.Q).max_abs()))
        throw PreconditionError("not a Caratheodory representation: Q is not Hermitian");
    out.roundtrip_residual = residual(herglotz_rational(h), phi);
    return out;
}

}  // namespace dbm
