#pragma once

#include <algorithm>
#include <vector>

#include "dbm/ratmat.hpp"

namespace dbm {

/// F(z0 + t) = t^{-shift} * sum_k coeffs[k] t^k, truncated.
template <CoefficientField K>
struct LocalExpansion {
    K point{};
    int shift = 0;
    std::vector<Mat<K>> coeffs;

    const Mat<K>& operator[](std::size_t k) const { return coeffs[k]; }
    std::size_t size() const { return coeffs.size(); }
    double scale() const {
        double s = 0.0;
        for (const auto& c : coeffs) s = std::max(s, c.max_abs());
        return s;
    }
};

/// First `terms` coefficients of a(t)/b(t) with b(0) != 0.
template <CoefficientField K>
std::vector<K> series_divide(const Poly<K>& a, const Poly<K>& b, int terms) {
    std::vector<K> c(static_cast<std::size_t>(std::max(terms, 0)), K{});
    const K inv_b0 = FieldTraits<K>::from_int(1) / b.coeff(0);
    for (int k = 0; k < terms; ++k) {
        K acc = a.coeff(static_cast<std::size_t>(k));
        for (int j = 1; j <= std::min(k, b.degree()); ++j)
            acc -= b.coeff(static_cast<std::size_t>(j)) * c[static_cast<std::size_t>(k - j)];
        c[static_cast<std::size_t>(k)] = acc * inv_b0;
    }
    return c;
}

namespace detail {

constexpr double kPointMatch = 1e-7;

/// Splits den(z0 + t) = t^m * rest(t) with rest(0) != 0.
inline std::pair<int, QPoly> split_at(const QRat& f, const GaussRational& z0) {
    QPoly d = f.den().shift(z0);
    int m = 0;
    while (m <= d.degree() && d.coeff(static_cast<std::size_t>(m)).is_zero()) ++m;
    std::vector<GaussRational> rest(d.coeffs().begin() + m, d.coeffs().end());
    return {m, QPoly(std::move(rest))};
}

inline std::pair<int, CPoly> split_at(const CRat& f, const cplx& z0) {
    int m = 0;
    CPoly rest(cplx(1.0));
    for (const auto& r : f.den_roots()) {
        if (same_point(r.value, z0, kPointMatch)) {
            m += r.mult;
        } else {
            for (int k = 0; k < r.mult; ++k) rest *= CPoly::linear_root(r.value - z0);
        }
    }
    return {m, rest};
}

}  // namespace detail

/// Pole order of a scalar at z0 (0 when analytic there).
template <CoefficientField K>
int pole_order_at(const Rat<K>& f, const K& z0) {
    if (f.is_zero()) return 0;
    return detail::split_at(f, z0).first;
}

template <CoefficientField K>
int pole_order_at(const RatMat<K>& F, const K& z0) {
    int p = 0;
    for (const auto& x : F.entries()) p = std::max(p, pole_order_at(x, z0));
    return p;
}

/// Zero order of a nonzero scalar at z0 minus its pole order.
template <CoefficientField K>
int order_at(const Rat<K>& f, const K& z0) {
    if (f.is_zero()) throw DbmError("order of the zero function");
    const int pole = pole_order_at(f, z0);
    const Poly<K> n = f.num().shift(z0);
    int zero = 0;
    if constexpr (is_exact_v<K>) {
        while (n.coeff(static_cast<std::size_t>(zero)).is_zero()) ++zero;
    } else {
        for (const auto& r : roots(f.num()))
            if (detail::same_point(r.value, z0, 1e-6)) zero += r.mult;
    }
    return zero - pole;
}

/// Laurent expansion with shift = pole order at z0, `terms` coefficients of t^shift F(z0 + t).
template <CoefficientField K>
LocalExpansion<K> local_expansion(const RatMat<K>& F, const K& z0, int terms) {
    LocalExpansion<K> e;
    e.point = z0;
    e.shift = pole_order_at(F, z0);
    e.coeffs.assign(static_cast<std::size_t>(terms), Mat<K>(F.rows(), F.cols()));
    for (std::size_t i = 0; i < F.rows(); ++i)
        for (std::size_t j = 0; j < F.cols(); ++j) {
            const Rat<K>& f = F(i, j);
            if (f.is_zero()) continue;
            auto [m, rest] = detail::split_at(f, z0);
            const int offset = e.shift - m;
            const auto c = series_divide(f.num().shift(z0), rest, terms - offset);
            for (int k = 0; k + offset < terms; ++k)
                e.coeffs[static_cast<std::size_t>(k + offset)](i, j) = c[static_cast<std::size_t>(k)];
        }
    return e;
}

}  // namespace dbm
