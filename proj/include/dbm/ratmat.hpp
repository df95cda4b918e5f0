#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dbm/dense.hpp"
#include "dbm/rational.hpp"

namespace dbm {

struct Pole {
    cplx point;
    int order = 1;
};
using PoleList = std::vector<Pole>;

/// A rational matrix is identically singular; carries a polynomial null vector (ascending coefficients).
class SingularMatrixError : public DbmError {
public:
    SingularMatrixError(std::vector<CPoly> null_vector, const std::string& what)
        : DbmError(what), null_vector_(std::move(null_vector)) {}
    const std::vector<CPoly>& null_vector() const noexcept { return null_vector_; }

private:
    std::vector<CPoly> null_vector_;
};

/// Common denominator of a family of rational functions.
template <CoefficientField K>
class Denominator;

template <>
class Denominator<GaussRational> {
public:
    void absorb(const QRat& r) {
        if (r.is_polynomial()) return;
        const QPoly g = gcd(d_, r.den());
        d_ = d_ * divmod(r.den(), g).first;
    }
    const QPoly& poly() const { return d_; }
    QPoly clear(const QRat& r) const { return r.num() * divmod(d_, r.den()).first; }
    QRat reciprocal() const { return QRat(QPoly(GaussRational(1)), d_); }

private:
    QPoly d_{GaussRational(1)};
};

template <>
class Denominator<cplx> {
public:
    void absorb(const CRat& r) { roots_ = detail::merge_roots(roots_, r.den_roots(), true, 1e-8); }
    CPoly poly() const { return detail::poly_from_roots(roots_); }
    CPoly clear(const CRat& r) const {
        CPoly f = r.num();
        for (const auto& c : roots_) {
            int have = 0;
            for (const auto& q : r.den_roots())
                if (detail::same_point(q.value, c.value, 1e-8)) have = q.mult;
            for (int k = have; k < c.mult; ++k) f *= CPoly::linear_root(c.value);
        }
        return f;
    }
    CRat reciprocal() const { return CRat::from_roots(CPoly(cplx(1.0)), roots_); }

private:
    std::vector<Root> roots_;
};

namespace detail {

template <CoefficientField K>
Poly<K> exact_quotient(const Poly<K>& a, const Poly<K>& b) {
    auto [q, r] = divmod(a, b);
    if constexpr (is_exact_v<K>) {
        if (!r.is_zero()) throw InternalInvariantError("inexact fraction-free division");
    }
    return q;
}

}  // namespace detail

/// Matrix of rational functions.
template <CoefficientField K>
class RatMat {
public:
    using scalar = Rat<K>;
    using poly = Poly<K>;

    RatMat() = default;
    RatMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}
    RatMat(std::initializer_list<std::initializer_list<scalar>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        for (const auto& row : init) {
            if (row.size() != cols_) throw std::invalid_argument("ragged matrix literal");
            e_.insert(e_.end(), row.begin(), row.end());
        }
    }
    explicit RatMat(const Mat<K>& c) : RatMat(c.rows(), c.cols()) {
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = scalar(c(i, j));
    }

    static RatMat identity(std::size_t n) { return RatMat(Mat<K>::identity(n)); }
    static RatMat zero(std::size_t r, std::size_t c) { return RatMat(r, c); }
    static RatMat diag(const std::vector<scalar>& d) {
        RatMat m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }
    static RatMat scalar_matrix(std::size_t n, const scalar& s) { return diag(std::vector<scalar>(n, s)); }
    /// Matrix polynomial sum_k C_k z^k.
    static RatMat from_coefficients(const std::vector<Mat<K>>& coeffs) {
        if (coeffs.empty()) throw std::invalid_argument("empty coefficient list");
        RatMat m(coeffs[0].rows(), coeffs[0].cols());
        for (std::size_t i = 0; i < m.rows_; ++i)
            for (std::size_t j = 0; j < m.cols_; ++j) {
                std::vector<K> c;
                for (const auto& ck : coeffs) c.push_back(ck(i, j));
                m(i, j) = scalar(poly(std::move(c)));
            }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    scalar& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const scalar& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }
    const std::vector<scalar>& entries() const noexcept { return e_; }

    RatMat& operator+=(const RatMat& o) {
        check_same(o);
        for (std::size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
        return *this;
    }
    RatMat& operator-=(const RatMat& o) {
        check_same(o);
        for (std::size_t k = 0; k < e_.size(); ++k) e_[k] -= o.e_[k];
        return *this;
    }
    friend RatMat operator+(RatMat a, const RatMat& b) { return a += b; }
    friend RatMat operator-(RatMat a, const RatMat& b) { return a -= b; }
    friend RatMat operator-(RatMat a) {
        for (auto& x : a.e_) x = -x;
        return a;
    }
    friend RatMat operator*(const RatMat& a, const RatMat& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("dimension mismatch in rational matrix product");
        RatMat c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) {
                scalar acc;
                for (std::size_t k = 0; k < a.cols_; ++k) {
                    const scalar& x = a(i, k);
                    const scalar& y = b(k, j);
                    if (x.is_zero() || y.is_zero()) continue;
                    acc += x * y;
                }
                c(i, j) = std::move(acc);
            }
        return c;
    }
    friend RatMat operator*(RatMat a, const scalar& s) {
        for (auto& x : a.e_) x *= s;
        return a;
    }
    friend RatMat operator*(const scalar& s, RatMat a) { return std::move(a) * s; }
    friend RatMat operator*(RatMat a, const K& s) { return std::move(a) * scalar(s); }
    friend RatMat operator*(const K& s, RatMat a) { return std::move(a) * scalar(s); }
    friend RatMat operator*(const Mat<K>& c, const RatMat& a) { return RatMat(c) * a; }
    friend RatMat operator*(const RatMat& a, const Mat<K>& c) { return a * RatMat(c); }

    friend bool operator==(const RatMat& a, const RatMat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
    }

    RatMat transpose() const {
        RatMat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    /// f^#(z) = f(conj z)^*: conjugate coefficients, then transpose.
    RatMat sharp() const {
        RatMat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j).sharp();
        return t;
    }

    RatMat derivative() const {
        RatMat d(rows_, cols_);
        for (std::size_t k = 0; k < e_.size(); ++k) d.e_[k] = e_[k].derivative();
        return d;
    }

    CMat eval(cplx z) const {
        CMat m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(z);
        return m;
    }

    Mat<K> at(const K& z) const {
        Mat<K> m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j)(z);
        return m;
    }

    /// Union of entry poles; a shared pole keeps the largest entry order.
    PoleList poles() const {
        std::vector<Root> acc;
        std::vector<const scalar*> seen;
        for (const auto& x : e_) {
            if (x.is_polynomial()) continue;
            if (std::any_of(seen.begin(), seen.end(), [&](const scalar* s) { return same_den(*s, x); })) continue;
            seen.push_back(&x);
            acc = detail::merge_roots(acc, x.poles(), true, 1e-8);
        }
        detail::sort_roots(acc);
        PoleList out;
        for (const auto& r : acc) out.push_back({r.value, r.mult});
        return out;
    }

    bool is_polynomial() const {
        return std::all_of(e_.begin(), e_.end(), [](const scalar& x) { return x.is_polynomial(); });
    }
    bool is_zero() const {
        return std::all_of(e_.begin(), e_.end(), [](const scalar& x) { return x.is_zero(); });
    }
    bool is_constant() const {
        return std::all_of(e_.begin(), e_.end(), [](const scalar& x) { return x.is_constant(); });
    }
    bool is_strictly_proper() const {
        return std::all_of(e_.begin(), e_.end(), [](const scalar& x) { return x.is_zero() || x.is_strictly_proper(); });
    }
    /// Largest deg num - deg den over nonzero entries.
    int relative_degree() const {
        int d = -1000000;
        for (const auto& x : e_) d = std::max(d, x.relative_degree());
        return d;
    }
    /// Largest numerator degree among polynomial entries (-1 for zero).
    int poly_degree() const {
        int d = -1;
        for (const auto& x : e_) d = std::max(d, x.num().degree());
        return d;
    }
    /// Coefficient matrix of z^k for a polynomial matrix.
    Mat<K> coefficient(std::size_t k) const {
        Mat<K> m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).num().coeff(k);
        return m;
    }
    Mat<K> constant_matrix() const {
        if (!is_constant()) throw DbmError("matrix is not constant");
        return coefficient(0);
    }

    RatMat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        RatMat b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }
    void set_block(std::size_t r0, std::size_t c0, const RatMat& b) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }
    static RatMat from_blocks(const RatMat& a11, const RatMat& a12, const RatMat& a21, const RatMat& a22) {
        if (a11.rows() != a12.rows() || a21.rows() != a22.rows() || a11.cols() != a21.cols() || a12.cols() != a22.cols())
            throw std::invalid_argument("block sizes do not conform");
        RatMat m(a11.rows() + a21.rows(), a11.cols() + a12.cols());
        m.set_block(0, 0, a11);
        m.set_block(0, a11.cols(), a12);
        m.set_block(a11.rows(), 0, a21);
        m.set_block(a11.rows(), a11.cols(), a22);
        return m;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            os << (i ? "; " : "");
            for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j);
        }
        os << "]";
        return os.str();
    }
    friend std::ostream& operator<<(std::ostream& os, const RatMat& m) { return os << m.to_string(); }

private:
    static bool same_den(const scalar& a, const scalar& b) {
        if constexpr (is_exact_v<K>) {
            return a.den() == b.den();
        } else {
            const auto& x = a.den_roots();
            const auto& y = b.den_roots();
            if (x.size() != y.size()) return false;
            for (std::size_t k = 0; k < x.size(); ++k)
                if (x[k].mult != y[k].mult || x[k].value != y[k].value) return false;
            return true;
        }
    }

    void check_same(const RatMat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("dimension mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<scalar> e_;
};

using QRatMat = RatMat<GaussRational>;
using CRatMat = RatMat<cplx>;

inline CRatMat to_float(const QRatMat& m) {
    CRatMat f(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) f(i, j) = to_float(m(i, j));
    return f;
}
inline CRatMat to_float(const CRatMat& m) { return m; }

namespace detail {

template <CoefficientField K>
struct PolyMatrixForm {
    std::vector<std::vector<Poly<K>>> n;  // A = diag(d_i)^{-1} N
    std::vector<Denominator<K>> row_den;
};

template <CoefficientField K>
PolyMatrixForm<K> clear_rows(const RatMat<K>& a) {
    PolyMatrixForm<K> f;
    f.n.assign(a.rows(), std::vector<Poly<K>>(a.cols()));
    f.row_den.resize(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) f.row_den[i].absorb(a(i, j));
        for (std::size_t j = 0; j < a.cols(); ++j) f.n[i][j] = f.row_den[i].clear(a(i, j));
    }
    return f;
}

template <CoefficientField K>
std::vector<CPoly> null_certificate(const std::vector<std::vector<Poly<K>>>& m, std::size_t k, const Poly<K>& prev) {
    const std::size_t n = m.size();
    std::vector<CPoly> x(n);
    x[k] = to_cplx(prev);
    for (std::size_t j = 0; j < k && j < n; ++j) x[j] = to_cplx(-m[j][k]);
    return x;
}

template <CoefficientField K>
bool poly_is_zero(const Poly<K>& p, double scale) {
    if constexpr (is_exact_v<K>) {
        (void)scale;
        return p.is_zero();
    } else {
        return p.max_abs_coeff() <= 1e-11 * scale;
    }
}

/// Fraction-free Gauss-Jordan elimination of [N | I]. Returns (adj-like block, last pivot).
template <CoefficientField K>
std::pair<std::vector<std::vector<Poly<K>>>, Poly<K>> bareiss_inverse(std::vector<std::vector<Poly<K>>> m) {
    const std::size_t n = m.size();
    double scale = 0.0;
    for (auto& row : m) {
        for (const auto& p : row) scale = std::max(scale, p.max_abs_coeff());
        row.resize(2 * n);
    }
    for (std::size_t i = 0; i < n; ++i) m[i][n + i] = Poly<K>(FieldTraits<K>::from_int(1));
    Poly<K> prev(FieldTraits<K>::from_int(1));
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = n;
        double best = -1.0;
        for (std::size_t i = k; i < n; ++i) {
            if (poly_is_zero(m[i][k], scale)) continue;
            if constexpr (is_exact_v<K>) {
                p = i;
                break;
            } else {
                const double v = m[i][k].max_abs_coeff();
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
        }
        if (p == n) {
            throw SingularMatrixError(null_certificate(m, k, prev),
                                      "identically singular matrix (no pivot in column " + std::to_string(k) + ")");
        }
        std::swap(m[p], m[k]);
        const Poly<K> piv = m[k][k];
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const Poly<K> f = m[i][k];
            for (std::size_t j = 0; j < 2 * n; ++j) {
                if (j == k) continue;
                m[i][j] = exact_quotient(piv * m[i][j] - f * m[k][j], prev);
            }
            m[i][k] = Poly<K>();
        }
        prev = piv;
        if constexpr (!is_exact_v<K>) {
            scale = 0.0;
            for (const auto& row : m)
                for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, row[j].max_abs_coeff());
        }
    }
    std::vector<std::vector<Poly<K>>> right(n, std::vector<Poly<K>>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) right[i][j] = m[i][n + j];
    return {right, prev};
}

template <CoefficientField K>
Rat<K> det_small(const RatMat<K>& a) {
    const std::size_t n = a.rows();
    if (n == 0) return Rat<K>(FieldTraits<K>::from_int(1));
    if (n == 1) return a(0, 0);
    if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    Rat<K> d;
    for (std::size_t j = 0; j < n; ++j) {
        if (a(0, j).is_zero()) continue;
        RatMat<K> minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r)
            for (std::size_t c = 0, cc = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = a(r, c);
            }
        const Rat<K> term = a(0, j) * det_small(minor);
        d = (j % 2 == 0) ? d + term : d - term;
    }
    return d;
}

template <CoefficientField K>
RatMat<K> minor_of(const RatMat<K>& a, std::size_t skip_r, std::size_t skip_c) {
    const std::size_t n = a.rows();
    RatMat<K> m(n - 1, n - 1);
    for (std::size_t r = 0, rr = 0; r < n; ++r) {
        if (r == skip_r) continue;
        for (std::size_t c = 0, cc = 0; c < n; ++c) {
            if (c == skip_c) continue;
            m(rr, cc++) = a(r, c);
        }
        ++rr;
    }
    return m;
}

}  // namespace detail

/// Determinant (cofactor expansion up to 3x3, fraction-free elimination beyond).
template <CoefficientField K>
Rat<K> det(const RatMat<K>& a) {
    if (!a.square()) throw std::invalid_argument("determinant of non-square matrix");
    if (a.rows() <= 3) return detail::det_small(a);
    auto form = detail::clear_rows(a);
    Rat<K> scale(FieldTraits<K>::from_int(1));
    for (const auto& d : form.row_den) scale *= d.reciprocal();
    // The last pivot is det N up to the sign of the row permutation; track it separately.
    const std::size_t n = a.rows();
    auto m = form.n;
    Poly<K> prev(FieldTraits<K>::from_int(1));
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && m[p][k].is_zero()) ++p;
        if (p == n) return Rat<K>();
        if (p != k) {
            std::swap(m[p], m[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                m[i][j] = detail::exact_quotient(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev);
            m[i][k] = Poly<K>();
        }
        prev = m[k][k];
    }
    Rat<K> d(prev);
    if (sign < 0) d = -d;
    return d * scale;
}

/// Inverse of a square rational matrix; identically singular input raises SingularMatrixError.
template <CoefficientField K>
RatMat<K> inverse(const RatMat<K>& a) {
    if (!a.square()) throw std::invalid_argument("inverse of non-square matrix");
    const std::size_t n = a.rows();
    if (n <= 3) {
        const Rat<K> d = detail::det_small(a);
        if (!d.is_zero()) {
            const Rat<K> inv = d.inverse();
            RatMat<K> r(n, n);
            if (n == 1) {
                r(0, 0) = inv;
                return r;
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    Rat<K> c = detail::det_small(detail::minor_of(a, j, i));
                    if ((i + j) % 2 == 1) c = -c;
                    r(i, j) = c * inv;
                }
            return r;
        }
    }
    auto form = detail::clear_rows(a);
    auto [right, piv] = detail::bareiss_inverse(form.n);
    const Rat<K> inv_piv = Rat<K>(piv).inverse();
    RatMat<K> r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            // A^{-1} = N^{-1} D with D = diag(d_j).
            Rat<K> dj = form.row_den[j].reciprocal().inverse();
            r(i, j) = Rat<K>(right[i][j]) * inv_piv * dj;
        }
    return r;
}

/// Max relative residual of A - B (0 means equal; exact mode returns 0 or 1).
template <CoefficientField K>
double residual(const RatMat<K>& a, const RatMat<K>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    if constexpr (is_exact_v<K>) {
        return a == b ? 0.0 : 1.0;
    } else {
        double size = 0.0;
        std::vector<std::pair<double, double>> parts;
        for (std::size_t k = 0; k < a.entries().size(); ++k) {
            const CRat& x = a.entries()[k];
            const CRat& y = b.entries()[k];
            const CPoly dx = x.den();
            const CPoly dy = y.den();
            const CPoly u = x.num() * dy;
            const CPoly v = y.num() * dx;
            const double dd = dx.max_abs_coeff() * dy.max_abs_coeff();
            size = std::max(size, (u.max_abs_coeff() + v.max_abs_coeff()) / dd);
            parts.emplace_back((u - v).max_abs_coeff(), dd);
        }
        double r = 0.0;
        for (const auto& [diff, dd] : parts) r = std::max(r, diff / (dd * std::max(size, 1e-300)));
        return size == 0.0 ? 0.0 : r;
    }
}

/// Rational identity A == B: exact equality, or float residual within tol.
template <CoefficientField K>
bool rat_equal(const RatMat<K>& a, const RatMat<K>& b, double tol = default_tolerances().identity) {
    if constexpr (is_exact_v<K>) {
        (void)tol;
        return a == b;
    } else {
        return residual(a, b) <= tol;
    }
}

}  // namespace dbm
