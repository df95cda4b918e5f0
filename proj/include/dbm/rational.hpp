#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dbm/poly.hpp"

namespace dbm {

/// Evaluation hit a pole; carries the offending point.
class PoleEvaluationError : public DbmError {
public:
    PoleEvaluationError(cplx pole, const std::string& what) : DbmError(what), pole_(pole) {}
    cplx pole() const noexcept { return pole_; }

private:
    cplx pole_;
};

namespace detail {

inline std::string format_point(cplx z) {
    std::ostringstream os;
    os.precision(12);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

[[noreturn]] inline void throw_pole(cplx pole) {
    throw PoleEvaluationError(pole, "evaluation at pole z=" + format_point(pole));
}

inline bool same_point(cplx a, cplx b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Merges root multisets; matching roots combine by sum or max of multiplicities.
inline std::vector<Root> merge_roots(std::vector<Root> a, const std::vector<Root>& b, bool use_max, double rel) {
    for (const auto& r : b) {
        auto it = std::find_if(a.begin(), a.end(), [&](const Root& x) { return same_point(x.value, r.value, rel); });
        if (it == a.end()) {
            a.push_back(r);
        } else {
            it->mult = use_max ? std::max(it->mult, r.mult) : it->mult + r.mult;
        }
    }
    return a;
}

inline CPoly poly_from_roots(const std::vector<Root>& roots) {
    CPoly p(cplx(1.0));
    for (const auto& r : roots)
        for (int k = 0; k < r.mult; ++k) p *= CPoly::linear_root(r.value);
    return p;
}

/// Synthetic division by (z - r), discarding the remainder.
inline CPoly deflate(const CPoly& p, cplx r) {
    const int n = p.degree();
    if (n < 1) return {};
    std::vector<cplx> q(static_cast<std::size_t>(n));
    cplx acc = p.coeff(static_cast<std::size_t>(n));
    for (int k = n - 1; k >= 0; --k) {
        q[static_cast<std::size_t>(k)] = acc;
        acc = acc * r + p.coeff(static_cast<std::size_t>(k));
    }
    return CPoly(std::move(q));
}

/// Zeroes coefficients that are pure cancellation noise relative to the operand scale.
inline CPoly chop(const CPoly& p, double scale, double rel = 1e-12) {
    std::vector<cplx> v = p.coeffs();
    for (auto& x : v)
        if (std::abs(x) <= rel * scale) x = 0.0;
    return CPoly(std::move(v));
}

}  // namespace detail

template <CoefficientField K>
class Rat;

/// Exact rational function over Q(i): num/den with gcd 1 and monic den.
template <>
class Rat<GaussRational> {
public:
    using K = GaussRational;
    using P = QPoly;

    Rat() : num_(), den_(K(1)) {}
    Rat(K c) : num_(std::move(c)), den_(K(1)) {}  // NOLINT(google-explicit-constructor)
    Rat(P p) : num_(std::move(p)), den_(K(1)) {}  // NOLINT(google-explicit-constructor)
    Rat(P num, P den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw DbmError("zero denominator");
        reduce();
    }

    const P& num() const noexcept { return num_; }
    const P& den() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_polynomial() const noexcept { return den_.degree() == 0; }
    bool is_constant() const noexcept { return is_polynomial() && num_.degree() <= 0; }
    bool is_strictly_proper() const noexcept { return num_.degree() < den_.degree(); }
    /// deg num - deg den (very negative for zero).
    int relative_degree() const noexcept { return is_zero() ? -1000000 : num_.degree() - den_.degree(); }

    K constant_value() const { return num_.coeff(0); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        if (a.den_ == b.den_) return Rat(a.num_ + b.num_, a.den_);
        if (a.is_polynomial()) return normalized(a.num_ * b.den_ + b.num_, b.den_);
        if (b.is_polynomial()) return normalized(a.num_ + b.num_ * a.den_, a.den_);
        const P g = gcd(a.den_, b.den_);
        const P ca = divmod(b.den_, g).first;
        const P cb = divmod(a.den_, g).first;
        return Rat(a.num_ * ca + b.num_ * cb, a.den_ * ca);
    }
    friend Rat operator-(const Rat& a) { return Rat(-a.num_, a.den_, true); }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    friend Rat operator*(const Rat& a, const Rat& b) {
        if (a.is_zero() || b.is_zero()) return {};
        if (a.is_polynomial() && b.is_polynomial()) return Rat(a.num_ * b.num_);
        const P g1 = gcd(a.num_, b.den_);
        const P g2 = gcd(b.num_, a.den_);
        P n = divmod(a.num_, g1).first * divmod(b.num_, g2).first;
        P d = divmod(a.den_, g2).first * divmod(b.den_, g1).first;
        return normalized(std::move(n), std::move(d));
    }
    friend Rat operator/(const Rat& a, const Rat& b) { return a * b.inverse(); }
    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }

    Rat inverse() const {
        if (is_zero()) throw DbmError("inverse of the zero function");
        return normalized(den_, num_);
    }

    Rat sharp() const { return Rat(num_.conj_coeffs(), den_.conj_coeffs(), true); }

    Rat derivative() const {
        if (is_polynomial()) return Rat(num_.derivative());
        return Rat(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
    }

    K operator()(const K& z) const {
        const K d = den_(z);
        if (d.is_zero()) detail::throw_pole(z.to_complex());
        return num_(z) / d;
    }

    cplx eval(cplx z) const {
        const cplx d = den_.eval(z);
        if (std::abs(d) <= 1e-14 * den_.abs_bound(std::abs(z))) detail::throw_pole(nearest_pole(z));
        return num_.eval(z) / d;
    }

    std::vector<Root> poles() const { return den_.degree() < 1 ? std::vector<Root>{} : roots(den_); }

    /// Substitution z -> z + a.
    Rat shift(const K& a) const { return Rat(num_.shift(a), den_.shift(a), true); }

    std::string to_string() const {
        if (is_polynomial()) return num_.to_string();
        return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
    }
    friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.to_string(); }

private:
    Rat(P num, P den, bool /*already_reduced*/) : num_(std::move(num)), den_(std::move(den)) { make_monic(); }

    static Rat normalized(P num, P den) {
        if (den.is_zero()) throw DbmError("zero denominator");
        return Rat(std::move(num), std::move(den), true);
    }

    void make_monic() {
        if (num_.is_zero()) {
            den_ = P(K(1));
            return;
        }
        if (den_.lead() != K(1)) {
            const K inv = K(1) / den_.lead();
            num_ *= inv;
            den_ = den_.monic();
        }
    }

    void reduce() {
        if (num_.is_zero()) {
            den_ = P(K(1));
            return;
        }
        if (den_.degree() > 0) {
            const P g = gcd(num_, den_);
            if (g.degree() > 0) {
                num_ = divmod(num_, g).first;
                den_ = divmod(den_, g).first;
            }
        }
        make_monic();
    }

    cplx nearest_pole(cplx z) const {
        cplx best = z;
        double dist = INFINITY;
        for (const auto& r : poles())
            if (std::abs(r.value - z) < dist) {
                dist = std::abs(r.value - z);
                best = r.value;
            }
        return best;
    }

    P num_;
    P den_;
};

/// Floating rational function: numerator polynomial over a monic denominator kept as its roots.
template <>
class Rat<cplx> {
public:
    using K = cplx;
    using P = CPoly;

    Rat() = default;
    Rat(K c) : num_(c) {}  // NOLINT(google-explicit-constructor)
    Rat(P p) : num_(std::move(p)) {}  // NOLINT(google-explicit-constructor)
    Rat(P num, const P& den) {
        if (den.is_zero()) throw DbmError("zero denominator");
        num_ = num * (1.0 / den.lead());
        den_roots_ = roots(den);
        reduce();
    }
    /// From a numerator and the roots of a monic denominator.
    static Rat from_roots(P num, std::vector<Root> den_roots) {
        Rat r;
        r.num_ = std::move(num);
        r.den_roots_ = std::move(den_roots);
        r.reduce();
        return r;
    }

    const P& num() const noexcept { return num_; }
    P den() const { return detail::poly_from_roots(den_roots_); }
    const std::vector<Root>& den_roots() const noexcept { return den_roots_; }

    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_polynomial() const noexcept { return den_roots_.empty(); }
    bool is_constant() const noexcept { return is_polynomial() && num_.degree() <= 0; }
    int den_degree() const noexcept {
        int d = 0;
        for (const auto& r : den_roots_) d += r.mult;
        return d;
    }
    bool is_strictly_proper() const noexcept { return num_.degree() < den_degree(); }
    int relative_degree() const noexcept { return is_zero() ? -1000000 : num_.degree() - den_degree(); }
    K constant_value() const { return num_.coeff(0); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const auto common = detail::merge_roots(a.den_roots_, b.den_roots_, true, kMergeRel);
        const P fa = a.num_ * cofactor(common, a.den_roots_);
        const P fb = b.num_ * cofactor(common, b.den_roots_);
        const double scale = std::max(fa.max_abs_coeff(), fb.max_abs_coeff());
        return from_roots(detail::chop(fa + fb, scale), common);
    }
    friend Rat operator-(Rat a) {
        a.num_ = -a.num_;
        return a;
    }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    friend Rat operator*(const Rat& a, const Rat& b) {
        if (a.is_zero() || b.is_zero()) return {};
        return from_roots(a.num_ * b.num_, detail::merge_roots(a.den_roots_, b.den_roots_, false, kMergeRel));
    }
    friend Rat operator/(const Rat& a, const Rat& b) { return a * b.inverse(); }
    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }

    Rat inverse() const {
        if (is_zero()) throw DbmError("inverse of the zero function");
        return from_roots(den() * (1.0 / num_.lead()), roots(num_));
    }

    Rat sharp() const {
        Rat r;
        r.num_ = num_.conj_coeffs();
        r.den_roots_ = den_roots_;
        for (auto& x : r.den_roots_) x.value = std::conj(x.value);
        return r;
    }

    Rat derivative() const {
        if (is_polynomial()) return Rat(num_.derivative());
        // f'/f = n'/n - sum m_k/(z-r_k); write sum m_k/(z-r_k) = R/D with D the radical.
        P radical(cplx(1.0));
        for (const auto& r : den_roots_) radical *= P::linear_root(r.value);
        P rsum;
        for (std::size_t k = 0; k < den_roots_.size(); ++k) {
            P term(cplx(static_cast<double>(den_roots_[k].mult)));
            for (std::size_t j = 0; j < den_roots_.size(); ++j)
                if (j != k) term *= P::linear_root(den_roots_[j].value);
            rsum += term;
        }
        std::vector<Root> d = den_roots_;
        for (auto& x : d) x.mult += 1;
        const P a = num_.derivative() * radical;
        const P b = num_ * rsum;
        return from_roots(detail::chop(a - b, std::max(a.max_abs_coeff(), b.max_abs_coeff())), d);
    }

    cplx operator()(cplx z) const { return eval(z); }

    cplx eval(cplx z) const {
        cplx d(1.0);
        for (const auto& r : den_roots_) {
            if (std::abs(z - r.value) <= 1e-14 * std::max(1.0, std::abs(r.value))) detail::throw_pole(r.value);
            d *= std::pow(z - r.value, r.mult);
        }
        return num_.eval(z) / d;
    }

    std::vector<Root> poles() const { return den_roots_; }

    Rat shift(cplx a) const {
        Rat r;
        r.num_ = num_.shift(a);
        r.den_roots_ = den_roots_;
        for (auto& x : r.den_roots_) x.value -= a;
        return r;
    }

    std::string to_string() const {
        if (is_polynomial()) return num_.to_string();
        return "(" + num_.to_string() + ")/(" + den().to_string() + ")";
    }
    friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.to_string(); }

private:
    static constexpr double kMergeRel = 1e-8;

    static P cofactor(const std::vector<Root>& common, const std::vector<Root>& part) {
        P f(cplx(1.0));
        for (const auto& r : common) {
            int have = 0;
            for (const auto& q : part)
                if (detail::same_point(q.value, r.value, kMergeRel)) have = q.mult;
            for (int k = have; k < r.mult; ++k) f *= P::linear_root(r.value);
        }
        return f;
    }

    void reduce() {
        if (num_.is_zero()) {
            den_roots_.clear();
            return;
        }
        const double tol = default_tolerances().deflation;
        for (auto& r : den_roots_) {
            while (r.mult > 0 && num_.degree() >= 1 &&
                   std::abs(num_.eval(r.value)) <= tol * num_.abs_bound(std::abs(r.value))) {
                num_ = detail::deflate(num_, r.value);
                --r.mult;
            }
        }
        den_roots_.erase(std::remove_if(den_roots_.begin(), den_roots_.end(), [](const Root& r) { return r.mult <= 0; }),
                         den_roots_.end());
        detail::sort_roots(den_roots_);
    }

    P num_;
    std::vector<Root> den_roots_;
};

using QRat = Rat<GaussRational>;
using CRat = Rat<cplx>;

inline CRat to_float(const QRat& r) {
    std::vector<Root> dr = r.den().degree() >= 1 ? roots(r.den()) : std::vector<Root>{};
    return CRat::from_roots(to_cplx(r.num()), std::move(dr));
}
inline CRat to_float(const CRat& r) { return r; }

/// Residual of a - b relative to the operand scale (0 in exact arithmetic).
template <CoefficientField K>
double rat_residual(const Rat<K>& a, const Rat<K>& b) {
    if constexpr (is_exact_v<K>) {
        return a == b ? 0.0 : 1.0;
    } else {
        const CPoly da = a.den();
        const CPoly db = b.den();
        const CPoly x = a.num() * db;
        const CPoly y = b.num() * da;
        const double scale = std::max({x.max_abs_coeff(), y.max_abs_coeff(), da.max_abs_coeff() * db.max_abs_coeff()});
        return (x - y).max_abs_coeff() / scale;
    }
}

}  // namespace dbm
