#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dbm/field.hpp"

namespace dbm {

/// Univariate polynomial with ascending coefficients. The zero polynomial has degree -1.
template <CoefficientField K>
class Poly {
public:
    using value_type = K;

    Poly() = default;
    Poly(K constant) : c_{std::move(constant)} { trim(); }  // NOLINT(google-explicit-constructor)
    explicit Poly(std::vector<K> coeffs) : c_(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<K> coeffs) : c_(coeffs) { trim(); }

    static Poly monomial(K c, int deg) {
        std::vector<K> v(static_cast<std::size_t>(deg) + 1, K{});
        v.back() = std::move(c);
        return Poly(std::move(v));
    }
    static Poly z() { return monomial(FieldTraits<K>::from_int(1), 1); }
    /// z - r
    static Poly linear_root(const K& r) { return Poly(std::vector<K>{-r, FieldTraits<K>::from_int(1)}); }

    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const noexcept { return c_.empty(); }
    bool is_constant() const noexcept { return c_.size() <= 1; }
    const std::vector<K>& coeffs() const noexcept { return c_; }
    K coeff(std::size_t k) const { return k < c_.size() ? c_[k] : K{}; }
    const K& lead() const { return c_.back(); }

    Poly& operator+=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), K{});
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), K{});
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    Poly& operator*=(const K& s) {
        for (auto& x : c_) x *= s;
        trim();
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(Poly a) {
        for (auto& x : a.c_) x = -x;
        return a;
    }
    friend Poly operator*(Poly a, const K& s) { return a *= s; }
    friend Poly operator*(const K& s, Poly a) { return a *= s; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<K> r(a.c_.size() + b.c_.size() - 1, K{});
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if constexpr (is_exact_v<K>) {
                if (a.c_[i].is_zero()) continue;
            }
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return Poly(std::move(r));
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    K operator()(const K& x) const {
        K acc{};
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    /// Numeric evaluation regardless of coefficient field.
    cplx eval(cplx x) const {
        cplx acc{};
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + to_cplx(*it);
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<K> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * FieldTraits<K>::from_int(static_cast<long>(k));
        return Poly(std::move(d));
    }

    /// Coefficientwise conjugate: the polynomial z -> conj(p(conj z)).
    Poly conj_coeffs() const {
        std::vector<K> d(c_.size());
        for (std::size_t k = 0; k < c_.size(); ++k) d[k] = FieldTraits<K>::conj(c_[k]);
        return Poly(std::move(d));
    }

    /// p(z + a).
    Poly shift(const K& a) const {
        std::vector<K> r = c_;
        const std::size_t n = r.size();
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = n - 1; j > i; --j) r[j - 1] += a * r[j];
        return Poly(std::move(r));
    }

    /// p(s z).
    Poly scale_arg(const K& s) const {
        std::vector<K> r = c_;
        K pw = FieldTraits<K>::from_int(1);
        for (auto& x : r) {
            x *= pw;
            pw *= s;
        }
        return Poly(std::move(r));
    }

    Poly monic() const {
        if (is_zero()) return {};
        Poly r = *this;
        const K inv = FieldTraits<K>::from_int(1) / lead();
        for (auto& x : r.c_) x *= inv;
        r.c_.back() = FieldTraits<K>::from_int(1);
        return r;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& x : c_) m = std::max(m, FieldTraits<K>::magnitude(x));
        return m;
    }

    /// Sum |a_k| r^k, the natural scale of |p| on the circle of radius r.
    double abs_bound(double r) const {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + FieldTraits<K>::magnitude(*it);
        return acc;
    }

    bool has_real_coeffs() const {
        if constexpr (is_exact_v<K>) {
            return std::all_of(c_.begin(), c_.end(), [](const K& x) { return x.is_real(); });
        } else {
            return std::all_of(c_.begin(), c_.end(), [](const K& x) { return x.imag() == 0.0; });
        }
    }

    std::string to_string(const std::string& var = "z") const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (int k = degree(); k >= 0; --k) {
            const K& a = c_[static_cast<std::size_t>(k)];
            if (FieldTraits<K>::is_zero(a)) continue;
            if (!first) os << " + ";
            first = false;
            const bool unit = a == FieldTraits<K>::from_int(1);
            if (k == 0 || !unit) os << a;
            if (k >= 1) os << (unit ? "" : "*") << var;
            if (k >= 2) os << "^" << k;
        }
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.to_string(); }

private:
    void trim() {
        if constexpr (is_exact_v<K>) {
            while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
        } else {
            double m = 0.0;
            for (const auto& x : c_) m = std::max(m, std::abs(x));
            const double cut = 1e-13 * m;
            while (!c_.empty() && std::abs(c_.back()) <= cut) c_.pop_back();
        }
    }

    std::vector<K> c_;
};

using QPoly = Poly<GaussRational>;
using CPoly = Poly<cplx>;

template <CoefficientField K>
Poly<cplx> to_cplx(const Poly<K>& p) {
    std::vector<cplx> v;
    v.reserve(p.coeffs().size());
    for (const auto& x : p.coeffs()) v.push_back(to_cplx(x));
    return Poly<cplx>(std::move(v));
}

/// Quotient and remainder of polynomial division.
template <CoefficientField K>
std::pair<Poly<K>, Poly<K>> divmod(const Poly<K>& a, const Poly<K>& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    if (a.degree() < b.degree()) return {Poly<K>{}, a};
    std::vector<K> r = a.coeffs();
    const int db = b.degree();
    std::vector<K> q(static_cast<std::size_t>(a.degree() - db) + 1, K{});
    const K inv_lead = FieldTraits<K>::from_int(1) / b.lead();
    for (int k = a.degree() - db; k >= 0; --k) {
        const K f = r[static_cast<std::size_t>(k + db)] * inv_lead;
        q[static_cast<std::size_t>(k)] = f;
        if (FieldTraits<K>::is_zero(f)) continue;
        for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k + j)] -= f * b.coeffs()[static_cast<std::size_t>(j)];
        r[static_cast<std::size_t>(k + db)] = K{};
    }
    r.resize(static_cast<std::size_t>(db));
    return {Poly<K>(std::move(q)), Poly<K>(std::move(r))};
}

namespace detail {

/// Arithmetic in F_p, p = 1 mod 4, with i mapped to a square root of -1.
struct ModP {
    static constexpr std::uint64_t p = 4611686018427387817ULL;
    static constexpr std::uint64_t sqrt_m1 = 4490822397581186023ULL;

    static std::uint64_t mul(std::uint64_t a, std::uint64_t b) { return static_cast<std::uint64_t>((unsigned __int128)a * b % p); }
    static std::uint64_t add(std::uint64_t a, std::uint64_t b) { return (a + b) % p; }
    static std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return (a + p - b) % p; }
    static std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
        std::uint64_t r = 1;
        for (; e; e >>= 1, a = mul(a, a))
            if (e & 1) r = mul(r, a);
        return r;
    }
    static std::uint64_t inv(std::uint64_t a) { return pow(a, p - 2); }

    static std::optional<std::uint64_t> of(const mpq_class& q) {
        const std::uint64_t d = mpz_fdiv_ui(q.get_den_mpz_t(), p);
        if (d == 0) return std::nullopt;
        return mul(mpz_fdiv_ui(q.get_num_mpz_t(), p), inv(d));
    }
    static std::optional<std::uint64_t> of(const GaussRational& x) {
        const auto re = of(x.real()), im = of(x.imag());
        if (!re || !im) return std::nullopt;
        return add(*re, mul(*im, sqrt_m1));
    }
    /// Image of a polynomial; nullopt when a denominator or the leading coefficient vanishes mod p.
    static std::optional<std::vector<std::uint64_t>> of(const QPoly& a) {
        std::vector<std::uint64_t> v;
        v.reserve(a.coeffs().size());
        for (const auto& c : a.coeffs()) {
            auto m = of(c);
            if (!m) return std::nullopt;
            v.push_back(*m);
        }
        if (v.empty() || v.back() == 0) return std::nullopt;
        return v;
    }

    static int gcd_degree(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
        auto trim = [](std::vector<std::uint64_t>& v) {
            while (!v.empty() && v.back() == 0) v.pop_back();
        };
        if (a.size() < b.size()) std::swap(a, b);
        while (!b.empty()) {
            const std::uint64_t li = inv(b.back());
            while (a.size() >= b.size()) {
                const std::uint64_t f = mul(a.back(), li);
                const std::size_t s = a.size() - b.size();
                for (std::size_t k = 0; k < b.size(); ++k) a[s + k] = sub(a[s + k], mul(f, b[k]));
                trim(a);
                if (a.empty()) break;
            }
            std::swap(a, b);
        }
        return static_cast<int>(a.size()) - 1;
    }
};

}  // namespace detail

/// Monic gcd over an exact field (Euclid). A modular image bounds the degree from above first.
inline QPoly gcd(QPoly a, QPoly b) {
    if (a.degree() < b.degree()) std::swap(a, b);
    if (b.is_zero()) return a.monic();
    if (b.degree() == 0) return QPoly(GaussRational(1));
    if (auto ma = detail::ModP::of(a), mb = detail::ModP::of(b); ma && mb) {
        const int d = detail::ModP::gcd_degree(std::move(*ma), std::move(*mb));
        if (d == 0) return QPoly(GaussRational(1));
        if (d == b.degree() && divmod(a, b).second.is_zero()) return b.monic();
    }
    b = b.monic();
    while (b.degree() > 0) {
        auto r = divmod(a, b).second;
        if (r.is_zero()) return b;
        a = std::move(b);
        b = r.monic();
    }
    return QPoly(GaussRational(1));
}

/// Yun's squarefree decomposition: p = lead * prod f_i^i, returned as (f_i, i) with f_i monic nonconstant.
inline std::vector<std::pair<QPoly, int>> squarefree(const QPoly& p) {
    std::vector<std::pair<QPoly, int>> out;
    if (p.degree() < 1) return out;
    const QPoly dp = p.derivative();
    QPoly a = gcd(p, dp);
    QPoly b = divmod(p, a).first;
    QPoly c = divmod(dp, a).first;
    QPoly d = c - b.derivative();
    int i = 1;
    while (b.degree() >= 1) {
        QPoly g = gcd(b, d);
        if (g.degree() >= 1) out.emplace_back(g.monic(), i);
        b = divmod(b, g).first;
        c = divmod(d, g).first;
        d = c - b.derivative();
        ++i;
    }
    return out;
}

struct Root {
    cplx value;
    int mult = 1;
};

namespace detail {

inline std::vector<cplx> companion_roots(const CPoly& p) {
    const int n = p.degree();
    if (n < 1) return {};
    if (n == 1) return {-p.coeff(0) / p.coeff(1)};
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
    const cplx lead = p.lead();
    for (int i = 1; i < n; ++i) c(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) c(i, n - 1) = -p.coeff(static_cast<std::size_t>(i)) / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
    const auto& v = es.eigenvalues();
    return {v.data(), v.data() + v.size()};
}

inline cplx newton_polish(const CPoly& p, cplx r) {
    const CPoly dp = p.derivative();
    for (int it = 0; it < 3; ++it) {
        const cplx f = p.eval(r);
        const cplx df = dp.eval(r);
        if (std::abs(df) == 0.0) break;
        const cplx nr = r - f / df;
        if (std::abs(p.eval(nr)) >= std::abs(f)) break;
        r = nr;
    }
    return r;
}

inline double deriv_scale(const CPoly& p, int j, double r) {
    double acc = 0.0;
    for (int k = j; k <= p.degree(); ++k) {
        double fall = 1.0;
        for (int t = 0; t < j; ++t) fall *= static_cast<double>(k - t);
        acc += std::abs(p.coeff(static_cast<std::size_t>(k))) * fall * std::pow(r, k - j);
    }
    return acc;
}

/// Union-find grouping of points within a relative radius.
inline std::vector<std::vector<std::size_t>> group_points(const std::vector<cplx>& pts, double rel) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double scale = std::max({1.0, std::abs(pts[i]), std::abs(pts[j])});
            if (std::abs(pts[i] - pts[j]) <= rel * scale) parent[find(i)] = find(j);
        }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(slot[r])].push_back(i);
    }
    return groups;
}

inline void sort_roots(std::vector<Root>& roots) {
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
}

}  // namespace detail

/// Numeric roots with multiplicities of a complex polynomial.
///
/// Eigenvalues of the companion matrix are merged when within tol.root_cluster (relative).
/// Wider clusters (up to tol.multiple_root) are merged only when their centroid passes the
/// derivative test |p^(j)(c)| <= tol.deflation * scale for all j below the cluster size.
inline std::vector<Root> roots(const CPoly& p, const Tolerances& tol = default_tolerances()) {
    if (p.is_zero()) throw DbmError("indeterminate roots");
    std::vector<Root> out;
    if (p.degree() < 1) return out;
    const std::vector<cplx> raw = detail::companion_roots(p);

    for (const auto& wide : detail::group_points(raw, tol.multiple_root)) {
        std::vector<cplx> members;
        for (auto k : wide) members.push_back(raw[k]);
        if (members.size() > 1) {
            cplx c{};
            for (auto v : members) c += v;
            c /= static_cast<double>(members.size());
            bool ok = true;
            CPoly d = p;
            for (std::size_t j = 0; j < members.size() && ok; ++j) {
                const double sc = detail::deriv_scale(p, static_cast<int>(j), std::max(1.0, std::abs(c)));
                if (std::abs(d.eval(c)) > tol.deflation * sc) ok = false;
                d = d.derivative();
            }
            if (ok) {
                out.push_back({c, static_cast<int>(members.size())});
                continue;
            }
        }
        for (const auto& tight : detail::group_points(members, tol.root_cluster)) {
            cplx c{};
            for (auto k : tight) c += members[k];
            c /= static_cast<double>(tight.size());
            if (tight.size() == 1) c = detail::newton_polish(p, c);
            out.push_back({c, static_cast<int>(tight.size())});
        }
    }
    detail::sort_roots(out);
    return out;
}

/// Roots of an exact polynomial: squarefree factors first, then numeric simple roots.
inline std::vector<Root> roots(const QPoly& p, const Tolerances& tol = default_tolerances()) {
    if (p.is_zero()) throw DbmError("indeterminate roots");
    std::vector<Root> out;
    for (const auto& [f, m] : squarefree(p)) {
        const CPoly fc = to_cplx(f);
        for (auto r : detail::companion_roots(fc)) out.push_back({detail::newton_polish(fc, r), m});
    }
    (void)tol;
    detail::sort_roots(out);
    return out;
}

/// Exact roots of an exact polynomial when all of them lie in Q(i); empty optional otherwise.
inline std::optional<std::vector<std::pair<GaussRational, int>>> exact_roots(const QPoly& p) {
    std::vector<std::pair<GaussRational, int>> out;
    for (const auto& [f, m] : squarefree(p)) {
        for (auto r : detail::companion_roots(to_cplx(f))) {
            auto q = rationalize(detail::newton_polish(to_cplx(f), r));
            if (!q || !f(*q).is_zero()) return std::nullopt;
            out.emplace_back(*q, m);
        }
    }
    return out;
}

/// Number of distinct real roots of a real exact polynomial (Sturm sequence).
inline int count_real_roots(const QPoly& g) {
    if (g.degree() < 1) return 0;
    std::vector<QPoly> seq{g, g.derivative()};
    while (!seq.back().is_zero()) {
        auto r = divmod(seq[seq.size() - 2], seq.back()).second;
        if (r.is_zero()) break;
        seq.push_back(-r);
    }
    auto changes = [&](bool at_plus) {
        int count = 0;
        int prev = 0;
        for (const auto& s : seq) {
            int sign = sgn(s.lead().real());
            if (!at_plus && (s.degree() % 2 == 1)) sign = -sign;
            if (sign == 0) continue;
            if (prev != 0 && sign != prev) ++count;
            prev = sign;
        }
        return count;
    };
    return changes(false) - changes(true);
}

/// Whether an exact complex polynomial vanishes somewhere on the real line.
inline bool has_real_root(const QPoly& p) {
    if (p.degree() < 1) return false;
    std::vector<GaussRational> re, im;
    for (const auto& c : p.coeffs()) {
        re.emplace_back(c.real());
        im.emplace_back(c.imag());
    }
    QPoly a(re), b(im);
    QPoly g = b.is_zero() ? a : (a.is_zero() ? b : gcd(a, b));
    return count_real_roots(g) > 0;
}

}  // namespace dbm
