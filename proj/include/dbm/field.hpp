#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "dbm/gauss_rational.hpp"

namespace dbm {

using cplx = std::complex<double>;

/// Coefficient mode: exact Gaussian rationals or complex doubles.
enum class Mode { exact, floating };

inline std::string to_string(Mode m) { return m == Mode::exact ? "exact" : "float"; }

template <class K>
struct FieldTraits;

template <>
struct FieldTraits<GaussRational> {
    static constexpr bool exact = true;
    static constexpr Mode mode = Mode::exact;
    static bool is_zero(const GaussRational& x, double /*tol*/ = 0.0) { return x.is_zero(); }
    static GaussRational conj(const GaussRational& x) { return x.conj(); }
    static cplx to_cplx(const GaussRational& x) { return x.to_complex(); }
    static double magnitude(const GaussRational& x) { return std::abs(x.to_complex()); }
    static GaussRational imag_unit() { return GaussRational::i(); }
    static GaussRational from_int(long v) { return GaussRational(v); }
    static GaussRational from_ratio(long p, long q) { return {mpq_class(p, q), mpq_class(0)}; }
};

template <>
struct FieldTraits<cplx> {
    static constexpr bool exact = false;
    static constexpr Mode mode = Mode::floating;
    static bool is_zero(const cplx& x, double tol = 0.0) { return std::abs(x) <= tol; }
    static cplx conj(const cplx& x) { return std::conj(x); }
    static cplx to_cplx(const cplx& x) { return x; }
    static double magnitude(const cplx& x) { return std::abs(x); }
    static cplx imag_unit() { return {0.0, 1.0}; }
    static cplx from_int(long v) { return {static_cast<double>(v), 0.0}; }
    static cplx from_ratio(long p, long q) { return {static_cast<double>(p) / static_cast<double>(q), 0.0}; }
};

template <class K>
inline constexpr bool is_exact_v = FieldTraits<K>::exact;

template <class K>
concept CoefficientField = std::is_same_v<K, GaussRational> || std::is_same_v<K, cplx>;

/// Numeric tolerances shared by every module. Values are relative unless noted.
struct Tolerances {
    double root_cluster = 1e-9;     // merge radius for numerically coincident roots
    double multiple_root = 1e-3;    // search radius for multiplicity-aware clustering
    double deflation = 1e-8;        // float-mode cancellation of a common root
    double rank = 1e-9;             // singular value cutoff relative to sigma_max
    double chain_residual = 1e-8;   // least-squares residual for chain solves
    double psd = 1e-9;              // absolute slack on minimum eigenvalues
    double identity = 1e-8;         // float-mode rational identity (relative)
    double pole_margin = 1e-6;      // grid points closer than this to a pole are skipped
    double residue = 1e-8;          // contour residue norm bound
    double projection = 1e-10;      // idempotence / hermiticity of projections
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

inline cplx to_cplx(const GaussRational& x) { return x.to_complex(); }
inline cplx to_cplx(const cplx& x) { return x; }

/// Best rational approximation with bounded denominator (continued fractions).
inline std::optional<mpq_class> rationalize(double x, long max_den = 1000000, double tol = 1e-9) {
    if (!std::isfinite(x)) return std::nullopt;
    const double scale = std::max(1.0, std::abs(x));
    long sign = x < 0 ? -1 : 1;
    double v = std::abs(x);
    mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double rest = v;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(rest);
        if (a > 1e15) break;
        mpz_class ai(a);
        mpz_class h2 = ai * h1 + h0;
        mpz_class k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        mpq_class approx(h1, k1);
        if (std::abs(approx.get_d() - v) <= tol * scale) {
            approx.canonicalize();
            return sign < 0 ? mpq_class(-approx) : approx;
        }
        const double frac = rest - a;
        if (frac < 1e-15) break;
        rest = 1.0 / frac;
    }
    if (k1 != 0) {
        mpq_class approx(h1, k1);
        approx.canonicalize();
        if (std::abs(approx.get_d() - v) <= tol * scale) return sign < 0 ? mpq_class(-approx) : approx;
    }
    return std::nullopt;
}

inline std::optional<GaussRational> rationalize(cplx x, long max_den = 1000000, double tol = 1e-9) {
    auto re = rationalize(x.real(), max_den, tol);
    auto im = rationalize(x.imag(), max_den, tol);
    if (!re || !im) return std::nullopt;
    return GaussRational(*re, *im);
}

/// Conversion of a numeric value into the field K. Exact fields require a verified snap.
template <class K>
K from_cplx(cplx v);

template <>
inline cplx from_cplx<cplx>(cplx v) {
    return v;
}

template <>
inline GaussRational from_cplx<GaussRational>(cplx v) {
    auto r = rationalize(v);
    if (!r) throw std::domain_error("value is not representable exactly in Q(i)");
    return *r;
}

class DbmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public DbmError {
public:
    using DbmError::DbmError;
};

/// An exact-mode computation needed an irrational quantity; rerun in float mode.
class NotRepresentableError : public DbmError {
public:
    using DbmError::DbmError;
};

class InternalInvariantError : public DbmError {
public:
    using DbmError::DbmError;
};

/// A constant matrix is not invertible (numeric evaluation at a point).
class SingularConstantError : public DbmError {
public:
    using DbmError::DbmError;
};

}  // namespace dbm
