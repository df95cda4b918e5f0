#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dbm/localstruct.hpp"

namespace dbm {

enum class FactorMode { plain, with_exp };

inline std::string to_string(FactorMode m) { return m == FactorMode::plain ? "plain" : "with_exp"; }

/// One factor exp(s_k(z) P)(I - (z/z_k) P), or just the projection part in plain mode.
template <CoefficientField K>
struct ProjFactor {
    K zk{};
    Mat<K> P;
    int order = 1;
    bool exp_mode = false;

    std::size_t size() const { return P.rows(); }

    /// s_k(z) = sum_{j=1..order} (1/j) (z/z_k)^j.
    cplx exponent(cplx z) const {
        const cplx w = z / to_cplx(zk);
        cplx acc{}, pw(1.0);
        for (int j = 1; j <= order; ++j) {
            pw *= w;
            acc += pw / static_cast<double>(j);
        }
        return acc;
    }

    CMat eval(cplx z) const {
        const CMat p = to_cplx(P);
        const CMat id = CMat::identity(size());
        CMat lin = id - p * (z / to_cplx(zk));
        if (!exp_mode) return lin;
        return (id + p * (std::exp(exponent(z)) - 1.0)) * lin;
    }

    /// I - (z/z_k) P as a polynomial matrix.
    RatMat<K> linear_part() const {
        const K inv = FieldTraits<K>::from_int(1) / zk;
        return RatMat<K>::from_coefficients({Mat<K>::identity(size()), -(P * inv)});
    }
};

/// Ordered factors B_1, B_2, ...; the product is B_K ... B_1.
template <CoefficientField K>
struct EntireProduct {
    std::size_t n = 0;
    std::vector<ProjFactor<K>> factors;

    bool empty() const { return factors.empty(); }

    CMat eval(cplx z) const {
        CMat acc = CMat::identity(n);
        for (const auto& f : factors) acc = f.eval(z) * acc;
        return acc;
    }

    /// Product of the (I - (z/z_k) P_k) parts; equals the whole product in plain mode.
    RatMat<K> polynomial_part() const {
        RatMat<K> acc = RatMat<K>::identity(n);
        for (const auto& f : factors) acc = f.linear_part() * acc;
        return acc;
    }
};

template <CoefficientField K>
struct StepRecord {
    K pole{};
    std::vector<int> before;  // partial pole multiplicities at the pole before the step
    std::vector<int> after;
    bool law_checked = false;
    bool law_holds = true;
};

template <CoefficientField K>
struct FactoredForm {
    FactorMode mode = FactorMode::plain;
    EntireProduct<K> product;
    RatMat<K> base;                       // the input F
    std::optional<RatMat<K>> rational_g;  // plain mode: P(z) F(z) as a rational matrix
    std::vector<StepRecord<K>> steps;

    CMat eval_g(cplx z) const { return product.eval(z) * base.eval(z); }
};

struct FactorOptions {
    FactorMode mode = FactorMode::plain;
    bool require_regular_at_origin = true;  // the det F(0) != 0 hypothesis
    bool check_multiplicity_law = true;
    int max_steps = 256;
    Tolerances tol = default_tolerances();
};

namespace detail {

inline double arg_0_2pi(cplx z) {
    double a = std::arg(z);
    if (a < 0) a += 2.0 * std::numbers::pi;
    return a;
}

/// Nearest to the origin; ties broken by ascending argument in [0, 2pi).
inline std::optional<Pole> nearest_pole(const PoleList& poles) {
    std::optional<Pole> best;
    for (const auto& p : poles) {
        if (!best) {
            best = p;
            continue;
        }
        const double a = std::abs(p.point), b = std::abs(best->point);
        const double tie = 1e-9 * std::max(1.0, std::max(a, b));
        if (a < b - tie || (std::abs(a - b) <= tie && arg_0_2pi(p.point) < arg_0_2pi(best->point))) best = p;
    }
    return best;
}

/// Converts a numeric pole to the coefficient field; exact mode requires an exact root of some denominator.
template <CoefficientField K>
K snap_pole(cplx z, const std::vector<const RatMat<K>*>& mats) {
    if constexpr (!is_exact_v<K>) {
        (void)mats;
        return z;
    } else {
        auto q = rationalize(z);
        if (q) {
            for (const auto* m : mats)
                for (const auto& e : m->entries())
                    if (!e.is_polynomial() && e.den()(*q).is_zero()) return *q;
        }
        throw NotRepresentableError("pole " + format_point(z) + " is not in Q(i); use float mode");
    }
}

template <CoefficientField K>
void check_origin(const RatMat<K>& F, bool require_regular) {
    for (const auto& p : F.poles())
        if (std::abs(p.point) <= 1e-12) throw PreconditionError("pole at 0; apply a Mobius shift first");
    if (require_regular) {
        const Mat<K> f0 = F.at(K{});
        if (rank(f0) < F.rows()) throw PreconditionError("det F(0) = 0");
    }
}

template <CoefficientField K>
std::vector<int> pole_mults(const RatMat<K>& F, const K& z0, const Tolerances& tol) {
    return local_smith(F, z0, tol).pole_multiplicities();
}

/// Expected partial pole multiplicities after one reduction step: nonzero |k_j + 1|.
inline std::vector<int> shifted_mults(const std::vector<int>& before) {
    std::vector<int> out;
    for (int k : before)
        if (k - 1 > 0) out.push_back(k - 1);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// One reduction step at the pole z0: P0 projects onto the pole vectors, F~ = (I - (z/z0) P0) F.
template <CoefficientField K>
std::pair<ProjFactor<K>, RatMat<K>> step_reduce(const RatMat<K>& F, const K& z0,
                                                const Tolerances& tol = default_tolerances()) {
    if (FieldTraits<K>::is_zero(z0)) throw PreconditionError("pole at 0 cannot be reduced");
    if (pole_order_at(F, z0) == 0) throw PreconditionError("point is not a pole");
    ProjFactor<K> f;
    f.zk = z0;
    f.P = projector(pole_vectors(F, z0, tol));
    f.order = 1;
    return {f, f.linear_part() * F};
}

/// Cofactorization: one product P(z) making every P(z) F_i(z) entire.
template <CoefficientField K>
struct CoFactored {
    EntireProduct<K> product;
    std::vector<RatMat<K>> bases;
    std::vector<RatMat<K>> rational_g;  // plain mode only
    std::vector<StepRecord<K>> steps;
    FactorMode mode = FactorMode::plain;
};

namespace detail {

/// Laurent data of Y(z) F(z) at z0 where Y is the entire product built so far (float, exp mode).
inline LocalExpansion<cplx> product_expansion(const EntireProduct<cplx>& y, const CRatMat& F, cplx z0, int terms) {
    // Taylor coefficients of Y at z0 by sampling on a circle (Y is entire).
    const std::size_t n = F.rows();
    const int samples = 4 * terms + 16;
    const double radius = 0.25 * std::max(1e-3, std::min(1.0, std::abs(z0)));
    std::vector<CMat> yc(static_cast<std::size_t>(terms), CMat(n, n));
    for (int s = 0; s < samples; ++s) {
        const double th = 2.0 * std::numbers::pi * s / samples;
        const cplx w = std::polar(radius, th);
        const CMat v = y.eval(z0 + w);
        for (int k = 0; k < terms; ++k) {
            const cplx f = std::pow(w, -k) / static_cast<double>(samples);
            yc[static_cast<std::size_t>(k)] += v * f;
        }
    }
    LocalExpansion<cplx> fe = local_expansion(F, z0, terms);
    LocalExpansion<cplx> out;
    out.point = z0;
    out.shift = fe.shift;
    out.coeffs.assign(static_cast<std::size_t>(terms), CMat(n, F.cols()));
    for (int k = 0; k < terms; ++k)
        for (int j = 0; j <= k; ++j)
            out.coeffs[static_cast<std::size_t>(k)] += yc[static_cast<std::size_t>(j)] * fe[static_cast<std::size_t>(k - j)];
    return out;
}

/// Effective pole order of a Laurent expansion (leading blocks that vanish numerically are dropped).
inline int effective_pole_order(const LocalExpansion<cplx>& e, double rel) {
    const double s = std::max(e.scale(), 1e-300);
    int p = e.shift;
    std::size_t k = 0;
    while (p > 0 && k < e.size() && e[k].max_abs() <= rel * s) {
        --p;
        ++k;
    }
    return p;
}

inline Mat<cplx> pole_space_from_expansion(const LocalExpansion<cplx>& e, double rel) {
    // Drop vanishing leading blocks so that the expansion starts at the true order.
    LocalExpansion<cplx> t = e;
    const int eff = effective_pole_order(e, rel);
    const std::size_t drop = static_cast<std::size_t>(e.shift - eff);
    t.coeffs.erase(t.coeffs.begin(), t.coeffs.begin() + static_cast<long>(drop));
    t.shift = eff;
    if (eff == 0) return CMat(e.coeffs[0].rows(), 0);
    // E_1 = image of the last block row of T_{p-1} on ker T_{p-2} (+ free last block).
    const std::size_t n = t[0].rows(), m = t[0].cols();
    const int q = eff - 1;
    const std::size_t b = static_cast<std::size_t>(q + 1);
    CMat tq(b * n, b * m);
    for (std::size_t r = 0; r < b; ++r)
        for (std::size_t c = 0; c <= r; ++c) tq.set_block(r * n, c * m, t[r - c]);
    const CMat last = tq.block(static_cast<std::size_t>(q) * n, 0, n, tq.cols());
    CMat dom;
    if (q == 0) {
        dom = CMat::identity(m);
    } else {
        const CMat top = tq.block(0, 0, static_cast<std::size_t>(q) * n, static_cast<std::size_t>(q) * m);
        const CMat ker = nullspace(top, 1e-9, t.scale());
        dom = CMat(tq.cols(), ker.cols() + m);
        dom.set_block(0, 0, ker);
        dom.set_block(static_cast<std::size_t>(q) * m, ker.cols(), CMat::identity(m));
    }
    return column_basis(last * dom, 1e-9, t.scale());
}

}  // namespace detail

/// Simultaneous factorization of several functions (one shared product).
template <CoefficientField K>
CoFactored<K> cofactorize(const std::vector<RatMat<K>>& fs, const FactorOptions& opt = {}) {
    if (fs.empty()) throw PreconditionError("cofactorize needs at least one function");
    const std::size_t n = fs[0].rows();
    for (const auto& f : fs) {
        if (f.rows() != n) throw PreconditionError("functions must share the row dimension");
        detail::check_origin(f, opt.require_regular_at_origin && f.square());
    }
    CoFactored<K> out;
    out.mode = opt.mode;
    out.product.n = n;
    out.bases = fs;

    if (opt.mode == FactorMode::plain) {
        std::vector<RatMat<K>> g = fs;
        for (int step = 0;; ++step) {
            if (step > opt.max_steps) throw InternalInvariantError("factorization did not terminate");
            PoleList all;
            for (const auto& x : g)
                for (const auto& p : x.poles()) all.push_back(p);
            auto next = detail::nearest_pole(all);
            if (!next) break;
            std::vector<const RatMat<K>*> ptrs;
            for (const auto& x : g) ptrs.push_back(&x);
            const K z0 = detail::snap_pole<K>(next->point, ptrs);
            Mat<K> span(n, 0);
            for (const auto& x : g)
                if (pole_order_at(x, z0) > 0) span = hconcat(span, pole_vectors(x, z0, opt.tol));
            ProjFactor<K> f;
            f.zk = z0;
            f.P = projector(detail::orthogonalize(column_basis(span, opt.tol.rank, 1.0)));
            f.order = static_cast<int>(out.product.factors.size()) + 1;
            StepRecord<K> rec;
            rec.pole = z0;
            const bool law = opt.check_multiplicity_law && g.size() == 1 && g[0].square() &&
                             !detail::identically_singular(g[0]);
            if (law) rec.before = detail::pole_mults(g[0], z0, opt.tol);
            const RatMat<K> lin = f.linear_part();
            for (auto& x : g) x = lin * x;
            if (law) {
                rec.after = detail::pole_mults(g[0], z0, opt.tol);
                rec.law_checked = true;
                rec.law_holds = rec.after == detail::shifted_mults(rec.before);
            }
            out.steps.push_back(rec);
            out.product.factors.push_back(f);
        }
        out.rational_g = g;
        return out;
    }

    if constexpr (is_exact_v<K>) {
        throw PreconditionError("with_exp mode requires float coefficients");
    } else {
        PoleList original;
        for (const auto& x : fs)
            for (const auto& p : x.poles()) {
                auto it = std::find_if(original.begin(), original.end(),
                                       [&](const Pole& q) { return detail::same_point(q.point, p.point, 1e-8); });
                if (it == original.end()) original.push_back(p);
                else it->order = std::max(it->order, p.order);
            }
        const double rel = 1e-9;
        for (int step = 0;; ++step) {
            if (step > opt.max_steps) throw InternalInvariantError("factorization did not terminate");
            PoleList live;
            for (const auto& p : original) {
                int eff = 0;
                for (const auto& x : fs) {
                    const int terms = 2 * p.order + 4;
                    eff = std::max(eff, detail::effective_pole_order(detail::product_expansion(out.product, x, p.point, terms), rel));
                }
                if (eff > 0) live.push_back({p.point, eff});
            }
            auto next = detail::nearest_pole(live);
            if (!next) break;
            CMat span(n, 0);
            for (const auto& x : fs) {
                const int terms = 2 * next->order + 4;
                span = hconcat(span, detail::pole_space_from_expansion(
                                         detail::product_expansion(out.product, x, next->point, terms), rel));
            }
            ProjFactor<cplx> f;
            f.zk = next->point;
            f.P = projector(column_basis(span, opt.tol.rank, 1.0));
            f.order = static_cast<int>(out.product.factors.size()) + 1;
            f.exp_mode = true;
            StepRecord<cplx> rec;
            rec.pole = next->point;
            out.steps.push_back(rec);
            out.product.factors.push_back(f);
        }
        return out;
    }
}

/// Single-function factorization G(z) = P(z) F(z) with G entire.
template <CoefficientField K>
FactoredForm<K> factorize(const RatMat<K>& F, const FactorOptions& opt = {}) {
    if (!F.square()) throw PreconditionError("factorize needs a square matrix");
    auto co = cofactorize(std::vector<RatMat<K>>{F}, opt);
    FactoredForm<K> out;
    out.mode = opt.mode;
    out.product = std::move(co.product);
    out.base = F;
    if (!co.rational_g.empty()) out.rational_g = co.rational_g[0];
    out.steps = std::move(co.steps);
    return out;
}

/// Contour estimate of the principal-part coefficients of G at a point (max norm of c_{-1..-order}).
template <class Eval>
double principal_part_norm(Eval&& g, cplx point, int order, double radius = 1e-3, int samples = 128) {
    double worst = 0.0;
    std::vector<CMat> vals;
    std::vector<cplx> ws;
    for (int s = 0; s < samples; ++s) {
        const cplx w = std::polar(radius, 2.0 * std::numbers::pi * s / samples);
        vals.push_back(g(point + w));
        ws.push_back(w);
    }
    for (int j = 1; j <= std::max(order, 1); ++j) {
        CMat acc = vals[0] * cplx(0.0);
        for (int s = 0; s < samples; ++s) acc += vals[static_cast<std::size_t>(s)] * (std::pow(ws[static_cast<std::size_t>(s)], j) / static_cast<double>(samples));
        worst = std::max(worst, spectral_norm(acc));
    }
    return worst;
}

}  // namespace dbm
