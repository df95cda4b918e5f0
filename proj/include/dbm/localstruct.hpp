#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "dbm/series.hpp"

namespace dbm {

enum class ChainKind { pole, zero };

inline std::string to_string(ChainKind k) { return k == ChainKind::pole ? "pole" : "zero"; }

template <CoefficientField K>
struct Chain {
    ChainKind kind = ChainKind::pole;
    std::vector<Mat<K>> vectors;  // column vectors; empty means "not a pole/eigen vector"
    std::string diagnostic;

    int length() const { return static_cast<int>(vectors.size()); }
};

/// Local Smith-McMillan data of F at a point.
template <CoefficientField K>
struct LocalData {
    K point{};
    std::vector<int> partial_mults;  // ascending r_1 <= ... <= r_n
    Mat<K> pole_basis;               // columns; orthonormal in float mode, orthogonal in exact mode
    Mat<K> zero_basis;
    int det_order = 0;               // zero order of det F at the point minus its pole order
    bool det_order_consistent = true;

    std::vector<int> pole_multiplicities() const {
        std::vector<int> out;
        for (int r : partial_mults)
            if (r < 0) out.push_back(-r);
        std::sort(out.begin(), out.end());
        return out;
    }
    std::vector<int> zero_multiplicities() const {
        std::vector<int> out;
        for (int r : partial_mults)
            if (r > 0) out.push_back(r);
        return out;
    }
};

namespace detail {

template <CoefficientField K>
Mat<K> orthogonalize(const Mat<K>& b) {
    if constexpr (!is_exact_v<K>) {
        return column_basis(b);
    } else {
        std::vector<Mat<K>> cols;
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Mat<K> v = b.col(j);
            for (const auto& u : cols) {
                const K num = (u.adjoint() * v)(0, 0);
                const K den = (u.adjoint() * u)(0, 0);
                v -= u * (num / den);
            }
            if (!v.is_zero()) cols.push_back(v);
        }
        Mat<K> out(b.rows(), 0);
        for (const auto& c : cols) out = hconcat(out, c);
        return out;
    }
}

/// Columns of E that extend span(B), chosen so that [B, new] is a basis of span(B) + span(E).
template <CoefficientField K>
Mat<K> extend_basis(const Mat<K>& b, const Mat<K>& e, double tol) {
    if (e.cols() == 0) return Mat<K>(e.rows(), 0);
    if constexpr (is_exact_v<K>) {
        (void)tol;
        const auto ech = rref(hconcat(b, e));
        Mat<K> out(e.rows(), 0);
        for (auto p : ech.pivots)
            if (p >= b.cols()) out = hconcat(out, e.col(p - b.cols()));
        return out;
    } else {
        const std::size_t target = rank(hconcat(b, e), tol, 1.0) - (b.cols() ? rank(b, tol, 1.0) : 0);
        CMat x = e;
        if (b.cols() > 0) {
            const CMat q = column_basis(b, tol);
            x = e - q * (q.adjoint() * e);
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(x), Eigen::ComputeFullU);
        return from_eigen(svd.matrixU().leftCols(static_cast<Eigen::Index>(target)));
    }
}

}  // namespace detail

/// Block-Toeplitz analysis of H(t) = t^p F(z0 + t).
template <CoefficientField K>
class LocalAnalyzer {
public:
    LocalAnalyzer(const RatMat<K>& F, const K& z0, const Tolerances& tol = default_tolerances())
        : f_(F), z0_(z0), tol_(tol) {
        if (!F.square()) throw PreconditionError("local structure needs a square matrix");
        n_ = F.rows();
        const int p = pole_order_at(F, z0);
        ensure(2 * p + 2 + 2 * static_cast<int>(n_));
    }

    int pole_order() const { return exp_.shift; }
    std::size_t size() const { return n_; }
    const LocalExpansion<K>& expansion() const { return exp_; }

    /// T_k: (k+1) blocks of H_0..H_k, lower triangular.
    Mat<K> toeplitz(int k) {
        ensure(k + 1);
        const std::size_t b = static_cast<std::size_t>(k + 1);
        Mat<K> t(b * n_, b * n_);
        for (std::size_t r = 0; r < b; ++r)
            for (std::size_t c = 0; c <= r; ++c) t.set_block(r * n_, c * n_, exp_[r - c]);
        return t;
    }

    std::size_t kernel_dim(int k) {
        if (k < 0) return 0;
        const Mat<K> t = toeplitz(k);
        return t.rows() - rank(t, tol_.rank, exp_.scale());
    }

    /// Smith exponents s_j >= 0 of H, ascending.
    std::vector<int> smith_exponents(int guard = 64) {
        std::vector<std::size_t> ge;  // ge[k] = #{s_j >= k + 1}
        std::size_t prev = 0;
        for (int k = 0;; ++k) {
            if (k > guard) throw PreconditionError("identically singular");
            const std::size_t d = kernel_dim(k);
            const std::size_t delta = d - prev;
            prev = d;
            if (delta == 0) break;
            ge.push_back(delta);
        }
        std::vector<int> s;
        std::size_t above = n_;
        for (std::size_t k = 0; k <= ge.size(); ++k) {
            const std::size_t next = k < ge.size() ? ge[k] : 0;
            for (std::size_t c = 0; c < above - next; ++c) s.push_back(static_cast<int>(k));
            above = next;
        }
        std::sort(s.begin(), s.end());
        return s;
    }

    /// Leading vectors of pole chains of length >= l (span), 1 <= l <= p.
    Mat<K> pole_level_space(int l) {
        const int p = pole_order();
        if (l < 1 || l > p) return Mat<K>(n_, 0);
        const int q = p - l;
        return detail::orthogonalize(column_basis(pole_level_generator(q), tol_.rank, exp_.scale()));
    }

    /// Leading vectors of zero chains of length >= m (span), m >= 1.
    Mat<K> zero_level_space(int m) {
        const int p = pole_order();
        const Mat<K> ker = nullspace(toeplitz(p + m - 1), tol_.rank, exp_.scale());
        return detail::orthogonalize(column_basis(ker.block(0, 0, n_, ker.cols()), tol_.rank, 1.0));
    }

    Chain<K> pole_chain(const Mat<K>& v) {
        Chain<K> ch;
        ch.kind = ChainKind::pole;
        if (v.is_zero()) throw PreconditionError("chain start vector must be nonzero");
        const int p = pole_order();
        int best = 0;
        for (int l = 1; l <= p; ++l) {
            if (!in_span(pole_level_space(l), v)) break;
            best = l;
        }
        if (best == 0) {
            ch.diagnostic = p == 0 ? "point is not a pole" : "vector is not a pole vector";
            return ch;
        }
        const int q = p - best;
        // Solve T_{q-1} w = 0 and (last block row of T_q) w = v for w_0..w_q.
        const Mat<K> tq = toeplitz(q);
        Mat<K> sys = tq;
        Mat<K> rhs((static_cast<std::size_t>(q) + 1) * n_, 1);
        rhs.set_block(static_cast<std::size_t>(q) * n_, 0, v);
        auto w = solve_consistent(sys, rhs, tol_.chain_residual);
        if (!w) throw InternalInvariantError("pole chain system inconsistent");
        ensure(p);
        for (int j = 0; j < best; ++j) {
            Mat<K> acc(n_, 1);
            for (int i = 0; i <= q; ++i)
                acc += exp_[static_cast<std::size_t>(q + j - i)] * w->block(static_cast<std::size_t>(i) * n_, 0, n_, 1);
            ch.vectors.push_back(acc);
        }
        return ch;
    }

    Chain<K> zero_chain(const Mat<K>& u) {
        Chain<K> ch;
        ch.kind = ChainKind::zero;
        if (u.is_zero()) throw PreconditionError("chain start vector must be nonzero");
        int best = 0;
        const int limit = 64;
        for (int m = 1; m <= limit; ++m) {
            if (!in_span(zero_level_space(m), u)) break;
            best = m;
        }
        if (best == 0) {
            ch.diagnostic = "vector is not an eigenvector";
            return ch;
        }
        const int k = pole_order() + best - 1;
        const Mat<K> t = toeplitz(k);
        const std::size_t rows = t.rows();
        Mat<K> sys = vconcat(t, Mat<K>::identity(rows).block(0, 0, n_, rows));
        Mat<K> rhs(rows + n_, 1);
        rhs.set_block(rows, 0, u);
        auto x = solve_consistent(sys, rhs, tol_.chain_residual);
        if (!x) throw InternalInvariantError("zero chain system inconsistent");
        for (int j = 0; j < best; ++j) ch.vectors.push_back(x->block(static_cast<std::size_t>(j) * n_, 0, n_, 1));
        return ch;
    }

    /// Pole chains from nested bases of the level spaces; lengths realize the partial pole multiplicities.
    std::vector<Chain<K>> canonical_pole_chains() {
        std::vector<Chain<K>> out;
        Mat<K> basis(n_, 0);
        for (int l = pole_order(); l >= 1; --l) {
            const Mat<K> fresh = detail::extend_basis(basis, pole_level_space(l), tol_.rank);
            for (std::size_t c = 0; c < fresh.cols(); ++c) out.push_back(pole_chain(fresh.col(c)));
            basis = hconcat(basis, fresh);
        }
        return out;
    }

private:
    void ensure(int terms) {
        if (static_cast<int>(exp_.size()) >= terms) return;
        exp_ = local_expansion(f_, z0_, std::max(terms, 2 * static_cast<int>(exp_.size())));
    }

    Mat<K> pole_level_generator(int q) {
        const Mat<K> tq = toeplitz(q);
        const Mat<K> last = tq.block(static_cast<std::size_t>(q) * n_, 0, n_, tq.cols());
        Mat<K> dom;
        if (q == 0) {
            dom = Mat<K>::identity(n_);
        } else {
            const Mat<K> ker = nullspace(toeplitz(q - 1), tol_.rank, exp_.scale());
            dom = Mat<K>(tq.cols(), ker.cols() + n_);
            dom.set_block(0, 0, ker);
            dom.set_block(static_cast<std::size_t>(q) * n_, ker.cols(), Mat<K>::identity(n_));
        }
        return last * dom;
    }

    bool in_span(const Mat<K>& basis, const Mat<K>& v) const {
        if (basis.cols() == 0) return false;
        return solve_consistent(basis, v, tol_.chain_residual).has_value();
    }

    RatMat<K> f_;
    K z0_;
    Tolerances tol_;
    std::size_t n_ = 0;
    LocalExpansion<K> exp_;
};

namespace detail {

template <CoefficientField K>
bool identically_singular(const RatMat<K>& F) {
    if constexpr (is_exact_v<K>) {
        return det(F).is_zero();
    } else {
        // Generic sample points; a regular rational matrix is singular at finitely many points.
        for (cplx z : {cplx(0.3141, 0.2718), cplx(-1.414, 0.577), cplx(0.866, -1.732)}) {
            try {
                if (rank(F.eval(z)) == F.rows()) return false;
            } catch (const PoleEvaluationError&) {
            }
        }
        return true;
    }
}

}  // namespace detail

template <CoefficientField K>
LocalData<K> local_smith(const RatMat<K>& F, const K& z0, const Tolerances& tol = default_tolerances()) {
    if (!F.square()) throw PreconditionError("local_smith needs a square matrix");
    if (detail::identically_singular(F)) throw PreconditionError("identically singular");
    LocalAnalyzer<K> an(F, z0, tol);
    LocalData<K> d;
    d.point = z0;
    const int p = an.pole_order();
    for (int s : an.smith_exponents()) d.partial_mults.push_back(s - p);
    d.pole_basis = an.pole_level_space(1);
    d.zero_basis = an.zero_level_space(1);
    int sum = 0;
    for (int r : d.partial_mults) sum += r;
    d.det_order = order_at(det(F), z0);
    d.det_order_consistent = sum == d.det_order;
    if constexpr (is_exact_v<K>) {
        if (!d.det_order_consistent) throw InternalInvariantError("partial multiplicities do not sum to the order of det F");
    }
    return d;
}

template <CoefficientField K>
Mat<K> pole_vectors(const RatMat<K>& F, const K& z0, const Tolerances& tol = default_tolerances()) {
    LocalAnalyzer<K> an(F, z0, tol);
    return an.pole_level_space(1);
}

template <CoefficientField K>
Mat<K> eigenvectors(const RatMat<K>& F, const K& z0, const Tolerances& tol = default_tolerances()) {
    LocalAnalyzer<K> an(F, z0, tol);
    return an.zero_level_space(1);
}

template <CoefficientField K>
Chain<K> max_chain(const RatMat<K>& F, const K& z0, const Mat<K>& v, ChainKind kind,
                   const Tolerances& tol = default_tolerances()) {
    LocalAnalyzer<K> an(F, z0, tol);
    return kind == ChainKind::pole ? an.pole_chain(v) : an.zero_chain(v);
}

}  // namespace dbm
