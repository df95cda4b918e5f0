#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dbm/field.hpp"

namespace dbm {

/// Small dense matrix over K, row-major. Used for constant matrices and series coefficients.
template <CoefficientField K>
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, K{}) {}
    Mat(std::initializer_list<std::initializer_list<K>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw std::invalid_argument("ragged matrix literal");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = FieldTraits<K>::from_int(1);
        return m;
    }
    static Mat zero(std::size_t r, std::size_t c) { return Mat(r, c); }
    static Mat column(const std::vector<K>& v) {
        Mat m(v.size(), 1);
        for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    K& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const K& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Mat transpose() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    Mat adjoint() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = FieldTraits<K>::conj((*this)(i, j));
        return t;
    }

    Mat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        Mat b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }
    void set_block(std::size_t r0, std::size_t c0, const Mat& b) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }
    Mat col(std::size_t j) const { return block(0, j, rows_, 1); }

    Mat& operator+=(const Mat& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Mat& operator*=(const K& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }
    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator-(Mat a) {
        for (auto& x : a.data_) x = -x;
        return a;
    }
    friend Mat operator*(Mat a, const K& s) { return a *= s; }
    friend Mat operator*(const K& s, Mat a) { return a *= s; }
    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("dimension mismatch in matrix product");
        Mat c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const K& aik = a(i, k);
                if constexpr (is_exact_v<K>) {
                    if (aik.is_zero()) continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }
    friend bool operator==(const Mat& a, const Mat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    /// Largest entry magnitude.
    double max_abs() const {
        double m = 0.0;
        for (const auto& x : data_) m = std::max(m, FieldTraits<K>::magnitude(x));
        return m;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const K& x) { return FieldTraits<K>::is_zero(x); });
    }

    const std::vector<K>& data() const noexcept { return data_; }

    friend std::ostream& operator<<(std::ostream& os, const Mat& m) {
        os << "[";
        for (std::size_t i = 0; i < m.rows_; ++i) {
            os << (i ? "; " : "");
            for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? ", " : "") << m(i, j);
        }
        return os << "]";
    }

private:
    void check_same(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("dimension mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<K> data_;
};

using CMat = Mat<cplx>;

template <CoefficientField K>
CMat to_cplx(const Mat<K>& m) {
    CMat c(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = to_cplx(m(i, j));
    return c;
}

template <CoefficientField K>
Mat<K> convert_mat(const CMat& m) {
    Mat<K> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = from_cplx<K>(m(i, j));
    return out;
}

inline Eigen::MatrixXcd to_eigen(const CMat& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

inline CMat from_eigen(const Eigen::MatrixXcd& e) {
    CMat m(e.rows(), e.cols());
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

template <CoefficientField K>
Mat<K> hconcat(const Mat<K>& a, const Mat<K>& b) {
    if (a.cols() == 0) return b;
    if (b.cols() == 0) return a;
    if (a.rows() != b.rows()) throw std::invalid_argument("hconcat row mismatch");
    Mat<K> m(a.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(0, a.cols(), b);
    return m;
}

template <CoefficientField K>
Mat<K> vconcat(const Mat<K>& a, const Mat<K>& b) {
    if (a.rows() == 0) return b;
    if (b.rows() == 0) return a;
    if (a.cols() != b.cols()) throw std::invalid_argument("vconcat column mismatch");
    Mat<K> m(a.rows() + b.rows(), a.cols());
    m.set_block(0, 0, a);
    m.set_block(a.rows(), 0, b);
    return m;
}

// ---------------------------------------------------------------------------
// Numeric spectral helpers (complex double).

inline std::vector<double> singular_values(const CMat& m) {
    if (m.empty()) return {};
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

inline double spectral_norm(const CMat& m) {
    auto s = singular_values(m);
    return s.empty() ? 0.0 : s.front();
}

inline std::vector<double> hermitian_eigenvalues(const CMat& m) {
    Eigen::MatrixXcd e = to_eigen(m);
    e = (e + e.adjoint()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(e, Eigen::EigenvaluesOnly);
    const auto& v = es.eigenvalues();
    return {v.data(), v.data() + v.size()};
}

inline double min_hermitian_eigenvalue(const CMat& m) {
    auto ev = hermitian_eigenvalues(m);
    return ev.empty() ? 0.0 : ev.front();
}

inline std::vector<cplx> eigenvalues(const CMat& m) {
    if (m.empty()) return {};
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), false);
    const auto& v = es.eigenvalues();
    return {v.data(), v.data() + v.size()};
}

inline double hermitian_defect(const CMat& m) { return (m - m.adjoint()).max_abs(); }

// ---------------------------------------------------------------------------
// Field-generic elimination. Exact fields use exact row reduction; complex doubles use SVD.

template <CoefficientField K>
struct RowEchelon {
    Mat<K> reduced;
    std::vector<std::size_t> pivots;
};

/// Reduced row echelon form over an exact field.
inline RowEchelon<GaussRational> rref(Mat<GaussRational> a) {
    RowEchelon<GaussRational> out;
    std::size_t row = 0;
    for (std::size_t c = 0; c < a.cols() && row < a.rows(); ++c) {
        std::size_t p = row;
        while (p < a.rows() && a(p, c).is_zero()) ++p;
        if (p == a.rows()) continue;
        if (p != row)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(row, j));
        const GaussRational inv = GaussRational(1) / a(row, c);
        for (std::size_t j = c; j < a.cols(); ++j) a(row, j) *= inv;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == row || a(i, c).is_zero()) continue;
            const GaussRational f = a(i, c);
            for (std::size_t j = c; j < a.cols(); ++j) a(i, j) -= f * a(row, j);
        }
        out.pivots.push_back(c);
        ++row;
    }
    out.reduced = std::move(a);
    return out;
}

/// Numerical rank cutoff: sigma > tol * max(sigma_max, abs_floor).
inline std::size_t numeric_rank(const std::vector<double>& sv, double tol, double abs_floor) {
    if (sv.empty()) return 0;
    const double cut = tol * std::max(sv.front(), abs_floor);
    std::size_t r = 0;
    for (double s : sv)
        if (s > cut) ++r;
    return r;
}

template <CoefficientField K>
std::size_t rank(const Mat<K>& a, double tol = 1e-9, double abs_floor = 0.0) {
    if (a.empty()) return 0;
    if constexpr (is_exact_v<K>) {
        return rref(a).pivots.size();
    } else {
        return numeric_rank(singular_values(a), tol, abs_floor);
    }
}

/// Basis of the right null space as matrix columns.
template <CoefficientField K>
Mat<K> nullspace(const Mat<K>& a, double tol = 1e-9, double abs_floor = 0.0) {
    const std::size_t n = a.cols();
    if (a.rows() == 0) return Mat<K>::identity(n);
    if constexpr (is_exact_v<K>) {
        auto e = rref(a);
        std::vector<bool> is_pivot(n, false);
        for (auto p : e.pivots) is_pivot[p] = true;
        std::vector<std::size_t> free;
        for (std::size_t j = 0; j < n; ++j)
            if (!is_pivot[j]) free.push_back(j);
        Mat<K> basis(n, free.size());
        for (std::size_t f = 0; f < free.size(); ++f) {
            basis(free[f], f) = GaussRational(1);
            for (std::size_t r = 0; r < e.pivots.size(); ++r) basis(e.pivots[r], f) = -e.reduced(r, free[f]);
        }
        return basis;
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a), Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        std::vector<double> sv(s.data(), s.data() + s.size());
        const std::size_t r = numeric_rank(sv, tol, abs_floor);
        const Eigen::MatrixXcd v = svd.matrixV();
        return from_eigen(v.rightCols(static_cast<Eigen::Index>(n - r)));
    }
}

/// Basis of the column space. Exact: pivot columns; float: orthonormal left singular vectors.
template <CoefficientField K>
Mat<K> column_basis(const Mat<K>& a, double tol = 1e-9, double abs_floor = 0.0) {
    if (a.cols() == 0) return Mat<K>(a.rows(), 0);
    if constexpr (is_exact_v<K>) {
        auto e = rref(a);
        Mat<K> basis(a.rows(), e.pivots.size());
        for (std::size_t k = 0; k < e.pivots.size(); ++k) basis.set_block(0, k, a.col(e.pivots[k]));
        return basis;
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a), Eigen::ComputeFullU);
        const auto& s = svd.singularValues();
        std::vector<double> sv(s.data(), s.data() + s.size());
        const std::size_t r = numeric_rank(sv, tol, abs_floor);
        const Eigen::MatrixXcd u = svd.matrixU();
        return from_eigen(u.leftCols(static_cast<Eigen::Index>(r)));
    }
}

/// Solves A x = b when consistent; nullopt otherwise (float: relative residual check).
template <CoefficientField K>
std::optional<Mat<K>> solve_consistent(const Mat<K>& a, const Mat<K>& b, double tol = 1e-8) {
    if (a.rows() != b.rows()) throw std::invalid_argument("solve: row mismatch");
    if constexpr (is_exact_v<K>) {
        auto e = rref(hconcat(a, b));
        for (auto p : e.pivots)
            if (p >= a.cols()) return std::nullopt;
        Mat<K> x(a.cols(), b.cols());
        for (std::size_t r = 0; r < e.pivots.size(); ++r)
            for (std::size_t j = 0; j < b.cols(); ++j) x(e.pivots[r], j) = e.reduced(r, a.cols() + j);
        return x;
    } else {
        if (a.cols() == 0) {
            if (b.max_abs() <= tol) return Mat<K>(0, b.cols());
            return std::nullopt;
        }
        const Eigen::MatrixXcd ea = to_eigen(a);
        const Eigen::MatrixXcd eb = to_eigen(b);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(ea);
        cod.setThreshold(1e-12);
        const Eigen::MatrixXcd x = cod.solve(eb);
        const double res = (ea * x - eb).norm();
        const double scale = std::max({ea.norm() * x.norm(), eb.norm(), 1e-300});
        if (res > tol * scale) return std::nullopt;
        return from_eigen(x);
    }
}

template <CoefficientField K>
Mat<K> inverse(const Mat<K>& a) {
    if (!a.square()) throw std::invalid_argument("inverse of non-square matrix");
    const std::size_t n = a.rows();
    if constexpr (is_exact_v<K>) {
        auto e = rref(hconcat(a, Mat<K>::identity(n)));
        if (e.pivots.size() < n || e.pivots[n - 1] != n - 1) throw SingularConstantError("singular constant matrix");
        return e.reduced.block(0, n, n, n);
    } else {
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(to_eigen(a));
        if (!lu.isInvertible()) throw SingularConstantError("singular constant matrix");
        return from_eigen(lu.inverse());
    }
}

template <CoefficientField K>
K determinant(const Mat<K>& a) {
    if (!a.square()) throw std::invalid_argument("determinant of non-square matrix");
    if constexpr (is_exact_v<K>) {
        Mat<K> m = a;
        const std::size_t n = m.rows();
        K det(1);
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t p = c;
            while (p < n && m(p, c).is_zero()) ++p;
            if (p == n) return K(0);
            if (p != c) {
                for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
                det = -det;
            }
            det *= m(c, c);
            const K inv = K(1) / m(c, c);
            for (std::size_t i = c + 1; i < n; ++i) {
                if (m(i, c).is_zero()) continue;
                const K f = m(i, c) * inv;
                for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
            }
        }
        return det;
    } else {
        if (a.rows() == 0) return cplx(1.0);
        return to_eigen(a).determinant();
    }
}

/// Orthogonal projection onto the column span of V (columns need not be orthonormal).
template <CoefficientField K>
Mat<K> projector(const Mat<K>& v) {
    if (v.cols() == 0) return Mat<K>::zero(v.rows(), v.rows());
    const Mat<K> vh = v.adjoint();
    return v * inverse(vh * v) * vh;
}

/// Orthonormal basis of the column span (numeric).
inline CMat orthonormal_basis(const CMat& v, double tol = 1e-9) { return column_basis(v, tol); }

}  // namespace dbm
