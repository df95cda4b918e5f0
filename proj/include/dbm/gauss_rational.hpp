#pragma once

#include <complex>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace dbm {

/// Exact element of Q(i): re + i*im with arbitrary-precision rational parts.
class GaussRational {
public:
    GaussRational() = default;
    GaussRational(long re) : re_(re), im_(0) {}  // NOLINT(google-explicit-constructor)
    GaussRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static GaussRational i() { return {mpq_class(0), mpq_class(1)}; }

    /// Parses "p/q" or an integer literal.
    static mpq_class parse_rational(std::string_view text) {
        mpq_class q;
        if (text.empty() || q.set_str(std::string(text), 10) != 0)
            throw std::invalid_argument("malformed rational \"" + std::string(text) + "\"");
        if (text.find('/') != std::string_view::npos && q.get_den() == 0)
            throw std::invalid_argument("zero denominator in \"" + std::string(text) + "\"");
        q.canonicalize();
        return q;
    }

    static std::string rational_string(const mpq_class& q) { return q.get_str(10); }

    const mpq_class& real() const noexcept { return re_; }
    const mpq_class& imag() const noexcept { return im_; }

    bool is_zero() const noexcept { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const noexcept { return sgn(im_) == 0; }

    GaussRational conj() const { return {re_, -im_}; }
    mpq_class norm() const { return re_ * re_ + im_ * im_; }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    GaussRational operator-() const { return {-re_, -im_}; }

    GaussRational& operator+=(const GaussRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussRational& operator-=(const GaussRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussRational& operator*=(const GaussRational& o) {
        if (o.is_real()) {
            re_ *= o.re_;
            im_ *= o.re_;
            return *this;
        }
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class m = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }
    GaussRational& operator/=(const GaussRational& o) {
        if (o.is_zero()) throw std::domain_error("division by zero in Q(i)");
        if (o.is_real()) {
            re_ /= o.re_;
            im_ /= o.re_;
            return *this;
        }
        const mpq_class n = o.norm();
        mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
        mpq_class m = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }

    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }

    friend bool operator==(const GaussRational& a, const GaussRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const GaussRational& g) {
        if (g.is_real()) return os << g.re_;
        if (sgn(g.re_) == 0) return os << g.im_ << "i";
        return os << "(" << g.re_ << (sgn(g.im_) < 0 ? "" : "+") << g.im_ << "i)";
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

}  // namespace dbm
