#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>

#include "fclkp/errors.hpp"

namespace fclkp {

using Rational = mpq_class;

/// Gaussian rational re + im*i. The exact base field of every coefficient
/// in the library; all operations stay in Q(i), nothing is ever rounded.
class GaussRational {
public:
    GaussRational() : re_(0), im_(0) {}
    GaussRational(long v) : re_(v), im_(0) {} // NOLINT: implicit by design
    GaussRational(Rational re) : re_(std::move(re)), im_(0) {}
    GaussRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussRational i() { return {Rational(0), Rational(1)}; }
    static GaussRational of(long num, long den, long inum = 0, long iden = 1);

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    GaussRational conj() const { return {re_, -im_}; }
    Rational norm2() const { return re_ * re_ + im_ * im_; }

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
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    GaussRational& operator/=(const GaussRational& o);

    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }

    friend bool operator==(const GaussRational& a, const GaussRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

    // Total order for use as a map key; not a field order.
    friend bool operator<(const GaussRational& a, const GaussRational& b) {
        int c = cmp(a.re_, b.re_);
        if (c != 0) return c < 0;
        return cmp(a.im_, b.im_) < 0;
    }

    GaussRational inverse() const;
    /// Integer power, negative exponents allowed for nonzero values.
    GaussRational pow(long e) const;

    bool is_integer() const { return sgn(im_) == 0 && re_.get_den() == 1; }
    long to_long() const; // requires is_integer and fits

    std::string str() const;

private:
    Rational re_, im_;
};

std::ostream& operator<<(std::ostream& os, const GaussRational& v);

/// Generalized binomial coefficient C(beta, k) = beta (beta-1) ... (beta-k+1) / k!.
/// For integer beta >= 0 this is the usual binomial (zero once k > beta).
GaussRational gbinomial(const GaussRational& beta, long k);

} // namespace fclkp
