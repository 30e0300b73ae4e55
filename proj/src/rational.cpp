#include "fclkp/rational.hpp"

#include <ostream>

namespace fclkp {

GaussRational GaussRational::of(long num, long den, long inum, long iden) {
    if (den == 0 || iden == 0) throw param_error("zero denominator");
    Rational re(num, den);
    re.canonicalize();
    Rational im(inum, iden);
    im.canonicalize();
    return {re, im};
}

GaussRational& GaussRational::operator/=(const GaussRational& o) {
    if (o.is_zero()) throw param_error("division by zero");
    Rational n2 = o.norm2();
    Rational r = (re_ * o.re_ + im_ * o.im_) / n2;
    Rational i = (im_ * o.re_ - re_ * o.im_) / n2;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
}

GaussRational GaussRational::inverse() const {
    if (is_zero()) throw param_error("inverse of zero");
    Rational n2 = norm2();
    return {re_ / n2, -im_ / n2};
}

GaussRational GaussRational::pow(long e) const {
    if (e == 0) return GaussRational(1);
    GaussRational base = e > 0 ? *this : inverse();
    long n = e > 0 ? e : -e;
    GaussRational acc(1);
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

long GaussRational::to_long() const {
    if (!is_integer() || !re_.get_num().fits_slong_p())
        throw param_error("value is not a small integer: " + str());
    return re_.get_num().get_si();
}

std::string GaussRational::str() const {
    if (sgn(im_) == 0) return re_.get_str();
    if (sgn(re_) == 0) return im_.get_str() + "i";
    return re_.get_str() + (sgn(im_) < 0 ? " - " : " + ") + abs(im_).get_str() + "i";
}

std::ostream& operator<<(std::ostream& os, const GaussRational& v) { return os << v.str(); }

GaussRational gbinomial(const GaussRational& beta, long k) {
    if (k < 0) return GaussRational(0);
    GaussRational acc(1);
    Rational fact(1);
    for (long w = 0; w < k; ++w) {
        acc *= beta - GaussRational(w);
        fact *= (w + 1);
    }
    return acc / GaussRational(fact);
}

} // namespace fclkp
