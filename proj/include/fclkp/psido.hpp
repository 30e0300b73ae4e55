#pragma once

#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fclkp/errors.hpp"
#include "fclkp/fourier.hpp"
#include "fclkp/order_window.hpp"
#include "fclkp/rational.hpp"

namespace fclkp {

/// Watermark values. WM_ENTIRE means "every order is exact; unstored
/// coefficients are exactly zero" and behaves like -infinity.
inline constexpr long WM_ENTIRE = std::numeric_limits<long>::min() / 4;

inline bool wm_finite(long w) { return w > WM_ENTIRE; }
inline long wm_add(long a, long b) { return (wm_finite(a) && wm_finite(b)) ? a + b : WM_ENTIRE; }
inline long wm_max(long a, long b) { return a > b ? a : b; }

/// Truncated formal pseudo-differential symbol sum_k a_k d^k over a
/// coefficient ring (FourierMatrix, or time-polynomial coefficients).
///
/// Coefficients are stored in Wick order: functions to the left of powers of
/// d, with d o f = f d + f'. No factors of i appear at this level; the
/// homogeneous-symbol dictionary lives with the two-branch algebra.
///
/// Every value carries a watermark: all orders >= wm() hold coefficients of
/// the untruncated algebraic result, orders below are unknown and absent.
/// Operations propagate the watermark and refuse to fabricate inexact data.
template <class Ring>
class PsiDO {
public:
    PsiDO() : wm_(WM_ENTIRE) {}
    explicit PsiDO(Ring proto) : proto_(proto.zero_like()), wm_(WM_ENTIRE) {}

    static PsiDO zero(const Ring& proto) { return PsiDO(proto); }
    static PsiDO one(const Ring& proto) { return monomial(proto.one_like(), 0); }
    /// a d^k, exactly known at every order.
    static PsiDO monomial(const Ring& a, long k) {
        PsiDO r(a);
        if (!a.is_zero()) r.c_[k] = a;
        return r;
    }
    /// d^m with identity coefficient.
    static PsiDO delta_pow(const Ring& proto, long m) { return monomial(proto.one_like(), m); }

    const Ring& proto() const { return proto_; }
    const std::map<long, Ring>& coeffs() const { return c_; }
    long wm() const { return wm_; }
    bool entire() const { return wm_ == WM_ENTIRE; }
    bool is_zero() const { return c_.empty(); }

    /// Largest order that can carry a nonzero coefficient: the top stored key,
    /// or wm-1 for an operator with no stored coefficients (all-zero window).
    long ord_max() const {
        if (!c_.empty()) return c_.rbegin()->first;
        return entire() ? WM_ENTIRE : wm_ - 1;
    }
    long ord_min_stored() const { return c_.empty() ? 0 : c_.begin()->first; }

    bool exact_at(long k) const { return k >= wm_; }
    Ring at(long k) const {
        if (!exact_at(k))
            throw watermark_error("order " + std::to_string(k) + " is below the watermark");
        auto it = c_.find(k);
        return it == c_.end() ? proto_.zero_like() : it->second;
    }

    bool compatible(const PsiDO& o) const { return proto_.compatible(o.proto_); }

    /// Discard knowledge below `floor` (never raises exactness).
    PsiDO truncated(long floor) const {
        if (!wm_finite(floor) || floor <= wm_) return *this;
        PsiDO r(proto_);
        r.wm_ = floor;
        for (const auto& [k, a] : c_)
            if (k >= floor) r.c_[k] = a;
        return r;
    }

    PsiDO operator-() const {
        PsiDO r(proto_);
        r.wm_ = wm_;
        for (const auto& [k, a] : c_) r.c_[k] = -a;
        return r;
    }

    friend PsiDO operator+(const PsiDO& a, const PsiDO& b) {
        a.require_compatible(b);
        PsiDO r(a.proto_);
        r.wm_ = wm_max(a.wm_, b.wm_);
        for (const auto& [k, v] : a.c_)
            if (k >= r.wm_) r.acc(k, v);
        for (const auto& [k, v] : b.c_)
            if (k >= r.wm_) r.acc(k, v);
        return r;
    }
    friend PsiDO operator-(const PsiDO& a, const PsiDO& b) { return a + (-b); }

    PsiDO scaled(const GaussRational& s) const {
        PsiDO r(proto_);
        if (s.is_zero()) return r; // exact zero regardless of input knowledge
        r.wm_ = wm_;
        for (const auto& [k, a] : c_) r.acc(k, a.scaled(s));
        return r;
    }

    /// Apply a coefficientwise (linear) map; the watermark is preserved.
    template <class F>
    PsiDO mapped(F f) const {
        PsiDO r(proto_);
        r.wm_ = wm_;
        for (const auto& [k, a] : c_) r.acc(k, f(a));
        return r;
    }

    /// Multiply the order-k coefficient by (-1)^k. Used by the parity twist.
    PsiDO parity_twisted() const {
        PsiDO r(proto_);
        r.wm_ = wm_;
        for (const auto& [k, a] : c_) r.c_[k] = (k % 2 == 0) ? a : -a;
        return r;
    }

    /// Shift by d^m on the right (exactly: orders translate).
    PsiDO shifted(long m) const {
        PsiDO r(proto_);
        r.wm_ = wm_finite(wm_) ? wm_ + m : WM_ENTIRE;
        for (const auto& [k, a] : c_) r.c_[k + m] = a;
        return r;
    }

    friend bool operator==(const PsiDO& a, const PsiDO& b) {
        return a.wm_ == b.wm_ && a.c_ == b.c_;
    }
    friend bool operator!=(const PsiDO& a, const PsiDO& b) { return !(a == b); }

    std::string str() const {
        if (c_.empty()) return entire() ? "0" : "0 (above order " + std::to_string(wm_ - 1) + ")";
        std::ostringstream os;
        bool first = true;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            if (!first) os << " + ";
            first = false;
            os << "(" << it->second.str() << ")d^" << it->first;
        }
        if (!entire()) os << "  [wm " << wm_ << "]";
        return os.str();
    }

    void require_compatible(const PsiDO& o) const {
        if (!compatible(o)) throw dim_error("operator dimension mismatch");
    }

    // Mutating helpers for the algorithms below; values stay normalized.
    void acc(long k, const Ring& v) {
        if (v.is_zero()) return;
        auto it = c_.find(k);
        if (it == c_.end()) {
            c_[k] = v;
        } else {
            it->second += v;
            if (it->second.is_zero()) c_.erase(it);
        }
    }
    void set_wm(long w) { wm_ = w; }

private:
    Ring proto_;
    std::map<long, Ring> c_;
    long wm_;
};

/// Equal coefficients on the common exact window.
template <class Ring>
bool agree(const PsiDO<Ring>& a, const PsiDO<Ring>& b) {
    long floor = wm_max(a.wm(), b.wm());
    return a.truncated(floor).coeffs() == b.truncated(floor).coeffs();
}

namespace detail {

/// Derivative chain cache: d^j/dx^j of a ring element, extended on demand.
template <class Ring>
class DerivChain {
public:
    explicit DerivChain(const Ring& f) { d_.push_back(f); }
    const Ring& operator[](size_t j) {
        while (d_.size() <= j) d_.push_back(d_.back().derivative());
        return d_[j];
    }

private:
    std::vector<Ring> d_;
};

} // namespace detail

/// Composition via the Wick-ordered Leibniz rule
///   d^k o f = sum_{a>=0} C(k,a) f^(a) d^{k-a},
/// with C the generalized binomial coefficient. Exact above the watermark
///   max(wm(A) + ord(B), wm(B) + ord(A));
/// when both operands are entire and the expansion does not terminate, the
/// tail is cut OrderWindow::depth() orders below the leading order.
template <class Ring>
PsiDO<Ring> compose(const PsiDO<Ring>& A, const PsiDO<Ring>& B) {
    A.require_compatible(B);
    PsiDO<Ring> r(A.proto());
    if (A.is_zero() && A.entire()) return r;
    if (B.is_zero() && B.entire()) return r;

    long ordA = A.ord_max(), ordB = B.ord_max();
    long rule = wm_max(wm_add(A.wm(), ordB), wm_add(B.wm(), ordA));
    long floor = rule;
    if (!wm_finite(rule)) {
        // Entire x entire. The pair (k, b_l) contributes a finite sum iff
        // k >= 0 or b_l is constant; otherwise a depth cut is needed.
        bool terminating = true;
        if (!A.coeffs().empty() && A.coeffs().begin()->first < 0) {
            for (const auto& [l, bl] : B.coeffs())
                if (!bl.is_x_constant()) {
                    terminating = false;
                    break;
                }
        }
        floor = terminating ? WM_ENTIRE : wm_add(ordA, ordB) - OrderWindow::depth();
    }
    r.set_wm(floor);

    std::map<long, detail::DerivChain<Ring>> chains;
    for (const auto& [l, bl] : B.coeffs()) chains.emplace(l, detail::DerivChain<Ring>(bl));

    for (const auto& [k, ak] : A.coeffs()) {
        for (auto& [l, chain] : chains) {
            for (long a = 0;; ++a) {
                long ord = k + l - a;
                if (wm_finite(floor) && ord < floor) break;
                if (k >= 0 && a > k) break;
                const Ring& d = chain[static_cast<size_t>(a)];
                if (d.is_zero()) break;
                GaussRational cf = gbinomial(GaussRational(k), a);
                if (!cf.is_zero()) r.acc(ord, (ak * d).scaled(cf));
            }
        }
    }
    return r;
}

template <class Ring>
PsiDO<Ring> bracket(const PsiDO<Ring>& A, const PsiDO<Ring>& B) {
    return compose(A, B) - compose(B, A);
}

/// Differential part: orders >= 0. Entire whenever the input watermark is
/// <= 0, since everything the projection kills is exactly zero by definition.
template <class Ring>
PsiDO<Ring> diff_part(const PsiDO<Ring>& A) {
    PsiDO<Ring> r(A.proto());
    r.set_wm(A.wm() <= 0 ? WM_ENTIRE : A.wm());
    for (const auto& [k, a] : A.coeffs())
        if (k >= 0) r.acc(k, a);
    return r;
}

/// Integral part: orders <= -1. Watermark preserved.
template <class Ring>
PsiDO<Ring> int_part(const PsiDO<Ring>& A) {
    PsiDO<Ring> r(A.proto());
    r.set_wm(A.wm());
    for (const auto& [k, a] : A.coeffs())
        if (k <= -1) r.acc(k, a);
    return r;
}

/// The Semenov-Tyan-Shansky r-matrix: +1 on the differential part, -1 on the
/// integral part.
template <class Ring>
PsiDO<Ring> sts_r(const PsiDO<Ring>& A) {
    return diff_part(A) - int_part(A);
}

/// Polarized bracket [A,B]_0 = 1/2([rA,B] + [A,rB]) = [A_D,B_D] - [A_S,B_S].
template <class Ring>
PsiDO<Ring> bracket_r0(const PsiDO<Ring>& A, const PsiDO<Ring>& B) {
    PsiDO<Ring> s = bracket(sts_r(A), B) + bracket(A, sts_r(B));
    return s.scaled(GaussRational(Rational(1, 2)));
}

/// Residue matrix: the order -1 coefficient. Requires it to be exact.
template <class Ring>
Ring adler_residue(const PsiDO<Ring>& A) {
    if (!A.exact_at(-1)) throw watermark_error("order -1 coefficient is not exact");
    return A.at(-1);
}

/// The Adler trace: mean of tr of the order -1 coefficient.
template <class Ring>
auto adler_trace(const PsiDO<Ring>& A) {
    return adler_residue(A).trace_mean();
}

namespace detail {

/// sum_{j>=1} w(j) R^j for series whose terms leave every finite window:
/// either ord(R) <= -1 (orders strictly descend), or R is nilpotent within
/// `nil_cap` steps (time-graded coefficients). The caller adds the j = 0
/// term. `floor` bounds the computed window when the series is cut; the
/// result watermark records the cut exactly.
template <class Ring, class Weight>
PsiDO<Ring> power_series_tail(const PsiDO<Ring>& R, long floor, long nil_cap, Weight w) {
    PsiDO<Ring> acc(R.proto());
    PsiDO<Ring> term = R;
    const bool descending = R.is_zero() || R.ord_max() <= -1;
    long j = 1;
    while (true) {
        if (term.is_zero()) {
            // Terminated; if the term's window was finite the tail below it
            // is still unknown.
            acc.set_wm(wm_max(acc.wm(), term.wm()));
            break;
        }
        if (descending && wm_finite(floor) && term.ord_max() < floor) {
            // Every remaining term lives strictly below `floor`.
            acc.set_wm(wm_max(acc.wm(), floor));
            break;
        }
        acc = acc + term.scaled(w(j));
        ++j;
        if (!descending && j > nil_cap + 1)
            throw not_invertible_error("series did not terminate within the nilpotency bound");
        term = compose(term, R);
    }
    return acc;
}

} // namespace detail

/// Exact inverse, restricted to the two shapes actually needed:
///  (a) A = c d^m + lower with c a constant invertible matrix,
///  (b) A = 1 + R with R of order <= -1.
/// compose(A, invert(A)) is the identity above the result watermark.
template <class Ring>
PsiDO<Ring> invert(const PsiDO<Ring>& A) {
    if (A.is_zero()) throw not_invertible_error("zero operator");
    long m = A.ord_max();
    Ring lead = A.coeffs().rbegin()->second;

    PsiDO<Ring> pre(A.proto()); // left factor bringing A to 1 + R
    if (m == 0 && lead.is_identity()) {
        pre = PsiDO<Ring>::one(A.proto());
    } else {
        if (!lead.is_x_constant())
            throw not_invertible_error("leading coefficient is not constant");
        pre = PsiDO<Ring>::monomial(lead.const_inverse(), 0).shifted(-m);
    }
    PsiDO<Ring> R = compose(pre, A) - PsiDO<Ring>::one(A.proto());
    if (!R.is_zero() && R.ord_max() > -1)
        throw not_invertible_error("operator is not of the form c d^m + lower");

    long floor = R.entire() ? -OrderWindow::depth() : R.wm();
    PsiDO<Ring> inv =
        PsiDO<Ring>::one(A.proto()) +
        detail::power_series_tail(R, floor, 0, [](long j) { return GaussRational(j % 2 ? -1 : 1); });
    return compose(inv, pre);
}

/// Inverse of A = 1 + X with X nilpotent within `nil_cap` compositions
/// (time-graded operators of positive valuation). Exact.
template <class Ring>
PsiDO<Ring> invert_unipotent(const PsiDO<Ring>& A, long nil_cap) {
    PsiDO<Ring> one = PsiDO<Ring>::one(A.proto());
    PsiDO<Ring> X = A - one;
    long floor = X.entire() ? -OrderWindow::depth() : X.wm();
    return one + detail::power_series_tail(X, floor, nil_cap,
                                           [](long j) { return GaussRational(j % 2 ? -1 : 1); });
}

namespace detail {
struct FactorialWeight {
    Rational fact = 1;
    GaussRational operator()(long j) {
        fact *= j;
        return GaussRational(Rational(1) / fact);
    }
};
} // namespace detail

/// exp of an integral operator (order <= -1). Finite sum per retained order.
template <class Ring>
PsiDO<Ring> exp_io(const PsiDO<Ring>& A) {
    if (!A.is_zero() && A.ord_max() > -1) throw order_error("exp_io requires order <= -1");
    long floor = A.entire() ? -OrderWindow::depth() : A.wm();
    return PsiDO<Ring>::one(A.proto()) +
           detail::power_series_tail(A, floor, 0, detail::FactorialWeight{});
}

/// exp of a nilpotent time-graded operator. Exact, finite by nilpotency.
template <class Ring>
PsiDO<Ring> exp_nilpotent(const PsiDO<Ring>& A, long nil_cap) {
    long floor = A.entire() ? -OrderWindow::depth() : A.wm();
    return PsiDO<Ring>::one(A.proto()) +
           detail::power_series_tail(A, floor, nil_cap, detail::FactorialWeight{});
}

/// k-th power by repeated composition, k >= 0.
template <class Ring>
PsiDO<Ring> power_int(const PsiDO<Ring>& A, long k) {
    if (k < 0) throw param_error("negative power");
    PsiDO<Ring> r = PsiDO<Ring>::one(A.proto());
    for (long j = 0; j < k; ++j) r = compose(r, A);
    return r;
}

} // namespace fclkp
