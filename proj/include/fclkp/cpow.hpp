#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "fclkp/psido.hpp"

namespace fclkp {

/// Formal operator of (Gaussian-rational) grade beta:
///   sum_{j >= 0} tail[j] d^{beta - j}.
/// Slots j <= depth() are exact, deeper slots are unknown and absent. The
/// anchor `grade` is declared, not canonicalized: tail[0] may be zero.
/// Grades add under composition; the composition rule is the same
/// Wick-ordered Leibniz expansion with generalized binomials C(beta - j, a).
template <class Ring>
class GradedOp {
public:
    GradedOp() : depth_(0) {}
    GradedOp(Ring proto, GaussRational grade, std::vector<Ring> tail, long depth)
        : proto_(proto.zero_like()), grade_(std::move(grade)), tail_(std::move(tail)),
          depth_(depth) {
        if (depth_ < 0) throw param_error("negative depth");
        trim();
    }

    static GradedOp zero(const Ring& proto, GaussRational grade, long depth) {
        return GradedOp(proto, std::move(grade), {}, depth);
    }
    /// d^grade, exact to `depth`.
    static GradedOp delta_pow(const Ring& proto, GaussRational grade, long depth) {
        return GradedOp(proto, std::move(grade), {proto.one_like()}, depth);
    }

    const Ring& proto() const { return proto_; }
    const GaussRational& grade() const { return grade_; }
    long depth() const { return depth_; }
    bool is_zero() const { return tail_.empty(); }
    bool is_monic() const { return !tail_.empty() && tail_[0].is_identity(); }
    bool is_x_constant() const {
        for (const auto& a : tail_)
            if (!a.is_x_constant()) return false;
        return true;
    }

    /// Coefficient at order grade - j; j beyond depth is unknown.
    Ring slot(long j) const {
        if (j < 0) return proto_.zero_like(); // above the anchor: exact zero
        if (j > depth_)
            throw watermark_error("slot " + std::to_string(j) + " beyond exact depth");
        return j < static_cast<long>(tail_.size()) ? tail_[static_cast<size_t>(j)]
                                                   : proto_.zero_like();
    }

    /// Apply a coefficientwise (linear) map slot by slot.
    template <class F>
    GradedOp mapped(F f) const {
        GradedOp r = *this;
        for (auto& a : r.tail_) a = f(a);
        r.trim();
        return r;
    }

    /// Coefficient at the absolute order `ord` (zero unless grade - ord is a
    /// nonnegative integer within depth).
    Ring at_order(const GaussRational& ord) const {
        GaussRational d = grade_ - ord;
        if (!d.is_integer()) return proto_.zero_like();
        return slot(d.to_long());
    }

    bool compatible(const GradedOp& o) const { return proto_.compatible(o.proto_); }

    GradedOp operator-() const {
        GradedOp r = *this;
        for (auto& a : r.tail_) a = -a;
        return r;
    }

    GradedOp scaled(const GaussRational& s) const {
        GradedOp r = *this;
        if (s.is_zero()) {
            r.tail_.clear();
            return r;
        }
        for (auto& a : r.tail_) a = a.scaled(s);
        r.trim();
        return r;
    }

    /// Re-anchor at `grade` (must stay in the same affine family and not drop
    /// stored data above the new anchor).
    GradedOp reanchored(const GaussRational& grade) const {
        GaussRational d = grade - grade_;
        if (!d.is_integer()) throw shape_error("cannot re-anchor across families");
        long s = d.to_long();
        if (s < 0 && !is_zero())
            for (long j = 0; j < -s && j < static_cast<long>(tail_.size()); ++j)
                if (!tail_[static_cast<size_t>(j)].is_zero())
                    throw shape_error("re-anchoring would drop a nonzero slot");
        std::vector<Ring> t;
        long depth = depth_ + s;
        if (depth < 0) throw shape_error("re-anchoring would empty the exact window");
        for (long j = 0; j <= depth; ++j) {
            long src = j - s;
            t.push_back((src >= 0 && src < static_cast<long>(tail_.size()))
                            ? tail_[static_cast<size_t>(src)]
                            : proto_.zero_like());
        }
        return GradedOp(proto_, grade, std::move(t), depth);
    }

    friend GradedOp operator+(const GradedOp& a, const GradedOp& b) {
        if (!a.compatible(b)) throw dim_error("operator dimension mismatch");
        GaussRational diff = a.grade_ - b.grade_;
        if (!diff.is_integer()) {
            // Distinct affine families only combine when one side is zero.
            if (a.is_zero()) {
                GradedOp r = b;
                r.depth_ = std::min(a.depth_, b.depth_);
                r.trim();
                return r;
            }
            if (b.is_zero()) return b + a;
            throw shape_error("grades differ by a non-integer");
        }
        long s = diff.to_long();
        if (s < 0) return b + a;
        long depth = std::min(a.depth_, b.depth_ + s);
        std::vector<Ring> tail;
        for (long j = 0; j <= depth; ++j) {
            Ring v = j < static_cast<long>(a.tail_.size()) ? a.tail_[static_cast<size_t>(j)]
                                                           : a.proto_.zero_like();
            long jb = j - s;
            if (jb >= 0 && jb < static_cast<long>(b.tail_.size()))
                v += b.tail_[static_cast<size_t>(jb)];
            tail.push_back(std::move(v));
        }
        return GradedOp(a.proto_, a.grade_, std::move(tail), depth);
    }
    friend GradedOp operator-(const GradedOp& a, const GradedOp& b) { return a + (-b); }

    friend bool operator==(const GradedOp& a, const GradedOp& b) {
        return a.grade_ == b.grade_ && a.depth_ == b.depth_ && a.tail_ == b.tail_;
    }
    friend bool operator!=(const GradedOp& a, const GradedOp& b) { return !(a == b); }

    std::string str() const {
        if (tail_.empty()) return "0 (grade " + grade_.str() + ")";
        std::string s;
        for (size_t j = 0; j < tail_.size(); ++j) {
            if (tail_[j].is_zero()) continue;
            if (!s.empty()) s += " + ";
            s += "(" + tail_[j].str() + ")d^{" + (grade_ - GaussRational(long(j))).str() + "}";
        }
        return s + "  [depth " + std::to_string(depth_) + "]";
    }

private:
    void trim() {
        if (static_cast<long>(tail_.size()) > depth_ + 1)
            tail_.resize(static_cast<size_t>(depth_) + 1);
        while (!tail_.empty() && tail_.back().is_zero()) tail_.pop_back();
    }

    Ring proto_;
    GaussRational grade_;
    std::vector<Ring> tail_;
    long depth_;
};

/// Equal coefficients on the common exact window.
template <class Ring>
bool agree(const GradedOp<Ring>& a, const GradedOp<Ring>& b) {
    if (a.is_zero() && b.is_zero()) return true;
    GaussRational diff = a.grade() - b.grade();
    if (!diff.is_integer()) return a.is_zero() && b.is_zero();
    long s = diff.to_long();
    if (s < 0) return agree(b, a);
    long jmax = std::min(a.depth(), b.depth() + s);
    for (long j = 0; j <= jmax; ++j)
        if (a.slot(j) != b.slot(j - s)) return false;
    return true;
}

/// Composition of graded symbols; the grade adds, exact to the smaller depth.
template <class Ring>
GradedOp<Ring> ccompose(const GradedOp<Ring>& A, const GradedOp<Ring>& B) {
    if (!A.compatible(B)) throw dim_error("operator dimension mismatch");
    long depth = std::min(A.depth(), B.depth());
    GaussRational grade = A.grade() + B.grade();
    if (A.is_zero() || B.is_zero()) return GradedOp<Ring>::zero(A.proto(), grade, depth);
    std::vector<Ring> tail(static_cast<size_t>(depth) + 1, A.proto().zero_like());

    for (long ja = 0; ja <= std::min<long>(depth, A.depth()); ++ja) {
        Ring a = A.slot(ja);
        if (a.is_zero()) continue;
        GaussRational ka = A.grade() - GaussRational(ja);
        for (long jb = 0; jb + ja <= depth && jb <= B.depth(); ++jb) {
            Ring d = B.slot(jb);
            for (long al = 0; ja + jb + al <= depth; ++al) {
                if (al > 0) d = d.derivative();
                if (d.is_zero()) break;
                GaussRational cf = gbinomial(ka, al);
                if (cf.is_zero()) continue;
                tail[static_cast<size_t>(ja + jb + al)] += (a * d).scaled(cf);
            }
        }
    }
    return GradedOp<Ring>(A.proto(), grade, std::move(tail), depth);
}

template <class Ring>
GradedOp<Ring> graded_bracket(const GradedOp<Ring>& A, const GradedOp<Ring>& B) {
    return ccompose(A, B) - ccompose(B, A);
}

/// Embed an integer-order symbol (lossless on the exact window).
template <class Ring>
GradedOp<Ring> from_psido(const PsiDO<Ring>& p, long want_depth = -1) {
    if (want_depth < 0) want_depth = OrderWindow::depth();
    if (p.is_zero()) {
        long anchor = p.entire() ? 0 : p.wm() + want_depth;
        return GradedOp<Ring>::zero(p.proto(), GaussRational(anchor), want_depth);
    }
    long top = p.ord_max();
    long depth = p.entire() ? want_depth : std::min(want_depth, top - p.wm());
    std::vector<Ring> tail;
    for (long j = 0; j <= depth; ++j) {
        long k = top - j;
        auto it = p.coeffs().find(k);
        tail.push_back(it == p.coeffs().end() ? p.proto().zero_like() : it->second);
    }
    return GradedOp<Ring>(p.proto(), GaussRational(top), std::move(tail), depth);
}

/// Back to integer orders; requires an integer grade anchor.
template <class Ring>
PsiDO<Ring> to_psido(const GradedOp<Ring>& g) {
    if (!g.grade().is_integer()) throw grade_error("grade", "non-integer grade");
    long top = g.grade().to_long();
    PsiDO<Ring> r(g.proto());
    r.set_wm(top - g.depth());
    for (long j = 0; j <= g.depth(); ++j) r.acc(top - j, g.slot(j));
    return r;
}

/// Inverse of a monic grade-0 operator 1 + X (X in slots >= 1): Neumann
/// series, finite to depth.
template <class Ring>
GradedOp<Ring> graded_invert_unipotent(const GradedOp<Ring>& K) {
    if (!K.is_monic() || !(K.grade() == GaussRational(0)))
        throw not_invertible_error("expected a monic grade-0 operator");
    GradedOp<Ring> one = GradedOp<Ring>::delta_pow(K.proto(), GaussRational(0), K.depth());
    GradedOp<Ring> X = K - one;
    GradedOp<Ring> acc = one, term = one;
    for (long j = 1; j <= K.depth() && !X.is_zero(); ++j) {
        term = ccompose(term, -X);
        if (term.is_zero()) break;
        acc = acc + term;
    }
    return acc;
}

/// Conjugation by exp(phi) for a multiplication operator phi that commutes
/// with every coefficient: exp_ad(phi, A) = sum_j ad_phi^j(A) / j!.
/// Each ad application strictly lowers the leading slot, so the sum is
/// finite per retained slot.
template <class Ring>
GradedOp<Ring> exp_ad(const Ring& phi, const GradedOp<Ring>& A) {
    GradedOp<Ring> f(A.proto(), GaussRational(0), {phi}, A.depth());
    GradedOp<Ring> acc = A, term = A;
    Rational fact(1);
    for (long j = 1;; ++j) {
        term = ccompose(f, term) - ccompose(term, f);
        if (term.is_zero()) break;
        if (j > A.depth() + 1)
            throw gauge_error("ad series does not terminate; gauge does not commute");
        fact *= j;
        acc = acc + term.scaled(GaussRational(Rational(1) / fact));
    }
    return acc;
}

template <class Ring>
struct GaugeSplit {
    Ring phi;          // multiplication operator; exp(ad phi) restores the input
    Ring mean;         // constant part of the sub-leading coefficient
    GradedOp<Ring> op; // gauge-normalized operator: constant sub-leading slot
};

/// Split the sub-leading coefficient of a monic operator into its mean and an
/// exact-derivative part removed by conjugation with exp(phi):
///   N = exp_ad(phi, N0), slot_1(N0) = mean.
/// Conjugation by 1 + IO cannot touch the sub-leading slot, which is why this
/// gauge step must run before dressing to constants.
template <class Ring>
GaugeSplit<Ring> gauge_normalize(const GradedOp<Ring>& N) {
    if (!N.is_monic()) throw shape_error("gauge normalization requires a monic operator");
    const GaussRational& g = N.grade();
    if (g.is_zero()) throw grade_error("grade-zero", "grade must be nonzero");
    Ring a1 = N.depth() >= 1 ? N.slot(1) : N.proto().zero_like();
    Ring c = a1.mean_part();
    // a1 = c - g phi'  =>  phi = antiderivative((c - a1)/g)
    Ring rhs = (c - a1).scaled(GaussRational(1) / g);
    Ring phi = rhs.antiderivative().first;
    for (long j = 1; j <= N.depth(); ++j)
        if (!phi.commutes_with(N.slot(j)))
            throw gauge_error("sub-leading data does not commute with the gauge");
    GradedOp<Ring> n0 = exp_ad(-phi, N);
    if (n0.depth() >= 1 && n0.slot(1) != c)
        throw gauge_error("gauge step failed to normalize the sub-leading slot");
    return {std::move(phi), std::move(c), std::move(n0)};
}

template <class Ring>
struct Dressing {
    GradedOp<Ring> K; // monic grade 0, tail in slots >= 1
    GradedOp<Ring> H; // constant-coefficient monic operator of the same grade
};

/// Conjugate a gauge-normalized monic operator to constant coefficients:
/// N = K H K^{-1} above the exact window. Each slot costs one antiderivative;
/// the mean obstruction goes into the constant coefficient of H.
template <class Ring>
Dressing<Ring> dress_to_constants(const GradedOp<Ring>& N) {
    if (!N.is_monic()) throw shape_error("dressing requires a monic operator");
    const GaussRational& g = N.grade();
    if (g.is_zero()) throw grade_error("grade-zero", "grade must be nonzero");
    long depth = N.depth();
    std::vector<Ring> ktail(static_cast<size_t>(depth) + 1, N.proto().zero_like());
    std::vector<Ring> htail(static_cast<size_t>(depth) + 1, N.proto().zero_like());
    ktail[0] = N.proto().one_like();
    htail[0] = N.proto().one_like();
    GradedOp<Ring> K(N.proto(), GaussRational(0), ktail, depth);
    GradedOp<Ring> H(N.proto(), g, htail, depth);

    for (long m = 1; m <= depth; ++m) {
        GradedOp<Ring> resid = ccompose(N, K) - ccompose(K, H);
        Ring rm = resid.at_order(g - GaussRational(m));
        Ring cm = rm.mean_part();
        if (m == 1 && rm != cm)
            throw shape_error("sub-leading coefficient is not constant; gauge-normalize first");
        htail[static_cast<size_t>(m)] = cm;
        if (m >= 2) {
            Ring prim = (cm - rm).scaled(GaussRational(1) / g).antiderivative().first;
            ktail[static_cast<size_t>(m - 1)] = prim;
        }
        K = GradedOp<Ring>(N.proto(), GaussRational(0), ktail, depth);
        H = GradedOp<Ring>(N.proto(), g, htail, depth);
    }
    return {std::move(K), std::move(H)};
}

/// Power of a constant-coefficient monic operator H = d^g (1 + X):
/// (1 + X)^r by the commutative binomial series, grade g*r.
template <class Ring>
GradedOp<Ring> const_power(const GradedOp<Ring>& H, const GaussRational& r) {
    if (!H.is_monic()) throw shape_error("const_power requires a monic operator");
    if (!H.is_x_constant()) throw shape_error("const_power requires constant coefficients");
    long depth = H.depth();
    const GaussRational& g = H.grade();
    // X = H d^{-g} - 1: grade-0 tail in slots >= 1.
    std::vector<Ring> xt;
    xt.push_back(H.proto().zero_like());
    for (long j = 1; j <= depth; ++j) xt.push_back(H.slot(j));
    GradedOp<Ring> X(H.proto(), GaussRational(0), std::move(xt), depth);

    GradedOp<Ring> acc = GradedOp<Ring>::delta_pow(H.proto(), GaussRational(0), depth);
    GradedOp<Ring> xp = acc; // X^m
    for (long m = 1; m <= depth && !X.is_zero(); ++m) {
        xp = ccompose(xp, X);
        if (xp.is_zero()) break;
        acc = acc + xp.scaled(gbinomial(r, m));
    }
    // Multiply by d^{g r} on the right: the anchor shifts, the tail stays.
    std::vector<Ring> tail;
    for (long j = 0; j <= acc.depth(); ++j) tail.push_back(acc.slot(j));
    return GradedOp<Ring>(H.proto(), g * r, std::move(tail), acc.depth());
}

/// Complex-rational power of a monic operator of nonzero grade:
/// gauge-normalize, dress to constants, take the commutative power, undress.
/// power(M, 1) returns M itself.
template <class Ring>
GradedOp<Ring> power(const GradedOp<Ring>& M, const GaussRational& r) {
    if (!M.is_monic()) throw shape_error("power requires a monic operator");
    if (M.grade().is_zero()) throw grade_error("grade-zero", "grade must be nonzero");
    if (r == GaussRational(1)) return M;

    GaugeSplit<Ring> gs = gauge_normalize(M);
    Dressing<Ring> dr = dress_to_constants(gs.op);
    GradedOp<Ring> kinv = graded_invert_unipotent(dr.K);
    // Dressing soundness: K H K^{-1} must reproduce the normalized operator.
    if (!agree(ccompose(ccompose(dr.K, dr.H), kinv), gs.op))
        throw shape_error("dressing reconstruction failed");
    GradedOp<Ring> p = const_power(dr.H, r);
    return exp_ad(gs.phi, ccompose(ccompose(dr.K, p), kinv));
}

/// A pair of graded branches with a common grade: the complex-order analogue
/// of the two-branch algebra.
template <class Ring>
struct GradedPair {
    GradedOp<Ring> plus, minus;

    static GradedPair delta_pow(const Ring& proto, GaussRational grade, long depth) {
        return {GradedOp<Ring>::delta_pow(proto, grade, depth),
                GradedOp<Ring>::delta_pow(proto, grade, depth)};
    }
    bool is_monic() const { return plus.is_monic() && minus.is_monic(); }
    bool is_zero() const { return plus.is_zero() && minus.is_zero(); }

    friend GradedPair operator+(const GradedPair& a, const GradedPair& b) {
        return {a.plus + b.plus, a.minus + b.minus};
    }
    friend GradedPair operator-(const GradedPair& a, const GradedPair& b) {
        return {a.plus - b.plus, a.minus - b.minus};
    }
    friend bool operator==(const GradedPair& a, const GradedPair& b) {
        return a.plus == b.plus && a.minus == b.minus;
    }
};

template <class Ring>
GradedPair<Ring> ccompose(const GradedPair<Ring>& a, const GradedPair<Ring>& b) {
    return {ccompose(a.plus, b.plus), ccompose(a.minus, b.minus)};
}

template <class Ring>
bool agree(const GradedPair<Ring>& a, const GradedPair<Ring>& b) {
    return agree(a.plus, b.plus) && agree(a.minus, b.minus);
}

/// Branchwise power on the two-branch extension.
template <class Ring>
GradedPair<Ring> fcl_power(const GradedPair<Ring>& A, const GaussRational& r) {
    return {power(A.plus, r), power(A.minus, r)};
}

} // namespace fclkp
