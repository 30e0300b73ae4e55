#pragma once

#include <utility>

#include "fclkp/psido.hpp"

namespace fclkp {

/// Formal classical operator on the circle, represented by its two branches:
/// the restriction of the symbol to xi > 0 and to xi < 0, each identified
/// with an abstract pseudo-differential symbol. Composition is branchwise.
///
/// Dictionary to homogeneous symbols (fixed by sigma(D) = xi for D = -i d/dx):
///   sigma_k(A)(x, +1) = i^k   * plus_k(x)
///   sigma_k(A)(x, -1) = (-i)^k * minus_k(x)
/// All i-factors live in this dictionary; branch coefficients stay rational.
template <class Ring>
struct FClOp {
    PsiDO<Ring> plus, minus;

    FClOp() = default;
    FClOp(PsiDO<Ring> p, PsiDO<Ring> m) : plus(std::move(p)), minus(std::move(m)) {
        plus.require_compatible(minus);
    }

    static FClOp zero(const Ring& proto) {
        return {PsiDO<Ring>::zero(proto), PsiDO<Ring>::zero(proto)};
    }
    static FClOp one(const Ring& proto) {
        return {PsiDO<Ring>::one(proto), PsiDO<Ring>::one(proto)};
    }

    const Ring& proto() const { return plus.proto(); }
    bool is_zero() const { return plus.is_zero() && minus.is_zero(); }

    FClOp operator-() const { return {-plus, -minus}; }
    friend FClOp operator+(const FClOp& a, const FClOp& b) {
        return {a.plus + b.plus, a.minus + b.minus};
    }
    friend FClOp operator-(const FClOp& a, const FClOp& b) {
        return {a.plus - b.plus, a.minus - b.minus};
    }
    FClOp scaled(const GaussRational& s) const { return {plus.scaled(s), minus.scaled(s)}; }

    friend bool operator==(const FClOp& a, const FClOp& b) {
        return a.plus == b.plus && a.minus == b.minus;
    }
    friend bool operator!=(const FClOp& a, const FClOp& b) { return !(a == b); }

    std::string str() const { return "(+: " + plus.str() + " | -: " + minus.str() + ")"; }
};

template <class Ring>
bool agree(const FClOp<Ring>& a, const FClOp<Ring>& b) {
    return agree(a.plus, b.plus) && agree(a.minus, b.minus);
}

template <class Ring>
FClOp<Ring> compose(const FClOp<Ring>& a, const FClOp<Ring>& b) {
    return {compose(a.plus, b.plus), compose(a.minus, b.minus)};
}

template <class Ring>
FClOp<Ring> bracket(const FClOp<Ring>& a, const FClOp<Ring>& b) {
    return {bracket(a.plus, b.plus), bracket(a.minus, b.minus)};
}

/// The sign of the Dirac operator: +1 on the plus branch, -1 on the minus
/// branch. Central, with epsilon^2 = 1.
template <class Ring>
FClOp<Ring> epsilon(const Ring& proto) {
    return {PsiDO<Ring>::one(proto), -PsiDO<Ring>::one(proto)};
}

template <class Ring>
FClOp<Ring> eps_mul(const FClOp<Ring>& a) {
    return {a.plus, -a.minus};
}

template <class Ring>
FClOp<Ring> p_plus(const FClOp<Ring>& a) {
    return {a.plus, PsiDO<Ring>::zero(a.proto())};
}

template <class Ring>
FClOp<Ring> p_minus(const FClOp<Ring>& a) {
    return {PsiDO<Ring>::zero(a.proto()), a.minus};
}

template <class Ring>
PsiDO<Ring> parity_twist(const PsiDO<Ring>& p) {
    return p.parity_twisted();
}

/// s: sigma_n(x,xi) -> (-1)^n sigma_n(x,-xi). In branch coordinates a swap.
template <class Ring>
FClOp<Ring> s_op(const FClOp<Ring>& a) {
    return {a.minus, a.plus};
}

/// s': sigma_n(x,xi) -> sigma_n(x,-xi). A parity-twisted swap.
template <class Ring>
FClOp<Ring> s_prime(const FClOp<Ring>& a) {
    return {a.minus.parity_twisted(), a.plus.parity_twisted()};
}

/// Membership in the even-even class (the classical PsiDO algebra inside FCl).
template <class Ring>
bool is_ee(const FClOp<Ring>& a) {
    return agree(a.plus, a.minus);
}

template <class Ring>
bool is_eo(const FClOp<Ring>& a) {
    return agree(a.plus, -a.minus);
}

/// Projection onto the even-odd class along the even-even class:
/// phi(A) = (A - s(A))/2.
template <class Ring>
FClOp<Ring> phi_eo(const FClOp<Ring>& a) {
    PsiDO<Ring> half = (a.plus - a.minus).scaled(GaussRational(Rational(1, 2)));
    return {half, -half};
}

/// Diagonal embedding of PsiDO as the even-even class.
template <class Ring>
FClOp<Ring> phi_ee(const PsiDO<Ring>& p) {
    return {p, p};
}

/// The injection family Phi_{lambda,mu}: a_k d^k -> (a_k lambda^k d^k on the
/// plus branch, a_k mu^k d^k on the minus branch), with the convention
/// 0^k = 0 for every k (so a zero parameter empties that branch exactly).
template <class Ring>
FClOp<Ring> phi_lambda_mu(const PsiDO<Ring>& p, const GaussRational& lambda,
                          const GaussRational& mu) {
    if (lambda.is_zero() && mu.is_zero()) throw param_error("Phi_{0,0} is undefined");
    auto scale_branch = [&p](const GaussRational& t) {
        PsiDO<Ring> r(p.proto());
        if (t.is_zero()) return r; // entire zero: 0^k = 0 kills every order
        r.set_wm(p.wm());
        for (const auto& [k, a] : p.coeffs()) r.acc(k, a.scaled(t.pow(k)));
        return r;
    };
    return {scale_branch(lambda), scale_branch(mu)};
}

/// Evaluated homogeneous symbol at xi = sign (dictionary factors applied).
template <class Ring>
Ring symbol_at(const FClOp<Ring>& a, long k, int sign) {
    GaussRational i = GaussRational::i();
    if (sign > 0) return a.plus.at(k).scaled(i.pow(k));
    return a.minus.at(k).scaled((-i).pow(k));
}

namespace detail {
inline GaussRational scale_scalar(const GaussRational& x, const GaussRational& s) { return x * s; }
template <class T>
T scale_scalar(const T& x, const GaussRational& s) {
    return x.scaled(s);
}
} // namespace detail

/// res_+ = mean tr of sigma_{-1}(.)(x,+1) = -i Tr(plus branch).
template <class Ring>
auto res_plus(const FClOp<Ring>& a) {
    return detail::scale_scalar(adler_trace(a.plus), -GaussRational::i());
}

/// res_- = mean tr of sigma_{-1}(.)(x,-1) = +i Tr(minus branch).
template <class Ring>
auto res_minus(const FClOp<Ring>& a) {
    return detail::scale_scalar(adler_trace(a.minus), GaussRational::i());
}

/// The Wodzicki residue res = res_+ + res_-; vanishes on the even-even class.
template <class Ring>
auto res(const FClOp<Ring>& a) {
    return res_plus(a) + res_minus(a);
}

template <class Ring>
auto form_s(const FClOp<Ring>& a, const FClOp<Ring>& b) {
    return res(compose(a, s_op(b)));
}

template <class Ring>
auto form_sprime(const FClOp<Ring>& a, const FClOp<Ring>& b) {
    return res(compose(a, s_prime(b)));
}

/// Polarized bracket for r = epsilon(D) o (.): since epsilon is central this
/// is epsilon [A,B].
template <class Ring>
FClOp<Ring> bracket_eps(const FClOp<Ring>& a, const FClOp<Ring>& b) {
    return eps_mul(bracket(a, b));
}

/// Polarized bracket for r = s, by the defining half-sum.
template <class Ring>
FClOp<Ring> bracket_s(const FClOp<Ring>& a, const FClOp<Ring>& b) {
    FClOp<Ring> t = bracket(s_op(a), b) + bracket(a, s_op(b));
    return t.scaled(GaussRational(Rational(1, 2)));
}

/// Polarized bracket for r = s'.
template <class Ring>
FClOp<Ring> bracket_sprime(const FClOp<Ring>& a, const FClOp<Ring>& b) {
    FClOp<Ring> t = bracket(s_prime(a), b) + bracket(a, s_prime(b));
    return t.scaled(GaussRational(Rational(1, 2)));
}

/// The four almost complex structures.
enum class JTag { J1, J2, J3, J4 };

template <class Ring>
FClOp<Ring> apply_j(JTag j, const FClOp<Ring>& a) {
    const GaussRational i = GaussRational::i();
    switch (j) {
        case JTag::J1: // i epsilon(D) o (.)
            return {a.plus.scaled(i), a.minus.scaled(-i)};
        case JTag::J2: // i s(.)
            return {a.minus.scaled(i), a.plus.scaled(i)};
        case JTag::J3: // i s'(.)
            return {a.minus.parity_twisted().scaled(i), a.plus.parity_twisted().scaled(i)};
        case JTag::J4: // J1 o J3
            return {-a.minus.parity_twisted(), a.plus.parity_twisted()};
    }
    throw param_error("unknown J");
}

/// Nijenhuis defect N_J(u,v) = [Ju,Jv] - J[Ju,v] - J[u,Jv] - [u,v];
/// identically zero exactly when J is integrable.
template <class Ring>
FClOp<Ring> nijenhuis(JTag j, const FClOp<Ring>& u, const FClOp<Ring>& v) {
    FClOp<Ring> ju = apply_j(j, u), jv = apply_j(j, v);
    return bracket(ju, jv) - apply_j(j, bracket(ju, v)) - apply_j(j, bracket(u, jv)) -
           bracket(u, v);
}

/// Involutions usable as r-matrix candidates.
enum class RTag { Eps, S, SPrime };

template <class Ring>
FClOp<Ring> apply_r(RTag r, const FClOp<Ring>& a) {
    switch (r) {
        case RTag::Eps:
            return eps_mul(a);
        case RTag::S:
            return s_op(a);
        case RTag::SPrime:
            return s_prime(a);
    }
    throw param_error("unknown involution");
}

/// Modified Yang-Baxter defect [rX,rY] - r([rX,Y] + [X,rY]) + [X,Y].
template <class Ring>
FClOp<Ring> myb_defect(RTag r, const FClOp<Ring>& x, const FClOp<Ring>& y) {
    FClOp<Ring> rx = apply_r(r, x), ry = apply_r(r, y);
    return bracket(rx, ry) - apply_r(r, bracket(rx, y) + bracket(x, ry)) + bracket(x, y);
}

/// Rota-Baxter defect R(u)R(v) - R(R(u)v) - R(uR(v)) - lambda R(uv).
template <class Ring>
FClOp<Ring> rota_baxter_defect(RTag r, const FClOp<Ring>& u, const FClOp<Ring>& v,
                               const GaussRational& lambda) {
    FClOp<Ring> ru = apply_r(r, u), rv = apply_r(r, v);
    return compose(ru, rv) - apply_r(r, compose(ru, v)) - apply_r(r, compose(u, rv)) -
           apply_r(r, compose(u, v)).scaled(lambda);
}

/// Push-forward of the composition through Phi_{lambda,0}: both operands and
/// the result live in the plus ideal.
template <class Ring>
FClOp<Ring> deformed_product(const FClOp<Ring>& a, const FClOp<Ring>& b,
                             const GaussRational& lambda) {
    if (!a.minus.is_zero() || !b.minus.is_zero())
        throw branch_error("deformed product requires operands in FCl_+");
    if (lambda.is_zero()) throw param_error("deformed product requires lambda != 0");
    auto unscale = [&lambda](const PsiDO<Ring>& p) {
        PsiDO<Ring> r(p.proto());
        r.set_wm(p.wm());
        for (const auto& [k, c] : p.coeffs()) r.acc(k, c.scaled(lambda.pow(-k)));
        return r;
    };
    PsiDO<Ring> prod = compose(unscale(a.plus), unscale(b.plus));
    return phi_lambda_mu(prod, lambda, GaussRational(0));
}

} // namespace fclkp
