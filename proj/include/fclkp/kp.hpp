#pragma once

#include <utility>
#include <vector>

#include "fclkp/cpow.hpp"
#include "fclkp/fcl.hpp"
#include "fclkp/psido.hpp"
#include "fclkp/timepoly.hpp"

namespace fclkp::kp {

using Op = PsiDO<FourierMatrix>;
using FOp = FClOp<FourierMatrix>;
using TOp = PsiDO<TimePoly>;
using TFOp = FClOp<TimePoly>;

struct Config {
    int n_times = 3;    // formal variables t_1..t_N
    long valuation = 4; // retain time monomials of valuation <= W
    long depth = 6;     // orders of the solution reported exactly: >= -depth
    int eps_order = 0;  // perturbation degree for sensitivity runs
};

/// Lift an x-coefficient operator into the time-polynomial ring (t-constant).
inline TOp lift(const Op& p, const Config& cfg) {
    TimePoly proto(p.proto().rows(), cfg.n_times, cfg.valuation, cfg.eps_order);
    TOp r(proto);
    r.set_wm(p.wm());
    for (const auto& [k, a] : p.coeffs())
        r.acc(k, TimePoly::constant(a, cfg.n_times, cfg.valuation, cfg.eps_order));
    return r;
}

inline TFOp lift(const FOp& p, const Config& cfg) {
    return {lift(p.plus, cfg), lift(p.minus, cfg)};
}

/// Evaluate at t = 0 (and eps = 0).
inline Op at_zero(const TOp& p) {
    FourierMatrix proto = FourierMatrix::zero(p.proto().rows());
    Op r(proto);
    r.set_wm(p.wm());
    for (const auto& [k, a] : p.coeffs()) r.acc(k, a.at_zero());
    return r;
}

inline FOp at_zero(const TFOp& p) { return {at_zero(p.plus), at_zero(p.minus)}; }

inline TOp dt(const TOp& p, int k) {
    return p.mapped([k](const TimePoly& c) { return c.dt(k); });
}

inline TFOp dt(const TFOp& p, int k) { return {dt(p.plus, k), dt(p.minus, k)}; }

inline TOp val_slice(const TOp& p, long w) {
    return p.mapped([w](const TimePoly& c) { return c.val_slice(w); });
}

inline TOp val_truncate(const TOp& p, long w) {
    return p.mapped([w](const TimePoly& c) { return c.val_truncate(w); });
}

inline TFOp val_truncate(const TFOp& p, long w) {
    return {val_truncate(p.plus, w), val_truncate(p.minus, w)};
}

inline TOp eps_slice(const TOp& p, int d) {
    TimePoly proto = p.proto().eps_slice(0);
    TOp r(proto);
    r.set_wm(p.wm());
    for (const auto& [k, a] : p.coeffs()) r.acc(k, a.eps_slice(d));
    return r;
}

/// Scale every valuation-v monomial by s^v: the time substitution
/// t_k -> s^k t_k.
inline TOp time_scale(const TOp& p, const GaussRational& s) {
    return p.mapped([&s](const TimePoly& c) {
        return c.map_terms(
            [&s](const TimeMono& m, const FourierMatrix& v) { return v.scaled(s.pow(m.val())); });
    });
}

/// The group condition on time-graded symbols: every positive order carries
/// t-valuation >= the order, and the t = 0 slice sits in 1 + IO.
inline bool admissible(const TOp& p) {
    for (const auto& [k, a] : p.coeffs())
        if (k > 0 && a.min_val() < k) return false;
    Op z = at_zero(p) - Op::one(at_zero(p).proto());
    return z.is_zero() || z.ord_max() <= -1;
}

/// Dressing exponential U = exp(sum_k t_k L0^k), truncated at valuation W.
/// The initial value must be monic of order 1 (lower orders unrestricted).
inline TOp dressing_exp_t(const TOp& L0t, const Config& cfg) {
    if (L0t.is_zero() || L0t.ord_max() != 1 || !L0t.coeffs().rbegin()->second.is_identity())
        throw shape_error("initial value must be d + lower order");
    TOp X(L0t.proto());
    TOp pw = TOp::one(L0t.proto());
    for (int k = 1; k <= cfg.n_times && k <= cfg.valuation; ++k) {
        pw = compose(pw, L0t);
        X = X + pw.mapped([k](const TimePoly& c) { return c.times_t(k); });
    }
    return exp_nilpotent(X, cfg.valuation);
}

inline TOp dressing_exp(const Op& L0, const Config& cfg) {
    return dressing_exp_t(lift(L0, cfg), cfg);
}

struct Factorization {
    TOp S; // 1 + integral operators
    TOp Y; // purely differential
};

/// Mulase factorization S U = Y, grade by grade in the t-valuation:
///   K_w = sum_{j=1..w} S_{w-j} U_j,   S_w = -pi_S(K_w),   Y_w = pi_D(K_w).
/// The decomposition is unique and exact per grade.
inline Factorization mulase_factorize(const TOp& U, const Config& cfg) {
    TOp one = TOp::one(U.proto());
    if (!(val_slice(U, 0) == one))
        throw grade_error("grade0", "valuation-0 part of the dressing operator must be 1");
    std::vector<TOp> Sw(static_cast<size_t>(cfg.valuation) + 1, TOp::zero(U.proto()));
    Sw[0] = one;
    TOp S = one, Y = one;
    for (long w = 1; w <= cfg.valuation; ++w) {
        TOp K(U.proto());
        for (long j = 1; j <= w; ++j)
            K = K + compose(Sw[static_cast<size_t>(w - j)], val_slice(U, j));
        Sw[static_cast<size_t>(w)] = -int_part(K);
        S = S + Sw[static_cast<size_t>(w)];
        Y = Y + diff_part(K);
    }
    return {S, Y};
}

struct Solution {
    Config cfg;
    Op L0;
    TOp L, S, Y;
};

namespace detail {

/// Work depth large enough that every reported order of the solution and of
/// the flow defects is exact; verified after solving, with a doubling retry.
inline long initial_work_depth(const Config& cfg) {
    return cfg.depth + 4 * (cfg.valuation + 1) + cfg.n_times + 8;
}

Solution kp_solve_t_at_depth(const TOp& L0t, const Config& cfg, long work_depth);

} // namespace detail

/// Solve the hierarchy by factorization: L = S L0 S^{-1} with
/// exp(sum t_k L0^k) = S^{-1} Y. Retries with a deeper order window until the
/// solution is exact at every order >= -cfg.depth, with margin for the flow
/// defects.
Solution kp_solve_t(const TOp& L0t, const Config& cfg);

inline Solution kp_solve(const Op& L0, const Config& cfg) {
    return kp_solve_t(lift(L0, cfg), cfg);
}

/// d L / d t_k - [(L^k)_D, L], exact up to valuation W - k. Must vanish.
inline TOp lax_defect(const Solution& sol, int k) {
    if (k < 1 || k > sol.cfg.n_times) throw param_error("flow index out of range");
    TOp lk = power_int(sol.L, k);
    TOp defect = dt(sol.L, k) - bracket(diff_part(lk), sol.L);
    return val_truncate(defect, sol.cfg.valuation - k);
}

/// d/dt_j Tr(L^m) for every flow j; returns the first nonzero derivative
/// (identically zero when the trace is conserved, as it must be).
inline TimePoly conservation_defect(const Solution& sol, int m) {
    TOp lm = power_int(sol.L, m);
    TimePoly h = adler_trace(lm);
    for (int j = 1; j <= sol.cfg.n_times; ++j) {
        TimePoly d = h.dt(j).val_truncate(sol.cfg.valuation - j);
        if (!d.is_zero()) return d;
    }
    return h.zero_like();
}

struct FclSolution {
    Config cfg;
    FOp L0;
    TFOp L, S, Y;
};

/// Standard hierarchy on the two-branch algebra: branchwise solve.
FclSolution kp_solve_fcl(const FOp& L0, const Config& cfg);

/// Scaled solve for initial values with principal symbol lambda d on the
/// plus branch and mu d on the minus branch: each branch is normalized to a
/// monic problem, solved, and mapped back by t_k -> q^k t_k and an overall
/// factor q.
FclSolution kp_solve_scaled(const FOp& L0, const GaussRational& lambda, const GaussRational& mu,
                            const Config& cfg);

/// Twisted hierarchy dL/dt_k = eps^k [(L^k)_D, L], solved through the change
/// of variables L -> eps L which turns it into the standard hierarchy.
FclSolution kp_solve_twisted(const FOp& L0, const Config& cfg);

/// Branchwise standard flow defect.
TFOp fcl_lax_defect(const FclSolution& sol, int k);

/// Twisted flow defect dL/dt_k - eps^k [(L^k)_D, L].
TFOp eps_defect(const FclSolution& sol, int k);

struct ComplexSolution {
    Config cfg;
    GaussRational alpha;
    GradedPair<FourierMatrix> L0;
    Op R_plus, R_minus; // L0^{1/alpha}, the grade-1 root driving the flows
    GradedPair<TimePoly> L;
    TOp S_plus, S_minus, Y_plus, Y_minus;
};

/// Complex-order hierarchy: the initial value is a monic grade-alpha pair;
/// the dressing operator is built from the grade-1 root L0^{1/alpha} and
/// factorized branchwise; L = S L0 S^{-1} has grade alpha. The caller must
/// supply L0 exact to a depth covering cfg.depth plus working margin.
ComplexSolution kp_solve_complex(const GradedPair<FourierMatrix>& L0, const GaussRational& alpha,
                                 const Config& cfg);

/// dL/dt_k - [(L^{k/alpha})_D, L] with L^{k/alpha} = S R^k S^{-1}.
GradedPair<TimePoly> complex_lax_defect(const ComplexSolution& sol, int k);

/// Exact expansion of the solution for L0 + eps V in the formal parameter
/// eps, to order p: returns the eps^0..eps^p slices of L.
std::vector<TOp> sensitivity_expand(const Op& L0, const Op& V, int p, const Config& cfg);

} // namespace fclkp::kp
