#include "fclkp/kp.hpp"

namespace fclkp::kp {

namespace detail {

Solution kp_solve_t_at_depth(const TOp& L0t, const Config& cfg, long work_depth) {
    OrderWindow::Scope scope(work_depth);
    TOp U = dressing_exp_t(L0t, cfg);
    Factorization f = mulase_factorize(U, cfg);
    TOp sinv = invert_unipotent(f.S, cfg.valuation);
    TOp L = compose(compose(f.S, L0t), sinv);
    return {cfg, at_zero(L0t), L, f.S, f.Y};
}

} // namespace detail

Solution kp_solve_t(const TOp& L0t, const Config& cfg) {
    long target = -(cfg.depth + cfg.n_times + 2);
    long wd = detail::initial_work_depth(cfg);
    for (int attempt = 0; attempt < 6; ++attempt) {
        Solution sol = detail::kp_solve_t_at_depth(L0t, cfg, wd);
        if (sol.L.wm() <= target) return sol;
        wd *= 2;
    }
    throw shape_error("order window did not stabilize");
}

FclSolution kp_solve_fcl(const FOp& L0, const Config& cfg) {
    Solution p = kp_solve(L0.plus, cfg);
    Solution m = kp_solve(L0.minus, cfg);
    return {cfg, L0, {p.L, m.L}, {p.S, m.S}, {p.Y, m.Y}};
}

namespace {

/// Leading scalar of a branch of shape q d + lower: the order-1 coefficient
/// must be a constant scalar matrix.
GaussRational leading_scalar(const Op& p) {
    if (p.is_zero() || p.ord_max() != 1) throw shape_error("branch is not of order 1");
    FourierMatrix lead = p.coeffs().rbegin()->second;
    if (!lead.is_x_constant()) throw shape_error("principal coefficient is not constant");
    GaussRational q = lead.at(0, 0).mean();
    if (lead != FourierMatrix::scalar(lead.rows(), q))
        throw shape_error("principal coefficient is not scalar");
    return q;
}

Solution solve_scaled_branch(const Op& P0, const GaussRational& q, const Config& cfg) {
    if (q.is_zero()) throw param_error("scaling parameter must be nonzero");
    Op tilde = P0.scaled(q.inverse());
    Solution s = kp_solve(tilde, cfg);
    Solution out;
    out.cfg = cfg;
    out.L0 = P0;
    out.L = time_scale(s.L, q).scaled(q);
    out.S = time_scale(s.S, q);
    out.Y = time_scale(s.Y, q);
    return out;
}

} // namespace

FclSolution kp_solve_scaled(const FOp& L0, const GaussRational& lambda, const GaussRational& mu,
                            const Config& cfg) {
    if (lambda.is_zero() || mu.is_zero()) throw param_error("lambda and mu must be nonzero");
    GaussRational lp = leading_scalar(L0.plus);
    GaussRational lm = leading_scalar(L0.minus);
    if (lp != lambda || lm != mu)
        throw shape_error("principal symbol does not match the given lambda, mu");
    Solution p = solve_scaled_branch(L0.plus, lambda, cfg);
    Solution m = solve_scaled_branch(L0.minus, mu, cfg);
    return {cfg, L0, {p.L, m.L}, {p.S, m.S}, {p.Y, m.Y}};
}

FclSolution kp_solve_twisted(const FOp& L0, const Config& cfg) {
    GaussRational lambda = leading_scalar(L0.plus);
    GaussRational mu = leading_scalar(L0.minus);
    if (lambda.is_zero() || mu.is_zero()) throw param_error("principal scalars must be nonzero");
    FOp M0 = eps_mul(L0);
    FclSolution ms = kp_solve_scaled(M0, lambda, -mu, cfg);
    return {cfg, L0, eps_mul(ms.L), ms.S, ms.Y};
}

TFOp fcl_lax_defect(const FclSolution& sol, int k) {
    if (k < 1 || k > sol.cfg.n_times) throw param_error("flow index out of range");
    auto branch = [&](const TOp& L) {
        TOp defect = dt(L, k) - bracket(diff_part(power_int(L, k)), L);
        return val_truncate(defect, sol.cfg.valuation - k);
    };
    return {branch(sol.L.plus), branch(sol.L.minus)};
}

TFOp eps_defect(const FclSolution& sol, int k) {
    if (k < 1 || k > sol.cfg.n_times) throw param_error("flow index out of range");
    TFOp lk = {power_int(sol.L.plus, k), power_int(sol.L.minus, k)};
    TFOp flow = {bracket(diff_part(lk.plus), sol.L.plus), bracket(diff_part(lk.minus), sol.L.minus)};
    if (k % 2) flow = eps_mul(flow);
    return val_truncate(dt(sol.L, k) - flow, sol.cfg.valuation - k);
}

namespace {

GradedOp<TimePoly> lift_graded(const GradedOp<FourierMatrix>& g, const Config& cfg) {
    std::vector<TimePoly> tail;
    for (long j = 0; j <= g.depth(); ++j)
        tail.push_back(TimePoly::constant(g.slot(j), cfg.n_times, cfg.valuation, cfg.eps_order));
    TimePoly proto(g.proto().rows(), cfg.n_times, cfg.valuation, cfg.eps_order);
    return {proto, g.grade(), std::move(tail), g.depth()};
}

} // namespace

ComplexSolution kp_solve_complex(const GradedPair<FourierMatrix>& L0, const GaussRational& alpha,
                                 const Config& cfg) {
    if (alpha.is_zero()) throw grade_error("grade", "alpha must be nonzero");
    if (!L0.is_monic()) throw shape_error("initial value must be monic");
    if (!(L0.plus.grade() == alpha) || !(L0.minus.grade() == alpha))
        throw shape_error("initial value grade does not match alpha");
    long wd = std::max(detail::initial_work_depth(cfg), L0.plus.depth());
    OrderWindow::Scope scope(wd);

    GradedPair<FourierMatrix> R =
        (alpha == GaussRational(1)) ? L0 : fcl_power(L0, GaussRational(1) / alpha);
    Op Rp = to_psido(R.plus), Rm = to_psido(R.minus);

    auto solve_branch = [&](const Op& root, const GradedOp<FourierMatrix>& init) {
        TOp U = dressing_exp(root, cfg);
        Factorization f = mulase_factorize(U, cfg);
        TOp sinv = invert_unipotent(f.S, cfg.valuation);
        GradedOp<TimePoly> Sg = from_psido(f.S, wd);
        GradedOp<TimePoly> Sgi = from_psido(sinv, wd);
        GradedOp<TimePoly> Lg = ccompose(ccompose(Sg, lift_graded(init, cfg)), Sgi);
        return std::make_tuple(Lg, f.S, f.Y);
    };
    auto [Lp, Sp, Yp] = solve_branch(Rp, L0.plus);
    auto [Lm, Sm, Ym] = solve_branch(Rm, L0.minus);

    long need = cfg.depth;
    if (Lp.depth() < need || Lm.depth() < need)
        throw watermark_error("initial data not deep enough for the requested depth");
    return {cfg, alpha, L0, Rp, Rm, {Lp, Lm}, Sp, Sm, Yp, Ym};
}

GradedPair<TimePoly> complex_lax_defect(const ComplexSolution& sol, int k) {
    if (k < 1 || k > sol.cfg.n_times) throw param_error("flow index out of range");
    const Config& cfg = sol.cfg;
    auto branch = [&](const GradedOp<TimePoly>& L, const Op& root, const TOp& S) {
        TOp sinv = invert_unipotent(S, cfg.valuation);
        TOp lka = compose(compose(S, lift(power_int(root, k), cfg)), sinv); // S R^k S^-1
        GradedOp<TimePoly> xd = from_psido(diff_part(lka), L.depth());
        GradedOp<TimePoly> defect =
            L.mapped([k](const TimePoly& c) { return c.dt(k); }) - graded_bracket(xd, L);
        long cap = cfg.valuation - k;
        return defect.mapped([cap](const TimePoly& c) { return c.val_truncate(cap); });
    };
    return {branch(sol.L.plus, sol.R_plus, sol.S_plus),
            branch(sol.L.minus, sol.R_minus, sol.S_minus)};
}

std::vector<TOp> sensitivity_expand(const Op& L0, const Op& V, int p, const Config& cfg) {
    if (p < 0) throw param_error("negative expansion order");
    if (!V.is_zero() && V.ord_max() > -1)
        throw shape_error("perturbation direction must be an integral operator");
    Config ecfg = cfg;
    ecfg.eps_order = p;
    TOp L0e = lift(L0, ecfg) + lift(V, ecfg).mapped([](const TimePoly& c) { return c.times_eps(); });
    Solution sol = kp_solve_t(L0e, ecfg);
    std::vector<TOp> slices;
    for (int d = 0; d <= p; ++d) slices.push_back(eps_slice(sol.L, d));
    return slices;
}

} // namespace fclkp::kp
