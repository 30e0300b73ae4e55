#include "fclkp/hamiltonian.hpp"

#include <algorithm>
#include <sstream>

namespace fclkp::ham {

DiffPoly DiffPoly::sym(int n, int k, int var, int der, int row, int col) {
    if (var < 1 || var > k) throw param_error("variable index out of range");
    if (row < 0 || row >= n || col < 0 || col >= n) throw param_error("entry index out of range");
    DiffPoly r(n, k);
    r.terms_[{DiffSym{var, der, row, col}}] = FourierPoly(GaussRational(1));
    return r;
}

void DiffPoly::acc(const std::vector<DiffSym>& m, const FourierPoly& f) {
    if (f.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_[m] = f;
    } else {
        it->second += f;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

DiffPoly DiffPoly::operator-() const {
    DiffPoly r(n_, k_);
    for (const auto& [m, f] : terms_) r.terms_[m] = -f;
    return r;
}

DiffPoly operator+(const DiffPoly& a, const DiffPoly& b) {
    if (a.n_ != b.n_ || a.k_ != b.k_) throw dim_error("differential polynomial shape mismatch");
    DiffPoly r = a;
    for (const auto& [m, f] : b.terms_) r.acc(m, f);
    return r;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    if (a.n_ != b.n_ || a.k_ != b.k_) throw dim_error("differential polynomial shape mismatch");
    DiffPoly r(a.n_, a.k_);
    for (const auto& [ma, fa] : a.terms_)
        for (const auto& [mb, fb] : b.terms_) {
            std::vector<DiffSym> m = ma;
            m.insert(m.end(), mb.begin(), mb.end());
            std::sort(m.begin(), m.end());
            r.acc(m, fa * fb);
        }
    return r;
}

DiffPoly DiffPoly::scaled(const GaussRational& s) const {
    DiffPoly r(n_, k_);
    if (s.is_zero()) return r;
    for (const auto& [m, f] : terms_) r.terms_[m] = f.scaled(s);
    return r;
}

DiffPoly DiffPoly::x_derivative() const {
    DiffPoly r(n_, k_);
    for (const auto& [m, f] : terms_) {
        r.acc(m, f.derivative());
        // Bump each distinct symbol once, weighted by its multiplicity.
        for (size_t i = 0; i < m.size(); ++i) {
            if (i > 0 && m[i] == m[i - 1]) continue;
            size_t count = 1;
            while (i + count < m.size() && m[i + count] == m[i]) ++count;
            std::vector<DiffSym> bumped = m;
            bumped[i].der += 1;
            std::sort(bumped.begin(), bumped.end());
            r.acc(bumped, f.scaled(GaussRational(static_cast<long>(count))));
        }
    }
    return r;
}

DiffPoly DiffPoly::partial(const DiffSym& s) const {
    DiffPoly r(n_, k_);
    for (const auto& [m, f] : terms_) {
        auto lo = std::lower_bound(m.begin(), m.end(), s);
        if (lo == m.end() || !(*lo == s)) continue;
        size_t count = 0;
        for (auto it = lo; it != m.end() && *it == s; ++it) ++count;
        std::vector<DiffSym> reduced = m;
        reduced.erase(std::lower_bound(reduced.begin(), reduced.end(), s));
        r.acc(reduced, f.scaled(GaussRational(static_cast<long>(count))));
    }
    return r;
}

int DiffPoly::max_der(int var) const {
    int d = -1;
    for (const auto& [m, f] : terms_)
        for (const auto& s : m)
            if (s.var == var) d = std::max(d, s.der);
    return d;
}

std::string DiffPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, f] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << f.str() << ")";
        for (const auto& s : m)
            os << " u" << s.var << "^(" << s.der << ")[" << s.row << "," << s.col << "]";
    }
    return os.str();
}

Op LaxPoint::to_psido() const {
    FourierMatrix proto = FourierMatrix::zero(n());
    Op r = Op::delta_pow(proto, order);
    for (int j = 1; j <= static_cast<int>(u.size()); ++j)
        r = r + Op::monomial(u[static_cast<size_t>(j - 1)], order - j);
    return r;
}

Op Covector::to_psido() const {
    if (p.empty()) throw shape_error("empty covector");
    FourierMatrix proto = FourierMatrix::zero(p[0].rows());
    Op r(proto);
    for (int j = 1; j <= k(); ++j)
        r = r + compose(Op::delta_pow(proto, -j),
                        Op::monomial(p[static_cast<size_t>(j - 1)], 0));
    return r;
}

FourierPoly evaluate(const DiffPoly& l, const LaxPoint& L) {
    if (l.n() != L.n() || l.k() > L.order) throw dim_error("point does not match the polynomial");
    // Derivative chains of the point coefficients, built on demand.
    std::vector<std::vector<FourierMatrix>> chains(L.u.size());
    auto entry = [&](const DiffSym& s) -> FourierPoly {
        auto& chain = chains[static_cast<size_t>(s.var - 1)];
        if (chain.empty()) chain.push_back(L.u[static_cast<size_t>(s.var - 1)]);
        while (static_cast<int>(chain.size()) <= s.der) chain.push_back(chain.back().derivative());
        return chain[static_cast<size_t>(s.der)].at(s.row, s.col);
    };
    FourierPoly out;
    for (const auto& [m, f] : l.terms()) {
        FourierPoly term = f;
        for (const auto& s : m) term = term * entry(s);
        out += term;
    }
    return out;
}

GaussRational functional_value(const DiffPoly& l, const LaxPoint& L) {
    return evaluate(l, L).mean();
}

std::vector<std::vector<DiffPoly>> variational_derivative(const DiffPoly& l, int j) {
    if (j < 1 || j > l.k()) throw param_error("variable index out of range");
    int n = l.n();
    std::vector<std::vector<DiffPoly>> out(static_cast<size_t>(n),
                                           std::vector<DiffPoly>(static_cast<size_t>(n),
                                                                 DiffPoly(n, l.k())));
    int smax = l.max_der(j);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            DiffPoly acc(n, l.k());
            for (int s = 0; s <= smax; ++s) {
                DiffPoly d = l.partial(DiffSym{j, s, q, p});
                for (int t = 0; t < s; ++t) d = d.x_derivative();
                acc = (s % 2 == 0) ? acc + d : acc - d;
            }
            out[static_cast<size_t>(p)][static_cast<size_t>(q)] = std::move(acc);
        }
    return out;
}

Covector functional_to_covector(const DiffPoly& l, const LaxPoint& L) {
    int k = L.order;
    Covector X;
    for (int r = 1; r <= k; ++r) {
        int var = k + 1 - r;
        FourierMatrix pr(L.n());
        if (var <= l.k()) {
            auto vd = variational_derivative(l, var);
            for (int p = 0; p < L.n(); ++p)
                for (int q = 0; q < L.n(); ++q)
                    pr.at(p, q) = evaluate(vd[static_cast<size_t>(p)][static_cast<size_t>(q)], L);
        }
        X.p.push_back(std::move(pr));
    }
    return X;
}

Op h1(const LaxPoint& L, const Covector& X) {
    return diff_part(bracket(L.to_psido(), X.to_psido()));
}

Op h2(const LaxPoint& L, const Covector& X) {
    Op Lop = L.to_psido(), Xop = X.to_psido();
    return compose(diff_part(compose(Lop, Xop)), Lop) -
           compose(Lop, diff_part(compose(Xop, Lop)));
}

Op h_lambda(const LaxPoint& L, const Covector& X, const GaussRational& lambda) {
    return h2(L, X) + h1(L, X).scaled(lambda);
}

GaussRational gd_bracket(const DiffPoly& l1, const DiffPoly& l2, const GaussRational& lambda,
                         const LaxPoint& L) {
    Op Lop = L.to_psido();
    Op X1 = functional_to_covector(l1, L).to_psido();
    Op X2 = functional_to_covector(l2, L).to_psido();
    GaussRational quad =
        adler_trace(compose(compose(diff_part(compose(Lop, X1)), Lop), X2)) -
        adler_trace(compose(compose(Lop, diff_part(compose(X1, Lop))), X2));
    GaussRational lin = adler_trace(compose(diff_part(bracket(Lop, X1)), X2));
    return quad + lambda * lin;
}

GaussRational directional_derivative(const DiffPoly& l, const LaxPoint& L, const Op& V) {
    if (!V.is_zero() && V.ord_max() > L.order - 1)
        throw shape_error("direction is not tangent to the variety");
    GaussRational out(0);
    for (int var = 1; var <= l.k(); ++var) {
        int smax = l.max_der(var);
        FourierMatrix dir = V.is_zero() ? FourierMatrix::zero(L.n()) : V.at(L.order - var);
        for (int s = 0; s <= smax; ++s) {
            FourierMatrix ds = dir;
            for (int t = 0; t < s; ++t) ds = ds.derivative();
            for (int p = 0; p < L.n(); ++p)
                for (int q = 0; q < L.n(); ++q) {
                    DiffPoly pd = l.partial(DiffSym{var, s, p, q});
                    if (pd.is_zero()) continue;
                    out += (evaluate(pd, L) * ds.at(p, q)).mean();
                }
        }
    }
    return out;
}

Covector covector_from_io(const Op& B, int k) {
    Op residual = int_part(B);
    FourierMatrix proto = FourierMatrix::zero(B.proto().rows());
    Covector X;
    for (int j = 1; j <= k; ++j) {
        FourierMatrix pj = residual.at(-j);
        X.p.push_back(pj);
        residual = residual - compose(Op::delta_pow(proto, -j), Op::monomial(pj, 0));
    }
    return X;
}

Covector gd2_covector_bracket(const Covector& X, const Covector& Y, const LaxPoint& L) {
    if (X.k() != L.order || Y.k() != L.order) throw shape_error("covector order mismatch");
    Op Lop = L.to_psido();
    Op Xo = X.to_psido(), Yo = Y.to_psido();
    Op e = compose(diff_part(compose(Xo, Lop)), Yo) + compose(int_part(compose(Yo, Lop)), Xo) -
           compose(Xo, int_part(compose(Lop, Yo))) - compose(Yo, diff_part(compose(Lop, Xo))) +
           compose(h2(L, X), Yo) - compose(h2(L, Y), Xo);
    return covector_from_io(e, L.order);
}

GradedPair<FourierMatrix> complex_ham_field(const GradedPair<FourierMatrix>& L, long k,
                                            const GaussRational& alpha) {
    if (alpha.is_zero()) throw grade_error("grade", "alpha must be nonzero");
    GradedPair<FourierMatrix> R =
        (GaussRational(k) == alpha) ? L : fcl_power(L, GaussRational(k) / alpha);
    auto branch = [&](const GradedOp<FourierMatrix>& rb, const GradedOp<FourierMatrix>& lb) {
        Op xd = diff_part(to_psido(rb));
        return graded_bracket(from_psido(xd, lb.depth()), lb);
    };
    return {branch(R.plus, L.plus), branch(R.minus, L.minus)};
}

} // namespace fclkp::ham
