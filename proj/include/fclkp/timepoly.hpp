#pragma once

#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fclkp/fourier.hpp"

namespace fclkp {

/// Monomial in the time variables t_1..t_N and one formal perturbation
/// parameter eps. Valuation: val(t_k) = k; eps carries no valuation.
struct TimeMono {
    std::vector<int> e; // exponent of t_{i+1} at index i
    int eps = 0;

    long val() const {
        long v = 0;
        for (size_t i = 0; i < e.size(); ++i) v += static_cast<long>(i + 1) * e[i];
        return v;
    }
    bool is_unit() const {
        if (eps != 0) return false;
        for (int x : e)
            if (x != 0) return false;
        return true;
    }
    friend bool operator<(const TimeMono& a, const TimeMono& b) {
        if (a.eps != b.eps) return a.eps < b.eps;
        return a.e < b.e;
    }
    friend bool operator==(const TimeMono& a, const TimeMono& b) {
        return a.eps == b.eps && a.e == b.e;
    }
    std::string str() const;
};

/// Matrix-valued polynomial in the times, truncated at t-valuation <= wcap
/// and eps-degree <= eps_cap. Truncation is a graded quotient, so ring
/// operations are exact on the retained grades. This is the coefficient ring
/// of every time-dependent operator.
class TimePoly {
public:
    TimePoly() : n_(0), n_times_(0), wcap_(0), eps_cap_(0) {}
    TimePoly(int n, int n_times, long wcap, int eps_cap)
        : n_(n), n_times_(n_times), wcap_(wcap), eps_cap_(eps_cap) {}

    static TimePoly constant(FourierMatrix m, int n_times, long wcap, int eps_cap) {
        TimePoly r(m.rows(), n_times, wcap, eps_cap);
        if (!m.is_zero()) r.terms_[r.unit_mono()] = std::move(m);
        return r;
    }

    static TimePoly term(const TimeMono& mono, FourierMatrix m, int n_times, long wcap,
                         int eps_cap) {
        TimePoly r(m.rows(), n_times, wcap, eps_cap);
        if (static_cast<int>(mono.e.size()) != n_times) throw param_error("bad time exponents");
        if (!m.is_zero() && mono.val() <= wcap && mono.eps <= eps_cap)
            r.terms_[mono] = std::move(m);
        return r;
    }

    int rows() const { return n_; }
    int n_times() const { return n_times_; }
    long wcap() const { return wcap_; }
    int eps_cap() const { return eps_cap_; }
    const std::map<TimeMono, FourierMatrix>& terms() const { return terms_; }

    bool compatible(const TimePoly& o) const {
        return n_ == o.n_ && n_times_ == o.n_times_ && wcap_ == o.wcap_ && eps_cap_ == o.eps_cap_;
    }

    TimePoly zero_like() const { return TimePoly(n_, n_times_, wcap_, eps_cap_); }
    TimePoly one_like() const {
        return constant(FourierMatrix::identity(n_), n_times_, wcap_, eps_cap_);
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_identity() const {
        return terms_.size() == 1 && terms_.begin()->first.is_unit() &&
               terms_.begin()->second.is_identity();
    }
    bool is_x_constant() const {
        for (const auto& [m, c] : terms_)
            if (!c.is_x_constant()) return false;
        return true;
    }

    FourierMatrix coeff(const TimeMono& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? FourierMatrix::zero(n_) : it->second;
    }

    TimePoly operator-() const {
        TimePoly r = *this;
        for (auto& [m, c] : r.terms_) c = -c;
        return r;
    }
    TimePoly& operator+=(const TimePoly& o) {
        require_compatible(o);
        for (const auto& [m, c] : o.terms_) acc(m, c);
        return *this;
    }
    TimePoly& operator-=(const TimePoly& o) {
        require_compatible(o);
        for (const auto& [m, c] : o.terms_) acc(m, -c);
        return *this;
    }
    friend TimePoly operator+(TimePoly a, const TimePoly& b) { return a += b; }
    friend TimePoly operator-(TimePoly a, const TimePoly& b) { return a -= b; }
    friend TimePoly operator*(const TimePoly& a, const TimePoly& b) {
        a.require_compatible(b);
        TimePoly r = a.zero_like();
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                TimeMono m = mul_mono(ma, mb);
                if (m.val() > r.wcap_ || m.eps > r.eps_cap_) continue;
                r.acc(m, ca * cb);
            }
        return r;
    }

    TimePoly scaled(const GaussRational& s) const {
        TimePoly r = zero_like();
        if (s.is_zero()) return r;
        for (const auto& [m, c] : terms_) r.terms_[m] = c.scaled(s);
        return r;
    }

    TimePoly derivative() const { // d/dx, entrywise
        TimePoly r = zero_like();
        for (const auto& [m, c] : terms_) r.acc(m, c.derivative());
        return r;
    }

    /// mean(tr(.)) per monomial; the result has matrix dimension 1.
    TimePoly trace_mean() const {
        TimePoly r(1, n_times_, wcap_, eps_cap_);
        for (const auto& [m, c] : terms_)
            r.acc(m, FourierMatrix::of(FourierPoly(c.trace_mean())));
        return r;
    }

    bool commutes_with(const TimePoly& o) const { return (*this * o) == (o * *this); }

    /// Formal d/dt_k (1-based). Exact on t-valuation <= wcap - k.
    TimePoly dt(int k) const;
    /// Multiply by t_k (1-based); monomials leaving the valuation cap drop.
    TimePoly times_t(int k) const;
    /// Multiply by eps.
    TimePoly times_eps() const;
    /// Keep only monomials of t-valuation exactly w.
    TimePoly val_slice(long w) const;
    /// Keep only monomials of t-valuation <= w.
    TimePoly val_truncate(long w) const;
    /// Minimal t-valuation among stored monomials (wcap+1 when zero).
    long min_val() const;
    /// Coefficient of eps^d as a value in the eps-free ring.
    TimePoly eps_slice(int d) const;
    /// Apply (monomial, matrix) -> matrix to every stored term.
    template <class F>
    TimePoly map_terms(F f) const {
        TimePoly r = zero_like();
        for (const auto& [m, c] : terms_) r.acc(m, f(m, c));
        return r;
    }
    int eps_degree() const;
    /// Evaluate at t = 0, eps = 0.
    FourierMatrix at_zero() const { return coeff(unit_mono()); }

    friend bool operator==(const TimePoly& a, const TimePoly& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const TimePoly& a, const TimePoly& b) { return !(a == b); }

    std::string str() const;

    void require_compatible(const TimePoly& o) const {
        if (!compatible(o)) throw dim_error("time-polynomial context mismatch");
    }

private:
    TimeMono unit_mono() const {
        TimeMono m;
        m.e.assign(static_cast<size_t>(n_times_), 0);
        return m;
    }
    static TimeMono mul_mono(const TimeMono& a, const TimeMono& b) {
        TimeMono m = a;
        for (size_t i = 0; i < m.e.size(); ++i) m.e[i] += b.e[i];
        m.eps += b.eps;
        return m;
    }
    void acc(const TimeMono& m, FourierMatrix c) {
        if (c.is_zero()) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_[m] = std::move(c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    int n_;
    int n_times_;
    long wcap_;
    int eps_cap_;
    std::map<TimeMono, FourierMatrix> terms_;
};

} // namespace fclkp
