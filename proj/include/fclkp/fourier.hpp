#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fclkp/rational.hpp"

namespace fclkp {

/// Trigonometric polynomial sum_m c_m e^{imx} with Gaussian-rational
/// coefficients. Only finitely many modes, zero coefficients are never
/// stored. An optional bandwidth cap discards modes with |m| > cap and
/// taints the value (and everything computed from it) with `capped`.
class FourierPoly {
public:
    FourierPoly() = default;
    explicit FourierPoly(GaussRational constant) {
        if (!constant.is_zero()) modes_[0] = std::move(constant);
    }

    static FourierPoly mode(long m, GaussRational c = GaussRational(1)) {
        FourierPoly f;
        if (!c.is_zero()) f.modes_[m] = std::move(c);
        return f;
    }

    const std::map<long, GaussRational>& modes() const { return modes_; }
    GaussRational coeff(long m) const {
        auto it = modes_.find(m);
        return it == modes_.end() ? GaussRational(0) : it->second;
    }

    bool is_zero() const { return modes_.empty(); }
    /// True when d/dx annihilates the value (only the zero mode present).
    bool is_constant() const {
        return modes_.empty() || (modes_.size() == 1 && modes_.begin()->first == 0);
    }

    std::optional<long> bandwidth_cap() const { return cap_; }
    bool capped() const { return capped_; }
    FourierPoly with_cap(std::optional<long> cap) const;

    FourierPoly operator-() const;
    FourierPoly& operator+=(const FourierPoly& o);
    FourierPoly& operator-=(const FourierPoly& o);
    friend FourierPoly operator+(FourierPoly a, const FourierPoly& b) { return a += b; }
    friend FourierPoly operator-(FourierPoly a, const FourierPoly& b) { return a -= b; }
    friend FourierPoly operator*(const FourierPoly& a, const FourierPoly& b);

    FourierPoly scaled(const GaussRational& s) const;

    /// d/dx: e^{imx} -> im e^{imx}.
    FourierPoly derivative() const;
    /// Primitive with zero mean plus the mean obstruction:
    /// f = (.first)' + .second with .second constant.
    std::pair<FourierPoly, GaussRational> antiderivative() const;
    GaussRational mean() const { return coeff(0); }

    friend bool operator==(const FourierPoly& a, const FourierPoly& b) {
        return a.modes_ == b.modes_;
    }
    friend bool operator!=(const FourierPoly& a, const FourierPoly& b) { return !(a == b); }

    std::string str() const;

private:
    void set(long m, GaussRational c) {
        if (c.is_zero())
            modes_.erase(m);
        else
            modes_[m] = std::move(c);
    }
    void enforce_cap();
    static void merge_policy(FourierPoly& out, const FourierPoly& a, const FourierPoly& b);

    std::map<long, GaussRational> modes_;
    std::optional<long> cap_;
    bool capped_ = false;
};

std::ostream& operator<<(std::ostream& os, const FourierPoly& f);

/// Square matrix of trigonometric polynomials: the coefficient ring of all
/// operator symbols in the library.
class FourierMatrix {
public:
    FourierMatrix() : n_(0) {}
    explicit FourierMatrix(int n) : n_(n), e_(static_cast<size_t>(n) * n) {}

    static FourierMatrix identity(int n);
    static FourierMatrix zero(int n) { return FourierMatrix(n); }
    static FourierMatrix scalar(int n, const GaussRational& c);
    /// n = 1 wrapper around a single polynomial.
    static FourierMatrix of(FourierPoly f);

    int rows() const { return n_; }
    bool compatible(const FourierMatrix& o) const { return n_ == o.n_; }

    FourierPoly& at(int i, int j) { return e_[static_cast<size_t>(i) * n_ + j]; }
    const FourierPoly& at(int i, int j) const { return e_[static_cast<size_t>(i) * n_ + j]; }
    /// The unique entry of a 1x1 matrix.
    const FourierPoly& only() const;

    FourierMatrix zero_like() const { return FourierMatrix(n_); }
    FourierMatrix one_like() const { return identity(n_); }

    bool is_zero() const;
    bool is_x_constant() const; // every entry constant in x
    bool is_identity() const;

    FourierMatrix operator-() const;
    FourierMatrix& operator+=(const FourierMatrix& o);
    FourierMatrix& operator-=(const FourierMatrix& o);
    friend FourierMatrix operator+(FourierMatrix a, const FourierMatrix& b) { return a += b; }
    friend FourierMatrix operator-(FourierMatrix a, const FourierMatrix& b) { return a -= b; }
    friend FourierMatrix operator*(const FourierMatrix& a, const FourierMatrix& b);

    FourierMatrix scaled(const GaussRational& s) const;
    FourierMatrix scaled(const FourierPoly& s) const;

    FourierMatrix derivative() const;
    std::pair<FourierMatrix, FourierMatrix> antiderivative() const;
    FourierMatrix mean_part() const;
    FourierPoly mat_trace() const;
    /// mean(tr(.)): the scalar every trace functional is built from.
    GaussRational trace_mean() const { return mat_trace().mean(); }

    bool commutes_with(const FourierMatrix& o) const;

    /// Exact inverse; requires an x-constant matrix. Throws not_invertible_error
    /// when singular or not constant.
    FourierMatrix const_inverse() const;

    FourierMatrix with_cap(std::optional<long> cap) const;
    bool capped() const;

    friend bool operator==(const FourierMatrix& a, const FourierMatrix& b) {
        return a.n_ == b.n_ && a.e_ == b.e_;
    }
    friend bool operator!=(const FourierMatrix& a, const FourierMatrix& b) { return !(a == b); }

    std::string str() const;

private:
    int n_;
    std::vector<FourierPoly> e_;
};

std::ostream& operator<<(std::ostream& os, const FourierMatrix& m);

} // namespace fclkp
