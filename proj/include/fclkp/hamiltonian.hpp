#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fclkp/cpow.hpp"
#include "fclkp/fcl.hpp"
#include "fclkp/psido.hpp"

namespace fclkp::ham {

using Op = PsiDO<FourierMatrix>;
using FOp = FClOp<FourierMatrix>;

/// One formal symbol (u_var)^(der)_{row,col} of a differential polynomial.
struct DiffSym {
    int var; // 1-based dependent variable index
    int der; // x-derivative order
    int row, col;

    friend bool operator<(const DiffSym& a, const DiffSym& b) {
        if (a.var != b.var) return a.var < b.var;
        if (a.der != b.der) return a.der < b.der;
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    }
    friend bool operator==(const DiffSym& a, const DiffSym& b) {
        return a.var == b.var && a.der == b.der && a.row == b.row && a.col == b.col;
    }
};

/// Scalar differential polynomial in the entries of u_1..u_k and their
/// x-derivatives, with trigonometric-polynomial coefficients. Monomials are
/// sorted symbol lists (the symbols commute).
class DiffPoly {
public:
    DiffPoly() : n_(0), k_(0) {}
    DiffPoly(int n, int k) : n_(n), k_(k) {}

    static DiffPoly constant(int n, int k, FourierPoly f) {
        DiffPoly r(n, k);
        if (!f.is_zero()) r.terms_[{}] = std::move(f);
        return r;
    }
    static DiffPoly sym(int n, int k, int var, int der, int row = 0, int col = 0);

    int n() const { return n_; }
    int k() const { return k_; }
    const std::map<std::vector<DiffSym>, FourierPoly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    DiffPoly operator-() const;
    friend DiffPoly operator+(const DiffPoly& a, const DiffPoly& b);
    friend DiffPoly operator-(const DiffPoly& a, const DiffPoly& b) { return a + (-b); }
    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
    DiffPoly scaled(const GaussRational& s) const;

    /// Total x-derivative (coefficients and symbols, by the Leibniz rule).
    DiffPoly x_derivative() const;
    /// Formal partial derivative with respect to one symbol.
    DiffPoly partial(const DiffSym& s) const;
    /// Largest derivative order of variable `var` appearing anywhere.
    int max_der(int var) const;

    friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const DiffPoly& a, const DiffPoly& b) { return !(a == b); }

    std::string str() const;

private:
    void acc(const std::vector<DiffSym>& m, const FourierPoly& f);

    int n_, k_;
    std::map<std::vector<DiffSym>, FourierPoly> terms_;
};

/// Point of the affine variety of monic differential operators
/// L = d^k + u_1 d^{k-1} + ... + u_k.
struct LaxPoint {
    int order;                     // k
    std::vector<FourierMatrix> u;  // u[j] is u_{j+1}

    int n() const { return u.empty() ? 1 : u[0].rows(); }
    Op to_psido() const;
};

/// Covector representative X = sum_{j=1..k} d^{-j} o p_j of the quotient
/// IO / IO_{-k}.
struct Covector {
    std::vector<FourierMatrix> p; // p[j] is p_{j+1}

    int k() const { return static_cast<int>(p.size()); }
    Op to_psido() const;

    friend bool operator==(const Covector& a, const Covector& b) { return a.p == b.p; }
};

/// Evaluate a differential polynomial at a Lax point.
FourierPoly evaluate(const DiffPoly& l, const LaxPoint& L);

/// The functional value: mean of the evaluated density.
GaussRational functional_value(const DiffPoly& l, const LaxPoint& L);

/// Variational derivative: entry (p,q) is
///   sum_s (-1)^s d^s/dx^s  dl/d(u_j^(s))_{qp}
/// (transposed indices, so that delta of tr(u^2)/2 is u itself).
std::vector<std::vector<DiffPoly>> variational_derivative(const DiffPoly& l, int j);

/// Assemble the covector X_l with p_r = (variational derivative with respect
/// to u_{k+1-r}) evaluated at the point.
Covector functional_to_covector(const DiffPoly& l, const LaxPoint& L);

/// First Hamiltonian map [L, X]_+.
Op h1(const LaxPoint& L, const Covector& X);
/// Second Hamiltonian map (LX)_+ L - L (XL)_+.
Op h2(const LaxPoint& L, const Covector& X);
/// H_lambda = H_2 + lambda H_1.
Op h_lambda(const LaxPoint& L, const Covector& X, const GaussRational& lambda);

/// The lambda-family of brackets, evaluated at L:
///   {l1,l2}_lambda = Tr((L X1)_+ L X2 - L (X1 L)_+ X2) + lambda Tr([L,X1]_+ X2),
/// oriented so that {l1,l2}_lambda = <X2, H_lambda(X1)> holds exactly.
GaussRational gd_bracket(const DiffPoly& l1, const DiffPoly& l2, const GaussRational& lambda,
                         const LaxPoint& L);

/// Directional derivative of the functional l at L along a tangent direction
/// (a differential operator of order <= k-1): the coefficient of eps in
/// l(L + eps V), integrated.
GaussRational directional_derivative(const DiffPoly& l, const LaxPoint& L, const Op& V);

/// The second Gelfand-Dickey bracket on covectors:
/// [(XL)_+ Y + (YL)_- X - X (LY)_- - Y (LX)_+ + H2(X) Y - H2(Y) X]_-,
/// reduced modulo IO_{-k}.
Covector gd2_covector_bracket(const Covector& X, const Covector& Y, const LaxPoint& L);

/// Reduce an integral operator to the canonical right form
/// sum_{j=1..k} d^{-j} o p_j modulo IO_{-k}.
Covector covector_from_io(const Op& B, int k);

/// The Casimir-type flow [(L^k)_D, L].
inline Op casimir_flow(const Op& L, long k) { return bracket(diff_part(power_int(L, k)), L); }
inline FOp casimir_flow(const FOp& L, long k) {
    return {casimir_flow(L.plus, k), casimir_flow(L.minus, k)};
}

/// Hamiltonian vector field of H_k = (alpha/k) res L^{k/alpha} on monic
/// grade-alpha pairs: V = [(L^{k/alpha})_D, L].
GradedPair<FourierMatrix> complex_ham_field(const GradedPair<FourierMatrix>& L, long k,
                                            const GaussRational& alpha);

} // namespace fclkp::ham
