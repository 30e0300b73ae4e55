#include "fclkp/fourier.hpp"

#include <ostream>
#include <sstream>

namespace fclkp {

void FourierPoly::enforce_cap() {
    if (!cap_) return;
    for (auto it = modes_.begin(); it != modes_.end();) {
        long m = it->first;
        if (m > *cap_ || m < -*cap_) {
            it = modes_.erase(it);
            capped_ = true;
        } else {
            ++it;
        }
    }
}

// Result cap = tightest of the operand caps; taint is inherited.
void FourierPoly::merge_policy(FourierPoly& out, const FourierPoly& a, const FourierPoly& b) {
    if (a.cap_ && b.cap_)
        out.cap_ = std::min(*a.cap_, *b.cap_);
    else
        out.cap_ = a.cap_ ? a.cap_ : b.cap_;
    out.capped_ = a.capped_ || b.capped_;
    out.enforce_cap();
}

FourierPoly FourierPoly::with_cap(std::optional<long> cap) const {
    FourierPoly r = *this;
    r.cap_ = cap;
    r.enforce_cap();
    return r;
}

FourierPoly FourierPoly::operator-() const {
    FourierPoly r = *this;
    for (auto& [m, c] : r.modes_) c = -c;
    return r;
}

FourierPoly& FourierPoly::operator+=(const FourierPoly& o) {
    for (const auto& [m, c] : o.modes_) set(m, coeff(m) + c);
    FourierPoly tmp;
    merge_policy(tmp, *this, o);
    cap_ = tmp.cap_;
    capped_ = capped_ || o.capped_;
    enforce_cap();
    return *this;
}

FourierPoly& FourierPoly::operator-=(const FourierPoly& o) {
    for (const auto& [m, c] : o.modes_) set(m, coeff(m) - c);
    FourierPoly tmp;
    merge_policy(tmp, *this, o);
    cap_ = tmp.cap_;
    capped_ = capped_ || o.capped_;
    enforce_cap();
    return *this;
}

FourierPoly operator*(const FourierPoly& a, const FourierPoly& b) {
    FourierPoly r;
    for (const auto& [ma, ca] : a.modes_)
        for (const auto& [mb, cb] : b.modes_) r.set(ma + mb, r.coeff(ma + mb) + ca * cb);
    FourierPoly::merge_policy(r, a, b);
    return r;
}

FourierPoly FourierPoly::scaled(const GaussRational& s) const {
    FourierPoly r;
    r.cap_ = cap_;
    r.capped_ = capped_;
    if (s.is_zero()) return r;
    for (const auto& [m, c] : modes_) r.modes_[m] = c * s;
    return r;
}

FourierPoly FourierPoly::derivative() const {
    FourierPoly r;
    r.cap_ = cap_;
    r.capped_ = capped_;
    for (const auto& [m, c] : modes_)
        if (m != 0) r.modes_[m] = c * GaussRational(Rational(0), Rational(m));
    return r;
}

std::pair<FourierPoly, GaussRational> FourierPoly::antiderivative() const {
    FourierPoly g;
    g.cap_ = cap_;
    g.capped_ = capped_;
    GaussRational mean(0);
    for (const auto& [m, c] : modes_) {
        if (m == 0)
            mean = c;
        else
            g.modes_[m] = c / GaussRational(Rational(0), Rational(m));
    }
    return {std::move(g), std::move(mean)};
}

std::string FourierPoly::str() const {
    if (modes_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : modes_) {
        if (!first) os << " + ";
        first = false;
        if (m == 0) {
            os << "(" << c << ")";
        } else {
            os << "(" << c << ")e^{" << m << "ix}";
        }
    }
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const FourierPoly& f) { return os << f.str(); }

FourierMatrix FourierMatrix::identity(int n) {
    FourierMatrix r(n);
    for (int i = 0; i < n; ++i) r.at(i, i) = FourierPoly(GaussRational(1));
    return r;
}

FourierMatrix FourierMatrix::scalar(int n, const GaussRational& c) {
    FourierMatrix r(n);
    for (int i = 0; i < n; ++i) r.at(i, i) = FourierPoly(c);
    return r;
}

FourierMatrix FourierMatrix::of(FourierPoly f) {
    FourierMatrix r(1);
    r.at(0, 0) = std::move(f);
    return r;
}

const FourierPoly& FourierMatrix::only() const {
    if (n_ != 1) throw dim_error("only() called on a matrix of dimension " + std::to_string(n_));
    return e_[0];
}

bool FourierMatrix::is_zero() const {
    for (const auto& f : e_)
        if (!f.is_zero()) return false;
    return true;
}

bool FourierMatrix::is_x_constant() const {
    for (const auto& f : e_)
        if (!f.is_constant()) return false;
    return true;
}

bool FourierMatrix::is_identity() const { return *this == identity(n_); }

FourierMatrix FourierMatrix::operator-() const {
    FourierMatrix r(n_);
    for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = -e_[k];
    return r;
}

FourierMatrix& FourierMatrix::operator+=(const FourierMatrix& o) {
    if (!compatible(o)) throw dim_error("matrix dimension mismatch");
    for (size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
    return *this;
}

FourierMatrix& FourierMatrix::operator-=(const FourierMatrix& o) {
    if (!compatible(o)) throw dim_error("matrix dimension mismatch");
    for (size_t k = 0; k < e_.size(); ++k) e_[k] -= o.e_[k];
    return *this;
}

FourierMatrix operator*(const FourierMatrix& a, const FourierMatrix& b) {
    if (!a.compatible(b)) throw dim_error("matrix dimension mismatch");
    int n = a.n_;
    FourierMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            FourierPoly acc;
            for (int k = 0; k < n; ++k) acc += a.at(i, k) * b.at(k, j);
            r.at(i, j) = std::move(acc);
        }
    return r;
}

FourierMatrix FourierMatrix::scaled(const GaussRational& s) const {
    FourierMatrix r(n_);
    for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k].scaled(s);
    return r;
}

FourierMatrix FourierMatrix::scaled(const FourierPoly& s) const {
    FourierMatrix r(n_);
    for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] * s;
    return r;
}

FourierMatrix FourierMatrix::derivative() const {
    FourierMatrix r(n_);
    for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k].derivative();
    return r;
}

std::pair<FourierMatrix, FourierMatrix> FourierMatrix::antiderivative() const {
    FourierMatrix g(n_), c(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            auto [gf, m] = at(i, j).antiderivative();
            g.at(i, j) = std::move(gf);
            c.at(i, j) = FourierPoly(m);
        }
    return {std::move(g), std::move(c)};
}

FourierMatrix FourierMatrix::mean_part() const {
    FourierMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r.at(i, j) = FourierPoly(at(i, j).mean());
    return r;
}

FourierPoly FourierMatrix::mat_trace() const {
    FourierPoly t;
    for (int i = 0; i < n_; ++i) t += at(i, i);
    return t;
}

bool FourierMatrix::commutes_with(const FourierMatrix& o) const {
    return (*this * o) == (o * *this);
}

FourierMatrix FourierMatrix::const_inverse() const {
    if (!is_x_constant()) throw not_invertible_error("matrix is not constant in x");
    int n = n_;
    // Gauss-Jordan over Q(i).
    std::vector<GaussRational> a(static_cast<size_t>(n) * n), inv(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a[static_cast<size_t>(i) * n + j] = at(i, j).mean();
            inv[static_cast<size_t>(i) * n + j] = GaussRational(i == j ? 1 : 0);
        }
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!a[static_cast<size_t>(r) * n + col].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw not_invertible_error("singular constant matrix");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a[static_cast<size_t>(piv) * n + j], a[static_cast<size_t>(col) * n + j]);
                std::swap(inv[static_cast<size_t>(piv) * n + j],
                          inv[static_cast<size_t>(col) * n + j]);
            }
        GaussRational d = a[static_cast<size_t>(col) * n + col].inverse();
        for (int j = 0; j < n; ++j) {
            a[static_cast<size_t>(col) * n + j] *= d;
            inv[static_cast<size_t>(col) * n + j] *= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            GaussRational f = a[static_cast<size_t>(r) * n + col];
            if (f.is_zero()) continue;
            for (int j = 0; j < n; ++j) {
                a[static_cast<size_t>(r) * n + j] -= f * a[static_cast<size_t>(col) * n + j];
                inv[static_cast<size_t>(r) * n + j] -= f * inv[static_cast<size_t>(col) * n + j];
            }
        }
    }
    FourierMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.at(i, j) = FourierPoly(inv[static_cast<size_t>(i) * n + j]);
    return r;
}

FourierMatrix FourierMatrix::with_cap(std::optional<long> cap) const {
    FourierMatrix r(n_);
    for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k].with_cap(cap);
    return r;
}

bool FourierMatrix::capped() const {
    for (const auto& f : e_)
        if (f.capped()) return true;
    return false;
}

std::string FourierMatrix::str() const {
    std::ostringstream os;
    if (n_ == 1) return e_[0].str();
    os << "[";
    for (int i = 0; i < n_; ++i) {
        if (i) os << "; ";
        for (int j = 0; j < n_; ++j) {
            if (j) os << ", ";
            os << at(i, j).str();
        }
    }
    os << "]";
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const FourierMatrix& m) { return os << m.str(); }

} // namespace fclkp
