#include "fclkp/timepoly.hpp"

#include <sstream>

namespace fclkp {

std::string TimeMono::str() const {
    std::ostringstream os;
    bool any = false;
    for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        any = true;
        os << "t" << (i + 1);
        if (e[i] > 1) os << "^" << e[i];
    }
    if (eps > 0) {
        any = true;
        os << "eps";
        if (eps > 1) os << "^" << eps;
    }
    if (!any) os << "1";
    return os.str();
}

TimePoly TimePoly::dt(int k) const {
    if (k < 1 || k > n_times_) throw param_error("time index out of range");
    TimePoly r = zero_like();
    for (const auto& [m, c] : terms_) {
        int ek = m.e[static_cast<size_t>(k - 1)];
        if (ek == 0) continue;
        TimeMono d = m;
        d.e[static_cast<size_t>(k - 1)] -= 1;
        r.acc(d, c.scaled(GaussRational(ek)));
    }
    return r;
}

TimePoly TimePoly::times_t(int k) const {
    if (k < 1 || k > n_times_) throw param_error("time index out of range");
    TimePoly r = zero_like();
    for (const auto& [m, c] : terms_) {
        TimeMono d = m;
        d.e[static_cast<size_t>(k - 1)] += 1;
        if (d.val() > wcap_) continue;
        r.acc(d, c);
    }
    return r;
}

TimePoly TimePoly::times_eps() const {
    TimePoly r = zero_like();
    for (const auto& [m, c] : terms_) {
        TimeMono d = m;
        d.eps += 1;
        if (d.eps > eps_cap_) continue;
        r.acc(d, c);
    }
    return r;
}

TimePoly TimePoly::val_slice(long w) const {
    TimePoly r = zero_like();
    for (const auto& [m, c] : terms_)
        if (m.val() == w) r.acc(m, c);
    return r;
}

TimePoly TimePoly::val_truncate(long w) const {
    TimePoly r = zero_like();
    for (const auto& [m, c] : terms_)
        if (m.val() <= w) r.acc(m, c);
    return r;
}

long TimePoly::min_val() const {
    long v = wcap_ + 1;
    for (const auto& [m, c] : terms_) v = std::min(v, m.val());
    return v;
}

TimePoly TimePoly::eps_slice(int d) const {
    TimePoly r(n_, n_times_, wcap_, 0);
    for (const auto& [m, c] : terms_) {
        if (m.eps != d) continue;
        TimeMono s = m;
        s.eps = 0;
        r.acc(s, c);
    }
    return r;
}

int TimePoly::eps_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.eps);
    return d;
}

std::string TimePoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << m.str() << "*(" << c.str() << ")";
    }
    return os.str();
}

} // namespace fclkp
