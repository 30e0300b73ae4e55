#include "fclkp/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fclkp::io {

using json = nlohmann::ordered_json;

namespace {

std::string z_str(const mpz_class& z) { return z.get_str(); }

mpz_class z_parse(const json& j) {
    if (!j.is_string()) throw parse_error("integer fields must be decimal strings");
    const std::string s = j.get<std::string>();
    if (s.empty()) throw parse_error("empty integer");
    size_t k = (s[0] == '-') ? 1 : 0;
    if (k == s.size()) throw parse_error("bad integer: " + s);
    for (; k < s.size(); ++k)
        if (!isdigit(static_cast<unsigned char>(s[k]))) throw parse_error("bad integer: " + s);
    return mpz_class(s, 10);
}

Rational rat_parse(const json& num, const json& den) {
    mpz_class n = z_parse(num), d = z_parse(den);
    if (sgn(d) <= 0) throw parse_error("denominator must be positive");
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    if (g != 1 && !(n == 0 && d == 1)) throw parse_error("unnormalized rational");
    if (n == 0 && d != 1) throw parse_error("unnormalized rational");
    return Rational(n, d);
}

json gauss_quad(const GaussRational& v) {
    return json::array({z_str(v.re().get_num()), z_str(v.re().get_den()),
                        z_str(v.im().get_num()), z_str(v.im().get_den())});
}

GaussRational gauss_unquad(const json& j) {
    if (!j.is_array() || j.size() != 4) throw parse_error("expected a rational quadruple");
    return {rat_parse(j[0], j[1]), rat_parse(j[2], j[3])};
}

json matrix_to_json(const FourierMatrix& m) {
    json out = json::array();
    int n = m.rows();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (const auto& [mode, c] : m.at(i, j).modes()) {
                json row = json::array();
                if (n > 1) {
                    row.push_back(i);
                    row.push_back(j);
                }
                row.push_back(mode);
                row.push_back(z_str(c.re().get_num()));
                row.push_back(z_str(c.re().get_den()));
                row.push_back(z_str(c.im().get_num()));
                row.push_back(z_str(c.im().get_den()));
                out.push_back(std::move(row));
            }
    return out;
}

FourierMatrix matrix_from_json(const json& j, int n) {
    FourierMatrix m(n);
    if (!j.is_array()) throw parse_error("coefficient list must be an array");
    for (const auto& row : j) {
        if (!row.is_array() || (row.size() != 5 && row.size() != 7))
            throw parse_error("coefficient entries must be 5- or 7-tuples");
        size_t base = 0;
        int i = 0, jj = 0;
        if (row.size() == 7) {
            i = row[0].get<int>();
            jj = row[1].get<int>();
            base = 2;
            if (i < 0 || i >= n || jj < 0 || jj >= n) throw parse_error("entry index out of range");
        } else if (n != 1) {
            throw parse_error("matrix entries need i,j indices when n > 1");
        }
        long mode = row[base].get<long>();
        GaussRational c(rat_parse(row[base + 1], row[base + 2]),
                        rat_parse(row[base + 3], row[base + 4]));
        if (c.is_zero()) throw parse_error("explicit zero coefficient");
        if (!m.at(i, jj).coeff(mode).is_zero()) throw parse_error("duplicate mode");
        m.at(i, jj) += FourierPoly::mode(mode, c);
    }
    return m;
}

json psido_to_json(const kp::Op& p) {
    json out;
    if (!p.entire()) out["watermark"] = p.wm();
    json orders = json::array();
    for (const auto& [k, a] : p.coeffs()) {
        json o;
        o["k"] = k;
        o["c"] = matrix_to_json(a);
        orders.push_back(std::move(o));
    }
    out["orders"] = std::move(orders);
    return out;
}

kp::Op psido_from_json(const json& j, int n) {
    kp::Op p(FourierMatrix::zero(n));
    if (j.contains("watermark")) p.set_wm(j.at("watermark").get<long>());
    for (const auto& o : j.at("orders")) {
        long k = o.at("k").get<long>();
        if (wm_finite(p.wm()) && k < p.wm()) throw parse_error("coefficient below the watermark");
        FourierMatrix m = matrix_from_json(o.at("c"), n);
        if (m.is_zero()) throw parse_error("stored zero coefficient");
        p.acc(k, m);
    }
    return p;
}

json graded_to_json(const GradedOp<FourierMatrix>& g) {
    json out;
    out["grade"] = gauss_quad(g.grade());
    out["depth"] = g.depth();
    json tail = json::array();
    for (long j = 0; j <= g.depth(); ++j) tail.push_back(matrix_to_json(g.slot(j)));
    // Trailing zero slots are dropped for a stable canonical form.
    while (!tail.empty() && tail.back().empty()) tail.erase(tail.end() - 1);
    out["tail"] = std::move(tail);
    return out;
}

GradedOp<FourierMatrix> graded_from_json(const json& j, int n) {
    GaussRational grade = gauss_unquad(j.at("grade"));
    long depth = j.at("depth").get<long>();
    std::vector<FourierMatrix> tail;
    for (const auto& slot : j.at("tail")) tail.push_back(matrix_from_json(slot, n));
    if (static_cast<long>(tail.size()) > depth + 1) throw parse_error("tail longer than depth");
    return {FourierMatrix::zero(n), grade, std::move(tail), depth};
}

json timepoly_to_json(const TimePoly& c) {
    json terms = json::array();
    for (const auto& [m, v] : c.terms()) {
        json t;
        t["t"] = m.e;
        if (m.eps) t["eps"] = m.eps;
        t["c"] = matrix_to_json(v);
        terms.push_back(std::move(t));
    }
    return terms;
}

json top_to_json(const kp::TOp& p) {
    json out;
    if (!p.entire()) out["watermark"] = p.wm();
    json orders = json::array();
    for (const auto& [k, a] : p.coeffs()) {
        json o;
        o["k"] = k;
        o["terms"] = timepoly_to_json(a);
        orders.push_back(std::move(o));
    }
    out["orders"] = std::move(orders);
    return out;
}

json doc_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what());
    }
    return j;
}

void doc_write(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open " + path + " for writing");
    out << j.dump(1) << "\n";
}

} // namespace

std::string gauss_to_string(const GaussRational& v) { return v.str(); }

std::string operator_kind(const AnyOp& op) {
    switch (op.index()) {
        case 0: return "psido";
        case 1: return "fcl";
        case 2: return "cgrade";
        default: return "fcl-cgrade";
    }
}

AnyOp read_operator(const std::string& path) {
    json j = doc_read(path);
    try {
        std::string kind = j.at("kind").get<std::string>();
        int n = j.at("n").get<int>();
        if (n < 1) throw parse_error("n must be positive");
        if (kind == "psido") return psido_from_json(j, n);
        if (kind == "fcl")
            return kp::FOp{psido_from_json(j.at("plus"), n), psido_from_json(j.at("minus"), n)};
        if (kind == "cgrade") return graded_from_json(j, n);
        if (kind == "fcl-cgrade") {
            GaussRational grade = gauss_unquad(j.at("grade"));
            GradedOp<FourierMatrix> plus = graded_from_json(j.at("plus"), n);
            GradedOp<FourierMatrix> minus = graded_from_json(j.at("minus"), n);
            if (!(plus.grade() == grade) || !(minus.grade() == grade))
                throw parse_error("branch grades disagree with the file grade");
            return GradedPair<FourierMatrix>{plus, minus};
        }
        throw parse_error("unknown kind: " + kind);
    } catch (const error&) {
        throw;
    } catch (const std::exception& e) {
        throw parse_error(std::string("bad operator file: ") + e.what());
    }
}

void write_operator(const std::string& path, const AnyOp& op) {
    json j;
    j["kind"] = operator_kind(op);
    if (const auto* p = std::get_if<kp::Op>(&op)) {
        j["n"] = p->proto().rows();
        json body = psido_to_json(*p);
        j.update(body);
    } else if (const auto* f = std::get_if<kp::FOp>(&op)) {
        j["n"] = f->proto().rows();
        j["plus"] = psido_to_json(f->plus);
        j["minus"] = psido_to_json(f->minus);
    } else if (const auto* g = std::get_if<GradedOp<FourierMatrix>>(&op)) {
        j["n"] = g->proto().rows();
        json body = graded_to_json(*g);
        j.update(body);
    } else if (const auto* gp = std::get_if<GradedPair<FourierMatrix>>(&op)) {
        j["n"] = gp->plus.proto().rows();
        j["grade"] = gauss_quad(gp->plus.grade());
        j["plus"] = graded_to_json(gp->plus);
        j["minus"] = graded_to_json(gp->minus);
    }
    doc_write(path, j);
}

namespace {

json solution_header(const std::string& kind, int n, const kp::Config& cfg) {
    json j;
    j["kind"] = kind;
    j["n"] = n;
    j["n_times"] = cfg.n_times;
    j["valuation"] = cfg.valuation;
    if (cfg.eps_order) j["eps_order"] = cfg.eps_order;
    return j;
}

kp::Config solution_config(const json& j) {
    kp::Config cfg;
    cfg.n_times = j.at("n_times").get<int>();
    cfg.valuation = j.at("valuation").get<long>();
    cfg.eps_order = j.contains("eps_order") ? j.at("eps_order").get<int>() : 0;
    return cfg;
}

kp::TOp top_from_json(const json& j, int n, const kp::Config& cfg) {
    TimePoly proto(n, cfg.n_times, cfg.valuation, cfg.eps_order);
    kp::TOp p(proto);
    if (j.contains("watermark")) p.set_wm(j.at("watermark").get<long>());
    for (const auto& o : j.at("orders")) {
        long k = o.at("k").get<long>();
        TimePoly c = proto;
        for (const auto& t : o.at("terms")) {
            TimeMono m;
            m.e = t.at("t").get<std::vector<int>>();
            if (static_cast<int>(m.e.size()) != cfg.n_times)
                throw parse_error("bad time exponent vector");
            m.eps = t.contains("eps") ? t.at("eps").get<int>() : 0;
            if (m.val() > cfg.valuation || m.eps > cfg.eps_order)
                throw parse_error("monomial outside the truncation");
            FourierMatrix v = matrix_from_json(t.at("c"), n);
            c += TimePoly::term(m, v, cfg.n_times, cfg.valuation, cfg.eps_order);
        }
        p.acc(k, c);
    }
    return p;
}

} // namespace

void write_solution(const std::string& path, const kp::TOp& L, const kp::Config& cfg) {
    json j = solution_header("psido-t", L.proto().rows(), cfg);
    j.update(top_to_json(L));
    doc_write(path, j);
}

void write_solution(const std::string& path, const kp::TFOp& L, const kp::Config& cfg) {
    json j = solution_header("fcl-t", L.proto().rows(), cfg);
    j["plus"] = top_to_json(L.plus);
    j["minus"] = top_to_json(L.minus);
    doc_write(path, j);
}

kp::TOp read_solution_psido(const std::string& path, kp::Config& cfg_out) {
    json j = doc_read(path);
    try {
        if (j.at("kind").get<std::string>() != "psido-t") throw parse_error("expected psido-t");
        cfg_out = solution_config(j);
        return top_from_json(j, j.at("n").get<int>(), cfg_out);
    } catch (const error&) {
        throw;
    } catch (const std::exception& e) {
        throw parse_error(std::string("bad solution file: ") + e.what());
    }
}

kp::TFOp read_solution_fcl(const std::string& path, kp::Config& cfg_out) {
    json j = doc_read(path);
    try {
        if (j.at("kind").get<std::string>() != "fcl-t") throw parse_error("expected fcl-t");
        cfg_out = solution_config(j);
        int n = j.at("n").get<int>();
        return {top_from_json(j.at("plus"), n, cfg_out), top_from_json(j.at("minus"), n, cfg_out)};
    } catch (const error&) {
        throw;
    } catch (const std::exception& e) {
        throw parse_error(std::string("bad solution file: ") + e.what());
    }
}

namespace {

void csv_rows(std::ostream& os, const kp::TOp& L, const kp::Config& cfg, const char* branch) {
    int n = L.proto().rows();
    for (const auto& [k, c] : L.coeffs())
        for (const auto& [mono, mat] : c.terms())
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (const auto& [mode, v] : mat.at(i, j).modes()) {
                        if (branch) os << branch << ",";
                        for (int e : mono.e) os << e << ",";
                        if (cfg.eps_order) os << mono.eps << ",";
                        os << k << ",";
                        if (n > 1) os << i << "," << j << ",";
                        os << mode << "," << v.re().get_num().get_str() << ","
                           << v.re().get_den().get_str() << "," << v.im().get_num().get_str()
                           << "," << v.im().get_den().get_str() << "\n";
                    }
}

void csv_header(std::ostream& os, int n, const kp::Config& cfg, bool branch) {
    if (branch) os << "branch,";
    for (int i = 1; i <= cfg.n_times; ++i) os << "e" << i << ",";
    if (cfg.eps_order) os << "eps,";
    os << "k,";
    if (n > 1) os << "i,j,";
    os << "m,re_num,re_den,im_num,im_den\n";
}

} // namespace

void write_csv(const std::string& path, const kp::TOp& L, const kp::Config& cfg) {
    std::ofstream os(path);
    if (!os) throw parse_error("cannot open " + path + " for writing");
    csv_header(os, L.proto().rows(), cfg, false);
    csv_rows(os, L, cfg, nullptr);
}

void write_csv(const std::string& path, const kp::TFOp& L, const kp::Config& cfg) {
    std::ofstream os(path);
    if (!os) throw parse_error("cannot open " + path + " for writing");
    csv_header(os, L.proto().rows(), cfg, true);
    csv_rows(os, L.plus, cfg, "+");
    csv_rows(os, L.minus, cfg, "-");
}

} // namespace fclkp::io
