#include "curvelab/bivar.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "curvelab/errors.hpp"

namespace curvelab {

BivarPoly BivarPoly::constant(const Rat& c) { return monomial(0, 0, c); }

BivarPoly BivarPoly::monomial(unsigned a, unsigned b, const Rat& c) {
    BivarPoly p;
    if (c != 0) p.terms[{a, b}] = c;
    return p;
}

void BivarPoly::add_term(unsigned a, unsigned b, const Rat& c) {
    if (c == 0) return;
    auto it = terms.find({a, b});
    if (it == terms.end()) {
        terms[{a, b}] = c;
    } else {
        it->second += c;
        if (it->second == 0) terms.erase(it);
    }
}

unsigned BivarPoly::deg_x() const {
    unsigned d = 0;
    for (const auto& [k, c] : terms) d = std::max(d, k.first);
    return d;
}

unsigned BivarPoly::deg_y() const {
    unsigned d = 0;
    for (const auto& [k, c] : terms) d = std::max(d, k.second);
    return d;
}

unsigned BivarPoly::multiplicity() const {
    unsigned m = ~0u;
    for (const auto& [k, c] : terms) m = std::min(m, k.first + k.second);
    return terms.empty() ? 0 : m;
}

Rat BivarPoly::coeff(unsigned a, unsigned b) const {
    auto it = terms.find({a, b});
    return it == terms.end() ? Rat(0) : it->second;
}

BivarPoly operator+(const BivarPoly& p, const BivarPoly& q) {
    BivarPoly r = p;
    for (const auto& [k, c] : q.terms) r.add_term(k.first, k.second, c);
    return r;
}

BivarPoly operator-(const BivarPoly& p, const BivarPoly& q) {
    BivarPoly r = p;
    for (const auto& [k, c] : q.terms) r.add_term(k.first, k.second, -c);
    return r;
}

BivarPoly operator-(const BivarPoly& p) {
    BivarPoly r;
    for (const auto& [k, c] : p.terms) r.terms[k] = -c;
    return r;
}

BivarPoly operator*(const BivarPoly& p, const BivarPoly& q) {
    BivarPoly r;
    for (const auto& [kp, cp] : p.terms)
        for (const auto& [kq, cq] : q.terms) r.add_term(kp.first + kq.first, kp.second + kq.second, cp * cq);
    return r;
}

BivarPoly operator*(const Rat& c, const BivarPoly& p) {
    BivarPoly r;
    if (c == 0) return r;
    for (const auto& [k, pc] : p.terms) r.terms[k] = c * pc;
    return r;
}

bool operator==(const BivarPoly& p, const BivarPoly& q) { return p.terms == q.terms; }

BivarPoly bivar_dx(const BivarPoly& p) {
    BivarPoly r;
    for (const auto& [k, c] : p.terms)
        if (k.first > 0) r.terms[{k.first - 1, k.second}] = Rat(k.first) * c;
    return r;
}

BivarPoly bivar_dy(const BivarPoly& p) {
    BivarPoly r;
    for (const auto& [k, c] : p.terms)
        if (k.second > 0) r.terms[{k.first, k.second - 1}] = Rat(k.second) * c;
    return r;
}

BivarPoly bivar_swap_xy(const BivarPoly& p) {
    BivarPoly r;
    for (const auto& [k, c] : p.terms) r.terms[{k.second, k.first}] = c;
    return r;
}

namespace {

// Binomial rows on demand; shears in this codebase stay at modest degrees.
std::vector<Rat> binomial_row(unsigned n) {
    std::vector<Rat> row(n + 1);
    row[0] = 1;
    for (unsigned k = 1; k <= n; ++k) row[k] = row[k - 1] * Rat(n - k + 1) / Rat(k);
    return row;
}

} // namespace

BivarPoly bivar_shear_x(const BivarPoly& p, const Rat& s) {
    if (s == 0) return p;
    BivarPoly r;
    for (const auto& [k, c] : p.terms) {
        auto row = binomial_row(k.first);
        Rat pw = 1;
        for (unsigned j = 0; j <= k.first; ++j) {
            r.add_term(k.first - j, k.second + j, c * row[j] * pw);
            pw *= s;
        }
    }
    return r;
}

BivarPoly bivar_shear_y(const BivarPoly& p, const Rat& s) {
    return bivar_swap_xy(bivar_shear_x(bivar_swap_xy(p), s));
}

BivarPoly bivar_divide_exact(const BivarPoly& p, const BivarPoly& d) {
    if (d.is_zero()) throw InvalidElimination("division by zero polynomial");
    // Leading term in (y-degree, x-degree) order; for exact multiples,
    // leading-term reduction alone terminates with remainder zero.
    auto lead = [](const BivarPoly& f) {
        auto best = f.terms.begin();
        for (auto it = f.terms.begin(); it != f.terms.end(); ++it) {
            auto a = std::make_pair(it->first.second, it->first.first);
            auto b = std::make_pair(best->first.second, best->first.first);
            if (a > b) best = it;
        }
        return best;
    };
    BivarPoly rem = p, quot;
    auto dl = lead(d);
    while (!rem.is_zero()) {
        auto rl = lead(rem);
        if (rl->first.first < dl->first.first || rl->first.second < dl->first.second)
            throw InvalidElimination("inexact polynomial division");
        unsigned a = rl->first.first - dl->first.first;
        unsigned b = rl->first.second - dl->first.second;
        Rat c = rl->second / dl->second;
        quot.add_term(a, b, c);
        rem = rem - BivarPoly::monomial(a, b, c) * d;
    }
    return quot;
}

BivarPoly bivar_normalize(const BivarPoly& p) {
    if (p.is_zero()) return p;
    Int num_gcd = 0, den_lcm = 1;
    for (const auto& [k, c] : p.terms) {
        Int n = boost::multiprecision::abs(numerator(c));
        Int d = denominator(c);
        num_gcd = boost::multiprecision::gcd(num_gcd, n);
        den_lcm = den_lcm / boost::multiprecision::gcd(den_lcm, d) * d;
    }
    Rat content(num_gcd, den_lcm);
    auto lead = p.terms.begin();
    for (auto it = p.terms.begin(); it != p.terms.end(); ++it) {
        auto a = std::make_pair(it->first.second, it->first.first);
        auto b = std::make_pair(lead->first.second, lead->first.first);
        if (a > b) lead = it;
    }
    if (lead->second < 0) content = -content;
    BivarPoly r;
    for (const auto& [k, c] : p.terms) r.terms[k] = c / content;
    return r;
}

bool bivar_divisible_by_x(const BivarPoly& p) {
    for (const auto& [k, c] : p.terms)
        if (k.first == 0) return false;
    return !p.is_zero();
}

bool bivar_divisible_by_y(const BivarPoly& p) {
    for (const auto& [k, c] : p.terms)
        if (k.second == 0) return false;
    return !p.is_zero();
}

BivarPoly bivar_strip_x(const BivarPoly& p) {
    BivarPoly r;
    for (const auto& [k, c] : p.terms) {
        if (k.first == 0) throw InvalidElimination("strip_x on polynomial not divisible by x");
        r.terms[{k.first - 1, k.second}] = c;
    }
    return r;
}

BivarPoly bivar_strip_y(const BivarPoly& p) {
    BivarPoly r;
    for (const auto& [k, c] : p.terms) {
        if (k.second == 0) throw InvalidElimination("strip_y on polynomial not divisible by y");
        r.terms[{k.first, k.second - 1}] = c;
    }
    return r;
}

namespace {

unsigned tpoly_deg(const TPoly& p) {
    for (size_t i = p.size(); i-- > 0;)
        if (!p[i].is_zero()) return static_cast<unsigned>(i);
    return 0;
}

bool tpoly_is_zero(const TPoly& p) {
    for (const auto& c : p)
        if (!c.is_zero()) return false;
    return true;
}

} // namespace

BivarPoly bivar_mat_det(std::vector<std::vector<BivarPoly>> a) {
    // Bareiss fraction-free elimination; exact over the polynomial ring.
    size_t sz = a.size();
    if (sz == 0) return BivarPoly::constant(1);
    BivarPoly prev = BivarPoly::constant(1);
    int sign = 1;
    for (size_t k = 0; k + 1 < sz; ++k) {
        if (a[k][k].is_zero()) {
            size_t piv = k + 1;
            while (piv < sz && a[piv][k].is_zero()) ++piv;
            if (piv == sz) return BivarPoly::zero();
            std::swap(a[k], a[piv]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < sz; ++i) {
            for (size_t j = k + 1; j < sz; ++j) {
                BivarPoly num = a[k][k] * a[i][j] - a[i][k] * a[k][j];
                a[i][j] = bivar_divide_exact(num, prev);
            }
            a[i][k] = BivarPoly::zero();
        }
        prev = a[k][k];
    }
    BivarPoly det = a[sz - 1][sz - 1];
    return sign < 0 ? -det : det;
}

BivarPoly resultant_t(const TPoly& p, const TPoly& q) {
    if (tpoly_is_zero(p) || tpoly_is_zero(q)) return BivarPoly::zero();
    unsigned m = tpoly_deg(p), n = tpoly_deg(q);
    if (m == 0 && n == 0) throw InvalidElimination("resultant of two polynomials constant in t");
    unsigned sz = m + n;
    std::vector<std::vector<BivarPoly>> a(sz, std::vector<BivarPoly>(sz, BivarPoly::zero()));
    for (unsigned r = 0; r < n; ++r)
        for (unsigned j = 0; j <= m; ++j) a[r][r + j] = p[m - j];
    for (unsigned r = 0; r < m; ++r)
        for (unsigned j = 0; j <= n; ++j) a[n + r][r + j] = q[n - j];
    return bivar_mat_det(std::move(a));
}

std::string bivar_to_string(const BivarPoly& p) {
    if (p.is_zero()) return "0";
    // Highest y-degree first, then highest x-degree, so the leading term of
    // a Weierstrass-style polynomial appears first.
    std::vector<std::pair<std::pair<unsigned, unsigned>, Rat>> ts(p.terms.begin(), p.terms.end());
    std::sort(ts.begin(), ts.end(), [](const auto& u, const auto& v) {
        return std::make_pair(u.first.second, u.first.first) > std::make_pair(v.first.second, v.first.first);
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : ts) {
        Rat ac = c < 0 ? Rat(-c) : c;
        if (first) {
            if (c < 0) os << "-";
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        bool has_var = k.first > 0 || k.second > 0;
        bool coeff_shown = !(ac == 1 && has_var);
        if (coeff_shown) {
            if (denominator(ac) == 1) os << numerator(ac);
            else os << "(" << numerator(ac) << "/" << denominator(ac) << ")";
        }
        if (k.first > 0) {
            if (coeff_shown) os << "*";
            os << "x";
            if (k.first > 1) os << "^" << k.first;
        }
        if (k.second > 0) {
            if (coeff_shown || k.first > 0) os << "*";
            os << "y";
            if (k.second > 1) os << "^" << k.second;
        }
    }
    return os.str();
}

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at position " + std::to_string(pos));
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos < s.size() && s[pos] == c;
    }

    bool atom_follows() {
        skip_ws();
        if (pos >= s.size()) return false;
        char c = s[pos];
        return std::isdigit(static_cast<unsigned char>(c)) || c == 'x' || c == 'y' || c == '(';
    }

    Int parse_nat() {
        skip_ws();
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected number");
        std::string digits;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) digits += s[pos++];
        return Int(digits);
    }

    BivarPoly parse_atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            BivarPoly e = parse_expr();
            skip_ws();
            if (pos >= s.size() || s[pos] != ')') fail("expected ')'");
            ++pos;
            return e;
        }
        if (c == 'x') {
            ++pos;
            return BivarPoly::var_x();
        }
        if (c == 'y') {
            ++pos;
            return BivarPoly::var_y();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Int num = parse_nat();
            if (peek_is('/')) {
                ++pos;
                Int den = parse_nat();
                if (den == 0) fail("zero denominator");
                return BivarPoly::constant(Rat(num, den));
            }
            return BivarPoly::constant(Rat(num));
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    BivarPoly parse_factor() {
        BivarPoly a = parse_atom();
        skip_ws();
        if (peek_is('^')) {
            ++pos;
            Int e = parse_nat();
            if (e > 4096) fail("exponent too large");
            unsigned n = e.convert_to<unsigned>();
            BivarPoly r = BivarPoly::constant(1);
            for (unsigned i = 0; i < n; ++i) r = r * a;
            return r;
        }
        return a;
    }

    BivarPoly parse_term() {
        BivarPoly r = parse_factor();
        for (;;) {
            skip_ws();
            if (peek_is('*')) {
                ++pos;
                r = r * parse_factor();
            } else if (atom_follows()) {
                r = r * parse_factor();
            } else {
                return r;
            }
        }
    }

    BivarPoly parse_expr() {
        skip_ws();
        bool neg = false;
        if (peek_is('-')) {
            neg = true;
            ++pos;
        } else if (peek_is('+')) {
            ++pos;
        }
        BivarPoly r = parse_term();
        if (neg) r = -r;
        for (;;) {
            skip_ws();
            if (peek_is('+')) {
                ++pos;
                r = r + parse_term();
            } else if (peek_is('-')) {
                ++pos;
                r = r - parse_term();
            } else {
                return r;
            }
        }
    }
};

} // namespace

BivarPoly parse_bivar(const std::string& text) {
    Parser p(text);
    BivarPoly r = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return r;
}

} // namespace curvelab
