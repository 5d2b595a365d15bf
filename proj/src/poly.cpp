#include "extchan/poly.hpp"

#include <cctype>

namespace extchan {

Polynomial::Polynomial(Rational constant) {
    if (constant != 0) coeffs_.push_back(std::move(constant));
}

Polynomial Polynomial::variable() {
    Polynomial p;
    p.coeffs_ = {Rational(0), Rational(1)};
    return p;
}

Polynomial Polynomial::from_coeffs(std::vector<Rational> ascending) {
    Polynomial p;
    p.coeffs_ = std::move(ascending);
    p.trim();
    return p;
}

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational Polynomial::coeff(size_t k) const {
    return k < coeffs_.size() ? coeffs_[k] : Rational(0);
}

Rational Polynomial::leading() const {
    return coeffs_.empty() ? Rational(0) : coeffs_.back();
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<Rational> c(std::max(coeffs_.size(), o.coeffs_.size()), Rational(0));
    for (size_t i = 0; i < coeffs_.size(); ++i) c[i] += coeffs_[i];
    for (size_t i = 0; i < o.coeffs_.size(); ++i) c[i] += o.coeffs_[i];
    return from_coeffs(std::move(c));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    return *this + (-o);
}

Polynomial Polynomial::operator-() const {
    Polynomial p = *this;
    for (auto& c : p.coeffs_) c = -c;
    return p;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<Rational> c(coeffs_.size() + o.coeffs_.size() - 1, Rational(0));
    for (size_t i = 0; i < coeffs_.size(); ++i)
        for (size_t j = 0; j < o.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * o.coeffs_[j];
    return from_coeffs(std::move(c));
}

Polynomial Polynomial::scaled(const Rational& s) const {
    Polynomial p = *this;
    for (auto& c : p.coeffs_) c *= s;
    p.trim();
    return p;
}

PolyDivMod poly_divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw ParseError("polynomial division by zero");
    Polynomial rem = a;
    std::vector<Rational> q;
    if (a.degree() >= b.degree()) q.assign(static_cast<size_t>(a.degree() - b.degree()) + 1,
                                           Rational(0));
    while (!rem.is_zero() && rem.degree() >= b.degree()) {
        size_t shift = static_cast<size_t>(rem.degree() - b.degree());
        Rational factor = rem.leading() / b.leading();
        q[shift] = factor;
        std::vector<Rational> sub(shift, Rational(0));
        for (const auto& c : b.coeffs()) sub.push_back(c * factor);
        rem = rem - Polynomial::from_coeffs(std::move(sub));
    }
    return {Polynomial::from_coeffs(std::move(q)), rem};
}

Polynomial Polynomial::monic() const {
    if (is_zero()) return {};
    return scaled(Rational(1) / leading());
}

Polynomial poly_gcd(Polynomial a, Polynomial b) {
    while (!b.is_zero()) {
        Polynomial r = poly_divmod(a, b).remainder;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

Ratio gcd_contract(const Ratio& r) {
    if (r.den.is_zero()) throw ParseError("zero denominator");
    Ratio out = r;
    Polynomial g = poly_gcd(out.num, out.den);
    if (!g.is_zero() && g.degree() > 0) {
        out.num = poly_divmod(out.num, g).quotient;
        out.den = poly_divmod(out.den, g).quotient;
    }
    Rational lc = out.den.leading();
    out.num = out.num.scaled(Rational(1) / lc);
    out.den = out.den.scaled(Rational(1) / lc);
    return out;
}

namespace {

// ---- expression parser ----

struct Parser {
    std::string_view text;
    size_t pos = 0;
    std::string var; // first identifier seen

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg + " at position " + std::to_string(pos));
    }

    Rational read_integer() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) fail("expected a number");
        return Rational(boost::multiprecision::cpp_int(std::string(text.substr(start, pos - start))));
    }

    long read_exponent() {
        bool paren = accept('(');
        bool neg = accept('-');
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) fail("expected an integer exponent");
        long v = std::stol(std::string(text.substr(start, pos - start)));
        if (paren && !accept(')')) fail("expected ')'");
        return neg ? -v : v;
    }

    Ratio ratio_add(const Ratio& a, const Ratio& b, int sign) {
        Ratio r;
        r.num = a.num * b.den + b.num.scaled(Rational(sign)) * a.den;
        r.den = a.den * b.den;
        return r;
    }
    Ratio ratio_mul(const Ratio& a, const Ratio& b) {
        return {a.num * b.num, a.den * b.den, {}};
    }
    Ratio ratio_div(const Ratio& a, const Ratio& b) {
        if (b.num.is_zero()) fail("division by zero");
        return {a.num * b.den, a.den * b.num, {}};
    }
    Ratio ratio_pow(Ratio base, long e) {
        bool invert = e < 0;
        if (invert) e = -e;
        Ratio acc{Polynomial(Rational(1)), Polynomial(Rational(1)), {}};
        for (long i = 0; i < e; ++i) acc = ratio_mul(acc, base);
        if (invert) {
            if (acc.num.is_zero()) fail("zero to a negative power");
            std::swap(acc.num, acc.den);
        }
        return acc;
    }

    Ratio primary() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            Ratio r = expression();
            if (!accept(')')) fail("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return {Polynomial(read_integer()), Polynomial(Rational(1)), {}};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                ++pos;
            std::string name(text.substr(start, pos - start));
            if (var.empty())
                var = name;
            else if (name != var)
                throw MixedVariables(var, name);
            return {Polynomial::variable(), Polynomial(Rational(1)), {}};
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    Ratio factor() {
        Ratio base = primary();
        while (peek() == '^') {
            ++pos;
            base = ratio_pow(base, read_exponent());
        }
        return base;
    }

    Ratio term() {
        Ratio r = factor();
        for (;;) {
            char c = peek();
            if (c == '*') {
                ++pos;
                r = ratio_mul(r, factor());
            } else if (c == '/') {
                ++pos;
                r = ratio_div(r, factor());
            } else {
                return r;
            }
        }
    }

    Ratio expression() {
        int lead_sign = 1;
        if (accept('-')) lead_sign = -1;
        else accept('+');
        Ratio r = term();
        if (lead_sign < 0) r.num = -r.num;
        for (;;) {
            char c = peek();
            if (c == '+') {
                ++pos;
                r = ratio_add(r, term(), 1);
            } else if (c == '-') {
                ++pos;
                r = ratio_add(r, term(), -1);
            } else {
                return r;
            }
        }
    }
};

std::string rational_text(const Rational& q) {
    return q.str();
}

} // namespace

Ratio parse_poly_expr(std::string_view text) {
    Parser p{text};
    Ratio r = p.expression();
    if (!p.at_end()) p.fail("trailing characters");
    if (r.den.is_zero()) throw ParseError("zero denominator");
    r.var = p.var;
    return r;
}

std::string format_poly(const Polynomial& p, const std::string& var, bool ascending) {
    if (p.is_zero()) return "0";
    std::string name = var.empty() ? "x" : var;
    std::string out;
    long deg = p.degree();
    auto emit = [&](long k) {
        Rational c = p.coeff(static_cast<size_t>(k));
        if (c == 0) return;
        bool negative = c < 0;
        Rational mag = negative ? Rational(-c) : c;
        if (out.empty()) {
            if (negative) out += "-";
        } else {
            out += negative ? "-" : "+";
        }
        if (k == 0) {
            out += rational_text(mag);
            return;
        }
        if (mag != 1) out += rational_text(mag) + "*";
        out += name;
        if (k > 1) out += "^" + std::to_string(k);
    };
    if (ascending)
        for (long k = 0; k <= deg; ++k) emit(k);
    else
        for (long k = deg; k >= 0; --k) emit(k);
    return out;
}

std::string format_ratio(const Ratio& r, bool ascending) {
    if (r.den.degree() == 0 && r.den.leading() == 1)
        return format_poly(r.num, r.var, ascending);
    return "(" + format_poly(r.num, r.var, ascending) + ")/(" +
           format_poly(r.den, r.var, ascending) + ")";
}

} // namespace extchan
