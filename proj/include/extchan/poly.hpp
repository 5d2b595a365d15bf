#pragma once

#include "extchan/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace extchan {

using Rational = boost::multiprecision::cpp_rational;

class MixedVariables : public ParseError {
public:
    MixedVariables(const std::string& a, const std::string& b)
        : ParseError("expression mixes variables '" + a + "' and '" + b + "'") {}
};

// Univariate polynomial with exact rational coefficients, ascending degree.
// Trailing zero coefficients are trimmed; the zero polynomial has none.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(Rational constant);
    explicit Polynomial(long constant) : Polynomial(Rational(constant)) {}
    static Polynomial variable(); // the monomial x
    static Polynomial from_coeffs(std::vector<Rational> ascending);

    bool is_zero() const { return coeffs_.empty(); }
    long degree() const { return static_cast<long>(coeffs_.size()) - 1; } // -1 for zero
    Rational coeff(size_t k) const;
    const std::vector<Rational>& coeffs() const { return coeffs_; }
    Rational leading() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial scaled(const Rational& s) const;

    Polynomial monic() const;

    bool operator==(const Polynomial&) const = default;

private:
    void trim();
    std::vector<Rational> coeffs_;
};

struct PolyDivMod {
    Polynomial quotient, remainder;
};
PolyDivMod poly_divmod(const Polynomial& a, const Polynomial& b); // b nonzero

// Monic greatest common divisor by the Euclidean remainder sequence.
Polynomial poly_gcd(Polynomial a, Polynomial b);

// Ratio of two polynomials in one named variable.
struct Ratio {
    Polynomial num;
    Polynomial den = Polynomial(Rational(1));
    std::string var; // empty when the expression was constant

    bool operator==(const Ratio&) const = default;
};

// Recursive-descent parse of integers, one variable, + - * / ^ and
// parentheses, with exact rational arithmetic throughout. Exponents are
// integers, optionally negative and optionally parenthesized.
Ratio parse_poly_expr(std::string_view text);

// Divides numerator and denominator by their GCD and scales the denominator
// monic, absorbing the scale into the numerator.
Ratio gcd_contract(const Ratio& r);

// FORM-like text: explicit '*' and '^', no spaces, terms in ascending degree
// (or descending when ascending=false).
std::string format_poly(const Polynomial& p, const std::string& var,
                        bool ascending = true);
std::string format_ratio(const Ratio& r, bool ascending = true);

} // namespace extchan
