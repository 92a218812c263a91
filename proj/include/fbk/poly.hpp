#pragma once

#include <array>
#include <cctype>
#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fbk/errors.hpp"
#include "fbk/rational.hpp"

namespace fbk {

// Exponent triple (a,b,c) of X^a Y^b Z^c.
using Exponent = std::array<int, 3>;

inline int exponent_degree(const Exponent& e) { return e[0] + e[1] + e[2]; }

inline bool exponent_divides(const Exponent& d, const Exponent& e) {
    return d[0] <= e[0] && d[1] <= e[1] && d[2] <= e[2];
}

inline Exponent exponent_add(const Exponent& a, const Exponent& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Exponent exponent_sub(const Exponent& a, const Exponent& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

// Graded-lexicographic term order with X > Y > Z, largest term first, so that
// map.begin() is the leading term. Fixed everywhere for reproducible normal
// forms and coset bases.
struct GrlexDescending {
    bool operator()(const Exponent& p, const Exponent& q) const {
        int dp = exponent_degree(p), dq = exponent_degree(q);
        if (dp != dq) return dp > dq;
        return p > q;
    }
};

inline std::string monomial_to_string(const Exponent& e) {
    static const char* names[3] = {"X", "Y", "Z"};
    std::string s;
    for (int v = 0; v < 3; ++v) {
        if (e[v] == 0) continue;
        if (!s.empty()) s += "*";
        s += names[v];
        if (e[v] > 1) s += "^" + std::to_string(e[v]);
    }
    return s.empty() ? "1" : s;
}

namespace detail {
inline bool coeff_is_zero(const GaussRational& c) { return c.is_zero(); }
inline bool coeff_is_zero(const std::complex<double>& c) { return c == std::complex<double>(0.0, 0.0); }
}  // namespace detail

// Homogeneous polynomial in X, Y, Z over the coefficient field K. The zero
// polynomial is the empty term map with a declared degree; stored
// coefficients are always nonzero and all exponents sum to the degree.
template <class K>
class HomogPoly {
public:
    using TermMap = std::map<Exponent, K, GrlexDescending>;

    HomogPoly() : degree_(0) {}
    explicit HomogPoly(int degree) : degree_(degree) {
        require(degree >= 0, errc::not_homogeneous, "negative degree");
    }

    static HomogPoly zero(int degree) { return HomogPoly(degree); }

    static HomogPoly monomial(const Exponent& e, K coeff) {
        HomogPoly p(exponent_degree(e));
        p.set(e, std::move(coeff));
        return p;
    }

    static HomogPoly variable(int axis) {
        Exponent e{0, 0, 0};
        e[axis] = 1;
        return monomial(e, K(1));
    }

    static HomogPoly one() { return monomial({0, 0, 0}, K(1)); }

    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    K coeff(const Exponent& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? K(0) : it->second;
    }

    void set(const Exponent& e, K c) {
        require(exponent_degree(e) == degree_, errc::not_homogeneous,
                "term degree " + std::to_string(exponent_degree(e)) + " in polynomial of degree " +
                    std::to_string(degree_));
        if (detail::coeff_is_zero(c))
            terms_.erase(e);
        else
            terms_[e] = std::move(c);
    }

    void add_term(const Exponent& e, const K& c) {
        require(exponent_degree(e) == degree_, errc::not_homogeneous, "term degree mismatch");
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (!detail::coeff_is_zero(c)) terms_[e] = c;
            return;
        }
        it->second += c;
        if (detail::coeff_is_zero(it->second)) terms_.erase(it);
    }

    // leading term in graded-lex X > Y > Z; polynomial must be nonzero
    std::pair<Exponent, K> leading_term() const {
        require(!is_zero(), errc::division_by_zero_poly, "leading term of zero polynomial");
        return *terms_.begin();
    }
    Exponent leading_monomial() const { return leading_term().first; }

    HomogPoly operator-() const {
        HomogPoly r(degree_);
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }

    HomogPoly operator+(const HomogPoly& o) const {
        require(degree_ == o.degree_ || is_zero() || o.is_zero(), errc::not_homogeneous,
                "sum of different degrees");
        HomogPoly r(is_zero() ? o.degree_ : degree_);
        r.terms_ = terms_;
        for (const auto& [e, c] : o.terms_) r.add_term(e, c);
        return r;
    }

    HomogPoly operator-(const HomogPoly& o) const { return *this + (-o); }

    HomogPoly operator*(const HomogPoly& o) const {
        HomogPoly r(degree_ + o.degree_);
        for (const auto& [e1, c1] : terms_)
            for (const auto& [e2, c2] : o.terms_) r.add_term(exponent_add(e1, e2), c1 * c2);
        return r;
    }

    HomogPoly operator*(const K& s) const {
        HomogPoly r(degree_);
        if (detail::coeff_is_zero(s)) return r;
        for (const auto& [e, c] : terms_) {
            K v = c * s;
            if (!detail::coeff_is_zero(v)) r.terms_[e] = v;
        }
        return r;
    }

    bool operator==(const HomogPoly& o) const {
        if (is_zero() && o.is_zero()) return true;
        return degree_ == o.degree_ && terms_ == o.terms_;
    }
    bool operator!=(const HomogPoly& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    int degree_;
    TermMap terms_;
};

using QPoly = HomogPoly<GaussRational>;
using CPoly = HomogPoly<std::complex<double>>;

inline CPoly to_numeric(const QPoly& p) {
    CPoly r(p.degree());
    for (const auto& [e, c] : p.terms()) r.set(e, c.to_complex());
    return r;
}

template <>
inline std::string HomogPoly<GaussRational>::to_string() const {
    if (is_zero()) return "0";
    std::string s;
    for (const auto& [e, c] : terms_) {
        std::string cs = c.to_string();
        if (!s.empty()) {
            if (!cs.empty() && cs[0] == '-' && cs.find('*') == std::string::npos &&
                cs.find('(') == std::string::npos) {
                s += " - ";
                cs = cs.substr(1);
            } else {
                s += " + ";
            }
        }
        std::string ms = monomial_to_string(e);
        if (cs == "1" && ms != "1")
            s += ms;
        else if (ms == "1")
            s += cs;
        else
            s += cs + "*" + ms;
    }
    return s;
}

// --- exact polynomial algebra -------------------------------------------

inline QPoly poly_pow(const QPoly& g, int a) {
    QPoly r = QPoly::one();
    for (int i = 0; i < a; ++i) r = r * g;
    return r;
}

// Exact quotient p / g when g divides p, absent otherwise. Multivariate long
// division in graded-lex order; the remainder is never materialized.
inline std::optional<QPoly> divide_exact(const QPoly& p, const QPoly& g) {
    require(!g.is_zero(), errc::division_by_zero_poly, "divide_exact by zero polynomial");
    if (p.is_zero()) {
        int qd = p.degree() - g.degree();
        return QPoly::zero(qd >= 0 ? qd : 0);
    }
    if (p.degree() < g.degree()) return std::nullopt;
    QPoly r = p;
    QPoly q(p.degree() - g.degree());
    const auto [glm, glc] = g.leading_term();
    while (!r.is_zero()) {
        const auto [rlm, rlc] = r.leading_term();
        if (!exponent_divides(glm, rlm)) return std::nullopt;
        Exponent e = exponent_sub(rlm, glm);
        GaussRational c = rlc / glc;
        q.add_term(e, c);
        r = r - g * QPoly::monomial(e, c);
    }
    return q;
}

inline constexpr int kValInfinity = std::numeric_limits<int>::max();

// Largest a with g^a | p; +infinity for p = 0. g must be nonconstant.
inline int valuation(const QPoly& p, const QPoly& g) {
    require(!g.is_zero(), errc::division_by_zero_poly, "valuation along zero polynomial");
    require(g.degree() > 0, errc::division_by_zero_poly, "valuation along constant polynomial");
    if (p.is_zero()) return kValInfinity;
    int a = 0;
    QPoly r = p;
    while (true) {
        auto q = divide_exact(r, g);
        if (!q) return a;
        r = *q;
        ++a;
    }
}

// Remainder of p modulo the principal ideal (f) within its degree: cancels
// every term divisible by the leading monomial of f. p - normal_form(p, f)
// lies in f * S_{deg p - deg f}.
inline QPoly normal_form(QPoly p, const QPoly& f) {
    require(!f.is_zero(), errc::division_by_zero_poly, "normal form modulo zero polynomial");
    if (p.is_zero() || p.degree() < f.degree()) return p;
    const auto [flm, flc] = f.leading_term();
    while (true) {
        const Exponent* hit = nullptr;
        for (const auto& [e, c] : p.terms()) {
            if (exponent_divides(flm, e)) {
                hit = &e;
                break;  // terms iterate largest-first; reduce the largest reducible term
            }
        }
        if (!hit) return p;
        Exponent e = *hit;
        GaussRational c = p.coeff(e) / flc;
        p = p - f * QPoly::monomial(exponent_sub(e, flm), c);
    }
}

// --- evaluation -----------------------------------------------------------

using P3 = std::array<std::complex<double>, 3>;

namespace detail {

// Horner accumulation in one variable over a list of (exponent, value) pairs
// sorted by descending exponent.
inline std::complex<double> horner(const std::vector<std::pair<int, std::complex<double>>>& parts,
                                   std::complex<double> x) {
    std::complex<double> acc = 0.0;
    int prev = parts.empty() ? 0 : parts.front().first;
    for (const auto& [e, v] : parts) {
        for (int k = prev; k > e; --k) acc *= x;
        acc += v;
        prev = e;
    }
    for (int k = prev; k > 0; --k) acc *= x;
    return acc;
}

}  // namespace detail

// Nested Horner: P = sum_a X^a * Q_a(Y, Z), each Q_a = sum_b Y^b * c * Z^c.
inline std::complex<double> eval(const CPoly& p, const P3& x) {
    if (p.is_zero()) return 0.0;
    std::vector<std::pair<int, std::complex<double>>> xparts;
    auto it = p.terms().begin();
    while (it != p.terms().end()) {
        int a = it->first[0];
        std::vector<std::pair<int, std::complex<double>>> yparts;
        while (it != p.terms().end() && it->first[0] == a) {
            int b = it->first[1], c = it->first[2];
            std::complex<double> zc = it->second;
            for (int k = 0; k < c; ++k) zc *= x[2];
            yparts.emplace_back(b, zc);
            ++it;
        }
        xparts.emplace_back(a, detail::horner(yparts, x[1]));
    }
    return detail::horner(xparts, x[0]);
}

inline std::complex<double> eval(const QPoly& p, const P3& x) { return eval(to_numeric(p), x); }

inline CPoly derivative(const CPoly& p, int axis) {
    if (p.is_zero() || p.degree() == 0) return CPoly::zero(0);
    CPoly r(p.degree() - 1);
    for (const auto& [e, c] : p.terms()) {
        if (e[axis] == 0) continue;
        Exponent d = e;
        d[axis] -= 1;
        r.add_term(d, c * static_cast<double>(e[axis]));
    }
    return r;
}

// --- parser ---------------------------------------------------------------
//
// Grammar: terms joined by + or -; a term is a product of factors separated
// by optional '*': integer or fraction "p/q" coefficients, parenthesized
// complex coefficients "(p/q+r/s*i)", the imaginary unit "i", and variable
// powers X^a, Y^b, Z^c.

namespace detail {

class PolyParser {
public:
    explicit PolyParser(const std::string& text) : s_(text) {}

    QPoly parse(std::optional<int> expected_degree) {
        skip_ws();
        require(!eof(), errc::parse_error, "empty polynomial text");
        std::vector<std::pair<Exponent, GaussRational>> terms;
        GaussRational sign(1);
        if (peek() == '+' || peek() == '-') {
            if (get() == '-') sign = GaussRational(-1);
        }
        while (true) {
            auto [e, c] = parse_term();
            terms.emplace_back(e, sign * c);
            skip_ws();
            if (eof()) break;
            char op = get();
            require(op == '+' || op == '-', errc::parse_error,
                    std::string("unexpected character '") + op + "'");
            sign = (op == '-') ? GaussRational(-1) : GaussRational(1);
            skip_ws();
            require(!eof(), errc::parse_error, "trailing operator");
        }

        int degree = -1;
        bool all_zero = true;
        for (const auto& [e, c] : terms) {
            if (c.is_zero() && exponent_degree(e) == 0) continue;
            if (degree < 0)
                degree = exponent_degree(e);
            else
                require(exponent_degree(e) == degree, errc::not_homogeneous,
                        "mixed degrees " + std::to_string(degree) + " and " +
                            std::to_string(exponent_degree(e)));
            all_zero = false;
        }
        if (all_zero) degree = expected_degree.value_or(0);
        if (expected_degree) {
            require(degree == *expected_degree || all_zero, errc::not_homogeneous,
                    "expected degree " + std::to_string(*expected_degree) + ", got " +
                        std::to_string(degree));
            degree = *expected_degree;
        }
        QPoly p(degree);
        for (const auto& [e, c] : terms)
            if (!c.is_zero()) p.add_term(e, c);
        return p;
    }

private:
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    char get() { return s_[pos_++]; }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    std::pair<Exponent, GaussRational> parse_term() {
        Exponent e{0, 0, 0};
        GaussRational c(1);
        bool any = false;
        while (true) {
            skip_ws();
            if (eof()) break;
            char ch = peek();
            if (ch == '+' || ch == '-') break;
            if (ch == '*') {
                ++pos_;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(ch))) {
                c *= parse_rational();
            } else if (ch == '(') {
                c *= parse_complex();
            } else if (ch == 'i') {
                ++pos_;
                c *= GaussRational::i();
            } else if (ch == 'X' || ch == 'x' || ch == 'Y' || ch == 'y' || ch == 'Z' || ch == 'z') {
                ++pos_;
                int axis = (ch == 'X' || ch == 'x') ? 0 : (ch == 'Y' || ch == 'y') ? 1 : 2;
                int exp = 1;
                skip_ws();
                if (!eof() && peek() == '^') {
                    ++pos_;
                    exp = parse_int();
                    require(exp >= 0, errc::parse_error, "negative exponent");
                }
                e[axis] += exp;
            } else {
                raise(errc::parse_error, std::string("unexpected character '") + ch + "'");
            }
            any = true;
        }
        require(any, errc::parse_error, "empty term");
        return {e, c};
    }

    int parse_int() {
        skip_ws();
        bool neg = false;
        if (!eof() && (peek() == '+' || peek() == '-')) neg = (get() == '-');
        require(!eof() && std::isdigit(static_cast<unsigned char>(peek())), errc::parse_error,
                "expected integer");
        long v = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
            v = v * 10 + (get() - '0');
            require(v < (1L << 40), errc::parse_error, "integer literal too large");
        }
        return static_cast<int>(neg ? -v : v);
    }

    GaussRational parse_rational() {
        long num = parse_int();
        skip_ws();
        if (!eof() && peek() == '/') {
            ++pos_;
            long den = parse_int();
            require(den != 0, errc::parse_error, "zero denominator");
            return GaussRational::fraction(num, den);
        }
        return GaussRational(num);
    }

    // "(a)", "(a+b*i)", "(a-b*i)", "(b*i)", "(i)" with a, b integers or fractions
    GaussRational parse_complex() {
        ++pos_;  // '('
        GaussRational total(0);
        GaussRational sign(1);
        skip_ws();
        if (!eof() && (peek() == '+' || peek() == '-'))
            if (get() == '-') sign = GaussRational(-1);
        while (true) {
            skip_ws();
            require(!eof(), errc::parse_error, "unterminated complex coefficient");
            GaussRational part(1);
            bool have_number = false;
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                part = parse_rational();
                have_number = true;
                skip_ws();
                if (!eof() && peek() == '*') {
                    ++pos_;
                    skip_ws();
                }
            }
            if (!eof() && peek() == 'i') {
                ++pos_;
                part *= GaussRational::i();
            } else {
                require(have_number, errc::parse_error, "expected number or i");
            }
            total += sign * part;
            skip_ws();
            require(!eof(), errc::parse_error, "unterminated complex coefficient");
            if (peek() == ')') {
                ++pos_;
                return total;
            }
            char op = get();
            require(op == '+' || op == '-', errc::parse_error, "malformed complex coefficient");
            sign = (op == '-') ? GaussRational(-1) : GaussRational(1);
        }
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline QPoly parse_poly(const std::string& text, std::optional<int> expected_degree = std::nullopt) {
    return detail::PolyParser(text).parse(expected_degree);
}

}  // namespace fbk
