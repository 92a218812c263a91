#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <numeric>
#include <string>

#include "fbk/errors.hpp"

namespace fbk {

// Element of Q(i): a complex number with exact rational real and imaginary
// parts. Closed under +, -, *, and / by nonzero elements; nothing rounds.
class GaussRational {
public:
    GaussRational() : re_(0), im_(0) {}
    GaussRational(long n) : re_(n), im_(0) {}  // NOLINT: implicit by design
    GaussRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}
    explicit GaussRational(mpq_class re) : re_(std::move(re)), im_(0) {}

    static GaussRational i() { return GaussRational(mpq_class(0), mpq_class(1)); }

    static GaussRational fraction(long num, long den) {
        require(den != 0, errc::parse_error, "zero denominator");
        mpq_class q(num, den);
        q.canonicalize();
        return GaussRational(q);
    }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    GaussRational operator-() const { return {mpq_class(-re_), mpq_class(-im_)}; }
    GaussRational conj() const { return {re_, mpq_class(-im_)}; }

    GaussRational operator+(const GaussRational& o) const {
        return {mpq_class(re_ + o.re_), mpq_class(im_ + o.im_)};
    }
    GaussRational operator-(const GaussRational& o) const {
        return {mpq_class(re_ - o.re_), mpq_class(im_ - o.im_)};
    }
    GaussRational operator*(const GaussRational& o) const {
        return {mpq_class(re_ * o.re_ - im_ * o.im_), mpq_class(re_ * o.im_ + im_ * o.re_)};
    }
    GaussRational operator/(const GaussRational& o) const {
        require(!o.is_zero(), errc::division_by_zero_poly, "division by zero coefficient");
        mpq_class n(o.re_ * o.re_ + o.im_ * o.im_);
        return {mpq_class((re_ * o.re_ + im_ * o.im_) / n),
                mpq_class((im_ * o.re_ - re_ * o.im_) / n)};
    }

    GaussRational& operator+=(const GaussRational& o) { return *this = *this + o; }
    GaussRational& operator-=(const GaussRational& o) { return *this = *this - o; }
    GaussRational& operator*=(const GaussRational& o) { return *this = *this * o; }
    GaussRational& operator/=(const GaussRational& o) { return *this = *this / o; }

    bool operator==(const GaussRational& o) const { return re_ == o.re_ && im_ == o.im_; }
    bool operator!=(const GaussRational& o) const { return !(*this == o); }

    // |z|^2 as an exact rational
    mpq_class norm2() const { return mpq_class(re_ * re_ + im_ * im_); }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    std::string to_string() const {
        if (im_ == 0) return re_.get_str();
        if (re_ == 0) return im_.get_str() + "*i";
        std::string s = "(" + re_.get_str();
        if (im_ > 0) s += "+";
        s += im_.get_str() + "*i)";
        return s;
    }

private:
    mpq_class re_, im_;
};

// Small rational on int64, used for order values and jumping numbers where
// denominators divide lcm(m_j). Always kept normalized with den > 0.
struct Frac {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Frac() = default;
    Frac(std::int64_t n) : num(n), den(1) {}  // NOLINT
    Frac(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    bool operator==(const Frac& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Frac& o) const { return !(*this == o); }
    bool operator<(const Frac& o) const { return num * o.den < o.num * den; }
    bool operator<=(const Frac& o) const { return num * o.den <= o.num * den; }
    bool operator>(const Frac& o) const { return o < *this; }
    bool operator>=(const Frac& o) const { return o <= *this; }

    Frac operator+(const Frac& o) const { return {num * o.den + o.num * den, den * o.den}; }
    Frac operator*(std::int64_t k) const { return {num * k, den}; }

    // ceil(this * m) for nonnegative values
    std::int64_t ceil_mul(std::int64_t m) const {
        std::int64_t n = num * m;
        return (n >= 0) ? (n + den - 1) / den : -((-n) / den);
    }
    bool mul_is_integer(std::int64_t m) const { return (num * m) % den == 0; }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string to_string() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

}  // namespace fbk
