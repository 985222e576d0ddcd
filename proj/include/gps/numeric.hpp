#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <system_error>

namespace gps {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    void add(const CompensatedSum& other) {
        add(other.sum_);
        add(other.comp_);
    }
    CompensatedSum& operator+=(double v) {
        add(v);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedComplexSum {
public:
    void add(std::complex<double> v) {
        re_.add(v.real());
        im_.add(v.imag());
    }
    void add(const CompensatedComplexSum& other) {
        re_.add(other.re_);
        im_.add(other.im_);
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_;
    CompensatedSum im_;
};

// Fractional part in [0, 1).
inline double frac(double t) {
    double f = t - std::floor(t);
    return f >= 1.0 ? 0.0 : f;
}

// t mod 1 in [-1/2, 1/2]. Exact, and odd in t, so e(-t) = conj(e(t)) bit for bit.
inline double centered(double t) { return std::remainder(t, 1.0); }

// e(t) = exp(2 pi i t), with t reduced modulo 1 first.
inline std::complex<double> unit_phase(double t) {
    const double r = centered(t);
    const double angle = 2.0 * std::numbers::pi * r;
    return {std::cos(angle), std::sin(angle)};
}

// Error-free product: a*b == hi + lo exactly.
struct TwoProduct {
    double hi;
    double lo;
};

inline TwoProduct two_product(double a, double b) {
    const double hi = a * b;
    return {hi, std::fma(a, b, -hi)};
}

// (hi + lo) mod 1, centered, without first rounding hi + lo.
inline double centered_of_sum(double hi, double lo) { return centered(centered(hi) + lo); }

// Ordinary least-squares slope of ys against xs.
inline double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

// Locale-independent shortest representation that round-trips through
// 17 significant digits. Used by every CSV writer.
inline std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

}  // namespace gps
