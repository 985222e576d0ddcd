#pragma once

// Sawtooth function psi(t) = {t} - 1/2 and Vaaler's trigonometric
// approximation of it:
//
//   psi*(t) = sum_{0<|h|<=H} a_h e(ht),   a_h = -J(h/(H+1)) / (2 pi i h)
//   |psi(t) - psi*(t)| <= sum_{|h|<=H} b_h e(ht),
//   b_h = (1 - |h|/(H+1)) / (2H + 2)
//
// with J(u) = pi u (1-|u|) cot(pi u) + |u| on 0 < |u| < 1. The majorant is
// a Fejer kernel scaled by 1/(2H+2), hence real and nonnegative.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "gps/error.hpp"
#include "gps/numeric.hpp"

namespace gps {

inline double sawtooth(double t) { return t - std::floor(t) - 0.5; }

inline double vaaler_kernel(double u) {
    const double a = std::abs(u);
    if (a == 0.0) return 1.0;
    const double pu = std::numbers::pi * a;
    return pu * (1.0 - a) * std::cos(pu) / std::sin(pu) + a;
}

class VaalerApproximation {
public:
    int order() const { return order_; }

    // h in [-H, H], h != 0.
    std::complex<double> a(int h) const {
        require(h != 0 && std::abs(h) <= order_, ErrorKind::invalid_argument, "a_h needs 0 < |h| <= H");
        const std::complex<double> v = a_pos_[static_cast<std::size_t>(std::abs(h) - 1)];
        return h > 0 ? v : std::conj(v);
    }

    // h in [-H, H].
    double b(int h) const {
        require(std::abs(h) <= order_, ErrorKind::invalid_argument, "b_h needs |h| <= H");
        return b_[static_cast<std::size_t>(std::abs(h))];
    }

    // Real trigonometric polynomial sum_{0<|h|<=H} a_h e(ht).
    double approximant(double t) const {
        double s = 0.0;
        const double r = frac(t);
        for (int h = 1; h <= order_; ++h) {
            // a_h e(ht) + conj(a_h e(ht)) = 2 Re(a_h e(ht))
            s += 2.0 * (a_pos_[static_cast<std::size_t>(h - 1)] * unit_phase(r * h)).real();
        }
        return s;
    }

    // sum_{|h|<=H} b_h e(ht) returned as a complex number so callers can
    // observe that the imaginary part vanishes.
    std::complex<double> majorant(double t) const {
        std::complex<double> s = b_[0];
        const double r = frac(t);
        for (int h = 1; h <= order_; ++h) {
            const double bh = b_[static_cast<std::size_t>(h)];
            s += bh * unit_phase(r * h) + bh * unit_phase(-r * h);
        }
        return s;
    }

    friend VaalerApproximation vaaler_coefficients(int H);

private:
    int order_ = 0;
    std::vector<std::complex<double>> a_pos_;  // h = 1..H
    std::vector<double> b_;                    // h = 0..H
};

inline VaalerApproximation vaaler_coefficients(int H) {
    require(H >= 1, ErrorKind::invalid_argument, "Vaaler order H must be >= 1");
    VaalerApproximation v;
    v.order_ = H;
    const double scale = static_cast<double>(H) + 1.0;
    v.a_pos_.reserve(static_cast<std::size_t>(H));
    for (int h = 1; h <= H; ++h) {
        const double j = vaaler_kernel(h / scale);
        // -1 / (2 pi i h) = i / (2 pi h)
        v.a_pos_.emplace_back(0.0, j / (2.0 * std::numbers::pi * h));
    }
    v.b_.reserve(static_cast<std::size_t>(H) + 1);
    for (int h = 0; h <= H; ++h) v.b_.push_back((1.0 - h / scale) / (2.0 * scale));
    return v;
}

struct VaalerCheck {
    double lhs;                  // |psi(t) - approximant(t)|
    std::complex<double> rhs;    // majorant(t)
    bool holds(double tol = 1e-12) const { return lhs <= rhs.real() + tol; }
};

inline VaalerCheck vaaler_check(const VaalerApproximation& approx, double t) {
    return {std::abs(sawtooth(t) - approx.approximant(t)), approx.majorant(t)};
}

}  // namespace gps
