#pragma once

// Main terms of the prime-counting asymptotics for sequence primes in a
// residue class, the decomposition pi_gps = Sigma1 + Sigma2 + O(x^(gamma-1)),
// and residual reports against the exponent 7 gamma / 13 + 11 / 26.
//
// Integrals of the step functions pi(u; q, a) and theta(u; q, a) are
// evaluated exactly, piece by piece between consecutive primes, never by
// quadrature.

#include <cmath>
#include <string>
#include <vector>

#include "gps/core_arith.hpp"
#include "gps/error.hpp"
#include "gps/numeric.hpp"
#include "gps/rational.hpp"
#include "gps/sequence.hpp"

namespace gps {

// 7 gamma / 13 + 11 / 26
inline double residual_exponent(double gamma) { return 7.0 * gamma / 13.0 + 11.0 / 26.0; }

inline Rational residual_exponent_exact(const Rational& gamma) { return Rational(7, 13) * gamma + Rational(11, 26); }

// The gamma at which the residual exponent stops beating the trivial bound
// x^gamma: the fixed point of 7 gamma / 13 + 11 / 26 = gamma, i.e. 11/12.
inline Rational admissible_gamma_threshold_exact() {
    const Rational g(11, 12);
    if (residual_exponent_exact(g) != g) throw Error(ErrorKind::invalid_argument, "fixed point check failed");
    return g;
}

inline double admissible_gamma_threshold() {
    const Rational g = admissible_gamma_threshold_exact();
    return static_cast<double>(g.numerator()) / static_cast<double>(g.denominator());
}

// c = 1 / gamma at the threshold: 12/11.
inline Rational admissible_c_threshold_exact() { return Rational(1) / admissible_gamma_threshold_exact(); }

namespace detail {

inline void require_theorem(const SequenceParams& p) {
    require(p.theorem_mode(), ErrorKind::window_violation, "operation requires theorem-mode parameters");
}

inline void require_coprime(const ResidueClass& rc) {
    require(rc.coprime(), ErrorKind::non_coprime,
            "gcd(" + std::to_string(rc.a) + ", " + std::to_string(rc.q) + ") != 1");
}

// b^e - a^e for positive a, b, without cancellation when a and b are close.
inline double power_difference(double a, double b, double e) {
    return std::pow(a, e) * std::expm1(e * std::log1p((b - a) / a));
}

struct PsiDifference {
    double value = 0.0;
    bool ambiguous = false;
};

// psi(-theta (n+1-beta)^gamma) - psi(-theta (n-beta)^gamma), evaluated as
// (ceil(v) - ceil(u)) - (v - u) with u, v the two scaled powers. The ceiling
// difference reuses the guarded preimage count; v - u is computed without
// cancellation. Requires n - beta > 0.
inline PsiDifference psi_difference(u64 n, const SequenceParams& p) {
    const Decided count = preimage_by_formula(n, p);
    const double t = static_cast<double>(n) - p.beta;
    const double gap = p.theta * std::pow(t, p.gamma) * std::expm1(p.gamma * std::log1p(1.0 / t));
    return {static_cast<double>(count.value) - gap, count.ambiguous};
}

inline bool in_psi_domain(u64 n, const SequenceParams& p) { return static_cast<double>(n) - p.beta > 0.0; }

struct WeightedSum {
    CompensatedSum sum;
    i64 ambiguous = 0;
};

inline double finish(const std::vector<WeightedSum>& parts, const char* what) {
    CompensatedSum total;
    i64 ambiguous = 0;
    for (const auto& s : parts) {
        total.add(s.sum);
        ambiguous += s.ambiguous;
    }
    require(ambiguous == 0, ErrorKind::ambiguity,
            std::string(what) + ": " + std::to_string(ambiguous) + " undecidable sawtooth terms");
    return total.value();
}

}  // namespace detail

// theta * gamma * sum_{p <= x, p = a (q)} p^(gamma-1)
inline double sigma1(double x, const SequenceParams& p, const ResidueClass& rc, const ArithmeticTables& t) {
    detail::require_theorem(p);
    const u64 n = detail::floor_x(x);
    const double e = p.gamma - 1.0;
    const auto parts = detail::per_block_primes<CompensatedSum>(
        t, n, rc, [&](CompensatedSum& acc, u64 prime) { acc.add(std::pow(static_cast<double>(prime), e)); });
    CompensatedSum total;
    for (const auto& s : parts) total.add(s);
    return p.theta * p.gamma * total.value();
}

// Partial-summation form
//   theta gamma x^(gamma-1) pi(x;q,a) - theta gamma (gamma-1) int_2^x u^(gamma-2) pi(u;q,a) du
// with the integral taken exactly as sum_p (x^(gamma-1) - p^(gamma-1)) / (gamma-1).
inline double sigma1_integral_form(double x, const SequenceParams& p, const ResidueClass& rc,
                                   const ArithmeticTables& t) {
    detail::require_theorem(p);
    const u64 n = detail::floor_x(x);
    const double e = p.gamma - 1.0;
    struct Acc {
        i64 count = 0;
        CompensatedSum integral;
    };
    const auto parts = detail::per_block_primes<Acc>(t, n, rc, [&](Acc& acc, u64 prime) {
        ++acc.count;
        acc.integral.add(detail::power_difference(static_cast<double>(prime), x, e) / e);
    });
    i64 count = 0;
    CompensatedSum integral;
    for (const auto& a : parts) {
        count += a.count;
        integral.add(a.integral);
    }
    const double tg = p.theta * p.gamma;
    return tg * std::pow(x, e) * static_cast<double>(count) - tg * e * integral.value();
}

// sum_{p <= x, p = a (q)} (psi(-theta (p+1-beta)^gamma) - psi(-theta (p-beta)^gamma)),
// over the primes with p - beta > 0.
inline double sigma2(double x, const SequenceParams& p, const ResidueClass& rc, const ArithmeticTables& t) {
    detail::require_theorem(p);
    const u64 n = detail::floor_x(x);
    const auto parts = detail::per_block_primes<detail::WeightedSum>(t, n, rc, [&](detail::WeightedSum& acc, u64 prime) {
        if (!detail::in_psi_domain(prime, p)) return;
        const auto d = detail::psi_difference(prime, p);
        acc.sum.add(d.value);
        acc.ambiguous += d.ambiguous;
    });
    return detail::finish(parts, "sigma2");
}

// Same sawtooth differences weighted by log p over primes.
inline double script_j(double x, const SequenceParams& p, const ResidueClass& rc, const ArithmeticTables& t) {
    detail::require_theorem(p);
    const u64 n = detail::floor_x(x);
    const auto parts = detail::per_block_primes<detail::WeightedSum>(t, n, rc, [&](detail::WeightedSum& acc, u64 prime) {
        if (!detail::in_psi_domain(prime, p)) return;
        const auto d = detail::psi_difference(prime, p);
        acc.sum.add(std::log(static_cast<double>(prime)) * d.value);
        acc.ambiguous += d.ambiguous;
    });
    return detail::finish(parts, "script_j");
}

// Weighted by the von Mangoldt function over all n <= x in the class, so
// prime powers contribute as well.
inline double script_h(double x, const SequenceParams& p, const ResidueClass& rc, const ArithmeticTables& t) {
    detail::require_theorem(p);
    const u64 n = detail::floor_x(x);
    const ResidueClass all = ResidueClass::make(1, 0);
    const auto parts = detail::per_block_primes<detail::WeightedSum>(t, n, all, [&](detail::WeightedSum& acc, u64 prime) {
        const double logp = std::log(static_cast<double>(prime));
        for (u64 pk = prime;;) {
            if (rc.contains(pk) && detail::in_psi_domain(pk, p)) {
                const auto d = detail::psi_difference(pk, p);
                acc.sum.add(logp * d.value);
                acc.ambiguous += d.ambiguous;
            }
            if (pk > n / prime) break;
            pk *= prime;
        }
    });
    return detail::finish(parts, "script_h");
}

namespace detail {

// alpha^(-gamma) gamma [x^(gamma-1) F(x) + (1-gamma) int_2^x u^(gamma-2) F(u) du]
// for the step function F(u) = sum_{p <= u, p = a (q)} w(p). The integral is
// accumulated interval by interval between consecutive primes of the class.
template <class Weight>
double step_main_term(double x, const SequenceParams& p, const ResidueClass& rc, const ArithmeticTables& t,
                      Weight&& weight) {
    const u64 n = floor_x(x);
    require_coverage(t, n);
    const double e = p.gamma - 1.0;
    CompensatedSum level;  // F at the current prime
    CompensatedSum integral;
    double prev = 0.0;
    bool started = false;
    t.for_each_prime(1, n, [&](u64 prime) {
        if (!rc.contains(prime)) return;
        const double q = static_cast<double>(prime);
        if (started) integral.add(level.value() * power_difference(prev, q, e) / e);
        level.add(weight(prime));
        prev = q;
        started = true;
    });
    if (started && x > prev) integral.add(level.value() * power_difference(prev, x, e) / e);
    return p.theta * p.gamma * (std::pow(x, e) * level.value() + (1.0 - p.gamma) * integral.value());
}

inline void require_relative_agreement(double a, double b, double tol, const char* what) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale > 0 && std::abs(a - b) > tol * scale)
        throw Error(ErrorKind::invalid_argument,
                    std::string(what) + ": routes disagree (" + format_real(a) + " vs " + format_real(b) + ")");
}

}  // namespace detail

inline constexpr double route_tolerance = 1e-9;

// Main term with pi(u; q, a). Cross-checked against sigma1 to 1e-9 relative.
inline double main_term_pi(double x, const SequenceParams& p, const ResidueClass& rc, const ArithmeticTables& t) {
    detail::require_theorem(p);
    detail::require_coprime(rc);
    const double v = detail::step_main_term(x, p, rc, t, [](u64) { return 1.0; });
    detail::require_relative_agreement(v, sigma1(x, p, rc, t), route_tolerance, "main_term_pi");
    return v;
}

// theta gamma sum_{p <= x, p = a (q)} p^(gamma-1) log p
inline double weighted_sigma1(double x, const SequenceParams& p, const ResidueClass& rc, const ArithmeticTables& t) {
    detail::require_theorem(p);
    const u64 n = detail::floor_x(x);
    const double e = p.gamma - 1.0;
    const auto parts = detail::per_block_primes<CompensatedSum>(t, n, rc, [&](CompensatedSum& acc, u64 prime) {
        const double q = static_cast<double>(prime);
        acc.add(std::pow(q, e) * std::log(q));
    });
    CompensatedSum total;
    for (const auto& s : parts) total.add(s);
    return p.theta * p.gamma * total.value();
}

// Main term with theta(u; q, a). Cross-checked against the log-weighted sum.
inline double main_term_theta(double x, const SequenceParams& p, const ResidueClass& rc,
                              const ArithmeticTables& t) {
    detail::require_theorem(p);
    detail::require_coprime(rc);
    const double v =
        detail::step_main_term(x, p, rc, t, [](u64 prime) { return std::log(static_cast<double>(prime)); });
    detail::require_relative_agreement(v, weighted_sigma1(x, p, rc, t), route_tolerance, "main_term_theta");
    return v;
}

struct DensityEstimate {
    double estimate = 0.0;        // x^gamma / (alpha^gamma log x)
    double relative_error = 0.0;  // (pi_gps - estimate) / (x^gamma / log^2 x)
    i64 pi_gps = 0;
};

inline DensityEstimate corollary_density(double x, const SequenceParams& p, const ArithmeticTables& t) {
    require(x >= 3.0, ErrorKind::invalid_argument, "corollary_density requires x >= 3");
    const double lx = std::log(x);
    const double xg = std::pow(x, p.gamma);
    DensityEstimate out;
    out.estimate = p.theta * xg / lx;
    const GpsCount count = pi_gps(x, p, ResidueClass::make(1, 0), t);
    require(count.ambiguous == 0, ErrorKind::ambiguity, "corollary_density: undecidable memberships");
    out.pi_gps = count.count;
    out.relative_error = (static_cast<double>(count.count) - out.estimate) / (xg / (lx * lx));
    return out;
}

struct CountReport {
    double x = 0.0;
    i64 pi_gps_value = 0;
    i64 ambiguous = 0;
    double main_term = 0.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double residual = 0.0;             // pi_gps_value - main_term
    double normalized_residual = 0.0;  // residual / x^(7 gamma/13 + 11/26)
    double epsilon_slack = 0.0;
};

inline CountReport count_report(double x, const SequenceParams& p, const ResidueClass& rc, const ArithmeticTables& t) {
    CountReport r;
    r.x = x;
    const GpsCount count = pi_gps(x, p, rc, t);
    r.pi_gps_value = count.count;
    r.ambiguous = count.ambiguous;
    r.main_term = main_term_pi(x, p, rc, t);
    r.sigma1 = sigma1(x, p, rc, t);
    r.sigma2 = sigma2(x, p, rc, t);
    r.residual = static_cast<double>(r.pi_gps_value) - r.main_term;
    r.normalized_residual = r.residual / std::pow(x, residual_exponent(p.gamma));
    return r;
}

inline constexpr const char* count_report_csv_header = "x,pi_gps,sigma1,sigma2,main_term,residual,normalized_residual";

inline std::string to_csv_row(const CountReport& r) {
    return format_real(r.x) + "," + std::to_string(r.pi_gps_value) + "," + format_real(r.sigma1) + "," +
           format_real(r.sigma2) + "," + format_real(r.main_term) + "," + format_real(r.residual) + "," +
           format_real(r.normalized_residual);
}

// Least-squares slope of log|residual| against log x.
inline double residual_slope(const std::vector<CountReport>& reports) {
    std::vector<double> lx, ly;
    for (const auto& r : reports) {
        lx.push_back(std::log(r.x));
        ly.push_back(std::log(std::abs(r.residual)));
    }
    return least_squares_slope(lx, ly);
}

}  // namespace gps
