#pragma once

// Generalized Piatetski-Shapiro sequences floor(alpha * n^c + beta):
// membership, preimage counts and prime counting in residue classes.
//
// Every floor/ceiling decision is made in binary64 first. When the value is
// too close to an integer for binary64 to be trusted it is recomputed with
// 64 significant decimal digits; if it is still within 1e-30 of an integer
// the decision is reported as ambiguous instead of being guessed.
//
// Parameters are taken to be the exact binary64 values passed in (so
// c = 1.05 means the double nearest to 1.05, not 21/20).

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "gps/core_arith.hpp"
#include "gps/error.hpp"
#include "gps/numeric.hpp"
#include "gps/parallel.hpp"

namespace gps {

enum class ParamMode { raw, theorem };

// The exponent window 1 < c < 12/11 under which the counting asymptotics hold.
inline constexpr double theorem_c_upper = 12.0 / 11.0;

struct SequenceParams {
    double alpha = 1.0;
    double beta = 0.0;
    double c = 1.0;
    double gamma = 1.0;  // 1 / c
    double theta = 1.0;  // alpha^(-gamma)
    ParamMode mode = ParamMode::raw;

    static SequenceParams make(double alpha, double beta, double c, ParamMode mode = ParamMode::theorem) {
        require(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(c), ErrorKind::invalid_argument,
                "sequence parameters must be finite");
        require(c > 1.0, ErrorKind::window_violation, "exponent c must exceed 1");
        require(alpha > 0.0, ErrorKind::window_violation, "alpha must be positive");
        if (mode == ParamMode::theorem) {
            require(alpha >= 1.0, ErrorKind::window_violation, "theorem mode requires alpha >= 1");
            require(c < theorem_c_upper, ErrorKind::window_violation, "theorem mode requires c < 12/11");
        }
        SequenceParams p;
        p.alpha = alpha;
        p.beta = beta;
        p.c = c;
        p.gamma = 1.0 / c;
        p.theta = std::pow(alpha, -p.gamma);
        p.mode = mode;
        return p;
    }

    bool theorem_mode() const { return mode == ParamMode::theorem; }
};

struct ResidueClass {
    u64 q = 1;
    u64 a = 0;

    static ResidueClass make(u64 q, u64 a) {
        require(q >= 1, ErrorKind::invalid_argument, "modulus q must be >= 1");
        require(a < q, ErrorKind::invalid_argument, "residue a must satisfy 0 <= a < q");
        return {q, a};
    }

    bool coprime() const { return std::gcd(q, a) == 1; }
    bool contains(u64 n) const { return n % q == a; }
};

enum class Membership { no, yes, ambiguous };

// A count whose floor decisions may have been undecidable.
struct Decided {
    i64 value = 0;
    bool ambiguous = false;
};

struct GpsCount {
    i64 count = 0;
    i64 ambiguous = 0;
};

struct GpsSum {
    double value = 0.0;
    i64 ambiguous = 0;
};

namespace detail {

using HighPrecision = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<64>>;

inline constexpr double fast_guard_abs = 1e-9;
inline constexpr double fast_guard_rel = 1e-13;
inline const HighPrecision& slow_guard() {
    static const HighPrecision g("1e-30");
    return g;
}

inline double guard_for(double y) { return std::max(fast_guard_abs, fast_guard_rel * std::abs(y)); }

// #{n >= 1 : alpha * n^c < t} where t = m + shift - beta, i.e.
// ceil(theta * t^gamma) - 1 for t > 0 and 0 otherwise.
inline Decided count_below(u64 m, int shift, const SequenceParams& p) {
    const double t = static_cast<double>(m) + shift - p.beta;
    if (t <= 0.0) return {0, false};  // alpha * n^c is positive
    const double y = p.theta * std::pow(t, p.gamma);
    const double k = std::floor(y);
    const double f = y - k;
    const double guard = guard_for(y);
    if (f > guard && f < 1.0 - guard) return {static_cast<i64>(k), false};

    const double nearest = std::round(y);
    if (nearest <= 0.0) return {0, false};
    if (nearest == 1.0) {
        // Only n = 1 can be involved: alpha * 1^c < t decided exactly.
        const HighPrecision th = HighPrecision(m) + shift - HighPrecision(p.beta);
        return {th > HighPrecision(p.alpha) ? 1 : 0, false};
    }
    const HighPrecision th = HighPrecision(m) + shift - HighPrecision(p.beta);
    const HighPrecision gh = HighPrecision(1) / HighPrecision(p.c);
    const HighPrecision yh = exp(gh * log(th / HighPrecision(p.alpha)));
    const HighPrecision kh = floor(yh);
    const HighPrecision fh = yh - kh;
    if (fh < slow_guard() || 1 - fh < slow_guard()) return {static_cast<i64>(std::round(y)) - 1, true};
    // ceil(y) - 1 = floor(y) when y is not an integer.
    return {kh.convert_to<i64>(), false};
}

}  // namespace detail

// floor(alpha * n^c + beta) for n >= 1.
inline Decided sequence_value(u64 n, const SequenceParams& p) {
    require(n >= 1, ErrorKind::invalid_argument, "sequence index starts at 1");
    using detail::HighPrecision;
    if (n == 1) {
        // 1^c = 1 exactly, so the value is exact in extended precision.
        const HighPrecision v = HighPrecision(p.alpha) + HighPrecision(p.beta);
        return {floor(v).convert_to<i64>(), false};
    }
    const double v = p.alpha * std::pow(static_cast<double>(n), p.c) + p.beta;
    const double k = std::floor(v);
    const double f = v - k;
    const double guard = detail::guard_for(v);
    if (f > guard && f < 1.0 - guard) return {static_cast<i64>(k), false};
    const HighPrecision vh =
        HighPrecision(p.alpha) * exp(HighPrecision(p.c) * log(HighPrecision(n))) + HighPrecision(p.beta);
    const HighPrecision kh = floor(vh);
    const HighPrecision fh = vh - kh;
    if (fh < detail::slow_guard() || 1 - fh < detail::slow_guard())
        return {static_cast<i64>(std::round(v)), true};
    return {kh.convert_to<i64>(), false};
}

namespace detail {

// Direct enumeration n = 1, 2, ... for values of m at or below beta + 1,
// where the power formula has no positive base to work with.
inline Decided preimage_by_enumeration(u64 m, const SequenceParams& p) {
    Decided out;
    const i64 target = static_cast<i64>(m);
    for (u64 n = 1;; ++n) {
        const Decided v = sequence_value(n, p);
        if (v.ambiguous && v.value >= target - 1 && v.value <= target + 1) out.ambiguous = true;
        if (v.value > target && !v.ambiguous) break;
        if (v.value == target) ++out.value;
        if (n > (u64{1} << 32)) throw Error(ErrorKind::invalid_argument, "enumeration did not terminate");
    }
    return out;
}

inline Decided preimage_by_formula(u64 m, const SequenceParams& p) {
    const Decided upper = count_below(m, 1, p);
    const Decided lower = count_below(m, 0, p);
    return {upper.value - lower.value, upper.ambiguous || lower.ambiguous};
}

}  // namespace detail

// #{n >= 1 : floor(alpha n^c + beta) = m}.
inline Decided preimage_count(u64 m, const SequenceParams& p) {
    require(m >= 1, ErrorKind::invalid_argument, "preimage_count requires m >= 1");
    if (static_cast<double>(m) <= p.beta + 1.0) return detail::preimage_by_enumeration(m, p);
    return detail::preimage_by_formula(m, p);
}

inline Membership membership(u64 m, const SequenceParams& p) {
    const Decided d = preimage_count(m, p);
    if (d.ambiguous) return Membership::ambiguous;
    return d.value >= 1 ? Membership::yes : Membership::no;
}

inline bool is_member(u64 m, const SequenceParams& p) {
    const Membership s = membership(m, p);
    require(s != Membership::ambiguous, ErrorKind::ambiguity,
            "membership of " + std::to_string(m) + " cannot be decided at 64 digits");
    return s == Membership::yes;
}

// Sequence values <= limit in index order, with their indices.
struct SequenceTerm {
    u64 n;
    i64 value;
    bool ambiguous;
};

inline std::vector<SequenceTerm> sequence_terms_up_to(i64 limit, const SequenceParams& p) {
    std::vector<SequenceTerm> out;
    for (u64 n = 1;; ++n) {
        const Decided v = sequence_value(n, p);
        // an ambiguous value is off by at most one
        if (v.value - (v.ambiguous ? 1 : 0) > limit) break;
        if (v.value <= limit) out.push_back({n, v.value, v.ambiguous});
    }
    return out;
}

namespace detail {

inline constexpr u64 prime_block = u64{1} << 18;

inline u64 floor_x(double x) {
    require(std::isfinite(x) && x >= 2.0, ErrorKind::invalid_argument, "x must be >= 2");
    return static_cast<u64>(std::floor(x));
}

inline void require_coverage(const ArithmeticTables& t, u64 n_max) {
    require(t.lo() <= 1 && t.hi() >= n_max, ErrorKind::coverage_gap,
            "tables (" + std::to_string(t.lo()) + ", " + std::to_string(t.hi()) + "] do not cover (1, " +
                std::to_string(n_max) + "]");
}

// Runs fn(acc, p) for the primes p <= n_max in the class, split into fixed
// blocks; returns the per-block accumulators in ascending block order.
template <class Acc, class Fn>
std::vector<Acc> per_block_primes(const ArithmeticTables& t, u64 n_max, const ResidueClass& rc, Fn&& fn) {
    require_coverage(t, n_max);
    const u64 span = n_max - 1;  // integers in (1, n_max]
    const std::size_t blocks = static_cast<std::size_t>((span + prime_block - 1) / prime_block);
    return parallel_map(blocks, [&](std::size_t b) {
        Acc acc{};
        const u64 a = 1 + b * prime_block;
        const u64 e = std::min(n_max, a + prime_block);
        t.for_each_prime(a, e, [&](u64 p) {
            if (rc.contains(p)) fn(acc, p);
        });
        return acc;
    });
}

}  // namespace detail

// pi(x; q, a)
inline i64 pi_ap(double x, const ResidueClass& rc, const ArithmeticTables& t) {
    const u64 n = detail::floor_x(x);
    const auto parts = detail::per_block_primes<i64>(t, n, rc, [](i64& acc, u64) { ++acc; });
    i64 total = 0;
    for (i64 v : parts) total += v;
    return total;
}

// theta(x; q, a) = sum of log p over primes p <= x in the class.
inline double theta_ap(double x, const ResidueClass& rc, const ArithmeticTables& t) {
    const u64 n = detail::floor_x(x);
    const auto parts = detail::per_block_primes<CompensatedSum>(
        t, n, rc, [](CompensatedSum& acc, u64 p) { acc.add(std::log(static_cast<double>(p))); });
    CompensatedSum total;
    for (const auto& s : parts) total.add(s);
    return total.value();
}

// Primes p <= x in the class that belong to the sequence. Ambiguous
// memberships are counted separately and never included.
inline GpsCount pi_gps(double x, const SequenceParams& params, const ResidueClass& rc, const ArithmeticTables& t) {
    const u64 n = detail::floor_x(x);
    const auto parts = detail::per_block_primes<GpsCount>(t, n, rc, [&](GpsCount& acc, u64 p) {
        switch (membership(p, params)) {
            case Membership::yes: ++acc.count; break;
            case Membership::ambiguous: ++acc.ambiguous; break;
            case Membership::no: break;
        }
    });
    GpsCount total;
    for (const auto& v : parts) {
        total.count += v.count;
        total.ambiguous += v.ambiguous;
    }
    return total;
}

inline GpsSum theta_gps(double x, const SequenceParams& params, const ResidueClass& rc, const ArithmeticTables& t) {
    struct Acc {
        CompensatedSum sum;
        i64 ambiguous = 0;
    };
    const u64 n = detail::floor_x(x);
    const auto parts = detail::per_block_primes<Acc>(t, n, rc, [&](Acc& acc, u64 p) {
        switch (membership(p, params)) {
            case Membership::yes: acc.sum.add(std::log(static_cast<double>(p))); break;
            case Membership::ambiguous: ++acc.ambiguous; break;
            case Membership::no: break;
        }
    });
    CompensatedSum total;
    GpsSum out;
    for (const auto& v : parts) {
        total.add(v.sum);
        out.ambiguous += v.ambiguous;
    }
    out.value = total.value();
    return out;
}

}  // namespace gps
