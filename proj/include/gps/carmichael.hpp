#pragma once

// Carmichael numbers: Korselt's criterion, exhaustive enumeration,
// searches restricted to primes of a sequence, counts of primes with smooth
// p - 1, and the exponent algebra governing how many Carmichael numbers can
// be built from such primes.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "gps/core_arith.hpp"
#include "gps/error.hpp"
#include "gps/parallel.hpp"
#include "gps/rational.hpp"
#include "gps/sequence.hpp"

namespace gps {

namespace detail {
inline bool korselt_from(u64 n, std::span<const PrimePower> f) {
    if (f.size() < 2) return false;  // primes and prime powers
    for (const auto& pp : f) {
        if (pp.exponent > 1) return false;
        if ((n - 1) % (pp.prime - 1) != 0) return false;
    }
    return true;
}
}  // namespace detail

// Composite, squarefree, and p - 1 | n - 1 for every p | n.
inline bool korselt_test(u64 n) {
    require(n >= 2, ErrorKind::invalid_argument, "korselt_test needs n >= 2");
    return detail::korselt_from(n, factorize(n));
}

inline bool korselt_test(u64 n, const ArithmeticTables& t) {
    require(n >= 2, ErrorKind::invalid_argument, "korselt_test needs n >= 2");
    return detail::korselt_from(n, t.factor(n));
}

inline constexpr u64 carmichael_limit_max = 1'000'000'000;

// All Carmichael numbers <= limit, ascending.
inline std::vector<u64> enumerate_carmichael(u64 limit) {
    require(limit <= carmichael_limit_max, ErrorKind::invalid_argument, "enumeration limited to 10^9");
    if (limit < 561) return {};
    constexpr u64 block = u64{1} << 16;
    const std::size_t blocks = static_cast<std::size_t>(limit / block + 1);
    const auto parts = parallel_map(blocks, [&](std::size_t b) {
        std::vector<u64> found;
        const u64 lo = std::max<u64>(3, b * block) | 1u;  // Carmichael numbers are odd
        const u64 hi = std::min(limit, (b + 1) * block - 1);
        for (u64 n = lo; n <= hi; n += 2) {
            // Every Carmichael number is a base-2 Fermat pseudoprime.
            if (powmod(2, n - 1, n) != 1) continue;
            if (is_prime_u64(n)) continue;
            if (korselt_test(n)) found.push_back(n);
        }
        return found;
    });
    std::vector<u64> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

struct CarmichaelRecord {
    u64 n = 0;
    std::vector<u64> factors;
    std::vector<Membership> memberships;
    std::vector<u64> ambiguous;  // factors whose membership could not be decided

    bool confirmed() const { return ambiguous.empty(); }
};

// Carmichael numbers <= limit none of whose prime factors is outside the
// sequence. Records with undecided factors are kept but flagged; callers
// that want certified output filter on confirmed().
inline std::vector<CarmichaelRecord> gps_carmichael_search(u64 limit, const SequenceParams& params) {
    std::vector<CarmichaelRecord> out;
    for (u64 n : enumerate_carmichael(limit)) {
        CarmichaelRecord r;
        r.n = n;
        bool excluded = false;
        for (const auto& pp : factorize(n)) {
            const Membership m = membership(pp.prime, params);
            r.factors.push_back(pp.prime);
            r.memberships.push_back(m);
            if (m == Membership::no) excluded = true;
            if (m == Membership::ambiguous) r.ambiguous.push_back(pp.prime);
        }
        if (!excluded) out.push_back(std::move(r));
    }
    return out;
}

inline nlohmann::json to_json(const CarmichaelRecord& r) {
    nlohmann::json memberships = nlohmann::json::array();
    for (auto m : r.memberships) memberships.push_back(m == Membership::yes);
    return {{"n", r.n}, {"factors", r.factors}, {"memberships", memberships}, {"ambiguous", r.ambiguous}};
}

namespace detail {
inline bool is_smooth(std::span<const PrimePower> f, double y) {
    return f.empty() || static_cast<double>(f.back().prime) <= y;
}
}  // namespace detail

// #{p <= x : every prime factor of p - 1 is <= y}
inline i64 smooth_shifted_prime_count(double x, double y, const ArithmeticTables& t) {
    require(y >= 2.0 && y <= x, ErrorKind::invalid_argument, "smooth count needs 2 <= y <= x");
    const u64 n = detail::floor_x(x);
    const auto parts = detail::per_block_primes<i64>(t, n, ResidueClass::make(1, 0), [&](i64& acc, u64 p) {
        if (p == 2 || detail::is_smooth(t.factor(p - 1), y)) ++acc;
    });
    i64 total = 0;
    for (i64 v : parts) total += v;
    return total;
}

// ---------------------------------------------------------------------------
// Exponent algebra.

inline constexpr double default_E = 0.7039;

// -11/26 + 6 gamma / 13: upper end of the admissible B range.
inline double carmichael_B_bound(double gamma) { return -11.0 / 26.0 + 6.0 * gamma / 13.0; }

// E B + (1 - B + B1)(gamma - 1), no checks.
inline double carmichael_exponent_formula(double E, double B, double B1, double gamma) {
    return E * B + (1.0 - B + B1) * (gamma - 1.0);
}

struct CarmichaelParams {
    double E = default_E;
    double B = 0.0;
    double B1 = 0.0;
    double gamma = 1.0;

    static CarmichaelParams make(double E, double B, double B1, double gamma) {
        require(E > 0.0 && E < 1.0, ErrorKind::admissibility, "E must lie in (0, 1)");
        require(gamma > 0.0 && gamma <= 1.0, ErrorKind::admissibility, "gamma must lie in (0, 1]");
        require(B1 <= B, ErrorKind::admissibility, "need B1 <= B");
        require(B < carmichael_B_bound(gamma), ErrorKind::admissibility, "need B < -11/26 + 6 gamma / 13");
        return {E, B, B1, gamma};
    }
};

inline double carmichael_count_exponent(const CarmichaelParams& cp) {
    const auto checked = CarmichaelParams::make(cp.E, cp.B, cp.B1, cp.gamma);
    return carmichael_exponent_formula(checked.E, checked.B, checked.B1, checked.gamma);
}

using CarmichaelRational = Rational;

// gamma solving (-11/26 + 6 gamma / 13) E + gamma - 1 = 0.
inline double gamma_threshold_for_E(double E) {
    require(E > 0.0 && E <= 1.0, ErrorKind::invalid_argument, "E must lie in (0, 1]");
    return (26.0 + 11.0 * E) / (26.0 + 12.0 * E);
}

inline CarmichaelRational gamma_threshold_for_E_exact(const CarmichaelRational& E) {
    require(E > CarmichaelRational(0) && E <= CarmichaelRational(1), ErrorKind::invalid_argument, "E must lie in (0, 1]");
    const CarmichaelRational result = (CarmichaelRational(26) + CarmichaelRational(11) * E) / (CarmichaelRational(26) + CarmichaelRational(12) * E);
    // The threshold must zero the boundary exponent exactly.
    const CarmichaelRational residue =
        (CarmichaelRational(-11, 26) + CarmichaelRational(6, 13) * result) * E + result - CarmichaelRational(1);
    require(residue == CarmichaelRational(0), ErrorKind::admissibility, "threshold does not solve the boundary equation");
    return result;
}

// Safe rational just above the threshold at E = 0.7039.
inline CarmichaelRational rounded_gamma_fraction() { return {18746, 19137}; }

}  // namespace gps
