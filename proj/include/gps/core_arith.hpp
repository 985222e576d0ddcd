#pragma once

// Exact integer arithmetic: segmented sieve tables, deterministic 64-bit
// Miller-Rabin, Pollard-rho factorization, and the Mobius / von Mangoldt
// functions built on top of them.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gps/error.hpp"
#include "gps/parallel.hpp"

namespace gps {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline u64 mulmod(u64 a, u64 b, u64 n) { return static_cast<u64>(static_cast<u128>(a) * b % n); }

// a^e mod n by square-and-multiply with 128-bit intermediates.
inline u64 powmod(i64 a, u64 e, u64 n) {
    require(n >= 2, ErrorKind::invalid_argument, "powmod modulus must be >= 2");
    i64 r = a % static_cast<i64>(n);
    u64 base = static_cast<u64>(r < 0 ? r + static_cast<i64>(n) : r);
    u64 result = 1 % n;
    while (e > 0) {
        if (e & 1u) result = mulmod(result, base, n);
        base = mulmod(base, base, n);
        e >>= 1u;
    }
    return result;
}

// Deterministic for all 64-bit inputs (first twelve prime bases).
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1u) == 0) {
        d >>= 1u;
        ++s;
    }
    for (u64 a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        u64 x = powmod(static_cast<i64>(a), d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

struct PrimePower {
    u64 prime;
    unsigned exponent;
    bool operator==(const PrimePower&) const = default;
};

namespace detail {

// Brent's cycle variant of Pollard rho. n must be odd and composite.
inline u64 pollard_rho(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1; c < 200; ++c) {
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r <<= 1u;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
    throw Error(ErrorKind::factorization, "pollard rho failed for " + std::to_string(n));
}

inline void collect_factors(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        out.push_back(n);
        return;
    }
    const u64 d = pollard_rho(n);
    collect_factors(d, out);
    collect_factors(n / d, out);
}

inline std::vector<PrimePower> group(std::vector<u64>& primes) {
    std::sort(primes.begin(), primes.end());
    std::vector<PrimePower> out;
    for (u64 p : primes) {
        if (!out.empty() && out.back().prime == p)
            ++out.back().exponent;
        else
            out.push_back({p, 1});
    }
    return out;
}

}  // namespace detail

// Full factorization of n >= 1, ascending primes. Trial division clears the
// small primes, Pollard rho handles the rest.
inline std::vector<PrimePower> factorize(u64 n) {
    require(n >= 1, ErrorKind::invalid_argument, "factorize requires n >= 1");
    std::vector<u64> primes;
    for (u64 p = 2; p < 64 && p * p <= n; ++p) {
        while (n % p == 0) {
            primes.push_back(p);
            n /= p;
        }
    }
    if (n > 1) detail::collect_factors(n, primes);
    return detail::group(primes);
}

inline int mobius_of(std::span<const PrimePower> f) {
    for (const auto& pp : f)
        if (pp.exponent > 1) return 0;
    return f.size() % 2 == 0 ? 1 : -1;
}

inline double von_mangoldt_of(std::span<const PrimePower> f) {
    return f.size() == 1 ? std::log(static_cast<double>(f.front().prime)) : 0.0;
}

inline int mobius(u64 n) {
    require(n >= 1, ErrorKind::invalid_argument, "mobius(0) is undefined");
    const auto f = factorize(n);
    return mobius_of(f);
}

inline double von_mangoldt(u64 n) {
    require(n >= 1, ErrorKind::invalid_argument, "von_mangoldt(0) is undefined");
    const auto f = factorize(n);
    return von_mangoldt_of(f);
}

// Primes up to limit by a plain sieve; used for sieving bases.
inline std::vector<std::uint32_t> small_primes(std::uint32_t limit) {
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

inline constexpr u64 default_segment_length = u64{1} << 20;

// Sieve-backed primality (and optionally least prime factors) over the
// half-open integer range (lo, hi]. Immutable after construction.
class ArithmeticTables {
public:
    ArithmeticTables() = default;

    u64 lo() const { return lo_; }
    u64 hi() const { return hi_; }
    bool has_factors() const { return !lpf_.empty(); }

    bool covers(u64 n) const { return n > lo_ && n <= hi_; }

    // True when every integer in (a, b] is inside the table.
    bool covers_range(u64 a, u64 b) const { return b <= a || (a >= lo_ && b <= hi_); }

    bool is_prime(u64 n) const {
        check_covered(n);
        const u64 i = n - lo_ - 1;
        return (bits_[i >> 6u] >> (i & 63u)) & 1u;
    }

    u64 least_prime_factor(u64 n) const {
        require(has_factors(), ErrorKind::invalid_argument, "tables were built without factor support");
        check_covered(n);
        return lpf_[n - lo_ - 1];
    }

    // Factorization through the least-prime-factor table while the cofactor
    // stays in range, Pollard rho afterwards.
    std::vector<PrimePower> factor(u64 n) const {
        require(n >= 1, ErrorKind::invalid_argument, "factor requires n >= 1");
        if (!has_factors()) return factorize(n);
        std::vector<u64> primes;
        while (n > 1 && covers(n)) {
            const u64 p = lpf_[n - lo_ - 1];
            primes.push_back(p);
            n /= p;
        }
        if (n > 1) {
            auto rest = factorize(n);
            for (const auto& pp : rest)
                for (unsigned e = 0; e < pp.exponent; ++e) primes.push_back(pp.prime);
        }
        return detail::group(primes);
    }

    int mobius(u64 n) const {
        require(n >= 1, ErrorKind::invalid_argument, "mobius(0) is undefined");
        const auto f = factor(n);
        return mobius_of(f);
    }

    double von_mangoldt(u64 n) const {
        require(n >= 1, ErrorKind::invalid_argument, "von_mangoldt(0) is undefined");
        if (covers(n)) {
            if (is_prime(n)) return std::log(static_cast<double>(n));
            if (!has_factors()) return gps::von_mangoldt(n);
            u64 p = lpf_[n - lo_ - 1];
            u64 m = n;
            while (m % p == 0) m /= p;
            return m == 1 ? std::log(static_cast<double>(p)) : 0.0;
        }
        return gps::von_mangoldt(n);
    }

    // Calls fn(p) for each prime p in (a, b], ascending.
    template <class Fn>
    void for_each_prime(u64 a, u64 b, Fn&& fn) const {
        if (b <= a) return;
        require(covers_range(a, b), ErrorKind::coverage_gap,
                "range (" + std::to_string(a) + ", " + std::to_string(b) + "] outside tables (" +
                    std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
        const u64 first = a - lo_;  // index of a + 1
        const u64 last = b - lo_;   // one past index of b
        u64 word = first >> 6u;
        const u64 end_word = (last + 63) >> 6u;
        for (; word < end_word; ++word) {
            u64 w = bits_[word];
            const u64 base = word << 6u;
            if (base < first) w &= ~u64{0} << (first - base);
            if (base + 64 > last) {
                const u64 keep = last - base;
                if (keep < 64) w &= (u64{1} << keep) - 1;
            }
            while (w) {
                const int tz = std::countr_zero(w);
                fn(lo_ + 1 + base + static_cast<u64>(tz));
                w &= w - 1;
            }
        }
    }

    std::vector<u64> primes_in(u64 a, u64 b) const {
        std::vector<u64> out;
        for_each_prime(a, b, [&](u64 p) { out.push_back(p); });
        return out;
    }

    // Raw storage, exposed for the on-disk cache.
    std::span<const u64> bit_words() const { return bits_; }
    std::span<const std::uint32_t> lpf_words() const { return lpf_; }

    static ArithmeticTables from_storage(u64 lo, u64 hi, std::vector<u64> bits, std::vector<std::uint32_t> lpf) {
        ArithmeticTables t;
        t.lo_ = lo;
        t.hi_ = hi;
        t.bits_ = std::move(bits);
        t.lpf_ = std::move(lpf);
        return t;
    }

    friend ArithmeticTables build_tables(u64 lo, u64 hi, bool with_factors, u64 segment_length);

private:
    void check_covered(u64 n) const {
        require(covers(n), ErrorKind::coverage_gap,
                std::to_string(n) + " outside tables (" + std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
    }

    u64 lo_ = 0;
    u64 hi_ = 0;
    std::vector<u64> bits_;
    std::vector<std::uint32_t> lpf_;
};

// Builds tables over (lo, hi]. Segments are sieved independently (and in
// parallel); each segment owns a disjoint, word-aligned slice of the output.
inline ArithmeticTables build_tables(u64 lo, u64 hi, bool with_factors = false,
                                     u64 segment_length = default_segment_length) {
    require(lo >= 1 && lo < hi, ErrorKind::range_order,
            "need 1 <= lo < hi, got lo=" + std::to_string(lo) + " hi=" + std::to_string(hi));
    require(segment_length > 0, ErrorKind::segment_size, "segment length must be positive");
    require(!with_factors || hi <= 0xffffffffu, ErrorKind::invalid_argument,
            "factor tables are limited to hi < 2^32");

    ArithmeticTables t;
    t.lo_ = lo;
    t.hi_ = hi;
    const u64 count = hi - lo;
    t.bits_.assign((count + 63) / 64, 0);
    if (with_factors) t.lpf_.assign(count, 0);

    const auto base = small_primes(static_cast<std::uint32_t>(isqrt(hi)));
    const u64 seg = (segment_length + 63) / 64 * 64;
    const u64 segments = (count + seg - 1) / seg;

    parallel_for(segments, [&](std::size_t s) {
        const u64 i0 = s * seg;
        const u64 i1 = std::min(count, i0 + seg);
        const u64 n0 = lo + 1 + i0;  // first integer of the segment
        const u64 n1 = lo + i1;      // last integer of the segment
        std::vector<bool> composite(i1 - i0, false);
        for (std::uint32_t p : base) {
            const u64 pp = u64{p} * p;
            if (pp > n1) break;
            u64 start = std::max(pp, (n0 + p - 1) / p * p);
            for (u64 m = start; m <= n1; m += p) {
                const u64 k = m - n0;
                if (with_factors && !composite[k]) t.lpf_[i0 + k] = p;
                composite[k] = true;
            }
        }
        for (u64 k = 0; k < i1 - i0; ++k) {
            const u64 n = n0 + k;
            const bool prime = n >= 2 && !composite[k];
            if (prime) t.bits_[(i0 + k) >> 6u] |= u64{1} << ((i0 + k) & 63u);
            if (with_factors && !composite[k]) t.lpf_[i0 + k] = static_cast<std::uint32_t>(n);
        }
    });
    return t;
}

}  // namespace gps
