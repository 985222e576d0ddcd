#pragma once

// Optional on-disk cache for sieve tables, keyed by (lo, hi) and whether
// factor tables were requested. Enabled by pointing GPS_SIEVE_CACHE at a
// writable directory; anything unreadable is rebuilt.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "gps/core_arith.hpp"

namespace gps {

inline constexpr const char* sieve_cache_env = "GPS_SIEVE_CACHE";

namespace detail {

inline constexpr std::uint64_t cache_magic = 0x3130564549534750ull;  // "GPSIEV01"

inline std::filesystem::path cache_file(const std::filesystem::path& dir, u64 lo, u64 hi, bool with_factors) {
    return dir / ("sieve_" + std::to_string(lo) + "_" + std::to_string(hi) + (with_factors ? "_f" : "") + ".bin");
}

template <class T>
bool read_vector(std::istream& in, std::vector<T>& v, std::uint64_t n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    return static_cast<bool>(in);
}

inline std::optional<ArithmeticTables> load_tables(const std::filesystem::path& f, u64 lo, u64 hi, bool with_factors) {
    std::ifstream in(f, std::ios::binary);
    if (!in) return std::nullopt;
    std::array<std::uint64_t, 5> head{};
    in.read(reinterpret_cast<char*>(head.data()), sizeof head);
    if (!in || head[0] != cache_magic || head[1] != lo || head[2] != hi) return std::nullopt;
    const u64 words = (hi - lo + 63) / 64;
    const u64 lpf_len = with_factors ? hi - lo : 0;
    if (head[3] != words || head[4] != lpf_len) return std::nullopt;
    std::vector<u64> bits;
    std::vector<std::uint32_t> lpf;
    if (!read_vector(in, bits, words) || !read_vector(in, lpf, lpf_len)) return std::nullopt;
    return ArithmeticTables::from_storage(lo, hi, std::move(bits), std::move(lpf));
}

inline void store_tables(const std::filesystem::path& f, const ArithmeticTables& t) {
    // Write to a temporary name first so concurrent readers never see a
    // truncated file.
    const auto tmp = f.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return;
        const auto bits = t.bit_words();
        const auto lpf = t.lpf_words();
        const std::array<std::uint64_t, 5> head{cache_magic, t.lo(), t.hi(), bits.size(), lpf.size()};
        out.write(reinterpret_cast<const char*>(head.data()), sizeof head);
        out.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size_bytes()));
        out.write(reinterpret_cast<const char*>(lpf.data()), static_cast<std::streamsize>(lpf.size_bytes()));
        if (!out) return;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, f, ec);
}

}  // namespace detail

// build_tables, going through the cache directory when one is configured.
inline ArithmeticTables cached_tables(u64 lo, u64 hi, bool with_factors = false) {
    const char* dir = std::getenv(sieve_cache_env);
    if (dir == nullptr || *dir == '\0') return build_tables(lo, hi, with_factors);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto f = detail::cache_file(dir, lo, hi, with_factors);
    if (auto t = detail::load_tables(f, lo, hi, with_factors)) return std::move(*t);
    ArithmeticTables t = build_tables(lo, hi, with_factors);
    detail::store_tables(f, t);
    return t;
}

}  // namespace gps
