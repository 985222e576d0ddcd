#include <gtest/gtest.h>

#include <random>
#include <set>

#include "gps/carmichael.hpp"
#include "oracles.hpp"

using namespace gps;

namespace {

// Membership by looking at every n whose value could land on m.
bool member_by_enumeration(u64 m, double alpha, double beta, double c) {
    const double approx = std::pow((static_cast<double>(m) - beta) / alpha, 1.0 / c);
    const u64 lo = approx > 3 ? static_cast<u64>(approx) - 2 : 1;
    for (u64 n = lo; n <= static_cast<u64>(approx) + 3; ++n)
        if (oracle::sequence_value(n, alpha, beta, c) == static_cast<i64>(m)) return true;
    return false;
}

TEST(Korselt, Examples) {
    EXPECT_TRUE(oracle::fermat_all_bases(561));
    EXPECT_TRUE(korselt_test(561));
    EXPECT_FALSE(korselt_test(6));
    EXPECT_FALSE(korselt_test(7));
    EXPECT_FALSE(korselt_test(9));
    EXPECT_THROW(korselt_test(1), Error);
    const auto t = build_tables(1, 2000, true);
    EXPECT_TRUE(korselt_test(1105, t));
    EXPECT_FALSE(korselt_test(1107, t));
}

TEST(Korselt, AgreesWithFermatDefinition) {
    for (u64 n = 4; n < 10000; ++n) {
        if (oracle::is_prime(n)) continue;
        ASSERT_EQ(korselt_test(n), oracle::fermat_all_bases(n)) << n;
    }
}

TEST(EnumerateCarmichael, SmallLimits) {
    std::vector<u64> brute;
    for (u64 n = 4; n <= 10000; ++n)
        if (!oracle::is_prime(n) && oracle::fermat_all_bases(n)) brute.push_back(n);
    EXPECT_EQ(brute, (std::vector<u64>{561, 1105, 1729, 2465, 2821, 6601, 8911}));
    EXPECT_EQ(enumerate_carmichael(10000), brute);
    EXPECT_TRUE(enumerate_carmichael(500).empty());
    EXPECT_TRUE(enumerate_carmichael(560).empty());
    EXPECT_EQ(enumerate_carmichael(561), std::vector<u64>{561});
    EXPECT_THROW(enumerate_carmichael(2'000'000'000), Error);
}

TEST(EnumerateCarmichael, FermatSpotCheck) {
    const auto list = enumerate_carmichael(1'000'000);
    EXPECT_EQ(list.size(), 43u);
    std::mt19937_64 rng(41);
    for (u64 n : list)
        for (int i = 0; i < 50; ++i) {
            const u64 a = 2 + rng() % (n - 2);
            ASSERT_EQ(powmod(static_cast<i64>(a), n, n), a) << n;
        }
}

TEST(EnumerateCarmichael, ThreadCountIndependent) {
    set_thread_count(1);
    const auto a = enumerate_carmichael(3'000'000);
    set_thread_count(3);
    const auto b = enumerate_carmichael(3'000'000);
    set_thread_count(0);
    EXPECT_EQ(a, b);
}

TEST(GpsCarmichael, BelowFirstCarmichael) {
    for (double c : {1.0001, 1.05, 1.08})
        EXPECT_TRUE(gps_carmichael_search(500, SequenceParams::make(1.0, 0.0, c)).empty());
}

TEST(GpsCarmichael, NearOneKeepsEverything) {
    const double c = 1.0001;
    u64 first_gap = 0;
    for (u64 m = 2; first_gap == 0; ++m)
        if (!member_by_enumeration(m, 1, 0, c)) first_gap = m;
    // Below the first skipped value every prime factor is a member.
    const u64 limit = 2000;
    ASSERT_GT(first_gap, 2000u / 3);
    std::vector<u64> found;
    for (const auto& r : gps_carmichael_search(limit, SequenceParams::make(1.0, 0.0, c))) found.push_back(r.n);
    EXPECT_EQ(found, enumerate_carmichael(limit));
}

void expect_set_equality(double c, u64 limit) {
    const auto p = SequenceParams::make(1.0, 0.0, c);
    std::set<u64> expected;
    for (u64 n : enumerate_carmichael(limit)) {
        bool all = true;
        for (u64 f : oracle::prime_factors_with_multiplicity(n)) all = all && member_by_enumeration(f, 1, 0, c);
        if (all) expected.insert(n);
    }
    std::set<u64> got;
    for (const auto& r : gps_carmichael_search(limit, p)) {
        ASSERT_TRUE(r.confirmed());
        got.insert(r.n);
        for (std::size_t i = 0; i < r.factors.size(); ++i) {
            EXPECT_EQ(r.memberships[i], Membership::yes);
            EXPECT_TRUE(member_by_enumeration(r.factors[i], 1, 0, c));
        }
    }
    EXPECT_EQ(got, expected) << c;
}

TEST(GpsCarmichael, SetEquality) {
    expect_set_equality(1.0001, 1'000'000);
    expect_set_equality(1.05, 1'000'000);
}

TEST(GpsCarmichael, Json) {
    const auto recs = gps_carmichael_search(2000, SequenceParams::make(1.0, 0.0, 1.0001));
    ASSERT_FALSE(recs.empty());
    const auto j = to_json(recs.front());
    EXPECT_EQ(j.dump(), R"({"ambiguous":[],"factors":[3,11,17],"memberships":[true,true,true],"n":561})");
}

TEST(SmoothShifted, Examples) {
    const auto t = build_tables(1, 100000, true);
    EXPECT_EQ(smooth_shifted_prime_count(20, 4, t), 7);
    for (double x : {10.0, 100.0, 5000.0}) EXPECT_EQ(smooth_shifted_prime_count(x, x, t), pi_ap(x, ResidueClass::make(1, 0), t));
    i64 brute = 0;
    for (u64 p = 2; p <= 100000; ++p) {
        if (!oracle::is_prime(p)) continue;
        const auto f = oracle::prime_factors_with_multiplicity(p - 1);
        if (f.empty() || f.back() <= 2) ++brute;
    }
    EXPECT_EQ(brute, 6);  // 2, 3, 5, 17, 257, 65537
    EXPECT_EQ(smooth_shifted_prime_count(100000, 2, t), brute);
    EXPECT_THROW(smooth_shifted_prime_count(10, 1, t), Error);
    EXPECT_THROW(smooth_shifted_prime_count(10, 11, t), Error);
    EXPECT_THROW(smooth_shifted_prime_count(200000, 11, t), Error);
}

TEST(SmoothShifted, MonotoneInBothArguments) {
    const auto t = build_tables(1, 50000, true);
    i64 prev_x = 0;
    for (double x = 100; x <= 50000; x *= 1.5) {
        const i64 v = smooth_shifted_prime_count(x, 30, t);
        EXPECT_GE(v, prev_x);
        prev_x = v;
        i64 prev_y = 0;
        for (double y = 2; y <= x; y *= 2.3) {
            const i64 w = smooth_shifted_prime_count(x, y, t);
            EXPECT_GE(w, prev_y);
            prev_y = w;
        }
    }
}

TEST(Exponent, Examples) {
    EXPECT_DOUBLE_EQ(carmichael_count_exponent(CarmichaelParams::make(0.7, 0.01, 0.01, 0.99)), 0.7 * 0.01 + (0.99 - 1));
    EXPECT_DOUBLE_EQ(carmichael_count_exponent(CarmichaelParams::make(0.7, 0.02, 0.0, 1.0)), 0.7 * 0.02);
    EXPECT_NEAR(carmichael_exponent_formula(0.7039, 0.04, 0.04, 0.985), 0.013156, 1e-12);
    // B = 0.04 exceeds -11/26 + 6(0.985)/13, so the checked form refuses it.
    EXPECT_THROW(CarmichaelParams::make(0.7039, 0.04, 0.04, 0.985), Error);
    EXPECT_THROW(CarmichaelParams::make(0.7, 0.01, 0.02, 0.99), Error);
    EXPECT_THROW(CarmichaelParams::make(1.5, 0.01, 0.0, 0.99), Error);
}

TEST(Exponent, Thresholds) {
    EXPECT_EQ(gamma_threshold_for_E_exact(CarmichaelRational(1)), CarmichaelRational(37, 38));
    EXPECT_DOUBLE_EQ(gamma_threshold_for_E(1.0), 37.0 / 38.0);
    const double g = gamma_threshold_for_E(0.7039);
    EXPECT_NEAR(g, 0.9795655, 5e-7);
    EXPECT_NEAR(g, to_double(rounded_gamma_fraction()), 5e-6);
    EXPECT_GT(to_double(rounded_gamma_fraction()), g);
    EXPECT_NEAR(gamma_threshold_for_E(1e-9), 1.0, 1e-9);
    EXPECT_THROW(gamma_threshold_for_E(0.0), Error);
    EXPECT_THROW(gamma_threshold_for_E(1.5), Error);
    EXPECT_EQ(to_string(rounded_gamma_fraction()), "18746/19137");
}

// With B at the top of its range and B1 = B, the exponent is positive exactly
// when gamma clears the threshold. Checked in exact arithmetic.
TEST(Exponent, BoundaryAlgebra) {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 500; ++i) {
        const CarmichaelRational E(1 + static_cast<long>(rng() % 9999), 10000);
        const CarmichaelRational g(9000 + static_cast<long>(rng() % 1000), 10000);
        const CarmichaelRational B = CarmichaelRational(-11, 26) + CarmichaelRational(6, 13) * g;
        const CarmichaelRational exponent = E * B + (g - CarmichaelRational(1));
        const CarmichaelRational threshold = gamma_threshold_for_E_exact(E);
        EXPECT_EQ(exponent > CarmichaelRational(0), g > threshold);
        EXPECT_EQ(exponent == CarmichaelRational(0), g == threshold);
    }
}

}  // namespace
