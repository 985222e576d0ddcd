#pragma once

// Exponential sums attached to the phase theta h n^gamma + xi n:
// weighted phase sums, van der Corput derivative-test bounds, the Weyl-van
// der Corput differencing inequality, Type I / Type II bilinear sums with
// their bounds, the Heath-Brown identity for Lambda(n), the classifier that
// routes a six-fold factorization to Type I or Type II, and the optimizer
// for sums of growing and decaying monomials.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gps/core_arith.hpp"
#include "gps/error.hpp"
#include "gps/numeric.hpp"
#include "gps/parallel.hpp"
#include "gps/sequence.hpp"

namespace gps {

// Amplitude and exponent of the power part of a phase.
struct PhaseModel {
    double theta = 1.0;
    double gamma = 1.0;

    static PhaseModel from(const SequenceParams& p) { return {p.theta, p.gamma}; }
};

// e(theta' n^gamma + xi n) for n in (a, b].
struct PhaseSpec {
    double theta_coeff = 0.0;
    double gamma = 0.5;
    double xi = 0.0;
    u64 a = 0;
    u64 b = 0;

    void validate() const {
        require(std::isfinite(theta_coeff) && std::isfinite(xi), ErrorKind::invalid_argument,
                "phase coefficients must be finite");
        require(gamma > 0.0 && gamma < 1.0, ErrorKind::invalid_argument, "gamma must lie in (0, 1)");
        require(b > a, ErrorKind::range_order, "phase range (a, b] must be nonempty");
    }

    bool dyadic() const { return a >= 1 && b <= 2 * a; }

    // Size of f'' and f''' at the left end of the range.
    double lambda2() const {
        return std::abs(gamma * (gamma - 1.0) * theta_coeff) * std::pow(static_cast<double>(a), gamma - 2.0);
    }
    double lambda3() const {
        return std::abs(gamma * (gamma - 1.0) * (gamma - 2.0) * theta_coeff) *
               std::pow(static_cast<double>(a), gamma - 3.0);
    }
};

namespace detail {

// Past this n a rounded n^gamma can carry a visible phase error.
inline constexpr u64 compensated_power_from = u64{1} << 30;

// n^gamma = hi + lo, the tail taken from 64-digit arithmetic.
inline TwoProduct split_power(u64 n, double gamma) {
    const HighPrecision p = boost::multiprecision::pow(HighPrecision(n), HighPrecision(gamma));
    const double hi = static_cast<double>(p);
    return {hi, static_cast<double>(p - hi)};
}

}  // namespace detail

// theta' n^gamma + xi n reduced mod 1 into [-1/2, 1/2]. Products are split
// into exact hi + lo pairs before reduction so large phases keep their
// fraction; beyond 2^30 the power itself is split as well.
inline double phase_fraction(double theta_coeff, double gamma, double xi, u64 n) {
    const double nd = static_cast<double>(n);
    const TwoProduct linear = two_product(xi, nd);
    double power;
    if (n <= detail::compensated_power_from) {
        const TwoProduct p = two_product(theta_coeff, std::pow(nd, gamma));
        power = centered_of_sum(p.hi, p.lo);
    } else {
        const TwoProduct split = detail::split_power(n, gamma);
        const TwoProduct p = two_product(theta_coeff, split.hi);
        const TwoProduct q = two_product(theta_coeff, split.lo);
        power = centered(centered_of_sum(p.hi, p.lo) + centered_of_sum(q.hi, q.lo));
    }
    return centered(power + centered_of_sum(linear.hi, linear.lo));
}

enum class WeightKind { unit, log, von_mangoldt };

// w(n) for n in (a, b].
inline std::vector<double> weight_table(WeightKind kind, u64 a, u64 b) {
    require(b > a, ErrorKind::range_order, "weight range (a, b] must be nonempty");
    std::vector<double> w(b - a);
    switch (kind) {
        case WeightKind::unit: std::fill(w.begin(), w.end(), 1.0); break;
        case WeightKind::log:
            for (u64 n = a + 1; n <= b; ++n) w[n - a - 1] = std::log(static_cast<double>(n));
            break;
        case WeightKind::von_mangoldt: {
            const u64 lo = std::max<u64>(a, 1);
            if (b > lo) {
                const ArithmeticTables t = build_tables(lo, b, true);
                for (u64 n = lo + 1; n <= b; ++n) w[n - a - 1] = t.von_mangoldt(n);
            }
            break;  // Lambda(1) = 0
        }
    }
    return w;
}

namespace detail {
inline constexpr u64 phase_block = u64{1} << 14;

inline std::complex<double> phase_sum_serial(const PhaseSpec& s, std::span<const double> w) {
    CompensatedComplexSum acc;
    for (u64 n = s.a + 1; n <= s.b; ++n) {
        const double wn = w[n - s.a - 1];
        if (wn == 0.0) continue;
        acc.add(wn * unit_phase(phase_fraction(s.theta_coeff, s.gamma, s.xi, n)));
    }
    return acc.value();
}
}  // namespace detail

// sum_{a < n <= b} w(n) e(theta' n^gamma + xi n); w[i] is the weight of a + 1 + i.
inline std::complex<double> phase_sum(const PhaseSpec& s, std::span<const double> w) {
    s.validate();
    require(w.size() == s.b - s.a, ErrorKind::invalid_argument, "weight table length must equal b - a");
    const u64 len = s.b - s.a;
    const std::size_t blocks = static_cast<std::size_t>((len + detail::phase_block - 1) / detail::phase_block);
    const auto parts = parallel_map(blocks, [&](std::size_t i) {
        CompensatedComplexSum acc;
        const u64 n0 = s.a + 1 + i * detail::phase_block;
        const u64 n1 = std::min(s.b, n0 + detail::phase_block - 1);
        for (u64 n = n0; n <= n1; ++n) {
            const double wn = w[n - s.a - 1];
            if (wn == 0.0) continue;
            acc.add(wn * unit_phase(phase_fraction(s.theta_coeff, s.gamma, s.xi, n)));
        }
        return acc;
    });
    CompensatedComplexSum total;
    for (const auto& p : parts) total.add(p);
    return total.value();
}

inline std::complex<double> phase_sum(const PhaseSpec& s, WeightKind kind) {
    s.validate();
    const auto w = weight_table(kind, s.a, s.b);
    return phase_sum(s, w);
}

// sum_{1 <= h <= H} | sum_{x/2 < n <= x} Lambda(n) e(theta h n^gamma + xi n) |
inline double weighted_lambda_sum(double x, int H, const PhaseModel& model, double xi) {
    require(x >= 4.0, ErrorKind::invalid_argument, "weighted_lambda_sum requires x >= 4");
    require(H >= 1, ErrorKind::invalid_argument, "H must be >= 1");
    const u64 b = static_cast<u64>(std::floor(x));
    const u64 a = static_cast<u64>(std::floor(x / 2.0));
    const auto w = weight_table(WeightKind::von_mangoldt, a, b);
    const auto parts = parallel_map(static_cast<std::size_t>(H), [&](std::size_t i) {
        const PhaseSpec s{model.theta * static_cast<double>(i + 1), model.gamma, xi, a, b};
        return std::abs(detail::phase_sum_serial(s, w));
    });
    CompensatedSum total;
    for (double v : parts) total.add(v);
    return total.value();
}

inline double weighted_lambda_sum(double x, int H, const SequenceParams& p, double xi) {
    return weighted_lambda_sum(x, H, PhaseModel::from(p), xi);
}

enum class DerivativeOrder { second, third };

// a lambda^(1/2) + lambda^(-1/2)  or  a lambda^(1/6) + lambda^(-1/3).
inline double derivative_test_bound(double a, double lambda, DerivativeOrder order) {
    require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::invalid_argument, "derivative scale must be positive");
    if (order == DerivativeOrder::second) return a * std::sqrt(lambda) + 1.0 / std::sqrt(lambda);
    return a * std::pow(lambda, 1.0 / 6.0) + std::pow(lambda, -1.0 / 3.0);
}

inline double derivative_test_bound(const PhaseSpec& s, DerivativeOrder order) {
    s.validate();
    require(s.dyadic(), ErrorKind::range_order, "derivative tests need 1 <= a < b <= 2a");
    const double lambda = order == DerivativeOrder::second ? s.lambda2() : s.lambda3();
    return derivative_test_bound(static_cast<double>(s.a), lambda, order);
}

// ---------------------------------------------------------------------------
// Bilinear sums over k ~ K, l ~ L (K < k <= 2K, L < l <= 2L).

enum class CoefficientKind { unit, log, mobius, random_sign, custom };

struct CoefficientFamily {
    CoefficientKind kind = CoefficientKind::unit;
    std::vector<double> values;  // values[i] belongs to N + 1 + i

    double at(std::size_t i) const { return values[i]; }
};

inline CoefficientFamily make_coefficients(CoefficientKind kind, u64 N, u64 seed = 0,
                                           std::span<const double> custom = {}) {
    require(N >= 1, ErrorKind::invalid_argument, "coefficient scale must be >= 1");
    CoefficientFamily f;
    f.kind = kind;
    f.values.resize(N);
    switch (kind) {
        case CoefficientKind::unit: std::fill(f.values.begin(), f.values.end(), 1.0); break;
        case CoefficientKind::log:
            for (u64 i = 0; i < N; ++i) f.values[i] = std::log(static_cast<double>(N + 1 + i));
            break;
        case CoefficientKind::mobius: {
            const ArithmeticTables t = build_tables(N, 2 * N, true);
            for (u64 i = 0; i < N; ++i) f.values[i] = t.mobius(N + 1 + i);
            break;
        }
        case CoefficientKind::random_sign: {
            std::mt19937_64 rng(seed);
            for (auto& v : f.values) v = (rng() >> 63u) ? 1.0 : -1.0;
            break;
        }
        case CoefficientKind::custom:
            require(custom.size() == N, ErrorKind::invalid_argument, "custom coefficients need exactly N values");
            std::copy(custom.begin(), custom.end(), f.values.begin());
            break;
    }
    return f;
}

struct BilinearSumSpec {
    u64 K = 1;
    u64 L = 1;
    int H = 1;
    u64 Q = 1;
    CoefficientFamily a;  // over k ~ K
    CoefficientFamily b;  // over l ~ L
    double xi = 0.0;

    static BilinearSumSpec make(u64 K, u64 L, int H, u64 Q, CoefficientFamily a, CoefficientFamily b, double xi = 0.0) {
        require(K >= 1 && L >= 1, ErrorKind::invalid_argument, "K and L must be >= 1");
        require(H >= 1, ErrorKind::invalid_argument, "H must be >= 1");
        require(Q >= 1, ErrorKind::invalid_argument, "Q must be >= 1");
        require(a.values.size() == K && b.values.size() == L, ErrorKind::invalid_argument,
                "coefficient families must match K and L");
        return {K, L, H, Q, std::move(a), std::move(b), xi};
    }
};

// sum_{k ~ K} sum_{l ~ L} a_k b_l e(theta h (k l)^gamma + xi k l)
inline std::complex<double> bilinear_sum(const BilinearSumSpec& s, const PhaseModel& model, int h) {
    const double amp = model.theta * h;
    const auto rows = parallel_map(static_cast<std::size_t>(s.K), [&](std::size_t i) {
        const u64 k = s.K + 1 + i;
        const double ak = s.a.at(i);
        CompensatedComplexSum row;
        if (ak == 0.0) return row;
        for (u64 j = 0; j < s.L; ++j) {
            const double bl = s.b.at(j);
            if (bl == 0.0) continue;
            const u64 l = s.L + 1 + j;
            row.add(ak * bl * unit_phase(phase_fraction(amp, model.gamma, s.xi, k * l)));
        }
        return row;
    });
    CompensatedComplexSum total;
    for (const auto& r : rows) total.add(r);
    return total.value();
}

// sum_{0 < |h| <= H} |bilinear_sum(h)|
inline double bilinear_h_sum(const BilinearSumSpec& s, const PhaseModel& model) {
    CompensatedSum total;
    for (int h = 1; h <= s.H; ++h) {
        total.add(std::abs(bilinear_sum(s, model, h)));
        total.add(std::abs(bilinear_sum(s, model, -h)));
    }
    return total.value();
}

inline double type_I_bound(int H, double x, double gamma) {
    const double h = H;
    return std::pow(h, 7.0 / 6.0) * std::pow(x, gamma / 6.0 + 0.75) + std::pow(h, 2.0 / 3.0) * std::pow(x, 1.0 - gamma / 3.0);
}

inline double type_II_bound(int H, double x, double gamma) {
    const double h = H;
    return std::pow(h, 1.25) * std::pow(x, gamma / 4.0 + 0.625) + std::pow(h, 0.75) * std::pow(x, 1.0 - gamma / 4.0) +
           h * std::pow(x, 22.0 / 25.0) + std::pow(h, 7.0 / 6.0) * std::pow(x, gamma / 6.0 + 0.75);
}

struct BilinearEvaluation {
    double value = 0.0;
    double lemma_bound = 0.0;
    double ratio() const { return value / lemma_bound; }
};

namespace detail {
inline void require_balanced(const BilinearSumSpec& s, double x) {
    const double kl = static_cast<double>(s.K) * static_cast<double>(s.L);
    require(x >= 1.0 && kl >= x / 4.0 && kl <= 4.0 * x, ErrorKind::window_violation,
            "KL must be within a factor 4 of x");
}
}  // namespace detail

// Type I: b_l smooth (1 or log l) and K <= x^(1/2).
inline BilinearEvaluation type_I_sum(const BilinearSumSpec& s, double x, const PhaseModel& model) {
    require(s.b.kind == CoefficientKind::unit || s.b.kind == CoefficientKind::log, ErrorKind::window_violation,
            "Type I sums need b_l = 1 or b_l = log l");
    detail::require_balanced(s, x);
    require(static_cast<double>(s.K) <= std::sqrt(x), ErrorKind::window_violation, "Type I sums need K <= x^(1/2)");
    return {bilinear_h_sum(s, model), type_I_bound(s.H, x, model.gamma)};
}

// Type II: x^(1/2) <= K <= x^(19/25).
inline BilinearEvaluation type_II_sum(const BilinearSumSpec& s, double x, const PhaseModel& model) {
    detail::require_balanced(s, x);
    const double k = static_cast<double>(s.K);
    require(k >= std::sqrt(x) && k <= std::pow(x, 19.0 / 25.0), ErrorKind::window_violation,
            "Type II sums need x^(1/2) <= K <= x^(19/25)");
    return {bilinear_h_sum(s, model), type_II_bound(s.H, x, model.gamma)};
}

inline BilinearEvaluation type_I_sum(const BilinearSumSpec& s, double x, const SequenceParams& p) {
    return type_I_sum(s, x, PhaseModel::from(p));
}
inline BilinearEvaluation type_II_sum(const BilinearSumSpec& s, double x, const SequenceParams& p) {
    return type_II_sum(s, x, PhaseModel::from(p));
}

struct WeylCheck {
    double lhs_sq = 0.0;
    double rhs = 0.0;
};

// |S|^2 against K^2 L^2 / Q + (K L / Q) sum_{l ~ L} sum_{0<|q|<=Q} |S(q; l)|,
//   S(q; l) = sum_{k ~ K} e(theta h k^gamma (l^gamma - (l+q)^gamma) - xi k q).
// Cauchy-Schwarz plus Weyl differencing give lhs_sq <= 2 rhs when
// |a_k|, |b_l| <= 1.
inline WeylCheck weyl_van_der_corput_check(const BilinearSumSpec& s, int h, const PhaseModel& model) {
    require(s.Q < s.L, ErrorKind::window_violation, "Weyl shift budget needs Q < L");
    require(s.K <= 10000 && s.L <= 10000, ErrorKind::invalid_argument, "direct evaluation limited to K, L <= 10^4");
    WeylCheck out;
    out.lhs_sq = std::norm(bilinear_sum(s, model, h));
    const double amp = model.theta * h;
    const i64 Q = static_cast<i64>(s.Q);
    std::vector<double> kpow(s.K);
    for (u64 i = 0; i < s.K; ++i) kpow[i] = std::pow(static_cast<double>(s.K + 1 + i), model.gamma);
    const auto per_l = parallel_map(static_cast<std::size_t>(s.L), [&](std::size_t j) {
        const double l = static_cast<double>(s.L + 1 + j);
        const double lg = std::pow(l, model.gamma);
        CompensatedSum acc;
        for (i64 q = -Q; q <= Q; ++q) {
            if (q == 0) continue;
            // l^gamma - (l+q)^gamma without cancellation
            const double diff = -lg * std::expm1(model.gamma * std::log1p(static_cast<double>(q) / l));
            CompensatedComplexSum inner;
            for (u64 i = 0; i < s.K; ++i) {
                const double k = static_cast<double>(s.K + 1 + i);
                const TwoProduct p1 = two_product(amp * diff, kpow[i]);
                const TwoProduct p2 = two_product(s.xi, k * static_cast<double>(q));
                const double phase = centered(centered_of_sum(p1.hi, p1.lo) - centered_of_sum(p2.hi, p2.lo));
                inner.add(unit_phase(phase));
            }
            acc.add(std::abs(inner.value()));
        }
        return acc;
    });
    CompensatedSum total;
    for (const auto& v : per_l) total.add(v);
    const double K = static_cast<double>(s.K), L = static_cast<double>(s.L), Qd = static_cast<double>(s.Q);
    out.rhs = K * K * L * L / Qd + K * L / Qd * total.value();
    return out;
}

// ---------------------------------------------------------------------------
// Heath-Brown identity
//
//   Lambda(n) = sum_{j=1}^{k} (-1)^(j-1) C(k, j)
//               sum_{n_1 ... n_2j = n, n_{j+1..2j} <= z} log(n_1) mu(n_{j+1}) ... mu(n_{2j})
//
// valid for n <= 2 z^k. Evaluated by enumerating ordered factorizations,
// skipping constrained factors with mu = 0.

struct HBTerm {
    int j = 0;
    int sign = 1;
    u64 binomial = 1;
    std::vector<u64> factors;  // n_1, ..., n_2j
    double contribution = 0.0;  // sign * binomial * log(n_1) * prod mu
};

struct HBDecomposition {
    int k_order = 0;
    u64 z = 0;
    u64 n = 0;
    std::vector<HBTerm> terms;

    double value() const {
        CompensatedSum s;
        for (const auto& t : terms) s.add(t.contribution);
        return s.value();
    }
};

namespace detail {

inline u64 binomial(int n, int k) {
    u64 r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<u64>(n - k + i) / static_cast<u64>(i);
    return r;
}

inline std::vector<u64> divisors_of(std::span<const PrimePower> f) {
    std::vector<u64> d{1};
    for (const auto& pp : f) {
        const std::size_t n = d.size();
        u64 pk = 1;
        for (unsigned e = 1; e <= pp.exponent; ++e) {
            pk *= pp.prime;
            for (std::size_t i = 0; i < n; ++i) d.push_back(d[i] * pk);
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

// Visits every ordered tuple (n_1, ..., n_2j) with product n, constrained
// factors <= z and squarefree, and n_1 > 1; visit(tuple, mu product).
template <class Visit>
void hb_enumerate(u64 n, int j, u64 z, std::span<const u64> divisors, std::span<const int> mu_small,
                  std::vector<u64>& tuple, Visit&& visit) {
    const int width = 2 * j;
    tuple.assign(static_cast<std::size_t>(width), 1);
    // Positions are filled in the order 2j-1, ..., j (constrained), then
    // j-1, ..., 1 (free), and finally position 0 takes the cofactor.
    std::function<void(int, u64, int)> rec = [&](int pos, u64 rem, int mu) {
        if (pos == 0) {
            if (rem == 1) return;  // log 1 = 0
            tuple[0] = rem;
            visit(tuple, mu);
            return;
        }
        const bool constrained = pos >= j;
        for (u64 d : divisors) {
            if (d > rem) break;
            if (rem % d != 0) continue;
            int m = 1;
            if (constrained) {
                if (d > z) break;
                m = mu_small[d];
                if (m == 0) continue;
            }
            tuple[static_cast<std::size_t>(pos)] = d;
            rec(pos - 1, rem / d, mu * m);
        }
    };
    rec(width - 1, n, 1);
}

inline std::vector<int> mobius_table(u64 z, const ArithmeticTables& t) {
    std::vector<int> mu(z + 1, 0);
    for (u64 d = 1; d <= z; ++d) mu[d] = t.covers(d) ? t.mobius(d) : mobius(d);
    return mu;
}

inline void hb_require(u64 n, int k, u64 z) {
    require(n >= 1, ErrorKind::invalid_argument, "Heath-Brown identity needs n >= 1");
    require(k >= 1 && z >= 1, ErrorKind::invalid_argument, "Heath-Brown identity needs k, z >= 1");
    long double bound = 2.0L;
    for (int i = 0; i < k; ++i) bound *= static_cast<long double>(z);
    require(static_cast<long double>(n) <= bound, ErrorKind::window_violation,
            "Heath-Brown identity needs n <= 2 z^k");
}

}  // namespace detail

inline HBDecomposition hb_decompose(u64 n, int k, u64 z, const ArithmeticTables& t) {
    detail::hb_require(n, k, z);
    HBDecomposition out{k, z, n, {}};
    const auto f = t.covers(n) ? t.factor(n) : factorize(n);
    const auto divisors = detail::divisors_of(f);
    const auto mu = detail::mobius_table(z, t);
    std::vector<u64> tuple;
    for (int j = 1; j <= k; ++j) {
        const int sign = j % 2 == 1 ? 1 : -1;
        const u64 binom = detail::binomial(k, j);
        detail::hb_enumerate(n, j, z, divisors, mu, tuple, [&](const std::vector<u64>& tup, int m) {
            const double c = sign * static_cast<double>(binom) * m * std::log(static_cast<double>(tup[0]));
            out.terms.push_back({j, sign, binom, tup, c});
        });
    }
    return out;
}

// Right-hand side of the identity; equals Lambda(n) for n <= 2 z^k.
inline double hb_lambda(u64 n, int k, u64 z, const ArithmeticTables& t) {
    detail::hb_require(n, k, z);
    if (n == 1) return 0.0;
    const auto f = t.covers(n) ? t.factor(n) : factorize(n);
    const auto divisors = detail::divisors_of(f);
    const auto mu = detail::mobius_table(z, t);
    std::vector<u64> tuple;
    CompensatedSum total;
    for (int j = 1; j <= k; ++j) {
        const double weight = (j % 2 == 1 ? 1.0 : -1.0) * static_cast<double>(detail::binomial(k, j));
        // Group by n_1 so each log is taken once per distinct cofactor.
        std::vector<i64> by_cofactor(divisors.size(), 0);
        detail::hb_enumerate(n, j, z, divisors, mu, tuple, [&](const std::vector<u64>& tup, int m) {
            const auto it = std::lower_bound(divisors.begin(), divisors.end(), tup[0]);
            by_cofactor[static_cast<std::size_t>(it - divisors.begin())] += m;
        });
        for (std::size_t i = 0; i < divisors.size(); ++i)
            if (by_cofactor[i] != 0)
                total.add(weight * static_cast<double>(by_cofactor[i]) * std::log(static_cast<double>(divisors[i])));
    }
    return total.value();
}

// ---------------------------------------------------------------------------
// Routing of a six-fold dyadic factorization N_1 ... N_6 ~ x.

enum class FactorizationCase { type_I, type_II_direct, type_II_grouped };

struct Classification {
    FactorizationCase kind = FactorizationCase::type_I;
    int index = 0;  // 1-based j for the direct cases, r for the grouped case
    double K = 0.0;
    double L = 0.0;
};

inline Classification classify_factorization(const std::array<double, 6>& N, double x) {
    require(x > 1.0, ErrorKind::invalid_argument, "x must exceed 1");
    double product = 1.0;
    for (double v : N) {
        require(v >= 1.0 && std::isfinite(v), ErrorKind::invalid_argument, "every N_i must be >= 1");
        product *= v;
    }
    require(product >= x / 4.0 && product <= 4.0 * x, ErrorKind::window_violation,
            "N_1 ... N_6 must be within a factor 4 of x");
    const double cube = std::cbrt(2.0 * x);
    for (int i = 3; i < 6; ++i)
        require(N[static_cast<std::size_t>(i)] <= cube, ErrorKind::window_violation, "N_4, N_5, N_6 must be <= (2x)^(1/3)");

    const double lx = std::log(x);
    auto exponent = [&](double v) { return std::log(v) / lx; };
    auto others = [&](int j) { return product / N[static_cast<std::size_t>(j)]; };

    // Smallest qualifying index wins when several do.
    for (int j = 0; j < 6; ++j)
        if (exponent(N[static_cast<std::size_t>(j)]) >= 0.5)
            return {FactorizationCase::type_I, j + 1, others(j), N[static_cast<std::size_t>(j)]};
    for (int j = 0; j < 6; ++j) {
        const double e = exponent(N[static_cast<std::size_t>(j)]);
        if (e >= 6.0 / 25.0 && e < 0.5)
            return {FactorizationCase::type_II_direct, j + 1, others(j), N[static_cast<std::size_t>(j)]};
    }
    std::array<double, 6> sorted = N;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double partial = 1.0;
    for (int r = 1; r <= 6; ++r) {
        partial *= sorted[static_cast<std::size_t>(r - 1)];
        if (exponent(partial) >= 6.0 / 25.0) return {FactorizationCase::type_II_grouped, r, product / partial, partial};
    }
    throw Error(ErrorKind::window_violation, "product of all N_i stays below x^(6/25)");
}

// ---------------------------------------------------------------------------
// L(H) = sum A_i H^a_i + sum B_j H^-b_j on [H1, H2].

struct Monomial {
    double coeff;
    double exponent;
};

struct MonomialBound {
    std::vector<Monomial> growth;
    std::vector<Monomial> decay;
    double H1 = 1.0;
    double H2 = 1.0;

    void validate() const {
        require(!growth.empty() && !decay.empty(), ErrorKind::invalid_argument,
                "need at least one growing and one decaying term");
        for (const auto& m : growth)
            require(m.coeff > 0 && m.exponent > 0, ErrorKind::invalid_argument, "coefficients and exponents must be positive");
        for (const auto& m : decay)
            require(m.coeff > 0 && m.exponent > 0, ErrorKind::invalid_argument, "coefficients and exponents must be positive");
        require(H1 > 0 && H1 <= H2, ErrorKind::range_order, "need 0 < H1 <= H2");
    }

    double operator()(double H) const {
        double s = 0;
        for (const auto& m : growth) s += m.coeff * std::pow(H, m.exponent);
        for (const auto& m : decay) s += m.coeff * std::pow(H, -m.exponent);
        return s;
    }

    // H L'(H); strictly increasing in H, so L is unimodal.
    double scaled_slope(double H) const {
        double s = 0;
        for (const auto& m : growth) s += m.exponent * m.coeff * std::pow(H, m.exponent);
        for (const auto& m : decay) s -= m.exponent * m.coeff * std::pow(H, -m.exponent);
        return s;
    }

    // sum A_i H1^a_i + sum B_j H2^-b_j + sum_ij (A_i^b_j B_j^a_i)^(1/(a_i+b_j))
    double closed_bound() const {
        double s = 0;
        for (const auto& m : growth) s += m.coeff * std::pow(H1, m.exponent);
        for (const auto& m : decay) s += m.coeff * std::pow(H2, -m.exponent);
        for (const auto& g : growth)
            for (const auto& d : decay)
                s += std::exp((d.exponent * std::log(g.coeff) + g.exponent * std::log(d.coeff)) /
                              (g.exponent + d.exponent));
        return s;
    }
};

struct SrinivasanResult {
    double h_opt = 0.0;
    double value = 0.0;
    double closed_bound = 0.0;
};

inline SrinivasanResult srinivasan_optimize(const MonomialBound& mb) {
    mb.validate();
    double h;
    if (mb.scaled_slope(mb.H1) >= 0.0) {
        h = mb.H1;
    } else if (mb.scaled_slope(mb.H2) <= 0.0) {
        h = mb.H2;
    } else {
        double lo = std::log(mb.H1), hi = std::log(mb.H2);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mb.scaled_slope(std::exp(mid)) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        h = std::exp(0.5 * (lo + hi));
    }
    // Polish on a short grid around the root; guards against rounding in
    // the slope near a flat minimum.
    double best_h = h, best = mb(h);
    for (int i = -8; i <= 8; ++i) {
        const double cand = std::clamp(h * std::exp(i * 1e-9), mb.H1, mb.H2);
        const double v = mb(cand);
        if (v < best) {
            best = v;
            best_h = cand;
        }
    }
    return {best_h, best, mb.closed_bound()};
}

// ---------------------------------------------------------------------------
// Grid reports.

struct ExpsumGridRow {
    double x;
    u64 K;
    u64 L;
    int H;
    double value;
    double lemma_bound;
    double ratio() const { return value / lemma_bound; }
};

inline constexpr const char* expsum_csv_header = "x,K,L,H,value,lemma_bound,ratio";

inline std::string to_csv_row(const ExpsumGridRow& r) {
    return format_real(r.x) + "," + std::to_string(r.K) + "," + std::to_string(r.L) + "," + std::to_string(r.H) + "," +
           format_real(r.value) + "," + format_real(r.lemma_bound) + "," + format_real(r.ratio());
}

}  // namespace gps
