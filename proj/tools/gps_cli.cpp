// gps_cli: command-line front end for the library.
//
// Exit codes: 0 success, 2 invalid input (one line on stderr), 3 undecidable
// membership under --strict.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gps/asymptotics.hpp"
#include "gps/carmichael.hpp"
#include "gps/core_arith.hpp"
#include "gps/expsums.hpp"
#include "gps/harmonic.hpp"
#include "gps/parallel.hpp"
#include "gps/sequence.hpp"
#include "gps/sieve_cache.hpp"

namespace {

using namespace gps;
using nlohmann::json;

enum class Format { csv, json };

struct Common {
    unsigned threads = 0;
    std::uint64_t seed = 1;
    std::string output = "-";
    Format format = Format::csv;
    bool strict = false;
};

struct AmbiguityExit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SequenceOptions {
    double alpha = 1.0;
    double beta = 0.0;
    double c = 1.05;
    bool raw = false;

    void attach(CLI::App* sub) {
        sub->add_option("--alpha", alpha, "leading coefficient")->capture_default_str();
        sub->add_option("--beta", beta, "shift")->capture_default_str();
        sub->add_option("--c", c, "exponent")->capture_default_str();
        sub->add_flag("--raw", raw, "allow parameters outside the theorem window");
    }
    SequenceParams params() const { return SequenceParams::make(alpha, beta, c, raw ? ParamMode::raw : ParamMode::theorem); }
};

// Rows of a table rendered as CSV or as a JSON array of objects.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<json> row) {
        require(row.size() == columns_.size(), ErrorKind::invalid_argument, "row width mismatch");
        rows_.push_back(std::move(row));
    }

    std::string render(Format f) const {
        std::ostringstream out;
        if (f == Format::csv) {
            for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
            out << '\n';
            for (const auto& row : rows_) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell(row[i]);
                out << '\n';
            }
        } else {
            json arr = json::array();
            for (const auto& row : rows_) {
                json obj = json::object();
                for (std::size_t i = 0; i < row.size(); ++i) obj[columns_[i]] = row[i];
                arr.push_back(std::move(obj));
            }
            out << arr.dump(2) << '\n';
        }
        return out.str();
    }

private:
    static std::string cell(const json& v) {
        if (v.is_number_float()) return format_real(v.get<double>());
        if (v.is_string()) return v.get<std::string>();
        if (v.is_array()) {
            std::string s;
            for (const auto& e : v) s += (s.empty() ? "" : " ") + cell(e);
            return s;
        }
        return v.dump();
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<json>> rows_;
};

void emit(const Common& common, const std::string& text) {
    if (common.output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(common.output, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::invalid_argument, "cannot open output file " + common.output);
    out << text;
}

void check_ambiguity(const Common& common, i64 count, const std::string& where) {
    if (common.strict && count > 0)
        throw AmbiguityExit(std::to_string(count) + " undecidable memberships in " + where);
}

u64 table_limit(const std::vector<double>& xs) {
    double m = 2;
    for (double x : xs) {
        require(std::isfinite(x) && x >= 2 && x <= 4e9, ErrorKind::invalid_argument, "x must lie in [2, 4e9]");
        m = std::max(m, x);
    }
    return static_cast<u64>(std::floor(m));
}

// --- count ------------------------------------------------------------------

struct CountCommand {
    SequenceOptions seq;
    std::vector<double> xs{1e6};
    u64 q = 1, a = 0;

    void attach(CLI::App* sub) {
        seq.attach(sub);
        sub->add_option("--x", xs, "one or more x values")->capture_default_str();
        sub->add_option("--q", q, "modulus")->capture_default_str();
        sub->add_option("--a", a, "residue")->capture_default_str();
    }

    void run(const Common& common) const {
        const auto p = seq.params();
        const auto rc = ResidueClass::make(q, a);
        const auto t = cached_tables(1, table_limit(xs));
        Table table({"x", "pi_gps", "sigma1", "sigma2", "main_term", "residual", "normalized_residual"});
        i64 ambiguous = 0;
        for (double x : xs) {
            const auto r = count_report(x, p, rc, t);
            ambiguous += r.ambiguous;
            table.add({r.x, r.pi_gps_value, r.sigma1, r.sigma2, r.main_term, r.residual, r.normalized_residual});
        }
        check_ambiguity(common, ambiguous, "count");
        emit(common, table.render(common.format));
    }
};

// --- seq --------------------------------------------------------------------

struct SeqCommand {
    SequenceOptions seq;
    i64 limit = 100;
    bool primes_only = false;

    void attach(CLI::App* sub) {
        seq.attach(sub);
        sub->add_option("--limit", limit, "largest value listed")->capture_default_str();
        sub->add_flag("--primes", primes_only, "list prime members only");
    }

    void run(const Common& common) const {
        require(limit >= 1 && limit <= 100'000'000, ErrorKind::invalid_argument, "limit must lie in [1, 1e8]");
        const auto p = seq.params();
        Table table({"n", "value", "prime", "ambiguous"});
        i64 ambiguous = 0;
        for (const auto& term : sequence_terms_up_to(limit, p)) {
            const bool prime = term.value >= 2 && is_prime_u64(static_cast<u64>(term.value));
            if (primes_only && !prime) continue;
            ambiguous += term.ambiguous;
            table.add({term.n, term.value, prime, term.ambiguous});
        }
        check_ambiguity(common, ambiguous, "seq");
        emit(common, table.render(common.format));
    }
};

// --- verify-vaaler ----------------------------------------------------------

struct VerifyVaalerCommand {
    std::vector<int> orders{4, 16, 64};
    int samples = 100000;

    void attach(CLI::App* sub) {
        sub->add_option("--H", orders, "approximation orders")->capture_default_str();
        sub->add_option("--samples", samples, "uniform samples per order")->capture_default_str();
    }

    void run(const Common& common) const {
        require(samples >= 1, ErrorKind::invalid_argument, "samples must be >= 1");
        Table table({"H", "samples", "violations", "max_excess", "mean_error", "max_a_bound", "max_b_bound"});
        for (int H : orders) {
            const auto v = vaaler_coefficients(H);
            std::mt19937_64 rng(common.seed + static_cast<std::uint64_t>(H));
            i64 violations = 0;
            double max_excess = -1e300;
            CompensatedSum err;
            for (int i = 0; i < samples; ++i) {
                // 53 random bits mapped onto [0, 1)
                const double t = static_cast<double>(rng() >> 11u) * 0x1.0p-53;
                const auto c = vaaler_check(v, t);
                if (!c.holds()) ++violations;
                max_excess = std::max(max_excess, c.lhs - c.rhs.real());
                err.add(c.lhs);
            }
            double a_ratio = 0, b_ratio = 0;
            for (int h = 1; h <= H; ++h) a_ratio = std::max(a_ratio, std::abs(v.a(h)) * h);
            for (int h = 0; h <= H; ++h) b_ratio = std::max(b_ratio, v.b(h) * H);
            table.add({H, samples, violations, max_excess, err.value() / samples, a_ratio, b_ratio});
        }
        emit(common, table.render(common.format));
    }
};

// --- verify-hb --------------------------------------------------------------

struct VerifyHbCommand {
    u64 n_max = 10000;
    int k = 3;
    u64 z = 0;

    void attach(CLI::App* sub) {
        sub->add_option("--n-max", n_max, "check every n up to this bound")->capture_default_str();
        sub->add_option("--k", k, "order of the identity")->capture_default_str();
        sub->add_option("--z", z, "cutoff for the Mobius factors (default ceil((n_max/2)^(1/k)))");
    }

    void run(const Common& common) const {
        require(n_max >= 1 && n_max <= 10'000'000, ErrorKind::invalid_argument, "n-max must lie in [1, 1e7]");
        require(k >= 1 && k <= 8, ErrorKind::invalid_argument, "k must lie in [1, 8]");
        const u64 cut = z ? z : static_cast<u64>(std::ceil(std::pow(static_cast<double>(n_max) / 2.0, 1.0 / k)));
        const auto t = cached_tables(1, std::max<u64>(n_max, cut) + 1, true);
        const auto errs = parallel_map(static_cast<std::size_t>(n_max), [&](std::size_t i) {
            const u64 n = i + 1;
            const double lam = n == 1 ? 0.0 : t.von_mangoldt(n);
            return std::abs(hb_lambda(n, k, cut, t) - lam);
        });
        double worst = 0;
        u64 worst_n = 1;
        for (std::size_t i = 0; i < errs.size(); ++i)
            if (errs[i] > worst) {
                worst = errs[i];
                worst_n = i + 1;
            }
        Table table({"n_max", "k", "z", "max_abs_error", "worst_n", "passed"});
        table.add({n_max, k, cut, worst, worst_n, worst <= 1e-9});
        emit(common, table.render(common.format));
    }
};

// --- expsum -----------------------------------------------------------------

CoefficientKind parse_coefficients(const std::string& s) {
    if (s == "unit") return CoefficientKind::unit;
    if (s == "log") return CoefficientKind::log;
    if (s == "mobius") return CoefficientKind::mobius;
    if (s == "random") return CoefficientKind::random_sign;
    throw Error(ErrorKind::invalid_argument, "unknown coefficient family " + s);
}

struct ExpsumCommand {
    SequenceOptions seq;
    std::string type = "I";
    std::vector<double> xs{1e3, 1e4};
    std::vector<int> hs{1, 2, 4};
    std::vector<double> k_exponents;
    std::vector<u64> ks;
    std::string a_kind = "mobius", b_kind;
    double xi = 0.0;

    void attach(CLI::App* sub) {
        seq.attach(sub);
        sub->add_option("--type", type, "I or II")->check(CLI::IsMember({"I", "II"}))->capture_default_str();
        sub->add_option("--x", xs, "x values")->capture_default_str();
        sub->add_option("--H", hs, "H values")->capture_default_str();
        sub->add_option("--K", ks, "explicit K values (L = round(x/K))");
        sub->add_option("--k-exp", k_exponents, "K = x^e for each exponent e");
        sub->add_option("--a", a_kind, "a_k family: unit, log, mobius, random")->capture_default_str();
        sub->add_option("--b", b_kind, "b_l family (default unit for I, random for II)");
        sub->add_option("--xi", xi, "linear phase coefficient")->capture_default_str();
    }

    void run(const Common& common) const {
        const auto p = seq.params();
        const bool type1 = type == "I";
        const auto bk = parse_coefficients(b_kind.empty() ? (type1 ? "unit" : "random") : b_kind);
        const auto ak = parse_coefficients(a_kind);
        std::vector<double> exps = k_exponents;
        if (exps.empty() && ks.empty()) exps = type1 ? std::vector<double>{0.2, 0.3, 0.4, 0.5} : std::vector<double>{0.5, 0.6, 0.7};
        Table table({"x", "K", "L", "H", "value", "lemma_bound", "ratio"});
        for (double x : xs) {
            require(std::isfinite(x) && x >= 4 && x <= 1e7, ErrorKind::invalid_argument, "x must lie in [4, 1e7]");
            std::vector<u64> kvals = ks;
            for (double e : exps) {
                const double k = std::pow(x, e);
                kvals.push_back(static_cast<u64>(type1 ? std::floor(k) : std::ceil(k)));
            }
            for (u64 K : kvals) {
                require(K >= 1, ErrorKind::invalid_argument, "K must be >= 1");
                const u64 L = std::max<u64>(1, static_cast<u64>(std::llround(x / static_cast<double>(K))));
                for (int H : hs) {
                    auto s = BilinearSumSpec::make(K, L, H, 1, make_coefficients(ak, K, common.seed),
                                                   make_coefficients(bk, L, common.seed + 1), xi);
                    const auto r = type1 ? type_I_sum(s, x, p) : type_II_sum(s, x, p);
                    table.add({x, K, L, H, r.value, r.lemma_bound, r.ratio()});
                }
            }
        }
        emit(common, table.render(common.format));
    }
};

// --- optimize-h -------------------------------------------------------------

std::vector<Monomial> parse_monomials(const std::vector<std::string>& specs) {
    std::vector<Monomial> out;
    for (const auto& s : specs) {
        const auto colon = s.find(':');
        require(colon != std::string::npos, ErrorKind::invalid_argument, "monomial must be COEFF:EXPONENT, got " + s);
        try {
            out.push_back({std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))});
        } catch (const std::exception&) {
            throw Error(ErrorKind::invalid_argument, "cannot parse monomial " + s);
        }
    }
    return out;
}

struct OptimizeCommand {
    std::vector<std::string> growth, decay;
    double h1 = 1.0, h2 = 1.0;

    void attach(CLI::App* sub) {
        sub->add_option("--growth", growth, "A:a terms of the form A H^a")->required();
        sub->add_option("--decay", decay, "B:b terms of the form B H^-b")->required();
        sub->add_option("--H1", h1, "lower end")->capture_default_str();
        sub->add_option("--H2", h2, "upper end")->capture_default_str();
    }

    void run(const Common& common) const {
        const MonomialBound mb{parse_monomials(growth), parse_monomials(decay), h1, h2};
        const auto r = srinivasan_optimize(mb);
        const double budget = static_cast<double>(mb.growth.size() + mb.decay.size()) * r.closed_bound;
        Table table({"h_opt", "value", "closed_bound", "within_bound"});
        table.add({r.h_opt, r.value, r.closed_bound, r.value <= budget});
        emit(common, table.render(common.format));
    }
};

// --- carmichael -------------------------------------------------------------

struct CarmichaelCommand {
    SequenceOptions seq;
    u64 limit = 100000;
    bool all = false;

    void attach(CLI::App* sub) {
        seq.attach(sub);
        sub->add_option("--limit", limit, "search bound (<= 1e9)")->capture_default_str();
        sub->add_flag("--all", all, "list every Carmichael number, ignoring the sequence");
    }

    void run(const Common& common) const {
        if (all) {
            Table table({"n", "factors"});
            for (u64 n : enumerate_carmichael(limit)) {
                json f = json::array();
                for (const auto& pp : factorize(n)) f.push_back(pp.prime);
                table.add({n, f});
            }
            emit(common, table.render(common.format));
            return;
        }
        const auto recs = gps_carmichael_search(limit, seq.params());
        i64 ambiguous = 0;
        for (const auto& r : recs) ambiguous += !r.confirmed();
        check_ambiguity(common, ambiguous, "carmichael");
        if (common.format == Format::json) {
            json arr = json::array();
            for (const auto& r : recs) arr.push_back(to_json(r));
            emit(common, arr.dump(2) + "\n");
            return;
        }
        Table table({"n", "factors", "memberships", "ambiguous"});
        for (const auto& r : recs) {
            json m = json::array();
            for (auto s : r.memberships) m.push_back(s == Membership::yes);
            table.add({r.n, r.factors, m, r.ambiguous});
        }
        emit(common, table.render(common.format));
    }
};

// --- smooth -----------------------------------------------------------------

struct SmoothCommand {
    std::vector<double> xs{1e4, 1e5, 1e6};
    std::vector<double> ys{10, 100, 1000};

    void attach(CLI::App* sub) {
        sub->add_option("--x", xs, "x values")->capture_default_str();
        sub->add_option("--y", ys, "smoothness bounds")->capture_default_str();
    }

    void run(const Common& common) const {
        for (double x : xs)
            for (double y : ys) require(y >= 2 && y <= x, ErrorKind::invalid_argument, "smooth count needs 2 <= y <= x");
        const auto t = cached_tables(1, table_limit(xs), true);
        Table table({"x", "y", "count", "pi"});
        for (double x : xs)
            for (double y : ys) {
                table.add({x, y, smooth_shifted_prime_count(x, y, t), pi_ap(x, ResidueClass::make(1, 0), t)});
            }
        emit(common, table.render(common.format));
    }
};

// --- thresholds -------------------------------------------------------------

struct ThresholdsCommand {
    double E = default_E;

    void attach(CLI::App* sub) { sub->add_option("--E", E, "exponent of the smooth-prime set")->capture_default_str(); }

    void run(const Common& common) const {
        const double g = gamma_threshold_for_E(E);
        const auto frac = rounded_gamma_fraction();
        Table table({"quantity", "exact", "value"});
        const auto gamma_adm = admissible_gamma_threshold_exact();
        const auto c_adm = admissible_c_threshold_exact();
        const auto g1 = gamma_threshold_for_E_exact(CarmichaelRational(1));
        table.add({"admissible_gamma", to_string(gamma_adm), admissible_gamma_threshold()});
        table.add({"admissible_c", to_string(c_adm), to_double(c_adm)});
        table.add({"gamma_threshold_E1", to_string(g1), to_double(g1)});
        table.add({"c_threshold_E1", to_string(CarmichaelRational(1) / g1), to_double(CarmichaelRational(1) / g1)});
        table.add({"gamma_threshold", "", g});
        table.add({"paper_fraction", to_string(frac), to_double(frac)});
        if (common.format == Format::csv) {
            emit(common, table.render(Format::csv));
            return;
        }
        json out = {
            {"E", E},
            {"admissible_gamma", {{"exact", to_string(gamma_adm)}, {"value", admissible_gamma_threshold()}}},
            {"admissible_c", {{"exact", to_string(c_adm)}, {"value", to_double(c_adm)}}},
            {"gamma_threshold_E1", {{"exact", to_string(g1)}, {"value", to_double(g1)}}},
            {"c_threshold_E1", {{"exact", to_string(CarmichaelRational(1) / g1)}, {"value", to_double(CarmichaelRational(1) / g1)}}},
            {"gamma_threshold", g},
            {"paper_fraction", to_string(frac)},
            {"paper_fraction_value", to_double(frac)},
            {"fraction_minus_threshold", to_double(frac) - g},
        };
        emit(common, out.dump(2) + "\n");
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prime values of floor(alpha n^c + beta): counts, exponential sums, Carmichael search"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--threads", common.threads, "worker threads (0 = hardware)")->capture_default_str();
    app.add_option("--seed", common.seed, "seed for sampled checks")->capture_default_str();
    app.add_option("--output,-o", common.output, "output file ('-' for stdout)")->capture_default_str();
    app.add_option("--format", common.format, "csv or json")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::csv}, {"json", Format::json}}))
        ->capture_default_str();
    app.add_flag("--strict", common.strict, "exit 3 when a membership cannot be decided");
    app.fallthrough();

    CountCommand count;
    SeqCommand seq;
    VerifyVaalerCommand vaaler;
    VerifyHbCommand hb;
    ExpsumCommand expsum;
    OptimizeCommand optimize;
    CarmichaelCommand carmichael;
    SmoothCommand smooth;
    ThresholdsCommand thresholds;

    std::function<void()> action;
    auto add = [&](const char* name, const char* help, auto& cmd) {
        auto* sub = app.add_subcommand(name, help);
        cmd.attach(sub);
        sub->callback([&] { action = [&] { cmd.run(common); }; });
    };
    add("count", "prime counts, decomposition sums and residuals over an x grid", count);
    add("seq", "list sequence members", seq);
    add("verify-vaaler", "sample the trigonometric sawtooth approximation", vaaler);
    add("verify-hb", "check the Heath-Brown identity against Lambda(n)", hb);
    add("expsum", "Type I / Type II bilinear sums over a grid", expsum);
    add("optimize-h", "minimize a sum of growing and decaying monomials", optimize);
    add("carmichael", "Carmichael numbers built from sequence primes", carmichael);
    add("smooth", "count primes p with smooth p - 1", smooth);
    add("thresholds", "exponent thresholds in exact arithmetic", thresholds);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: invalid_argument: " << e.what() << '\n';
        return 2;
    }

    try {
        set_thread_count(common.threads);
        action();
    } catch (const AmbiguityExit& e) {
        std::cerr << "error: ambiguity: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::ambiguity && common.strict ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
