// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--criteria 1,2,...]
//
// Criterion 9 reads the full benchmark tables from $REPSCORE_BENCHMARK_DIR
// (default: <repo>/data/benchmarks) and fails when they are absent.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include "repscore/benchmarks.hpp"
#include "repscore/cli.hpp"
#include "repscore/csv.hpp"
#include "repscore/metrics.hpp"
#include "repscore/montecarlo.hpp"
#include "repscore/scorecard.hpp"

#ifndef REPSCORE_DATA_DIR
#define REPSCORE_DATA_DIR "data"
#endif

using namespace repscore;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and sizes.
constexpr double kTol = 1e-9;
constexpr double kSlack = 1e-12;          // inequality slack for the sandwich bounds
constexpr double kExact = 1e-12;          // "exactly" for floating-point scores
constexpr int kPairTrials = 10'000;
constexpr int kDecompTrials = 1'000;
constexpr Eigen::Index kMaxK = 200;
constexpr int kOracleQVectors = 200;
constexpr std::int64_t kOracleMaxK = 5;
constexpr std::int64_t kOracleMaxN = 10;
constexpr std::int64_t kOracleMcIterations = 100;
constexpr double kDeffTol = 1e-6;
constexpr double kCoverageNeffTol = 1e-3;
constexpr double kEfficiencyTol = 1e-3;
constexpr double kTable4Tol = 0.015;
constexpr std::int64_t kTable4Iterations = 1000;
constexpr std::uint64_t kTable4Seed = 20240601;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

AlignedPair pair_of(const Eigen::VectorXd& p, const Eigen::VectorXd& q, std::int64_t n = 1000) {
    return AlignedPair::from_vectors(p, q, n);
}

Outcome boundedness() {
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<Eigen::Index> size(1, kMaxK);
    std::uniform_int_distribution<int> mode(0, 2);
    int failures = 0, identical = 0, disjoint = 0;
    for (int t = 0; t < kPairTrials; ++t) {
        const Eigen::Index k = size(gen);
        Eigen::VectorXd p = testing::random_simplex(gen, k, 0.3);
        Eigen::VectorXd q = testing::random_simplex(gen, k, 0.3);
        const int m = k == 1 ? 1 : mode(gen);
        if (m == 1) {
            q = p;
            ++identical;
        } else if (m == 2) {
            // Split the strata between the two sides.
            const Eigen::Index cut = std::uniform_int_distribution<Eigen::Index>(1, k - 1)(gen);
            p = (Eigen::VectorXd(k) << testing::random_simplex(gen, cut), Eigen::VectorXd::Zero(k - cut)).finished();
            q = (Eigen::VectorXd(k) << Eigen::VectorXd::Zero(cut), testing::random_simplex(gen, k - cut)).finished();
            ++disjoint;
        }
        const double g = gri(pair_of(p, q)).value;
        const double d = oracle::tvd(testing::to_std(p), testing::to_std(q));
        const bool bounded = g >= 0.0 && g <= 1.0;
        const bool one_iff_equal = (std::abs(g - 1.0) <= kTol) == (d <= kTol);
        const bool zero_iff_disjoint = (std::abs(g) <= kTol) == (std::abs(d - 1.0) <= kTol);
        const bool mode_ok = m == 1 ? std::abs(g - 1.0) <= kTol : m == 2 ? std::abs(g) <= kTol : true;
        if (!(bounded && one_iff_equal && zero_iff_disjoint && mode_ok)) ++failures;
    }
    return {failures == 0, std::to_string(kPairTrials) + " pairs (" + std::to_string(identical) + " identical, " +
                               std::to_string(disjoint) + " disjoint), " + std::to_string(failures) + " failures"};
}

Outcome monotone_transfer() {
    std::mt19937_64 gen(2);
    std::uniform_int_distribution<Eigen::Index> size(2, kMaxK);
    int failures = 0, done = 0;
    double worst = 0.0;
    while (done < kPairTrials) {
        const Eigen::Index k = size(gen);
        Eigen::VectorXd p = testing::random_simplex(gen, k, 0.2);
        const Eigen::VectorXd q = testing::random_simplex(gen, k, 0.2);
        std::vector<Eigen::Index> over, under;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (p[i] > q[i]) over.push_back(i);
            if (p[i] < q[i]) under.push_back(i);
        }
        if (over.empty() || under.empty()) continue;
        const auto i = over[std::uniform_int_distribution<std::size_t>(0, over.size() - 1)(gen)];
        const auto j = under[std::uniform_int_distribution<std::size_t>(0, under.size() - 1)(gen)];
        const double limit = std::min(p[i] - q[i], q[j] - p[j]);
        const double delta = std::uniform_real_distribution<double>(0.0, 1.0)(gen) * limit;
        if (delta <= 0.0) continue;
        const double before = gri(pair_of(p, q)).value;
        p[i] -= delta;
        p[j] += delta;
        const double after = gri(pair_of(p, q)).value;
        const double err = std::abs((after - before) - delta);
        worst = std::max(worst, err);
        if (err > kTol || !(after > before)) ++failures;
        ++done;
    }
    return {failures == 0, std::to_string(done) + " transfers, max |dGRI - delta| = " + fmt("%.2e", worst)};
}

Outcome sandwich() {
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<Eigen::Index> size(1, kMaxK);
    int violations = 0;
    for (int t = 0; t < kPairTrials; ++t) {
        const Eigen::Index k = size(gen);
        const auto p = testing::random_simplex(gen, k, 0.0), q = testing::random_simplex(gen, k, 0.0);
        const auto d = divergence_diagnostics(pair_of(p, q));
        const auto ps = testing::to_std(p), qs = testing::to_std(q);
        const double h = oracle::hellinger(ps, qs);
        const auto kl = oracle::kl(ps, qs);
        const bool oracle_ok = h * h <= d.tvd + kSlack && d.tvd <= std::sqrt(2.0) * h + kSlack && kl &&
                               d.tvd <= std::sqrt(*kl / 2.0) + kSlack;
        const bool agrees = std::abs(d.hellinger - h) <= kTol && d.kl && std::abs(*d.kl - *kl) <= kTol;
        if (!(oracle_ok && d.sandwich_ok && agrees)) ++violations;
    }
    return {violations == 0, std::to_string(kPairTrials) + " strictly positive pairs, " + std::to_string(violations) +
                                 " violations"};
}

Outcome deff_identity() {
    std::mt19937_64 gen(4);
    std::uniform_int_distribution<Eigen::Index> size(1, kMaxK);
    int failures = 0, equal_cases = 0;
    for (int t = 0; t < kPairTrials; ++t) {
        const Eigen::Index k = size(gen);
        const auto p = testing::random_simplex(gen, k, 0.0);
        const bool same = t % 10 == 0;
        const Eigen::VectorXd q = same ? p : testing::random_simplex(gen, k, 0.0);
        const auto r = design_effect(pair_of(p, q));
        double ratio = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) ratio += q[i] * q[i] / p[i];
        const bool identity = std::abs(r.deff - (1.0 + r.weight_cv2)) <= kTol && std::abs(r.deff - ratio) <= kTol;
        const bool at_least_one = r.deff >= 1.0 - kTol;
        const bool differs = oracle::tvd(testing::to_std(p), testing::to_std(q)) > kTol;
        const bool equality_iff = (std::abs(r.deff - 1.0) <= kTol) == !differs;
        equal_cases += same;
        if (!(identity && at_least_one && equality_iff)) ++failures;
    }
    return {failures == 0, std::to_string(kPairTrials) + " full-coverage pairs (" + std::to_string(equal_cases) +
                               " with p = q), " + std::to_string(failures) + " failures"};
}

Outcome coverage_reduction() {
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<Eigen::Index> size(1, kMaxK);
    std::uniform_int_distribution<std::int64_t> n_dist(1, 100'000);
    int failures = 0;
    for (int t = 0; t < kPairTrials; ++t) {
        const Eigen::Index k = size(gen);
        // Sample support inside the benchmark support, so f = 1.
        const Eigen::VectorXd q = testing::random_simplex(gen, k, 0.0);
        const Eigen::VectorXd p = testing::random_simplex(gen, k, 0.4);
        const std::int64_t n = n_dist(gen);
        const auto r = design_effect(pair_of(p, q, n));
        if (!(r.coverage_fraction == 1.0 && r.n_eff == static_cast<double>(n) / r.deff)) ++failures;
    }
    return {failures == 0, std::to_string(kPairTrials) + " pairs with f = 1, n_eff == N/deff bitwise, " +
                               std::to_string(failures) + " failures"};
}

Outcome decomposition() {
    std::mt19937_64 gen(6);
    std::uniform_int_distribution<Eigen::Index> size(1, kMaxK);
    int failures = 0;
    double worst = 0.0;
    for (int t = 0; t < kDecompTrials; ++t) {
        const Eigen::Index k = size(gen);
        const auto p = testing::random_simplex(gen, k, 0.3), q = testing::random_simplex(gen, k, 0.3);
        const auto pair = pair_of(p, q);
        double total = 0.0;
        for (const auto& s : segment_deviations(pair)) total += s.tvd_contribution;
        const double err = std::max(std::abs(total - tvd(pair).value),
                                    std::abs(total - oracle::tvd(testing::to_std(p), testing::to_std(q))));
        worst = std::max(worst, err);
        if (err > kTol) ++failures;
    }
    return {failures == 0, std::to_string(kDecompTrials) + " pairs, max |sum - TVD| = " + fmt("%.2e", worst)};
}

Outcome allocator_oracle() {
    std::mt19937_64 gen(7);
    int lr_failures = 0, mc_failures = 0, cases = 0;
    std::uint64_t seed = 1;
    for (std::int64_t k = 1; k <= kOracleMaxK; ++k) {
        for (std::int64_t n = 1; n <= kOracleMaxN; ++n) {
            for (int v = 0; v < kOracleQVectors; ++v, ++cases) {
                const auto q = testing::random_simplex(gen, k, 0.2);
                const double exact = exhaustive_max_gri(q, n);
                const double independent = oracle::exhaustive_best(testing::to_std(q), n).best;
                const double lr = allocation_gri(largest_remainder_allocation(q, n), q);
                if (std::abs(lr - exact) > kExact || std::abs(exact - independent) > kExact) ++lr_failures;
                const auto mc = max_gri(q, n, kOracleMcIterations, seed++);
                if (mc.mean > exact + 3.0 * mc.std + kExact) ++mc_failures;
            }
        }
    }
    return {lr_failures == 0 && mc_failures == 0,
            std::to_string(cases) + " (K, n, q) cases; largest-remainder mismatches " + std::to_string(lr_failures) +
                ", Monte Carlo above bound " + std::to_string(mc_failures)};
}

Outcome determinism() {
    testing::TempDir dir;
    const std::string bench = testing::fixture("benchmarks").string();
    const std::string survey = testing::fixture("survey.csv").string();
    auto score = [&](const std::string& out) {
        std::ostringstream o, e;
        return cli::run({"score", "--benchmarks", bench, "--survey", survey, "--max-gri", "--iterations", "200", "--seed",
                         "8675309", "--format", "json,csv,table,svg-heatmap", "--out-dir", (dir / out).string()},
                        o, e);
    };
    auto mc = [&](const std::string& out) {
        std::ostringstream o, e;
        return cli::run({"max-gri", "--benchmarks", bench, "--dimension", "country_gender_age", "--n", "100,1000",
                         "--iterations", "500", "--seed", "8675309", "--out-dir", (dir / out).string()},
                        o, e);
    };
    if (score("s1") != 0 || score("s2") != 0 || mc("m1") != 0 || mc("m2") != 0)
        return {false, "a run did not exit 0"};
    int compared = 0, differing = 0;
    for (const auto& [a, b] : {std::pair{"s1", "s2"}, {"m1", "m2"}}) {
        for (const auto& entry : fs::directory_iterator(dir / a)) {
            ++compared;
            if (read_file(entry.path()) != read_file(dir / b / entry.path().filename())) ++differing;
        }
    }
    return {differing == 0 && compared == 5,
            std::to_string(compared) + " output files compared across repeated runs, " + std::to_string(differing) +
                " differ"};
}

struct Table4Case {
    const char* dimension;
    std::int64_t n;
    double expected;
};

Outcome table4() {
    const char* env = std::getenv("REPSCORE_BENCHMARK_DIR");
    const fs::path dir = env ? fs::path(env) : fs::path(REPSCORE_DATA_DIR) / "benchmarks";
    if (!fs::is_directory(dir))
        return {false, "benchmark tables not found at " + dir.string() + " (set REPSCORE_BENCHMARK_DIR)"};
    try {
        std::optional<fs::path> rollup;
        if (!fs::exists(dir / "geo_rollup.csv")) rollup = fs::path(REPSCORE_DATA_DIR) / "geo_rollup.csv";
        const auto suite = BenchmarkSuite::load_dir(dir, rollup);
        const auto registry = default_registry(suite);
        const Table4Case cases[] = {{"country_gender_age", 100, 0.430},  {"country_gender_age", 250, 0.581},
                                    {"country_gender_age", 500, 0.691},  {"country_gender_age", 1000, 0.792},
                                    {"country_gender_age", 2000, 0.873}, {"country_religion", 1000, 0.938},
                                    {"country_environment", 1000, 0.950}};
        std::string detail;
        bool pass = true;
        for (const auto& c : cases) {
            const auto q = suite.dimension(registry.find(c.dimension));
            const auto est = max_gri(q, c.n, kTable4Iterations, kTable4Seed);
            const bool ok = std::abs(est.mean - c.expected) <= kTable4Tol;
            pass = pass && ok;
            detail += std::string(detail.empty() ? "" : "; ") + c.dimension + " n=" + std::to_string(c.n) + " " +
                      fmt("%.3f vs %.3f", est.mean, c.expected) + (ok ? "" : " (off)");
        }
        return {pass, detail};
    } catch (const std::exception& e) {
        return {false, std::string("could not load benchmarks: ") + e.what()};
    }
}

Outcome worked_examples() {
    const auto a = design_effect(AlignedPair::from_vectors(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.8, 0.2), 100));
    const auto kish_a = oracle::kish({50, 50}, {0.8, 0.2});
    const bool a_ok = std::abs(a.deff - 1.36) <= kDeffTol && std::abs(kish_a.deff - 1.36) <= kDeffTol &&
                      std::abs(a.n_eff - kish_a.n_eff) <= kDeffTol && std::round(a.n_eff * 100.0) / 100.0 == 73.53;

    // Strata a, b, c, x: the sample has x (outside the benchmark), the benchmark has c.
    Eigen::Vector4d p(0.5, 0.4, 0.0, 0.1), q(0.5, 0.3, 0.2, 0.0);
    const auto b = design_effect(AlignedPair::from_vectors(p, q, 100));
    const auto kish_b = oracle::kish({50, 40, 0, 10}, {0.5, 0.3, 0.2, 0.0});
    const bool b_ok = std::abs(b.coverage_fraction - 0.9) <= kTol && std::abs(b.deff - 1.01953125) <= kDeffTol &&
                      std::abs(b.n_eff - 88.276) <= kCoverageNeffTol && std::abs(b.n_eff - kish_b.n_eff) <= kTol;
    return {a_ok && b_ok, fmt("deff %.6f n_eff %.6f (Kish oracle %.6f)", a.deff, a.n_eff, kish_a.n_eff) +
                              fmt("; coverage f %.3f deff %.8f", b.coverage_fraction, b.deff) +
                              fmt(" n_eff %.4f (Kish oracle %.4f)", b.n_eff, kish_b.n_eff)};
}

Outcome efficiency_arithmetic() {
    MaxGriEstimate est;
    est.mean = 0.792;
    const double ratio = efficiency(0.347, est).ratio;
    return {std::abs(ratio - 0.438) <= kEfficiencyTol, fmt("0.347 / 0.792 = %.4f", ratio)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> selected;
    app.add_option("--criteria", selected, "Criteria to run (default: all)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"boundedness and extremes of GRI", boundedness},
        {"mass transfer raises GRI by exactly delta", monotone_transfer},
        {"Hellinger and Pinsker sandwich", sandwich},
        {"deff = sum q^2/p = 1 + CV^2(w)", deff_identity},
        {"coverage-adjusted n_eff reduces to N/deff at f = 1", coverage_reduction},
        {"segment contributions sum to TVD", decomposition},
        {"largest remainder equals exhaustive optimum; Monte Carlo bounded", allocator_oracle},
        {"byte-identical outputs for identical config and seed", determinism},
        {"max-GRI by sample size on the reference benchmarks", table4},
        {"design-effect worked examples against Kish oracle", worked_examples},
        {"efficiency ratio arithmetic", efficiency_arithmetic},
    };
    if (selected.empty())
        for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);

    int failed = 0;
    for (int id : selected) {
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::printf("FAIL [%d] no such criterion\n", id);
            ++failed;
            continue;
        }
        const auto& [name, check] = criteria[static_cast<std::size_t>(id - 1)];
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s [%d] %s: %s\n", outcome.pass ? "PASS" : "FAIL", id, name, outcome.detail.c_str());
        std::fflush(stdout);
        failed += !outcome.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(selected.size()) - failed, selected.size());
    return failed == 0 ? 0 : 1;
}
