#include "repscore/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

#include "repscore/error.hpp"
#include "repscore/kernels.hpp"

namespace repscore {

namespace {

void check_allocation_inputs(const Eigen::VectorXd& q, std::int64_t n) {
    if (q.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty proportion vector");
    if (n < 1) throw Error(ErrorCode::InvalidCount, "allocation size must be at least 1");
    if (!q.allFinite() || (q.array() < 0.0).any() || std::abs(q.sum() - 1.0) > kMassTolerance)
        throw Error(ErrorCode::InvalidDistribution, "proportions must be non-negative and sum to one");
}

// Change in |c - t| when c moves by `step` (+1 or -1).
double step_cost(std::int64_t c, double t, int step) {
    const double now = static_cast<double>(c);
    return std::abs(now + step - t) - std::abs(now - t);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 iteration_stream(std::uint64_t seed, std::uint64_t iteration) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(iteration)));
}

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

CountVector adjust_total(CountVector counts, const Eigen::VectorXd& q, std::int64_t n) {
    const std::int64_t total = counts.sum();
    if (total == n) return counts;
    const int step = total < n ? 1 : -1;
    const Eigen::VectorXd target = q * static_cast<double>(n);

    using Entry = std::pair<double, Eigen::Index>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (Eigen::Index i = 0; i < counts.size(); ++i)
        if (step > 0 || counts[i] > 0) heap.emplace(step_cost(counts[i], target[i], step), i);

    for (std::int64_t remaining = std::abs(n - total); remaining > 0; --remaining) {
        const auto i = heap.top().second;
        heap.pop();
        counts[i] += step;
        if (step > 0 || counts[i] > 0) heap.emplace(step_cost(counts[i], target[i], step), i);
    }
    return counts;
}

CountVector optimal_allocation(const Eigen::VectorXd& q, std::int64_t n, std::mt19937_64& rng,
                               double large_threshold) {
    check_allocation_inputs(q, n);
    CountVector counts(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double expected = static_cast<double>(n) * q[i];
        if (expected >= large_threshold)
            counts[i] = static_cast<std::int64_t>(std::floor(expected + 0.5));
        else
            counts[i] = unit_uniform(rng) < expected ? 1 : 0;
    }
    return adjust_total(std::move(counts), q, n);
}

CountVector largest_remainder_allocation(const Eigen::VectorXd& q, std::int64_t n) {
    check_allocation_inputs(q, n);
    CountVector counts(q.size());
    // Remainders are compared on a 1e-12 grid so that representation noise
    // does not override the index tie-break.
    std::vector<std::pair<std::int64_t, Eigen::Index>> order;
    order.reserve(static_cast<std::size_t>(q.size()));
    std::int64_t assigned = 0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double expected = static_cast<double>(n) * q[i];
        double whole = std::floor(expected);
        if (expected - whole > 1.0 - 1e-12) whole += 1.0;
        counts[i] = static_cast<std::int64_t>(whole);
        assigned += counts[i];
        const double remainder = std::max(0.0, expected - whole);
        order.emplace_back(std::llround(remainder * 1e12), i);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::int64_t leftover = n - assigned;
    for (std::size_t k = 0; leftover > 0 && k < order.size(); ++k, --leftover) ++counts[order[k].second];
    // Only reachable through accumulated rounding in floor(); keep the sum exact.
    return adjust_total(std::move(counts), q, n);
}

double allocation_gri(const CountVector& counts, const Eigen::VectorXd& q) {
    return kernels::allocation_score(counts, q, static_cast<double>(counts.sum()));
}

double exhaustive_max_gri(const Eigen::VectorXd& q, std::int64_t n) {
    if (q.size() > kOracleMaxStrata || n > kOracleMaxUnits)
        throw Error(ErrorCode::OracleTooLarge, "exhaustive search limited to 6 strata and 12 units");
    check_allocation_inputs(q, n);

    CountVector counts = CountVector::Zero(q.size());
    double best = -1.0;
    const auto last = q.size() - 1;
    std::function<void(Eigen::Index, std::int64_t)> visit = [&](Eigen::Index i, std::int64_t left) {
        if (i == last) {
            counts[i] = left;
            best = std::max(best, allocation_gri(counts, q));
            return;
        }
        for (std::int64_t c = 0; c <= left; ++c) {
            counts[i] = c;
            visit(i + 1, left - c);
        }
    };
    visit(0, n);
    return best;
}

MaxGriEstimate max_gri(const Eigen::VectorXd& q, std::int64_t n, std::int64_t iterations, std::uint64_t seed,
                       std::string dimension) {
    if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be at least 1");
    check_allocation_inputs(q, n);

    Eigen::VectorXd scores(iterations);
    for (std::int64_t t = 0; t < iterations; ++t) {
        auto rng = iteration_stream(seed, static_cast<std::uint64_t>(t));
        scores[t] = allocation_gri(optimal_allocation(q, n, rng), q);
    }

    MaxGriEstimate out;
    out.dimension = std::move(dimension);
    out.mean = scores.mean();
    out.std = std::sqrt((scores.array() - out.mean).square().mean());
    out.n = n;
    out.iterations = iterations;
    out.seed = seed;
    return out;
}

MaxGriEstimate max_gri(const Distribution& q, std::int64_t n, std::int64_t iterations, std::uint64_t seed) {
    Eigen::VectorXd values(static_cast<Eigen::Index>(q.size()));
    Eigen::Index i = 0;
    for (const auto& [key, value] : q.mass()) values[i++] = value;
    return max_gri(values, n, iterations, seed, q.spec().name);
}

EfficiencyRatio efficiency(double actual, const MaxGriEstimate& max_estimate) {
    if (!(max_estimate.mean > 0.0)) throw Error(ErrorCode::DivisionByZero, "maximum GRI estimate is zero");
    EfficiencyRatio out;
    out.actual = actual;
    out.max = max_estimate.mean;
    out.ratio = actual / max_estimate.mean;
    out.exceeds_noise = out.ratio > 1.0 + 3.0 * max_estimate.std / max_estimate.mean;
    return out;
}

}  // namespace repscore
