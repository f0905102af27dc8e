#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "repscore/distribution.hpp"

namespace repscore {

using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

inline constexpr std::string_view kRngAlgorithm = "mt19937_64, per-iteration seed splitmix64(seed ^ splitmix64(i))";

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Independent generator for iteration `i` of a run seeded with `seed`.
std::mt19937_64 iteration_stream(std::uint64_t seed, std::uint64_t iteration);

// Uniform double in [0, 1) from the top 53 bits of one draw.
double unit_uniform(std::mt19937_64& rng);

// Strata with n*q >= large_threshold are rounded half up, the rest are drawn
// Bernoulli(n*q); the total is then corrected to n by adjust_total.
CountVector optimal_allocation(const Eigen::VectorXd& q, std::int64_t n, std::mt19937_64& rng,
                               double large_threshold = 0.5);

// Adds or removes single units until the counts sum to n, each time at the
// stratum whose change least increases sum |c_i - n q_i|; ties go to the
// lowest index (lexicographic stratum order).
CountVector adjust_total(CountVector counts, const Eigen::VectorXd& q, std::int64_t n);

// floor(n q_i) plus leftover units by descending fractional part, ties to the
// lowest index.
CountVector largest_remainder_allocation(const Eigen::VectorXd& q, std::int64_t n);

inline constexpr Eigen::Index kOracleMaxStrata = 6;
inline constexpr std::int64_t kOracleMaxUnits = 12;

// Best score over every composition of n into q.size() parts. Throws
// OracleTooLarge beyond 6 strata or 12 units.
double exhaustive_max_gri(const Eigen::VectorXd& q, std::int64_t n);

double allocation_gri(const CountVector& counts, const Eigen::VectorXd& q);

struct MaxGriEstimate {
    std::string dimension;
    double mean = 0.0;
    double std = 0.0;  // population standard deviation over iterations
    std::int64_t n = 0;
    std::int64_t iterations = 0;
    std::uint64_t seed = 0;

    bool operator==(const MaxGriEstimate&) const = default;
};

inline constexpr std::int64_t kDefaultIterations = 1000;

MaxGriEstimate max_gri(const Eigen::VectorXd& q, std::int64_t n, std::int64_t iterations, std::uint64_t seed,
                       std::string dimension = {});
MaxGriEstimate max_gri(const Distribution& q, std::int64_t n, std::int64_t iterations, std::uint64_t seed);

struct EfficiencyRatio {
    double actual = 0.0;
    double max = 0.0;
    double ratio = 0.0;
    bool exceeds_noise = false;  // ratio > 1 + 3 std / max

    bool operator==(const EfficiencyRatio&) const = default;
};

EfficiencyRatio efficiency(double actual, const MaxGriEstimate& max_estimate);

}  // namespace repscore
