#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "repscore/error.hpp"
#include "repscore/montecarlo.hpp"

using namespace repscore;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

CountVector counts(std::initializer_list<std::int64_t> v) {
    CountVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto x : v) out[i++] = x;
    return out;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("optimal allocation on integral targets") {
    std::mt19937_64 rng(1);
    CHECK(optimal_allocation(vec({0.7, 0.3}), 10, rng) == counts({7, 3}));
    CHECK(optimal_allocation(vec({0.25, 0.25, 0.25, 0.25}), 8, rng) == counts({2, 2, 2, 2}));
}

TEST_CASE("optimal allocation with one unit over two strata") {
    std::set<std::vector<std::int64_t>> seen;
    for (std::uint64_t t = 0; t < 64; ++t) {
        auto rng = iteration_stream(3, t);
        auto c = optimal_allocation(vec({0.5, 0.5}), 1, rng);
        CHECK(c.sum() == 1);
        CHECK(allocation_gri(c, vec({0.5, 0.5})) == doctest::Approx(0.5));
        seen.insert({c[0], c[1]});
    }
    CHECK(seen.size() == 1);  // n q = 0.5 is "large", so rounding decides
}

TEST_CASE("allocations always sum to n") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 300; ++trial) {
        const auto k = std::uniform_int_distribution<Eigen::Index>(1, 40)(gen);
        const auto n = std::uniform_int_distribution<std::int64_t>(1, 500)(gen);
        const auto q = testing::random_simplex(gen, k, 0.3);
        auto rng = iteration_stream(5, static_cast<std::uint64_t>(trial));
        auto c = optimal_allocation(q, n, rng);
        CHECK(c.sum() == n);
        CHECK((c.array() >= 0).all());
        CHECK(largest_remainder_allocation(q, n).sum() == n);
    }
}

TEST_CASE("adjust_total tie-break goes to the lowest index") {
    // Both strata want 0.5 more; one unit to add goes to index 0.
    CHECK(adjust_total(counts({0, 0}), vec({0.5, 0.5}), 1) == counts({1, 0}));
    // Remove one unit from two equally over-filled strata.
    CHECK(adjust_total(counts({1, 1}), vec({0.5, 0.5}), 1) == counts({0, 1}));
    CHECK(adjust_total(counts({3, 3}), vec({0.5, 0.5}), 6) == counts({3, 3}));
}

TEST_CASE("largest remainder") {
    const auto two = largest_remainder_allocation(vec({0.5, 0.5}), 3);
    CHECK(two == counts({2, 1}));
    CHECK(allocation_gri(two, vec({0.5, 0.5})) == doctest::Approx(5.0 / 6.0));
    CHECK(largest_remainder_allocation(vec({0.7, 0.3}), 10) == counts({7, 3}));
    const auto three = largest_remainder_allocation(vec({0.6, 0.25, 0.15}), 10);
    CHECK(three == counts({6, 3, 1}));
    CHECK(allocation_gri(three, vec({0.6, 0.25, 0.15})) == doctest::Approx(0.95));
    CHECK(allocation_gri(counts({6, 2, 2}), vec({0.6, 0.25, 0.15})) == doctest::Approx(0.95));
}

TEST_CASE("exhaustive oracle") {
    CHECK(exhaustive_max_gri(vec({0.5, 0.5}), 1) == doctest::Approx(0.5));
    CHECK(exhaustive_max_gri(vec({0.7, 0.3}), 10) == doctest::Approx(1.0));
    const double third = 1.0 / 3.0;
    CHECK(exhaustive_max_gri(vec({third, third, third}), 4) == doctest::Approx(5.0 / 6.0));
    const auto independent = oracle::exhaustive_best({third, third, third}, 4);
    CHECK(independent.compositions == oracle::binomial(4 + 2, 2));
    CHECK(independent.best == doctest::Approx(5.0 / 6.0));

    CHECK_THROWS_AS(exhaustive_max_gri(Eigen::VectorXd::Constant(7, 1.0 / 7.0), 3), Error);
    CHECK_THROWS_AS(exhaustive_max_gri(vec({0.5, 0.5}), 13), Error);
    try {
        exhaustive_max_gri(vec({0.5, 0.5}), 13);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OracleTooLarge);
    }
}

TEST_CASE("max_gri trivial cases") {
    auto single = max_gri(vec({1.0}), 37, 20, 11);
    CHECK(single.mean == 1.0);
    CHECK(single.std == 0.0);
    auto uniform = max_gri(Eigen::VectorXd::Constant(5, 0.2), 50, 20, 11);
    CHECK(uniform.mean == doctest::Approx(1.0));
    CHECK(uniform.iterations == 20);
    CHECK(uniform.n == 50);
    CHECK(uniform.seed == 11);
}

TEST_CASE("max_gri is reproducible and seed-sensitive") {
    std::mt19937_64 gen(4);
    const auto q = testing::random_simplex(gen, 300, 0.0);
    const auto a = max_gri(q, 250, 200, 1234, "x");
    const auto b = max_gri(q, 250, 200, 1234, "x");
    CHECK(a == b);
    const auto c = max_gri(q, 250, 200, 1235, "x");
    CHECK(c.mean != a.mean);
    CHECK(a.mean > 0.0);
    CHECK(a.mean <= 1.0);
    CHECK(a.std > 0.0);
}

TEST_CASE("max_gri rejects bad input") {
    CHECK_THROWS_AS(max_gri(vec({0.5, 0.5}), 10, 0, 1), Error);
    CHECK_THROWS_AS(max_gri(vec({0.5, 0.5}), 0, 10, 1), Error);
    CHECK_THROWS_AS(max_gri(vec({0.5, 0.4}), 10, 10, 1), Error);
}

TEST_CASE("efficiency") {
    MaxGriEstimate est;
    est.mean = 0.792;
    est.std = 0.005;
    const auto e = efficiency(0.347, est);
    CHECK(e.ratio == doctest::Approx(0.438).epsilon(0.001 / 0.438));
    CHECK(e.ratio == doctest::Approx(0.347 / 0.792));
    CHECK_FALSE(e.exceeds_noise);
    CHECK(efficiency(0.792, est).ratio == 1.0);

    est.mean = 0.5;
    est.std = 0.01;
    CHECK(efficiency(0.6, est).exceeds_noise);
    CHECK_FALSE(efficiency(0.52, est).exceeds_noise);

    est.mean = 0.0;
    try {
        efficiency(0.3, est);
        FAIL("expected DivisionByZero");
    } catch (const Error& e2) {
        CHECK(e2.code() == ErrorCode::DivisionByZero);
    }
}

TEST_CASE("iteration streams are independent of schedule") {
    auto a = iteration_stream(42, 7);
    auto b = iteration_stream(42, 7);
    CHECK(a() == b());
    auto c = iteration_stream(42, 8);
    auto d = iteration_stream(42, 7);
    CHECK(c() != d());
    std::mt19937_64 u(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = unit_uniform(u);
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

}  // TEST_SUITE
