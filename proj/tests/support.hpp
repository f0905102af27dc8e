#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "repscore/distribution.hpp"

#ifndef REPSCORE_FIXTURE_DIR
#define REPSCORE_FIXTURE_DIR "tests/fixtures"
#endif

namespace testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(REPSCORE_FIXTURE_DIR) / name; }

// Random point on the simplex; each coordinate is zeroed with probability
// `zero_prob`, but at least one stays positive.
inline Eigen::VectorXd random_simplex(std::mt19937_64& rng, Eigen::Index k, double zero_prob = 0.0) {
    std::exponential_distribution<double> expo(1.0);
    std::bernoulli_distribution drop(zero_prob);
    std::uniform_int_distribution<Eigen::Index> pick(0, k - 1);
    Eigen::VectorXd v(k);
    for (Eigen::Index i = 0; i < k; ++i) v[i] = drop(rng) ? 0.0 : expo(rng) + 1e-12;
    if (v.sum() == 0.0) v[pick(rng)] = 1.0;
    return v / v.sum();
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("repscore_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
