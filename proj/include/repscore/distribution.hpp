#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace repscore {

// Tolerance for "sums to one" checks on proportions.
inline constexpr double kMassTolerance = 1e-9;

// One category label per axis of the owning DimensionSpec. Ordering is
// lexicographic over the labels, which fixes report and vector order.
using StratumKey = std::vector<std::string>;

std::string format_key(const StratumKey& key, std::string_view sep = "|");

struct DimensionSpec {
    std::string name;
    std::vector<std::string> axes;
    // Declared label domain per axis. Axes without an entry accept any label.
    std::map<std::string, std::set<std::string>> domains;

    // Name derived by joining the axes with '_' (e.g. "country_gender_age").
    static DimensionSpec from_axes(std::vector<std::string> axes);

    bool has_axis(std::string_view axis) const;
    std::size_t axis_index(std::string_view axis) const;
    void validate() const;

    // Identity is name plus axes; domains are metadata.
    friend bool operator==(const DimensionSpec& a, const DimensionSpec& b) {
        return a.name == b.name && a.axes == b.axes;
    }
};

struct Provenance {
    std::string source_id;
    std::optional<int> vintage;
    std::string citation;
    std::vector<std::string> notes;
};

// Normalized proportions over the strata of one dimension. Only strata with
// positive mass are stored; lookups of absent strata return 0.
class Distribution {
public:
    using MassMap = std::map<StratumKey, double>;

    Distribution(DimensionSpec spec, MassMap mass, std::optional<std::int64_t> source_size = {},
                 Provenance provenance = {});

    const DimensionSpec& spec() const noexcept { return spec_; }
    const MassMap& mass() const noexcept { return mass_; }
    std::optional<std::int64_t> source_size() const noexcept { return source_size_; }
    const Provenance& provenance() const noexcept { return provenance_; }
    std::size_t size() const noexcept { return mass_.size(); }

    double operator[](const StratumKey& key) const;

    Distribution with_provenance(Provenance provenance) const;
    Distribution with_source_size(std::optional<std::int64_t> n) const;

private:
    DimensionSpec spec_;
    MassMap mass_;
    std::optional<std::int64_t> source_size_;
    Provenance provenance_;
};

// Outer join of a sample and a benchmark over the union of their supports.
class AlignedPair {
public:
    AlignedPair(DimensionSpec spec, std::vector<StratumKey> keys, Eigen::VectorXd p, Eigen::VectorXd q,
                std::int64_t n);

    // Synthetic single-axis keys "s0000", "s0001", ... in vector order.
    static AlignedPair from_vectors(Eigen::VectorXd p, Eigen::VectorXd q, std::int64_t n);

    const DimensionSpec& spec() const noexcept { return spec_; }
    const std::vector<StratumKey>& keys() const noexcept { return keys_; }
    const Eigen::VectorXd& p() const noexcept { return p_; }
    const Eigen::VectorXd& q() const noexcept { return q_; }
    std::int64_t n() const noexcept { return n_; }
    std::size_t size() const noexcept { return keys_.size(); }

private:
    DimensionSpec spec_;
    std::vector<StratumKey> keys_;
    Eigen::VectorXd p_;
    Eigen::VectorXd q_;
    std::int64_t n_;
};

Distribution from_counts(const std::map<StratumKey, std::int64_t>& counts, DimensionSpec spec);

// Zero-weight strata are dropped; the count dropped is noted in provenance.
Distribution normalize(const std::map<StratumKey, double>& weights, DimensionSpec spec,
                       Provenance provenance = {});

AlignedPair align(const Distribution& sample, const Distribution& benchmark);

Distribution marginalize(const Distribution& dist, std::span<const std::string> keep_axes);

// Keeps strata whose label on `axis` is in `allowed` and rescales to one.
// The retained fraction is appended to the provenance notes.
Distribution restrict_to(const Distribution& dist, std::string_view axis,
                         const std::set<std::string>& allowed);

struct RestrictedMass {
    DimensionSpec spec;
    Distribution::MassMap mass;
    double retained_fraction = 0.0;
};

// Same selection as restrict_to without rescaling.
RestrictedMass restricted_mass(const Distribution& dist, std::string_view axis,
                               const std::set<std::string>& allowed);

}  // namespace repscore
