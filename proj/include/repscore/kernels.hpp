#pragma once

// Scalar kernels over dense proportion vectors. All functions accept any
// Eigen column expression and are templated on its scalar type.

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Core>

namespace repscore::kernels {

template <typename Derived>
using ColumnOf = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;

// Half the L1 distance: the share of mass that has to move.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar total_variation(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
    using Scalar = typename DerivedP::Scalar;
    // Rounding can push the sum a few ulps past 1 for disjoint supports.
    return std::min(Scalar(1), Scalar(0.5) * (p - q).cwiseAbs().sum());
}

template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar representativeness(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
    using Scalar = typename DerivedP::Scalar;
    return Scalar(1) - total_variation(p, q);
}

// s_i = sqrt(q_i) / sum_j sqrt(q_j)
template <typename DerivedQ>
ColumnOf<DerivedQ> sqrt_target(const Eigen::MatrixBase<DerivedQ>& q) {
    ColumnOf<DerivedQ> root = q.cwiseSqrt();
    return root / root.sum();
}

template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar hellinger(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
    using Scalar = typename DerivedP::Scalar;
    using std::sqrt;
    return sqrt(Scalar(0.5) * (p.cwiseSqrt() - q.cwiseSqrt()).squaredNorm());
}

// KL(P || Q) in nats. Defined only when p and q share the same support.
template <typename DerivedP, typename DerivedQ>
std::optional<typename DerivedP::Scalar> kl_divergence(const Eigen::MatrixBase<DerivedP>& p,
                                                       const Eigen::MatrixBase<DerivedQ>& q) {
    using Scalar = typename DerivedP::Scalar;
    using std::log;
    Scalar sum(0);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const bool has_p = p[i] > Scalar(0);
        const bool has_q = q[i] > Scalar(0);
        if (has_p != has_q) return std::nullopt;
        if (has_p) sum += p[i] * log(p[i] / q[i]);
    }
    // Rounding can push a zero divergence slightly negative.
    return sum < Scalar(0) ? Scalar(0) : sum;
}

// sum_i q_i^2 / p_i; every p_i must be positive.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar quadratic_ratio(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
    return (q.array().square() / p.array()).sum();
}

// Squared coefficient of variation of `values` under frequency weights `freq`.
template <typename DerivedW, typename DerivedF>
typename DerivedW::Scalar weighted_cv2(const Eigen::MatrixBase<DerivedW>& values, const Eigen::MatrixBase<DerivedF>& freq) {
    using Scalar = typename DerivedW::Scalar;
    const Scalar total = freq.sum();
    const Scalar mean = values.dot(freq) / total;
    const Scalar var = ((values.array() - mean).square() * freq.array()).sum() / total;
    return var / (mean * mean);
}

// Representativeness of an integer allocation of n units against q.
template <typename DerivedC, typename DerivedQ>
typename DerivedQ::Scalar allocation_score(const Eigen::MatrixBase<DerivedC>& counts, const Eigen::MatrixBase<DerivedQ>& q,
                                           typename DerivedQ::Scalar n) {
    using Scalar = typename DerivedQ::Scalar;
    return representativeness(counts.template cast<Scalar>() / n, q);
}

}  // namespace repscore::kernels
