// Transformed t-SVD, tubal rank and the induced tensor norms.

#ifndef GTC_TSVD_HPP
#define GTC_TSVD_HPP

#include <optional>

#include "gtc/tensor_ops.hpp"

namespace gtc {

struct TSvdFactors {
    RTensor u;  // n1 x k x n3
    RTensor s;  // k x k x n3, f-diagonal, non-negative non-increasing per slice
    RTensor v;  // n2 x k x n3
    const Transform* transform = nullptr;

    RTensor reconstruct() const;
};

TSvdFactors t_svd(const RTensor& a, const Transform& m,
                  std::optional<Index> truncate = std::nullopt);

// Per-slice singular values of the transform-domain slices,
// min(n1,n2) x n3, each column non-increasing.
Eigen::MatrixXd transform_singular_values(const RTensor& a, const Transform& m);

Index tubal_rank(const RTensor& a, const Transform& m, double tol = 1e-8);

double tensor_spectral_norm(const RTensor& a, const Transform& m);
double tensor_nuclear_norm(const RTensor& a, const Transform& m);

}  // namespace gtc

#endif  // GTC_TSVD_HPP
