// t-product algebra: slice-wise products, conjugate transpose, identity
// tensor. All public entry points take and return real tensors; complex
// arithmetic is confined to the transform domain.

#ifndef GTC_TENSOR_OPS_HPP
#define GTC_TENSOR_OPS_HPP

#include "gtc/transform.hpp"

namespace gtc {

namespace detail {
// For real tensors under the DFT the transform-domain slices come in
// conjugate pairs, so only the first half of the slice products is computed
// and the rest mirrored. Tests flip this off to compare against the plain path.
extern bool exploit_dft_symmetry;
}  // namespace detail

// A tensor together with its transform-domain image.
struct TransformedView {
    RTensor origin;
    CTensor hat;
    const Transform* transform = nullptr;
};

TransformedView make_transformed_view(const RTensor& x, const Transform& m);

RTensor t_product(const RTensor& a, const RTensor& b, const Transform& m);
CTensor t_product_hat(const CTensor& a_hat, const CTensor& b_hat, bool mirror_dft);

// Projects hat onto the conjugate-symmetric set of the transform: mirrored
// slices are overwritten with conjugates of their representatives and
// self-mirrored slices made real. No-op for transforms without the symmetry.
// Iterative solvers use this to keep rounding noise from feeding the
// asymmetric (non-real) modes of their fixed-point maps.
void enforce_conjugate_symmetry(CTensor& hat, const Transform& m);

// Frontal slice-wise matrix product in the original domain (no transform).
RTensor star_product(const RTensor& a, const RTensor& b);

RTensor conj_transpose(const RTensor& a, const Transform& m);

RTensor identity_tensor(Index n, const Transform& m);

}  // namespace gtc

#endif  // GTC_TENSOR_OPS_HPP
