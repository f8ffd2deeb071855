// Invertible mode-3 transforms defining the t-product algebra.
//
// A transform is an invertible n3 x n3 matrix M with M M^H = M^H M = C I
// for a positive constant C. Supported kinds: the DFT matrix (C = n3),
// the identity (C = 1), block-diagonal transforms with identical unitary
// blocks (C = block scale), and user-supplied matrices.

#ifndef GTC_TRANSFORM_HPP
#define GTC_TRANSFORM_HPP

#include <memory>
#include <string>

#include "gtc/tensor3.hpp"

namespace gtc {

enum class TransformKind { dft, identity, block_orthogonal, custom };

class Transform {
public:
    using MatrixXcd = Eigen::MatrixXcd;

    static Transform dft(Index n3);
    static Transform identity(Index n3);
    // Block-diagonal with n3/block_size identical copies of `block`
    // (block must satisfy B B^H = c I). The DFT block is the default.
    static Transform block_dft(Index n3, Index block_size);
    static Transform block_orthogonal(Index n3, const Eigen::MatrixXd& block);
    static Transform custom(const MatrixXcd& m);

    Index size() const { return n3_; }
    double scale() const { return scale_c_; }
    TransformKind kind() const { return kind_; }
    Index block_size() const { return block_size_; }

    const MatrixXcd& matrix() const { return m_; }
    const MatrixXcd& inverse_matrix() const { return m_inv_; }

    bool is_real() const { return real_; }

    // True when the hat of a real tensor obeys hat(mirror_slice(t)) =
    // conj(hat(t)): real transforms (trivial mirror) and DFT blocks.
    bool hermitian_hat() const { return real_ || dft_blocks_; }
    Index mirror_slice(Index t) const;

    CTensor to_hat(const RTensor& x) const;
    CTensor to_hat(const CTensor& x) const;
    CTensor from_hat_complex(const CTensor& hat) const;
    // Inverse transform with a guard on the imaginary residue of the result.
    RTensor from_hat(const CTensor& hat, double imag_tol = 1e-8) const;

private:
    Transform(MatrixXcd m, double c, TransformKind kind, Index block_size,
              bool dft_blocks);

    MatrixXcd m_;
    MatrixXcd m_inv_;
    double scale_c_ = 1.0;
    TransformKind kind_ = TransformKind::custom;
    Index n3_ = 0;
    Index block_size_ = 0;
    bool real_ = false;
    bool dft_blocks_ = false;
};

// result_(3) = a * x_(3) with the i1-fastest unfolding convention.
template <typename Scalar>
Tensor3<std::complex<double>> mode3_product(const Tensor3<Scalar>& x,
                                            const Eigen::MatrixXcd& a) {
    if (a.cols() != x.n3())
        throw std::invalid_argument("mode3_product: matrix columns must equal n3");
    CTensor result(x.n1(), x.n2(), a.rows());
    Eigen::MatrixXcd xm = x.mode3_view().template cast<std::complex<double>>();
    result.mode3_view() = xm * a.transpose();
    return result;
}

RTensor mode3_product_real(const RTensor& x, const Eigen::MatrixXd& a);

}  // namespace gtc

#endif  // GTC_TRANSFORM_HPP
