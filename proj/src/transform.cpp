#include "gtc/transform.hpp"

#include <cmath>
#include <numbers>

namespace gtc {

namespace {

// Rows j and n-j are exact conjugates and the self-paired rows (0 and n/2)
// exactly real, so conjugate symmetry of transformed real tensors holds
// bit-for-bit, not just to rounding.
Eigen::MatrixXcd dft_matrix(Index n) {
    Eigen::MatrixXcd m(n, n);
    const double w = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (Index j = 0; j <= n / 2; ++j)
        for (Index k = 0; k < n; ++k) {
            const Index r = (j * k) % n;
            std::complex<double> v;
            if (r == 0) v = 1.0;
            else if (4 * r == n) v = {0.0, -1.0};
            else if (2 * r == n) v = -1.0;
            else if (4 * r == 3 * n) v = {0.0, 1.0};
            else v = std::polar(1.0, w * static_cast<double>(r));
            m(j, k) = v;
            if (j != 0 && 2 * j != n) m(n - j, k) = std::conj(v);
        }
    return m;
}

Eigen::MatrixXcd block_diag(const Eigen::MatrixXcd& block, Index copies) {
    const Index b = block.rows();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(b * copies, b * copies);
    for (Index k = 0; k < copies; ++k) m.block(k * b, k * b, b, b) = block;
    return m;
}

}  // namespace

Transform::Transform(MatrixXcd m, double c, TransformKind kind, Index block_size,
                     bool dft_blocks)
    : m_(std::move(m)),
      scale_c_(c),
      kind_(kind),
      n3_(m_.rows()),
      block_size_(block_size),
      dft_blocks_(dft_blocks) {
    if (n3_ == 0 || m_.rows() != m_.cols())
        throw std::invalid_argument("Transform: matrix must be square and non-empty");
    if (c <= 0) throw std::invalid_argument("Transform: scale must be positive");
    const double dev = (m_ * m_.adjoint() - c * MatrixXcd::Identity(n3_, n3_)).norm();
    if (dev / c > 1e-10)
        throw std::invalid_argument("Transform: M M^H != C I within tolerance");
    m_inv_ = m_.adjoint() / c;
    real_ = m_.imag().norm() == 0.0;
}

Transform Transform::dft(Index n3) {
    return Transform(dft_matrix(n3), static_cast<double>(n3), TransformKind::dft, n3,
                     true);
}

Transform Transform::identity(Index n3) {
    return Transform(MatrixXcd::Identity(n3, n3), 1.0, TransformKind::identity, 1,
                     false);
}

Index Transform::mirror_slice(Index t) const {
    if (!dft_blocks_) return t;
    const Index t0 = (t / block_size_) * block_size_;
    const Index j = t - t0;
    return t0 + (j == 0 ? 0 : block_size_ - j);
}

Transform Transform::block_dft(Index n3, Index block_size) {
    if (block_size <= 0 || n3 % block_size != 0)
        throw std::invalid_argument("Transform: block size must divide n3");
    if (block_size == n3) return dft(n3);
    if (block_size == 1) return identity(n3);
    return Transform(block_diag(dft_matrix(block_size), n3 / block_size),
                     static_cast<double>(block_size), TransformKind::block_orthogonal,
                     block_size, true);
}

Transform Transform::block_orthogonal(Index n3, const Eigen::MatrixXd& block) {
    const Index b = block.rows();
    if (b <= 0 || block.cols() != b)
        throw std::invalid_argument("Transform: block must be square");
    if (n3 % b != 0)
        throw std::invalid_argument("Transform: block size must divide n3");
    Eigen::MatrixXcd cblock = block.cast<std::complex<double>>();
    const double c = (block * block.transpose()).trace() / static_cast<double>(b);
    return Transform(block_diag(cblock, n3 / b), c, TransformKind::block_orthogonal, b,
                     false);
}

Transform Transform::custom(const MatrixXcd& m) {
    const double c =
        (m * m.adjoint()).trace().real() / static_cast<double>(m.rows());
    return Transform(m, c, TransformKind::custom, m.rows(), false);
}

namespace {

// result_(3) = x_(3) * a^T computed block-diagonally; for identical diagonal
// blocks only one block-sized product per block column is needed.
template <typename XMat>
CTensor blockwise_mode3(const XMat& xm, Index n1, Index n2,
                        const Eigen::MatrixXcd& a, Index block) {
    CTensor result(n1, n2, a.rows());
    if (block >= a.rows()) {
        result.mode3_view() = xm * a.transpose();
        return result;
    }
    const Eigen::MatrixXcd bt = a.topLeftCorner(block, block).transpose();
    auto out = result.mode3_view();
    for (Index k = 0; k < a.rows(); k += block)
        out.middleCols(k, block) = xm.middleCols(k, block) * bt;
    return result;
}

}  // namespace

CTensor Transform::to_hat(const RTensor& x) const {
    if (x.n3() != n3_)
        throw std::invalid_argument("Transform: tensor n3 does not match");
    if (kind_ == TransformKind::identity) return to_complex(x);
    return blockwise_mode3(x.mode3_view().cast<std::complex<double>>(), x.n1(), x.n2(),
                           m_, block_size_);
}

CTensor Transform::to_hat(const CTensor& x) const {
    if (x.n3() != n3_)
        throw std::invalid_argument("Transform: tensor n3 does not match");
    if (kind_ == TransformKind::identity) return x;
    return blockwise_mode3(x.mode3_view(), x.n1(), x.n2(), m_, block_size_);
}

CTensor Transform::from_hat_complex(const CTensor& hat) const {
    if (hat.n3() != n3_)
        throw std::invalid_argument("Transform: tensor n3 does not match");
    if (kind_ == TransformKind::identity) return hat;
    return blockwise_mode3(hat.mode3_view(), hat.n1(), hat.n2(), m_inv_, block_size_);
}

RTensor Transform::from_hat(const CTensor& hat, double imag_tol) const {
    CTensor back = from_hat_complex(hat);
    const double scale = std::max(1.0, back.frobenius_norm());
    if (imag_residue(back) > imag_tol * scale)
        throw std::runtime_error("Transform: inverse transform is not real");
    return real_part(back);
}

RTensor mode3_product_real(const RTensor& x, const Eigen::MatrixXd& a) {
    if (a.cols() != x.n3())
        throw std::invalid_argument("mode3_product: matrix columns must equal n3");
    RTensor result(x.n1(), x.n2(), a.rows());
    result.mode3_view() = x.mode3_view() * a.transpose();
    return result;
}

}  // namespace gtc
