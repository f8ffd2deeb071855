#include "gtc/tsvd.hpp"

#include <Eigen/SVD>

namespace gtc {

namespace {

bool use_dft_mirror(const Transform& m) {
    return detail::exploit_dft_symmetry && m.kind() == TransformKind::dft &&
           m.size() > 2;
}

}  // namespace

RTensor TSvdFactors::reconstruct() const {
    return t_product(t_product(u, s, *transform), conj_transpose(v, *transform),
                     *transform);
}

TSvdFactors t_svd(const RTensor& a, const Transform& m, std::optional<Index> truncate) {
    if (a.n3() != m.size())
        throw std::invalid_argument("t_svd: n3 must equal transform size");
    const Index n1 = a.n1(), n2 = a.n2(), n3 = a.n3();
    const Index full_k = std::min(n1, n2);
    const Index k = truncate ? std::min(*truncate, full_k) : full_k;
    if (k <= 0) throw std::invalid_argument("t_svd: truncation rank must be positive");

    CTensor a_hat = m.to_hat(a);
    CTensor u_hat(n1, k, n3), s_hat(k, k, n3), v_hat(n2, k, n3);
    const bool mirror = use_dft_mirror(m);
    const Index last = mirror ? n3 / 2 : n3 - 1;
    for (Index t = 0; t <= last; ++t) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
            a_hat.slice(t), Eigen::ComputeThinU | Eigen::ComputeThinV);
        u_hat.slice(t) = svd.matrixU().leftCols(k);
        v_hat.slice(t) = svd.matrixV().leftCols(k);
        s_hat.slice(t) = svd.singularValues().head(k).asDiagonal().toDenseMatrix()
                             .cast<std::complex<double>>();
    }
    if (mirror) {
        // SVD of the conjugate slice is the conjugated factorization; taking it
        // directly keeps the hat factors conjugate-symmetric and the output real.
        for (Index t = last + 1; t < n3; ++t) {
            u_hat.slice(t) = u_hat.slice(n3 - t).conjugate();
            v_hat.slice(t) = v_hat.slice(n3 - t).conjugate();
            s_hat.slice(t) = s_hat.slice(n3 - t);
        }
    }
    TSvdFactors f;
    f.u = m.from_hat(u_hat);
    f.s = m.from_hat(s_hat);
    f.v = m.from_hat(v_hat);
    f.transform = &m;
    return f;
}

Eigen::MatrixXd transform_singular_values(const RTensor& a, const Transform& m) {
    if (a.n3() != m.size())
        throw std::invalid_argument("singular values: n3 must equal transform size");
    const Index n3 = a.n3();
    const Index k = std::min(a.n1(), a.n2());
    Eigen::MatrixXd sv(k, n3);
    CTensor a_hat = m.to_hat(a);
    const bool mirror = use_dft_mirror(m);
    const Index last = mirror ? n3 / 2 : n3 - 1;
    for (Index t = 0; t <= last; ++t) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a_hat.slice(t));
        sv.col(t) = svd.singularValues();
    }
    if (mirror)
        for (Index t = last + 1; t < n3; ++t) sv.col(t) = sv.col(n3 - t);
    return sv;
}

Index tubal_rank(const RTensor& a, const Transform& m, double tol) {
    if (tol <= 0) throw std::invalid_argument("tubal_rank: tol must be positive");
    Eigen::MatrixXd sv = transform_singular_values(a, m);
    const double top = sv.maxCoeff();
    if (top == 0.0) return 0;
    Index rank = 0;
    for (Index i = 0; i < sv.rows(); ++i)
        if (sv.row(i).maxCoeff() > tol * top) ++rank;
    return rank;
}

double tensor_spectral_norm(const RTensor& a, const Transform& m) {
    Eigen::MatrixXd sv = transform_singular_values(a, m);
    return sv.row(0).maxCoeff();
}

double tensor_nuclear_norm(const RTensor& a, const Transform& m) {
    Eigen::MatrixXd sv = transform_singular_values(a, m);
    return sv.sum() / m.scale();
}

}  // namespace gtc
