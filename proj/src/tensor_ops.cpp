#include "gtc/tensor_ops.hpp"

namespace gtc {

namespace detail {
bool exploit_dft_symmetry = true;
}

TransformedView make_transformed_view(const RTensor& x, const Transform& m) {
    return TransformedView{x, m.to_hat(x), &m};
}

CTensor t_product_hat(const CTensor& a_hat, const CTensor& b_hat, bool mirror_dft) {
    if (a_hat.n2() != b_hat.n1() || a_hat.n3() != b_hat.n3())
        throw std::invalid_argument("t_product: dimension mismatch");
    const Index n3 = a_hat.n3();
    CTensor c_hat(a_hat.n1(), b_hat.n2(), n3);
    const Index last = mirror_dft ? n3 / 2 : n3 - 1;
    for (Index t = 0; t <= last; ++t)
        c_hat.slice(t).noalias() = a_hat.slice(t) * b_hat.slice(t);
    if (mirror_dft)
        for (Index t = last + 1; t < n3; ++t)
            c_hat.slice(t) = c_hat.slice(n3 - t).conjugate();
    return c_hat;
}

void enforce_conjugate_symmetry(CTensor& hat, const Transform& m) {
    if (!m.hermitian_hat()) return;
    for (Index t = 0; t < hat.n3(); ++t) {
        const Index mt = m.mirror_slice(t);
        if (mt == t)
            hat.slice(t).imag().setZero();
        else if (mt > t)
            hat.slice(mt) = hat.slice(t).conjugate();
    }
}

RTensor t_product(const RTensor& a, const RTensor& b, const Transform& m) {
    if (a.n3() != m.size() || b.n3() != m.size())
        throw std::invalid_argument("t_product: n3 must equal transform size");
    const bool mirror =
        detail::exploit_dft_symmetry && m.kind() == TransformKind::dft && m.size() > 2;
    return m.from_hat(t_product_hat(m.to_hat(a), m.to_hat(b), mirror));
}

RTensor star_product(const RTensor& a, const RTensor& b) {
    if (a.n2() != b.n1() || a.n3() != b.n3())
        throw std::invalid_argument("star_product: dimension mismatch");
    RTensor c(a.n1(), b.n2(), a.n3());
    for (Index t = 0; t < a.n3(); ++t)
        c.slice(t).noalias() = a.slice(t) * b.slice(t);
    return c;
}

RTensor conj_transpose(const RTensor& a, const Transform& m) {
    if (a.n3() != m.size())
        throw std::invalid_argument("conj_transpose: n3 must equal transform size");
    CTensor a_hat = m.to_hat(a);
    CTensor at_hat(a.n2(), a.n1(), a.n3());
    for (Index t = 0; t < a.n3(); ++t)
        at_hat.slice(t) = a_hat.slice(t).adjoint();
    return m.from_hat(at_hat);
}

RTensor identity_tensor(Index n, const Transform& m) {
    CTensor i_hat(n, n, m.size());
    for (Index t = 0; t < m.size(); ++t)
        i_hat.slice(t) = Eigen::MatrixXcd::Identity(n, n);
    return m.from_hat(i_hat);
}

}  // namespace gtc
