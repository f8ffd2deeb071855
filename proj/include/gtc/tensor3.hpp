// Dense third-order tensor over real or complex scalars.
//
// Storage is column-major with the first index fastest:
//   entry (i1, i2, i3) lives at data[i1 + n1*(i2 + n2*i3)].
// Frontal slices are therefore contiguous n1 x n2 column-major blocks,
// and the mode-3 unfolding (i1-fastest column order) is the transpose of
// the natural (n1*n2) x n3 map over the same buffer.

#ifndef GTC_TENSOR3_HPP
#define GTC_TENSOR3_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace gtc {

using Index = Eigen::Index;

template <typename Scalar>
class Tensor3 {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using SliceMap = Eigen::Map<Matrix>;
    using ConstSliceMap = Eigen::Map<const Matrix>;
    // rows = flattened (i1,i2), cols = i3; the transpose of the mode-3 unfolding
    using Mode3Map = Eigen::Map<Matrix>;
    using ConstMode3Map = Eigen::Map<const Matrix>;

    Tensor3() = default;

    Tensor3(Index n1, Index n2, Index n3)
        : n1_(n1), n2_(n2), n3_(n3), data_(static_cast<size_t>(n1 * n2 * n3), Scalar(0)) {
        if (n1 <= 0 || n2 <= 0 || n3 <= 0)
            throw std::invalid_argument("Tensor3: dimensions must be positive");
    }

    Index n1() const { return n1_; }
    Index n2() const { return n2_; }
    Index n3() const { return n3_; }
    Index size() const { return n1_ * n2_ * n3_; }
    bool empty() const { return data_.empty(); }

    bool same_dims(const Tensor3& other) const {
        return n1_ == other.n1_ && n2_ == other.n2_ && n3_ == other.n3_;
    }

    Scalar& operator()(Index i1, Index i2, Index i3) {
        return data_[static_cast<size_t>(i1 + n1_ * (i2 + n2_ * i3))];
    }
    Scalar operator()(Index i1, Index i2, Index i3) const {
        return data_[static_cast<size_t>(i1 + n1_ * (i2 + n2_ * i3))];
    }

    Scalar* data() { return data_.data(); }
    const Scalar* data() const { return data_.data(); }

    SliceMap slice(Index i3) {
        return SliceMap(data_.data() + n1_ * n2_ * i3, n1_, n2_);
    }
    ConstSliceMap slice(Index i3) const {
        return ConstSliceMap(data_.data() + n1_ * n2_ * i3, n1_, n2_);
    }

    // (n1*n2) x n3 view over the whole buffer; column t is frontal slice t.
    Mode3Map mode3_view() { return Mode3Map(data_.data(), n1_ * n2_, n3_); }
    ConstMode3Map mode3_view() const {
        return ConstMode3Map(data_.data(), n1_ * n2_, n3_);
    }

    void set_zero() { std::fill(data_.begin(), data_.end(), Scalar(0)); }

    double frobenius_norm() const {
        double s = 0;
        for (const Scalar& v : data_) s += std::norm(std::complex<double>(v));
        return std::sqrt(s);
    }

    double inf_norm() const {
        double m = 0;
        for (const Scalar& v : data_) m = std::max(m, std::abs(std::complex<double>(v)));
        return m;
    }

private:
    Index n1_ = 0, n2_ = 0, n3_ = 0;
    std::vector<Scalar> data_;
};

using RTensor = Tensor3<double>;
using CTensor = Tensor3<std::complex<double>>;

inline double inner(const RTensor& x, const RTensor& y) {
    if (!x.same_dims(y)) throw std::invalid_argument("inner: dimension mismatch");
    double s = 0;
    for (Index i = 0; i < x.size(); ++i) s += x.data()[i] * y.data()[i];
    return s;
}

inline CTensor to_complex(const RTensor& x) {
    CTensor c(x.n1(), x.n2(), x.n3());
    for (Index i = 0; i < x.size(); ++i) c.data()[i] = x.data()[i];
    return c;
}

// Largest |imaginary part| over all entries.
inline double imag_residue(const CTensor& x) {
    double m = 0;
    for (Index i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x.data()[i].imag()));
    return m;
}

inline RTensor real_part(const CTensor& x) {
    RTensor r(x.n1(), x.n2(), x.n3());
    for (Index i = 0; i < x.size(); ++i) r.data()[i] = x.data()[i].real();
    return r;
}

}  // namespace gtc

#endif  // GTC_TENSOR3_HPP
