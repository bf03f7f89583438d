#pragma once

#include <vector>

#include "dcrnn/shape.hpp"

namespace dcrnn {

// Dense 64-bit float array in row-major order.
class Tensor {
public:
    Tensor() : shape_(), data_(1, 0.0) {}
    explicit Tensor(Shape s) : shape_(std::move(s)), data_(static_cast<std::size_t>(shape_.count()), 0.0) {}
    Tensor(Shape s, std::vector<double> d) : shape_(std::move(s)), data_(std::move(d)) {
        if (static_cast<i64>(data_.size()) != shape_.count())
            raise(ErrorKind::Shape, "tensor data length ", data_.size(), " does not match shape ", shape_.str());
    }

    static Tensor scalar(double v) {
        Tensor t;
        t.data_[0] = v;
        return t;
    }
    static Tensor zeros(Shape s) { return Tensor(std::move(s)); }
    static Tensor full(Shape s, double v) {
        Tensor t(std::move(s));
        std::fill(t.data_.begin(), t.data_.end(), v);
        return t;
    }
    static Tensor ones(Shape s) { return full(std::move(s), 1.0); }

    const Shape& shape() const { return shape_; }
    i64 size() const { return shape_.count(); }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double operator[](i64 i) const { return data_[static_cast<std::size_t>(i)]; }
    double& operator[](i64 i) { return data_[static_cast<std::size_t>(i)]; }

    // Rank-2 accessors.
    i64 rows() const { return shape_[0]; }
    i64 cols() const { return shape_[1]; }
    double at(i64 r, i64 c) const { return data_[static_cast<std::size_t>(r * cols() + c)]; }
    double& at(i64 r, i64 c) { return data_[static_cast<std::size_t>(r * cols() + c)]; }

    bool all_finite() const;

    bool operator==(const Tensor& o) const { return shape_ == o.shape_ && data_ == o.data_; }

private:
    Shape shape_;
    std::vector<double> data_;
};

}  // namespace dcrnn
