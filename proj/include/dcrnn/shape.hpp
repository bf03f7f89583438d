#pragma once

#include <initializer_list>
#include <vector>

#include "dcrnn/common.hpp"

namespace dcrnn {

// Ordered list of positive extents; rank 0 is a scalar.
class Shape {
public:
    Shape() = default;
    Shape(std::initializer_list<i64> dims) : Shape(std::vector<i64>(dims)) {}
    explicit Shape(std::vector<i64> dims) : dims_(std::move(dims)) {
        count_ = 1;
        for (i64 d : dims_) {
            if (d < 1) raise(ErrorKind::Shape, "shape extent must be >= 1, got ", d, " in ", str_of(dims_));
            if (__builtin_mul_overflow(count_, d, &count_))
                raise(ErrorKind::Shape, "shape element count overflows index type: ", str_of(dims_));
        }
    }

    i64 rank() const { return static_cast<i64>(dims_.size()); }
    i64 count() const { return count_; }
    i64 operator[](i64 i) const { return dims_[static_cast<std::size_t>(i)]; }
    const std::vector<i64>& dims() const { return dims_; }

    bool operator==(const Shape& o) const { return dims_ == o.dims_; }
    bool operator!=(const Shape& o) const { return !(*this == o); }

    std::string str() const { return str_of(dims_); }

private:
    static std::string str_of(const std::vector<i64>& dims) {
        if (dims.empty()) return "scalar";
        std::string s;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (i) s += "x";
            s += std::to_string(dims[i]);
        }
        return s;
    }

    std::vector<i64> dims_;
    i64 count_ = 1;
};

}  // namespace dcrnn
