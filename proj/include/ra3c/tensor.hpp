#pragma once

#include <cmath>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "ra3c/common.hpp"

namespace ra3c {

// Dense row-major tensor. Invariant: data.size() == product(shape).
template <typename T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> data;

    TensorT() = default;
    explicit TensorT(std::vector<int> s) : shape(std::move(s)), data(count_of(shape), T(0)) {}
    TensorT(std::vector<int> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != count_of(shape)) throw ShapeError("tensor data length does not match shape");
    }

    static size_t count_of(const std::vector<int>& s) {
        size_t n = 1;
        for (int d : s) {
            if (d <= 0) throw ShapeError("tensor dimensions must be positive");
            n *= size_t(d);
        }
        return n;
    }

    size_t count() const { return data.size(); }
    int rank() const { return int(shape.size()); }
    bool same_shape(const TensorT& o) const { return shape == o.shape; }

    T& at(size_t i) { return data[i]; }
    T at(size_t i) const { return data[i]; }

    bool all_finite() const {
        for (T v : data)
            if (!std::isfinite(double(v))) return false;
        return true;
    }

    std::string shape_str() const {
        std::string s = "[";
        for (size_t i = 0; i < shape.size(); ++i) s += (i ? "x" : "") + std::to_string(shape[i]);
        return s + "]";
    }
};

using Tensor = TensorT<float>;

template <typename T>
TensorT<T> scalar_tensor(T v) {
    return TensorT<T>({1}, {v});
}

}  // namespace ra3c
