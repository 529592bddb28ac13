#pragma once

#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "trw/common.hpp"

namespace trw {

// Dense row-major tensor. Video activations use (F, C, H, W), conv weights
// (Cout, Cin, kh, kw), matrices (rows, cols).
template <typename T>
struct Tensor {
    std::vector<i64> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<i64> s) { resize(std::move(s)); }
    Tensor(std::initializer_list<i64> s) { resize(std::vector<i64>(s)); }

    void resize(std::vector<i64> s) {
        shape = std::move(s);
        data.assign(static_cast<std::size_t>(numel_of(shape)), T(0));
    }

    static i64 numel_of(const std::vector<i64>& s) {
        i64 n = 1;
        for (i64 d : s) n *= d;
        return n;
    }

    i64 numel() const { return static_cast<i64>(data.size()); }
    i64 dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    int ndim() const { return static_cast<int>(shape.size()); }

    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }
    void zero() { fill(T(0)); }

    // 4-D accessors (F,C,H,W); unchecked in release builds.
    T& at4(i64 f, i64 c, i64 y, i64 x) {
        return data[static_cast<std::size_t>(((f * shape[1] + c) * shape[2] + y) * shape[3] + x)];
    }
    T at4(i64 f, i64 c, i64 y, i64 x) const {
        return data[static_cast<std::size_t>(((f * shape[1] + c) * shape[2] + y) * shape[3] + x)];
    }
    T& at3(i64 c, i64 y, i64 x) {
        return data[static_cast<std::size_t>((c * shape[1] + y) * shape[2] + x)];
    }
    T at3(i64 c, i64 y, i64 x) const {
        return data[static_cast<std::size_t>((c * shape[1] + y) * shape[2] + x)];
    }
    T& at2(i64 r, i64 c) { return data[static_cast<std::size_t>(r * shape[1] + c)]; }
    T at2(i64 r, i64 c) const { return data[static_cast<std::size_t>(r * shape[1] + c)]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    std::string shape_str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < shape.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(shape[i]);
        }
        return s + ")";
    }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out;
        out.shape = shape;
        out.data.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace trw
