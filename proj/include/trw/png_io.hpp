#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "trw/common.hpp"
#include "trw/tensor.hpp"

namespace trw {

// Minimal PNG reader/writer for 8-bit RGB, non-interlaced. Deterministic
// output bytes for identical pixel input.

void write_png_rgb8(const std::string& path, int width, int height, const std::vector<u8>& rgb);
void read_png_rgb8(const std::string& path, int& width, int& height, std::vector<u8>& rgb);

// (3,H,W) in [0,1] <-> interleaved RGB8 rows.
template <typename T>
std::vector<u8> tensor_to_rgb8(const Tensor<T>& img) {
    const i64 H = img.dim(1), W = img.dim(2);
    std::vector<u8> out(static_cast<std::size_t>(3 * H * W));
    const T* r = img.ptr();
    const T* g = r + H * W;
    const T* b = g + H * W;
    for (i64 i = 0; i < H * W; ++i) {
        auto q = [](T v) {
            double d = static_cast<double>(v);
            d = d < 0.0 ? 0.0 : (d > 1.0 ? 1.0 : d);
            return static_cast<u8>(std::lround(d * 255.0));
        };
        out[static_cast<std::size_t>(3 * i) + 0] = q(r[i]);
        out[static_cast<std::size_t>(3 * i) + 1] = q(g[i]);
        out[static_cast<std::size_t>(3 * i) + 2] = q(b[i]);
    }
    return out;
}

template <typename T>
Tensor<T> rgb8_to_tensor(int width, int height, const std::vector<u8>& rgb) {
    Tensor<T> img({3, height, width});
    T* r = img.ptr();
    T* g = r + static_cast<i64>(height) * width;
    T* b = g + static_cast<i64>(height) * width;
    for (i64 i = 0; i < static_cast<i64>(height) * width; ++i) {
        r[i] = static_cast<T>(rgb[static_cast<std::size_t>(3 * i) + 0]) / T(255);
        g[i] = static_cast<T>(rgb[static_cast<std::size_t>(3 * i) + 1]) / T(255);
        b[i] = static_cast<T>(rgb[static_cast<std::size_t>(3 * i) + 2]) / T(255);
    }
    return img;
}

template <typename T>
void write_image(const std::string& path, const Tensor<T>& img) {
    write_png_rgb8(path, static_cast<int>(img.dim(2)), static_cast<int>(img.dim(1)),
                   tensor_to_rgb8(img));
}

template <typename T>
Tensor<T> read_image(const std::string& path) {
    int w = 0, h = 0;
    std::vector<u8> rgb;
    read_png_rgb8(path, w, h, rgb);
    return rgb8_to_tensor<T>(w, h, rgb);
}

}  // namespace trw
