#pragma once

#include "trw/common.hpp"
#include "trw/tensor.hpp"

namespace trw {

// Exactly invertible space-to-depth codec standing in for a learned VAE:
// (F, 3, H, W) <-> (F, 3*s*s, H/s, W/s). Lossless both ways.

struct LatentMeta {
    int scale = 4;
    i64 frames = 0;
    i64 height = 0;  // pixel H
    i64 width = 0;   // pixel W
};

template <typename T>
struct LatentVideo {
    Tensor<T> data;  // (F, 3*s*s, H/s, W/s)
    LatentMeta meta;
};

template <typename T>
LatentVideo<T> encode(const Tensor<T>& video, int scale) {
    check_arg(video.ndim() == 4 && video.dim(1) == 3, "encode: expected (F,3,H,W)");
    check_arg(scale >= 1, "encode: scale must be >= 1");
    const i64 F = video.dim(0), H = video.dim(2), W = video.dim(3), s = scale;
    check_arg(H % s == 0 && W % s == 0, "encode: H and W must be divisible by scale");
    LatentVideo<T> lat;
    lat.meta = LatentMeta{scale, F, H, W};
    const i64 HL = H / s, WL = W / s;
    lat.data.resize({F, 3 * s * s, HL, WL});
    for (i64 f = 0; f < F; ++f)
        for (i64 c = 0; c < 3; ++c)
            for (i64 y = 0; y < H; ++y)
                for (i64 x = 0; x < W; ++x) {
                    const i64 cl = (c * s + y % s) * s + x % s;
                    lat.data.at4(f, cl, y / s, x / s) = video.at4(f, c, y, x);
                }
    return lat;
}

template <typename T>
Tensor<T> decode(const LatentVideo<T>& lat) {
    const i64 s = lat.meta.scale;
    check_arg(lat.data.ndim() == 4, "decode: expected 4-d latent");
    check_arg(lat.data.dim(0) == lat.meta.frames && lat.data.dim(1) == 3 * s * s &&
                  lat.data.dim(2) == lat.meta.height / s && lat.data.dim(3) == lat.meta.width / s,
              "decode: latent shape inconsistent with metadata");
    const i64 F = lat.meta.frames, H = lat.meta.height, W = lat.meta.width;
    Tensor<T> video({F, 3, H, W});
    for (i64 f = 0; f < F; ++f)
        for (i64 c = 0; c < 3; ++c)
            for (i64 y = 0; y < H; ++y)
                for (i64 x = 0; x < W; ++x) {
                    const i64 cl = (c * s + y % s) * s + x % s;
                    video.at4(f, c, y, x) = lat.data.at4(f, cl, y / s, x / s);
                }
    return video;
}

// Space-to-depth for a single multi-channel image (C,H,W) -> (C*s*s, H/s, W/s).
// The event-image alignment reuses this, matching the latent codec layout.
template <typename T>
Tensor<T> space_to_depth(const Tensor<T>& img, int scale) {
    check_arg(img.ndim() == 3, "space_to_depth: expected (C,H,W)");
    const i64 C = img.dim(0), H = img.dim(1), W = img.dim(2), s = scale;
    check_arg(s >= 1 && H % s == 0 && W % s == 0, "space_to_depth: bad scale");
    Tensor<T> out({C * s * s, H / s, W / s});
    for (i64 c = 0; c < C; ++c)
        for (i64 y = 0; y < H; ++y)
            for (i64 x = 0; x < W; ++x)
                out.at3((c * s + y % s) * s + x % s, y / s, x / s) = img.at3(c, y, x);
    return out;
}

}  // namespace trw
