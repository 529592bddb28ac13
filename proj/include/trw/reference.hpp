#pragma once

#include "trw/kernels.hpp"
#include "trw/tensor.hpp"

// Serial reference implementations. These are the ground truth the parallel
// kernels are tested and benchmarked against; they stay deliberately naive.

namespace trw::ref {

template <typename T>
void gemm(Trans ta, Trans tb, i64 M, i64 N, i64 K, const T* A, i64 lda, const T* B, i64 ldb, T* C,
          i64 ldc, bool accumulate = false) {
    for (i64 m = 0; m < M; ++m) {
        for (i64 n = 0; n < N; ++n) {
            T acc = accumulate ? C[m * ldc + n] : T(0);
            for (i64 k = 0; k < K; ++k) {
                const T a = (ta == Trans::N) ? A[m * lda + k] : A[k * lda + m];
                const T b = (tb == Trans::N) ? B[k * ldb + n] : B[n * ldb + k];
                acc += a * b;
            }
            C[m * ldc + n] = acc;
        }
    }
}

template <typename T>
void conv2d(const Tensor<T>& x, const Tensor<T>& w, const T* bias, i64 stride, i64 pad,
            Tensor<T>& y) {
    const i64 F = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
    const i64 Cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
    const i64 OH = conv_out_dim(H, kh, stride, pad), OW = conv_out_dim(W, kw, stride, pad);
    y.resize({F, Cout, OH, OW});
    for (i64 f = 0; f < F; ++f)
        for (i64 co = 0; co < Cout; ++co)
            for (i64 oy = 0; oy < OH; ++oy)
                for (i64 ox = 0; ox < OW; ++ox) {
                    T acc = bias ? bias[co] : T(0);
                    for (i64 ci = 0; ci < Cin; ++ci)
                        for (i64 ky = 0; ky < kh; ++ky)
                            for (i64 kx = 0; kx < kw; ++kx) {
                                const i64 iy = oy * stride + ky - pad;
                                const i64 ix = ox * stride + kx - pad;
                                if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                                acc += x.at4(f, ci, iy, ix) * w.at4(co, ci, ky, kx);
                            }
                    y.at4(f, co, oy, ox) = acc;
                }
}

template <typename T>
void groupnorm(const Tensor<T>& x, i64 groups, const T* gamma, const T* beta, T eps, Tensor<T>& y) {
    const i64 F = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const i64 cg = C / groups;
    y.resize(x.shape);
    for (i64 f = 0; f < F; ++f) {
        for (i64 g = 0; g < groups; ++g) {
            T mu = T(0);
            i64 m = cg * H * W;
            for (i64 c = 0; c < cg; ++c)
                for (i64 i = 0; i < H * W; ++i) mu += x.ptr()[((f * C + g * cg + c) * H * W) + i];
            mu /= static_cast<T>(m);
            T var = T(0);
            for (i64 c = 0; c < cg; ++c)
                for (i64 i = 0; i < H * W; ++i) {
                    T d = x.ptr()[((f * C + g * cg + c) * H * W) + i] - mu;
                    var += d * d;
                }
            var /= static_cast<T>(m);
            T rs = T(1) / std::sqrt(var + eps);
            for (i64 c = 0; c < cg; ++c) {
                const T ga = gamma ? gamma[g * cg + c] : T(1);
                const T be = beta ? beta[g * cg + c] : T(0);
                for (i64 i = 0; i < H * W; ++i) {
                    std::size_t idx = ((f * C + g * cg + c) * H * W) + i;
                    y.ptr()[idx] = (x.ptr()[idx] - mu) * rs * ga + be;
                }
            }
        }
    }
}

template <typename T>
void silu(const T* x, T* y, i64 n) {
    for (i64 i = 0; i < n; ++i) y[i] = x[i] * (T(1) / (T(1) + std::exp(-x[i])));
}

}  // namespace trw::ref
