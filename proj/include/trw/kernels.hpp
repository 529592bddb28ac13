#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include <omp.h>

#include "trw/common.hpp"
#include "trw/tensor.hpp"
#include "trw/threading.hpp"

// Data-parallel kernels. Every kernel partitions work so that each output
// element is accumulated serially in a fixed order; results are bitwise
// identical for any thread count. Serial reference versions for testing and
// benchmarking live in trw::ref (reference.hpp).

namespace trw {

enum class Trans { N, T };

namespace detail {

// Row tile height and the two column block widths of the micro-kernel.
// 6 rows x 48 float columns keeps an 18-vector accumulator in registers.
inline constexpr int kMR = 6;

template <typename T>
inline constexpr int block_nj_big() {
    return sizeof(T) == 4 ? 48 : 12;
}
template <typename T>
inline constexpr int block_nj_small() {
    return sizeof(T) == 4 ? 16 : 4;
}

// C tile (MR x NJ) += A panel (MR x K, row stride lda) * B panel (K x NJ, row
// stride ldb). Compile-time tile bounds so the accumulator stays in registers.
template <typename T, int NJ, int MR>
inline void micro_kernel_fixed(i64 K, const T* A, i64 lda, const T* B, i64 ldb, T* C, i64 ldc,
                               bool accumulate) {
    T acc[MR][NJ];
    if (accumulate) {
        for (int m = 0; m < MR; ++m)
            for (int j = 0; j < NJ; ++j) acc[m][j] = C[m * ldc + j];
    } else {
        for (int m = 0; m < MR; ++m)
            for (int j = 0; j < NJ; ++j) acc[m][j] = T(0);
    }
    for (i64 k = 0; k < K; ++k) {
        const T* __restrict brow = B + k * ldb;
        for (int m = 0; m < MR; ++m) {
            const T a = A[m * lda + k];
            #pragma omp simd
            for (int j = 0; j < NJ; ++j) acc[m][j] += a * brow[j];
        }
    }
    for (int m = 0; m < MR; ++m)
        for (int j = 0; j < NJ; ++j) C[m * ldc + j] = acc[m][j];
}

template <typename T, int NJ>
inline void micro_kernel(i64 mr, i64 K, const T* A, i64 lda, const T* B, i64 ldb, T* C, i64 ldc,
                         bool accumulate) {
    switch (mr) {
        case 6: micro_kernel_fixed<T, NJ, 6>(K, A, lda, B, ldb, C, ldc, accumulate); return;
        case 5: micro_kernel_fixed<T, NJ, 5>(K, A, lda, B, ldb, C, ldc, accumulate); return;
        case 4: micro_kernel_fixed<T, NJ, 4>(K, A, lda, B, ldb, C, ldc, accumulate); return;
        case 3: micro_kernel_fixed<T, NJ, 3>(K, A, lda, B, ldb, C, ldc, accumulate); return;
        case 2: micro_kernel_fixed<T, NJ, 2>(K, A, lda, B, ldb, C, ldc, accumulate); return;
        case 1: micro_kernel_fixed<T, NJ, 1>(K, A, lda, B, ldb, C, ldc, accumulate); return;
        default: return;
    }
}

// Column tail: same k-order per element, scalar over the remaining columns.
template <typename T>
inline void micro_kernel_tail(i64 mr, i64 nj, i64 K, const T* A, i64 lda, const T* B, i64 ldb,
                              T* C, i64 ldc, bool accumulate) {
    for (i64 m = 0; m < mr; ++m) {
        for (i64 j = 0; j < nj; ++j) {
            T acc = accumulate ? C[m * ldc + j] : T(0);
            for (i64 k = 0; k < K; ++k) acc += A[m * lda + k] * B[k * ldb + j];
            C[m * ldc + j] = acc;
        }
    }
}

template <typename T>
std::vector<T>& gemm_scratch(int which) {
    thread_local std::vector<T> buf[2];
    return buf[which];
}

}  // namespace detail

// C (M x N) = op(A) * op(B) [+ C if accumulate].
// op(A) is M x K; Trans::T means the physical array is the transpose
// (K x M row-major with leading dimension lda). Same for B.
template <typename T>
void gemm(Trans ta, Trans tb, i64 M, i64 N, i64 K, const T* A, i64 lda, const T* B, i64 ldb, T* C,
          i64 ldc, bool accumulate = false, bool parallel = true) {
    // Transposed operands are packed into contiguous row-major buffers so the
    // inner kernel always streams B rows. Packing copies values unchanged.
    if (ta == Trans::T) {
        auto& packA = detail::gemm_scratch<T>(0);
        packA.resize(static_cast<std::size_t>(M * K));
        #pragma omp parallel for schedule(static) if (parallel && M * K > 16384)
        for (i64 m = 0; m < M; ++m)
            for (i64 k = 0; k < K; ++k) packA[m * K + k] = A[k * lda + m];
        gemm(Trans::N, tb, M, N, K, packA.data(), K, B, ldb, C, ldc, accumulate, parallel);
        return;
    }
    if (tb == Trans::T) {
        auto& packB = detail::gemm_scratch<T>(1);
        packB.resize(static_cast<std::size_t>(K * N));
        #pragma omp parallel for schedule(static) if (parallel && K * N > 16384)
        for (i64 k = 0; k < K; ++k)
            for (i64 n = 0; n < N; ++n) packB[k * N + n] = B[n * ldb + k];
        gemm(Trans::N, Trans::N, M, N, K, A, lda, packB.data(), N, C, ldc, accumulate, parallel);
        return;
    }

    constexpr int NJB = detail::block_nj_big<T>();
    constexpr int NJS = detail::block_nj_small<T>();
    // column blocks: big strips, then small strips, then a scalar tail
    const i64 n_big = N / NJB;
    const i64 rem_after_big = N - n_big * NJB;
    const i64 n_small = rem_after_big / NJS;
    const i64 n_tail = rem_after_big - n_small * NJS;
    const i64 jblocks = n_big + n_small + (n_tail ? 1 : 0);
    const i64 m_tiles = (M + detail::kMR - 1) / detail::kMR;
    const i64 tasks = m_tiles * jblocks;

    // j-block major: consecutive tasks share the same B panel
    #pragma omp parallel for schedule(static) if (parallel && tasks > 1 && thread_cap() > 1)
    for (i64 t = 0; t < tasks; ++t) {
        const i64 jb = t / m_tiles;
        const i64 mt = t % m_tiles;
        const i64 m0 = mt * detail::kMR;
        const i64 mr = std::min<i64>(detail::kMR, M - m0);
        if (jb < n_big) {
            const i64 j0 = jb * NJB;
            detail::micro_kernel<T, NJB>(mr, K, A + m0 * lda, lda, B + j0, ldb, C + m0 * ldc + j0,
                                         ldc, accumulate);
        } else if (jb < n_big + n_small) {
            const i64 j0 = n_big * NJB + (jb - n_big) * NJS;
            detail::micro_kernel<T, NJS>(mr, K, A + m0 * lda, lda, B + j0, ldb, C + m0 * ldc + j0,
                                         ldc, accumulate);
        } else {
            const i64 j0 = N - n_tail;
            detail::micro_kernel_tail<T>(mr, n_tail, K, A + m0 * lda, lda, B + j0, ldb,
                                         C + m0 * ldc + j0, ldc, accumulate);
        }
    }
}

// ---------------------------------------------------------------------------
// im2col / col2im for per-frame 2-D convolution on (F, C, H, W) tensors.
// col is (C*kh*kw) x (F*OH*OW), column index = (f*OH + oy)*OW + ox.

inline i64 conv_out_dim(i64 in, i64 k, i64 stride, i64 pad) {
    return (in + 2 * pad - k) / stride + 1;
}

template <typename T>
void im2col(const Tensor<T>& x, i64 kh, i64 kw, i64 stride, i64 pad, T* col, bool parallel = true) {
    const i64 F = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const i64 OH = conv_out_dim(H, kh, stride, pad), OW = conv_out_dim(W, kw, stride, pad);
    const i64 ncol = F * OH * OW;
    const i64 rows = C * kh * kw;
    const T* xp = x.ptr();

    #pragma omp parallel for schedule(static) if (parallel && rows > 1 && thread_cap() > 1)
    for (i64 r = 0; r < rows; ++r) {
        const i64 c = r / (kh * kw);
        const i64 ky = (r / kw) % kh;
        const i64 kx = r % kw;
        T* dst = col + r * ncol;
        for (i64 f = 0; f < F; ++f) {
            const T* src = xp + (f * C + c) * H * W;
            for (i64 oy = 0; oy < OH; ++oy) {
                const i64 iy = oy * stride + ky - pad;
                T* drow = dst + (f * OH + oy) * OW;
                if (iy < 0 || iy >= H) {
                    std::memset(drow, 0, sizeof(T) * static_cast<std::size_t>(OW));
                    continue;
                }
                const T* srow = src + iy * W;
                if (stride == 1) {
                    const i64 ix0 = kx - pad;
                    i64 ox = 0;
                    for (; ox < OW && ix0 + ox < 0; ++ox) drow[ox] = T(0);
                    i64 ox_end = std::min<i64>(OW, W - ix0);
                    for (; ox < ox_end; ++ox) drow[ox] = srow[ix0 + ox];
                    for (; ox < OW; ++ox) drow[ox] = T(0);
                } else {
                    for (i64 ox = 0; ox < OW; ++ox) {
                        const i64 ix = ox * stride + kx - pad;
                        drow[ox] = (ix >= 0 && ix < W) ? srow[ix] : T(0);
                    }
                }
            }
        }
    }
}

// Scatter-add of col back into dx. Parallel over input channels: each channel
// slice of dx is written by exactly one task.
template <typename T>
void col2im_add(const T* col, i64 F, i64 C, i64 H, i64 W, i64 kh, i64 kw, i64 stride, i64 pad,
                Tensor<T>& dx, bool parallel = true) {
    const i64 OH = conv_out_dim(H, kh, stride, pad), OW = conv_out_dim(W, kw, stride, pad);
    const i64 ncol = F * OH * OW;
    T* dxp = dx.ptr();

    #pragma omp parallel for schedule(static) if (parallel && C > 1 && thread_cap() > 1)
    for (i64 c = 0; c < C; ++c) {
        for (i64 ky = 0; ky < kh; ++ky) {
            for (i64 kx = 0; kx < kw; ++kx) {
                const T* src = col + ((c * kh + ky) * kw + kx) * ncol;
                for (i64 f = 0; f < F; ++f) {
                    T* dst = dxp + (f * C + c) * H * W;
                    for (i64 oy = 0; oy < OH; ++oy) {
                        const i64 iy = oy * stride + ky - pad;
                        if (iy < 0 || iy >= H) continue;
                        const T* srow = src + (f * OH + oy) * OW;
                        T* drow = dst + iy * W;
                        for (i64 ox = 0; ox < OW; ++ox) {
                            const i64 ix = ox * stride + kx - pad;
                            if (ix >= 0 && ix < W) drow[ix] += srow[ox];
                        }
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// 2-D convolution, spatial, applied per frame.

template <typename T>
struct ConvScratch {
    std::vector<T> col;
    std::vector<T> tmp;
};

// y (F,Cout,OH,OW) = conv(x (F,Cin,H,W), w (Cout,Cin,kh,kw)) + b
template <typename T>
void conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, const T* bias, i64 stride, i64 pad,
                    Tensor<T>& y, ConvScratch<T>& s, bool parallel = true) {
    const i64 F = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
    const i64 Cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
    check_arg(w.dim(1) == Cin, "conv2d: channel mismatch");
    const i64 OH = conv_out_dim(H, kh, stride, pad), OW = conv_out_dim(W, kw, stride, pad);
    y.resize({F, Cout, OH, OW});

    const i64 KC = Cin * kh * kw;
    const i64 ncol = F * OH * OW;
    s.col.resize(static_cast<std::size_t>(KC * ncol));
    s.tmp.resize(static_cast<std::size_t>(Cout * ncol));

    im2col(x, kh, kw, stride, pad, s.col.data(), parallel);
    gemm<T>(Trans::N, Trans::N, Cout, ncol, KC, w.ptr(), KC, s.col.data(), ncol, s.tmp.data(),
            ncol, false, parallel);

    // (Cout, F*OH*OW) -> (F, Cout, OH, OW)
    T* yp = y.ptr();
    const i64 plane = OH * OW;
    #pragma omp parallel for schedule(static) if (parallel && Cout > 1 && thread_cap() > 1)
    for (i64 co = 0; co < Cout; ++co) {
        const T b = bias ? bias[co] : T(0);
        for (i64 f = 0; f < F; ++f) {
            const T* src = s.tmp.data() + co * ncol + f * plane;
            T* dst = yp + (f * Cout + co) * plane;
            for (i64 p = 0; p < plane; ++p) dst[p] = src[p] + b;
        }
    }
}

// Backward. Any of dx/dw/db may be null. dw/db are accumulated into;
// dx is overwritten.
template <typename T>
void conv2d_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy, i64 stride,
                     i64 pad, Tensor<T>* dx, Tensor<T>* dw, T* db, ConvScratch<T>& s,
                     bool parallel = true) {
    const i64 F = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
    const i64 Cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
    const i64 OH = dy.dim(2), OW = dy.dim(3);
    const i64 KC = Cin * kh * kw;
    const i64 ncol = F * OH * OW;
    const i64 plane = OH * OW;

    // gather dy into (Cout, F*OH*OW)
    s.tmp.resize(static_cast<std::size_t>(Cout * ncol));
    const T* dyp = dy.ptr();
    #pragma omp parallel for schedule(static) if (parallel && Cout > 1 && thread_cap() > 1)
    for (i64 co = 0; co < Cout; ++co) {
        for (i64 f = 0; f < F; ++f) {
            const T* src = dyp + (f * Cout + co) * plane;
            T* dst = s.tmp.data() + co * ncol + f * plane;
            std::memcpy(dst, src, sizeof(T) * static_cast<std::size_t>(plane));
        }
    }

    if (db) {
        for (i64 co = 0; co < Cout; ++co) {
            T acc = T(0);
            const T* row = s.tmp.data() + co * ncol;
            for (i64 p = 0; p < ncol; ++p) acc += row[p];
            db[co] += acc;
        }
    }

    if (dw) {
        s.col.resize(static_cast<std::size_t>(KC * ncol));
        im2col(x, kh, kw, stride, pad, s.col.data(), parallel);
        // dW (Cout x KC) += dtmp (Cout x ncol) * col^T
        gemm<T>(Trans::N, Trans::T, Cout, KC, ncol, s.tmp.data(), ncol, s.col.data(), ncol,
                dw->ptr(), KC, true, parallel);
    }

    if (dx) {
        std::vector<T> dcol(static_cast<std::size_t>(KC * ncol));
        // dcol (KC x ncol) = W^T (KC x Cout) * dtmp
        gemm<T>(Trans::T, Trans::N, KC, ncol, Cout, w.ptr(), KC, s.tmp.data(), ncol, dcol.data(),
                ncol, false, parallel);
        dx->resize({F, Cin, H, W});
        dx->zero();
        col2im_add(dcol.data(), F, Cin, H, W, kh, kw, stride, pad, *dx, parallel);
    }
}

// ---------------------------------------------------------------------------
// GroupNorm over (F, C, H, W): statistics per (frame, group).

template <typename T>
void groupnorm_forward(const Tensor<T>& x, i64 groups, const T* gamma, const T* beta, T eps,
                       Tensor<T>& y, Tensor<T>& mean, Tensor<T>& rstd, bool parallel = true) {
    const i64 F = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    check_arg(C % groups == 0, "groupnorm: C % groups != 0");
    const i64 cg = C / groups;
    const i64 m = cg * H * W;
    y.resize(x.shape);
    mean.resize({F, groups});
    rstd.resize({F, groups});
    const T* xp = x.ptr();
    T* yp = y.ptr();

    #pragma omp parallel for schedule(static) if (parallel && F * groups > 1 && thread_cap() > 1)
    for (i64 t = 0; t < F * groups; ++t) {
        const i64 f = t / groups, g = t % groups;
        const T* src = xp + (f * C + g * cg) * H * W;
        T mu = T(0);
        for (i64 i = 0; i < m; ++i) mu += src[i];
        mu /= static_cast<T>(m);
        T var = T(0);
        for (i64 i = 0; i < m; ++i) {
            const T d = src[i] - mu;
            var += d * d;
        }
        var /= static_cast<T>(m);
        const T rs = T(1) / std::sqrt(var + eps);
        mean.ptr()[t] = mu;
        rstd.ptr()[t] = rs;
        T* dst = yp + (f * C + g * cg) * H * W;
        for (i64 c = 0; c < cg; ++c) {
            const T ga = gamma ? gamma[g * cg + c] : T(1);
            const T be = beta ? beta[g * cg + c] : T(0);
            const T* sc = src + c * H * W;
            T* dc = dst + c * H * W;
            for (i64 i = 0; i < H * W; ++i) dc[i] = (sc[i] - mu) * rs * ga + be;
        }
    }
}

template <typename T>
void groupnorm_backward(const Tensor<T>& x, i64 groups, const T* gamma, const Tensor<T>& mean,
                        const Tensor<T>& rstd, const Tensor<T>& dy, Tensor<T>& dx, T* dgamma,
                        T* dbeta, bool parallel = true) {
    const i64 F = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const i64 cg = C / groups;
    const i64 m = cg * H * W;
    dx.resize(x.shape);
    const T* xp = x.ptr();
    const T* dyp = dy.ptr();
    T* dxp = dx.ptr();

    #pragma omp parallel for schedule(static) if (parallel && F * groups > 1 && thread_cap() > 1)
    for (i64 t = 0; t < F * groups; ++t) {
        const i64 f = t / groups, g = t % groups;
        const T mu = mean.ptr()[t];
        const T rs = rstd.ptr()[t];
        const T* src = xp + (f * C + g * cg) * H * W;
        const T* dsrc = dyp + (f * C + g * cg) * H * W;
        T* ddst = dxp + (f * C + g * cg) * H * W;

        // s1 = mean(dy*gamma), s2 = mean(dy*gamma*xhat)
        T s1 = T(0), s2 = T(0);
        for (i64 c = 0; c < cg; ++c) {
            const T ga = gamma ? gamma[g * cg + c] : T(1);
            const T* sc = src + c * H * W;
            const T* dc = dsrc + c * H * W;
            for (i64 i = 0; i < H * W; ++i) {
                const T xh = (sc[i] - mu) * rs;
                const T dg = dc[i] * ga;
                s1 += dg;
                s2 += dg * xh;
            }
        }
        s1 /= static_cast<T>(m);
        s2 /= static_cast<T>(m);
        for (i64 c = 0; c < cg; ++c) {
            const T ga = gamma ? gamma[g * cg + c] : T(1);
            const T* sc = src + c * H * W;
            const T* dc = dsrc + c * H * W;
            T* dd = ddst + c * H * W;
            for (i64 i = 0; i < H * W; ++i) {
                const T xh = (sc[i] - mu) * rs;
                dd[i] = rs * (dc[i] * ga - s1 - xh * s2);
            }
        }
    }

    if (dgamma || dbeta) {
        #pragma omp parallel for schedule(static) if (parallel && C > 1 && thread_cap() > 1)
        for (i64 c = 0; c < C; ++c) {
            const i64 g = c / cg;
            T dga = T(0), dbe = T(0);
            for (i64 f = 0; f < F; ++f) {
                const T mu = mean.ptr()[f * groups + g];
                const T rs = rstd.ptr()[f * groups + g];
                const T* sc = xp + (f * C + c) * H * W;
                const T* dc = dyp + (f * C + c) * H * W;
                for (i64 i = 0; i < H * W; ++i) {
                    dga += dc[i] * (sc[i] - mu) * rs;
                    dbe += dc[i];
                }
            }
            if (dgamma) dgamma[c] += dga;
            if (dbeta) dbeta[c] += dbe;
        }
    }
}

// ---------------------------------------------------------------------------
// SiLU x * sigmoid(x), elementwise.

template <typename T>
inline T sigmoid(T v) {
    return T(1) / (T(1) + std::exp(-v));
}

template <typename T>
void silu_forward(const T* x, T* y, i64 n, bool parallel = true) {
    #pragma omp parallel for schedule(static) if (parallel && n > 4096 && thread_cap() > 1)
    for (i64 i = 0; i < n; ++i) y[i] = x[i] * sigmoid(x[i]);
}

template <typename T>
void silu_backward(const T* x, const T* dy, T* dx, i64 n, bool parallel = true) {
    #pragma omp parallel for schedule(static) if (parallel && n > 4096 && thread_cap() > 1)
    for (i64 i = 0; i < n; ++i) {
        const T s = sigmoid(x[i]);
        dx[i] = dy[i] * s * (T(1) + x[i] * (T(1) - s));
    }
}

// ---------------------------------------------------------------------------
// Elementwise helpers.

template <typename T>
void axpy(i64 n, T a, const T* x, T* y, bool parallel = true) {
    #pragma omp parallel for schedule(static) if (parallel && n > 8192 && thread_cap() > 1)
    for (i64 i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename T>
T dot(i64 n, const T* a, const T* b) {  // serial: deterministic reduction
    T acc = T(0);
    for (i64 i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <typename T>
T sum_sq(i64 n, const T* a) {
    T acc = T(0);
    for (i64 i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

}  // namespace trw
