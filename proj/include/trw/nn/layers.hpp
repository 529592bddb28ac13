#pragma once

#include <cmath>
#include <string>

#include "trw/kernels.hpp"
#include "trw/nn/params.hpp"
#include "trw/tensor.hpp"

// Layer modules over (F, C, H, W) activations. Each layer owns its forward
// cache; backward() consumes the gradient of its output, accumulates into
// parameter grads (trainable parameters only) and optionally produces the
// input gradient. Batch items are processed sequentially; parallelism lives
// inside the kernels.

namespace trw {

template <typename T>
struct Conv2dLayer {
    Parameter<T>* w = nullptr;
    Parameter<T>* b = nullptr;
    i64 stride = 1, pad = 1;
    Tensor<T> x_cache;
    ConvScratch<T> scratch;

    Conv2dLayer() = default;
    Conv2dLayer(ParameterStore<T>& store, const std::string& name, i64 cin, i64 cout, i64 k,
                i64 stride_, i64 pad_, RandomEngine& rng, bool zero_init = false)
        : stride(stride_), pad(pad_) {
        const auto init =
            zero_init ? init_zero<T>() : init_he<T>(cin * k * k);
        w = store.get_or_create(name + ".w", {cout, cin, k, k}, rng, init);
        b = store.get_or_create(name + ".b", {cout}, rng, init_zero<T>());
    }

    void forward(const Tensor<T>& x, Tensor<T>& y) {
        if (w->trainable) {
            x_cache = x;
        } else {
            x_cache.shape = x.shape;  // dims are needed for dx even when frozen
            x_cache.data.clear();
        }
        conv2d_forward(x, w->value, b->value.ptr(), stride, pad, y, scratch);
    }

    void backward(const Tensor<T>& dy, Tensor<T>* dx) {
        if (w->trainable) {
            conv2d_backward(x_cache, w->value, dy, stride, pad, dx, &w->grad, b->grad.ptr(),
                            scratch);
        } else {
            conv2d_backward(x_cache, w->value, dy, stride, pad, dx, nullptr, nullptr, scratch);
        }
    }
};

template <typename T>
struct LinearLayer {
    Parameter<T>* w = nullptr;  // (out, in)
    Parameter<T>* b = nullptr;
    Tensor<T> x_cache;          // (rows, in)

    LinearLayer() = default;
    LinearLayer(ParameterStore<T>& store, const std::string& name, i64 in, i64 out,
                RandomEngine& rng, bool zero_init = false) {
        const auto init = zero_init ? init_zero<T>() : init_he<T>(in);
        w = store.get_or_create(name + ".w", {out, in}, rng, init);
        b = store.get_or_create(name + ".b", {out}, rng, init_zero<T>());
    }

    void forward(const Tensor<T>& x, Tensor<T>& y) {
        const i64 rows = x.dim(0), in = x.dim(1), out = w->value.dim(0);
        if (w->trainable) x_cache = x;
        y.resize({rows, out});
        // y = x * W^T
        gemm<T>(Trans::N, Trans::T, rows, out, in, x.ptr(), in, w->value.ptr(), in, y.ptr(), out);
        for (i64 r = 0; r < rows; ++r)
            for (i64 o = 0; o < out; ++o) y.ptr()[r * out + o] += b->value.ptr()[o];
    }

    void backward(const Tensor<T>& dy, Tensor<T>* dx) {
        const i64 out = w->value.dim(0), in = w->value.dim(1);
        const i64 rows = dy.dim(0);
        if (w->trainable) {
            // dW += dy^T * x
            gemm<T>(Trans::T, Trans::N, out, in, rows, dy.ptr(), out, x_cache.ptr(), in,
                    w->grad.ptr(), in, true);
            for (i64 r = 0; r < rows; ++r)
                for (i64 o = 0; o < out; ++o) b->grad.ptr()[o] += dy.ptr()[r * out + o];
        }
        if (dx) {
            dx->resize({rows, in});
            gemm<T>(Trans::N, Trans::N, rows, in, out, dy.ptr(), out, w->value.ptr(), in,
                    dx->ptr(), in);
        }
    }
};

template <typename T>
struct GroupNormLayer {
    Parameter<T>* gamma = nullptr;
    Parameter<T>* beta = nullptr;
    i64 groups = 8;
    Tensor<T> x_cache, mean, rstd;

    GroupNormLayer() = default;
    GroupNormLayer(ParameterStore<T>& store, const std::string& name, i64 channels, i64 groups_,
                   RandomEngine& rng)
        : groups(groups_) {
        gamma = store.get_or_create(name + ".g", {channels}, rng,
                                    [](Tensor<T>& t, RandomEngine&) { t.fill(T(1)); });
        beta = store.get_or_create(name + ".b", {channels}, rng, init_zero<T>());
    }

    void forward(const Tensor<T>& x, Tensor<T>& y) {
        x_cache = x;
        groupnorm_forward(x, groups, gamma->value.ptr(), beta->value.ptr(), T(1e-5), y, mean,
                          rstd);
    }

    void backward(const Tensor<T>& dy, Tensor<T>* dx) {
        Tensor<T> dx_local;
        Tensor<T>* target = dx ? dx : &dx_local;
        groupnorm_backward(x_cache, groups, gamma->value.ptr(), mean, rstd, dy, *target,
                           gamma->trainable ? gamma->grad.ptr() : nullptr,
                           gamma->trainable ? beta->grad.ptr() : nullptr);
    }
};

template <typename T>
struct SiLULayer {
    Tensor<T> x_cache;

    void forward(const Tensor<T>& x, Tensor<T>& y) {
        x_cache = x;
        y.resize(x.shape);
        silu_forward(x.ptr(), y.ptr(), x.numel());
    }

    void backward(const Tensor<T>& dy, Tensor<T>* dx) {
        if (!dx) return;
        dx->resize(x_cache.shape);
        silu_backward(x_cache.ptr(), dy.ptr(), dx->ptr(), x_cache.numel());
    }
};

// Per-channel scale/shift from a conditioning vector: y = x*(1+s[c]) + t[c],
// with (s, t) produced by a linear layer over the embedding. The same
// modulation is applied to every frame.
template <typename T>
struct FiLMLayer {
    LinearLayer<T> proj;  // temb_dim -> 2*C
    Tensor<T> x_cache, st_cache;

    FiLMLayer() = default;
    FiLMLayer(ParameterStore<T>& store, const std::string& name, i64 temb_dim, i64 channels,
              RandomEngine& rng)
        : proj(store, name + ".proj", temb_dim, 2 * channels, rng, /*zero_init=*/true) {}

    void forward(const Tensor<T>& x, const Tensor<T>& temb_act, Tensor<T>& y) {
        const i64 F = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
        proj.forward(temb_act, st_cache);  // (1, 2C)
        x_cache = x;
        y.resize(x.shape);
        const T* s = st_cache.ptr();
        const T* t = st_cache.ptr() + C;
        for (i64 f = 0; f < F; ++f)
            for (i64 c = 0; c < C; ++c) {
                const T* xp = x.ptr() + (f * C + c) * HW;
                T* yp = y.ptr() + (f * C + c) * HW;
                const T sc = T(1) + s[c], sh = t[c];
                for (i64 i = 0; i < HW; ++i) yp[i] = xp[i] * sc + sh;
            }
    }

    void backward(const Tensor<T>& dy, Tensor<T>* dx, Tensor<T>* dtemb_act) {
        const i64 F = x_cache.dim(0), C = x_cache.dim(1);
        const i64 HW = x_cache.dim(2) * x_cache.dim(3);
        Tensor<T> dst({1, 2 * C});
        const T* s = st_cache.ptr();
        for (i64 c = 0; c < C; ++c) {
            T ds = T(0), dt = T(0);
            for (i64 f = 0; f < F; ++f) {
                const T* dyp = dy.ptr() + (f * C + c) * HW;
                const T* xp = x_cache.ptr() + (f * C + c) * HW;
                for (i64 i = 0; i < HW; ++i) {
                    ds += dyp[i] * xp[i];
                    dt += dyp[i];
                }
            }
            dst.ptr()[c] = ds;
            dst.ptr()[C + c] = dt;
        }
        if (dx) {
            dx->resize(x_cache.shape);
            for (i64 f = 0; f < F; ++f)
                for (i64 c = 0; c < C; ++c) {
                    const T* dyp = dy.ptr() + (f * C + c) * HW;
                    T* dxp = dx->ptr() + (f * C + c) * HW;
                    const T sc = T(1) + s[c];
                    for (i64 i = 0; i < HW; ++i) dxp[i] = dyp[i] * sc;
                }
        }
        proj.backward(dst, dtemb_act);
    }
};

// 1-D convolution over the frame axis (kernel 3, zero padded) with full
// channel mixing; applied at every spatial position.
template <typename T>
struct TemporalConvLayer {
    Parameter<T>* w = nullptr;  // (C, C, 3)
    Parameter<T>* b = nullptr;
    Tensor<T> x_cache;

    TemporalConvLayer() = default;
    TemporalConvLayer(ParameterStore<T>& store, const std::string& name, i64 channels,
                      RandomEngine& rng) {
        w = store.get_or_create(name + ".w", {channels, channels, 3}, rng,
                                init_he<T>(channels * 3));
        b = store.get_or_create(name + ".b", {channels}, rng, init_zero<T>());
    }

    void forward(const Tensor<T>& x, Tensor<T>& y) {
        const i64 F = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
        if (w->trainable) {
            x_cache = x;
        } else {
            x_cache.shape = x.shape;
            x_cache.data.clear();
        }
        y.resize(x.shape);
        const i64 n = y.numel();
        T* yp = y.ptr();
        const T* bp = b->value.ptr();
        #pragma omp parallel for schedule(static) if (n > 16384 && thread_cap() > 1)
        for (i64 f = 0; f < F; ++f) {
            T* yf = yp + f * C * HW;
            for (i64 c = 0; c < C; ++c)
                for (i64 i = 0; i < HW; ++i) yf[c * HW + i] = bp[c];
            for (int dk = 0; dk < 3; ++dk) {
                const i64 fs = f + dk - 1;
                if (fs < 0 || fs >= F) continue;
                // y[f] += W[:,:,dk] * x[fs], both (C, HW)
                gemm_weight_slice(dk, x.ptr() + fs * C * HW, yf, C, HW);
            }
        }
    }

    void backward(const Tensor<T>& dy, Tensor<T>* dx) {
        const i64 F = x_cache.dim(0), C = x_cache.dim(1);
        const i64 HW = x_cache.dim(2) * x_cache.dim(3);
        if (w->trainable) {
            // dW[:,:,dk] += sum_f dy[f] * x[f+dk-1]^T ; db += sum dy
            for (int dk = 0; dk < 3; ++dk) {
                T* dwp = w->grad.ptr();
                for (i64 f = 0; f < F; ++f) {
                    const i64 fs = f + dk - 1;
                    if (fs < 0 || fs >= F) continue;
                    dw_slice_accumulate(dk, dy.ptr() + f * C * HW,
                                        x_cache.ptr() + fs * C * HW, dwp, C, HW);
                }
            }
            T* dbp = b->grad.ptr();
            for (i64 f = 0; f < F; ++f)
                for (i64 c = 0; c < C; ++c) {
                    T acc = T(0);
                    const T* row = dy.ptr() + (f * C + c) * HW;
                    for (i64 i = 0; i < HW; ++i) acc += row[i];
                    dbp[c] += acc;
                }
        }
        if (dx) {
            dx->resize(x_cache.shape);
            dx->zero();
            T* dxp = dx->ptr();
            #pragma omp parallel for schedule(static) if (dx->numel() > 16384 && thread_cap() > 1)
            for (i64 g = 0; g < F; ++g) {
                T* dxg = dxp + g * C * HW;
                for (int dk = 0; dk < 3; ++dk) {
                    const i64 f = g - dk + 1;  // y-frame this x-frame fed through slice dk
                    if (f < 0 || f >= F) continue;
                    // dx[g] += W[:,:,dk]^T * dy[f]
                    dx_slice_accumulate(dk, dy.ptr() + f * C * HW, dxg, C, HW);
                }
            }
        }
    }

private:
    // y (C,HW) += W[:,:,dk] (C,C) * x (C,HW); weight slice is strided (stride 3).
    void gemm_weight_slice(int dk, const T* x, T* y, i64 C, i64 HW) {
        pack_slice(dk);
        gemm<T>(Trans::N, Trans::N, C, HW, C, packed_.data(), C, x, HW, y, HW, true, false);
    }
    void dx_slice_accumulate(int dk, const T* dy, T* dx, i64 C, i64 HW) {
        pack_slice(dk);
        gemm<T>(Trans::T, Trans::N, C, HW, C, packed_.data(), C, dy, HW, dx, HW, true, false);
    }
    void dw_slice_accumulate(int dk, const T* dy, const T* x, T* dw, i64 C, i64 HW) {
        // dW_slice (C,C) += dy (C,HW) * x^T; accumulate into strided slice
        slice_grad_.resize(static_cast<std::size_t>(C * C));
        std::fill(slice_grad_.begin(), slice_grad_.end(), T(0));
        gemm<T>(Trans::N, Trans::T, C, C, HW, dy, HW, x, HW, slice_grad_.data(), C, true);
        for (i64 co = 0; co < C; ++co)
            for (i64 ci = 0; ci < C; ++ci)
                dw[(co * C + ci) * 3 + dk] += slice_grad_[static_cast<std::size_t>(co * C + ci)];
    }
    void pack_slice(int dk) {
        const i64 C = w->value.dim(0);
        packed_.resize(static_cast<std::size_t>(C * C));
        const T* wp = w->value.ptr();
        for (i64 co = 0; co < C; ++co)
            for (i64 ci = 0; ci < C; ++ci)
                packed_[static_cast<std::size_t>(co * C + ci)] = wp[(co * C + ci) * 3 + dk];
    }
    std::vector<T> packed_;
    std::vector<T> slice_grad_;
};

// Spatial self-attention within each frame (multi-head, residual handled by
// the caller). Token count is H*W; intended for the lowest resolution.
template <typename T>
struct AttentionLayer {
    Conv2dLayer<T> qkv;   // 1x1, C -> 3C
    Conv2dLayer<T> proj;  // 1x1, C -> C, zero-init
    int heads = 4;
    Tensor<T> qkv_cache;   // (F, 3C, H, W)
    Tensor<T> probs_cache; // (F*heads, T, T)

    AttentionLayer() = default;
    AttentionLayer(ParameterStore<T>& store, const std::string& name, i64 channels, int heads_,
                   RandomEngine& rng)
        : qkv(store, name + ".qkv", channels, 3 * channels, 1, 1, 0, rng),
          proj(store, name + ".proj", channels, channels, 1, 1, 0, rng, /*zero_init=*/true),
          heads(heads_) {
        check_arg(channels % heads_ == 0, "attention: channels % heads != 0");
    }

    void forward(const Tensor<T>& x, Tensor<T>& y) {
        const i64 F = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
        const i64 tok = H * W, dh = C / heads;
        const T scale = T(1) / std::sqrt(static_cast<T>(dh));
        qkv.forward(x, qkv_cache);
        Tensor<T> attn_out({F, C, H, W});
        probs_cache.resize({F * heads, tok, tok});

        const i64 tasks = F * heads;
        #pragma omp parallel for schedule(static) if (tasks > 1 && thread_cap() > 1)
        for (i64 t = 0; t < tasks; ++t) {
            const i64 f = t / heads, h = t % heads;
            const T* q = qkv_cache.ptr() + (f * 3 * C + h * dh) * tok;
            const T* k = qkv_cache.ptr() + (f * 3 * C + C + h * dh) * tok;
            const T* v = qkv_cache.ptr() + (f * 3 * C + 2 * C + h * dh) * tok;
            T* P = probs_cache.ptr() + t * tok * tok;
            // scores + softmax rows
            for (i64 i = 0; i < tok; ++i) {
                T* row = P + i * tok;
                T maxv = -std::numeric_limits<T>::infinity();
                for (i64 j = 0; j < tok; ++j) {
                    T s = T(0);
                    for (i64 d = 0; d < dh; ++d) s += q[d * tok + i] * k[d * tok + j];
                    s *= scale;
                    row[j] = s;
                    maxv = std::max(maxv, s);
                }
                T sum = T(0);
                for (i64 j = 0; j < tok; ++j) {
                    row[j] = std::exp(row[j] - maxv);
                    sum += row[j];
                }
                const T inv = T(1) / sum;
                for (i64 j = 0; j < tok; ++j) row[j] *= inv;
            }
            // out[:, i] = sum_j P[i,j] v[:, j]
            T* o = attn_out.ptr() + (f * C + h * dh) * tok;
            for (i64 d = 0; d < dh; ++d)
                for (i64 i = 0; i < tok; ++i) {
                    T acc = T(0);
                    for (i64 j = 0; j < tok; ++j) acc += P[i * tok + j] * v[d * tok + j];
                    o[d * tok + i] = acc;
                }
        }
        proj.forward(attn_out, y);
    }

    void backward(const Tensor<T>& dy, Tensor<T>* dx) {
        const i64 F = qkv_cache.dim(0), C3 = qkv_cache.dim(1);
        const i64 C = C3 / 3, H = qkv_cache.dim(2), W = qkv_cache.dim(3);
        const i64 tok = H * W, dh = C / heads;
        const T scale = T(1) / std::sqrt(static_cast<T>(dh));

        Tensor<T> d_attn;
        proj.backward(dy, &d_attn);

        Tensor<T> dqkv({F, 3 * C, H, W});
        dqkv.zero();
        const i64 tasks = F * heads;
        #pragma omp parallel for schedule(static) if (tasks > 1 && thread_cap() > 1)
        for (i64 t = 0; t < tasks; ++t) {
            const i64 f = t / heads, h = t % heads;
            const T* q = qkv_cache.ptr() + (f * 3 * C + h * dh) * tok;
            const T* k = qkv_cache.ptr() + (f * 3 * C + C + h * dh) * tok;
            const T* v = qkv_cache.ptr() + (f * 3 * C + 2 * C + h * dh) * tok;
            const T* P = probs_cache.ptr() + t * tok * tok;
            const T* dO = d_attn.ptr() + (f * C + h * dh) * tok;
            T* dq = dqkv.ptr() + (f * 3 * C + h * dh) * tok;
            T* dk = dqkv.ptr() + (f * 3 * C + C + h * dh) * tok;
            T* dv = dqkv.ptr() + (f * 3 * C + 2 * C + h * dh) * tok;

            std::vector<T> dP(static_cast<std::size_t>(tok * tok));
            std::vector<T> dS(static_cast<std::size_t>(tok * tok));
            // dv[:, j] = sum_i dO[:, i] P[i, j]
            for (i64 d = 0; d < dh; ++d)
                for (i64 j = 0; j < tok; ++j) {
                    T acc = T(0);
                    for (i64 i = 0; i < tok; ++i) acc += dO[d * tok + i] * P[i * tok + j];
                    dv[d * tok + j] = acc;
                }
            // dP[i, j] = <dO[:, i], v[:, j]>
            for (i64 i = 0; i < tok; ++i)
                for (i64 j = 0; j < tok; ++j) {
                    T acc = T(0);
                    for (i64 d = 0; d < dh; ++d) acc += dO[d * tok + i] * v[d * tok + j];
                    dP[static_cast<std::size_t>(i * tok + j)] = acc;
                }
            // softmax backward per row
            for (i64 i = 0; i < tok; ++i) {
                T rowdot = T(0);
                for (i64 j = 0; j < tok; ++j)
                    rowdot += dP[static_cast<std::size_t>(i * tok + j)] * P[i * tok + j];
                for (i64 j = 0; j < tok; ++j)
                    dS[static_cast<std::size_t>(i * tok + j)] =
                        P[i * tok + j] * (dP[static_cast<std::size_t>(i * tok + j)] - rowdot);
            }
            // dq[:, i] = scale * sum_j dS[i,j] k[:, j]; dk[:, j] = scale * sum_i dS[i,j] q[:, i]
            for (i64 d = 0; d < dh; ++d)
                for (i64 i = 0; i < tok; ++i) {
                    T acc = T(0);
                    for (i64 j = 0; j < tok; ++j)
                        acc += dS[static_cast<std::size_t>(i * tok + j)] * k[d * tok + j];
                    dq[d * tok + i] = scale * acc;
                }
            for (i64 d = 0; d < dh; ++d)
                for (i64 j = 0; j < tok; ++j) {
                    T acc = T(0);
                    for (i64 i = 0; i < tok; ++i)
                        acc += dS[static_cast<std::size_t>(i * tok + j)] * q[d * tok + i];
                    dk[d * tok + j] = scale * acc;
                }
        }
        qkv.backward(dqkv, dx);
    }
};

// Nearest-neighbor 2x upsample.
template <typename T>
struct Upsample2x {
    std::vector<i64> in_shape;

    void forward(const Tensor<T>& x, Tensor<T>& y) {
        const i64 F = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
        in_shape = x.shape;
        y.resize({F, C, 2 * H, 2 * W});
        for (i64 fc = 0; fc < F * C; ++fc) {
            const T* src = x.ptr() + fc * H * W;
            T* dst = y.ptr() + fc * 4 * H * W;
            for (i64 yy = 0; yy < 2 * H; ++yy)
                for (i64 xx = 0; xx < 2 * W; ++xx)
                    dst[yy * 2 * W + xx] = src[(yy / 2) * W + xx / 2];
        }
    }

    void backward(const Tensor<T>& dy, Tensor<T>* dx) {
        if (!dx) return;
        const i64 F = in_shape[0], C = in_shape[1], H = in_shape[2], W = in_shape[3];
        dx->resize(in_shape);
        for (i64 fc = 0; fc < F * C; ++fc) {
            const T* src = dy.ptr() + fc * 4 * H * W;
            T* dst = dx->ptr() + fc * H * W;
            for (i64 yy = 0; yy < H; ++yy)
                for (i64 xx = 0; xx < W; ++xx) {
                    dst[yy * W + xx] = src[(2 * yy) * 2 * W + 2 * xx] +
                                       src[(2 * yy) * 2 * W + 2 * xx + 1] +
                                       src[(2 * yy + 1) * 2 * W + 2 * xx] +
                                       src[(2 * yy + 1) * 2 * W + 2 * xx + 1];
                }
        }
    }
};

// Channel concatenation of two (F, C, H, W) tensors.
template <typename T>
void concat_channels(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& out) {
    check_arg(a.dim(0) == b.dim(0) && a.dim(2) == b.dim(2) && a.dim(3) == b.dim(3),
              "concat_channels: shape mismatch");
    const i64 F = a.dim(0), Ca = a.dim(1), Cb = b.dim(1), HW = a.dim(2) * a.dim(3);
    out.resize({F, Ca + Cb, a.dim(2), a.dim(3)});
    for (i64 f = 0; f < F; ++f) {
        std::copy(a.ptr() + f * Ca * HW, a.ptr() + (f + 1) * Ca * HW,
                  out.ptr() + f * (Ca + Cb) * HW);
        std::copy(b.ptr() + f * Cb * HW, b.ptr() + (f + 1) * Cb * HW,
                  out.ptr() + (f * (Ca + Cb) + Ca) * HW);
    }
}

template <typename T>
void split_channels_grad(const Tensor<T>& dout, i64 Ca, Tensor<T>* da, Tensor<T>* db) {
    const i64 F = dout.dim(0), C = dout.dim(1), HW = dout.dim(2) * dout.dim(3);
    const i64 Cb = C - Ca;
    if (da) {
        da->resize({F, Ca, dout.dim(2), dout.dim(3)});
        for (i64 f = 0; f < F; ++f)
            std::copy(dout.ptr() + f * C * HW, dout.ptr() + (f * C + Ca) * HW,
                      da->ptr() + f * Ca * HW);
    }
    if (db) {
        db->resize({F, Cb, dout.dim(2), dout.dim(3)});
        for (i64 f = 0; f < F; ++f)
            std::copy(dout.ptr() + (f * C + Ca) * HW, dout.ptr() + (f + 1) * C * HW,
                      db->ptr() + f * Cb * HW);
    }
}

// Sinusoidal embedding of the diffusion time.
template <typename T>
Tensor<T> sinusoidal_embedding(double tau, i64 dim) {
    Tensor<T> out({1, dim});
    const i64 half = dim / 2;
    const double t = 1000.0 * tau;
    for (i64 i = 0; i < half; ++i) {
        const double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) /
                                     static_cast<double>(half));
        out.ptr()[i] = static_cast<T>(std::sin(t * freq));
        out.ptr()[half + i] = static_cast<T>(std::cos(t * freq));
    }
    return out;
}

}  // namespace trw
