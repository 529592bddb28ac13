#pragma once

#include <array>
#include <vector>

#include "trw/nn/layers.hpp"

namespace trw {

// Frozen-prior image-conditioned video denoiser: a factorized spatiotemporal
// U-Net on latent videos (F, C_lat, H, W). The condition latent is
// channel-concatenated to every frame; the diffusion time enters through a
// sinusoidal embedding -> 2-layer MLP -> per-block FiLM. Adaptor residuals
// can be added to the input of every down block.
struct BackboneConfig {
    int num_levels = 3;  // N down blocks
    int base_width = 64;
    std::vector<int> mults = {1, 2, 4};
    int latent_channels = 48;
    int frames = 8;
    int latent_h = 16;
    int latent_w = 16;
    int temb_dim = 256;
    bool attention = true;  // spatial self-attention at the lowest resolution
    int attn_heads = 4;
    int groups = 8;

    void validate() const {
        check_arg(num_levels >= 1, "BackboneConfig: need at least one level");
        check_arg(static_cast<int>(mults.size()) == num_levels,
                  "BackboneConfig: len(mults) must equal num_levels");
        const int div = 1 << (num_levels - 1);
        check_arg(latent_h % div == 0 && latent_w % div == 0,
                  "BackboneConfig: spatial dims must divide 2^(N-1)");
        check_arg(temb_dim % 2 == 0, "BackboneConfig: temb_dim must be even");
    }

    int width(int level) const { return base_width * mults[static_cast<std::size_t>(level)]; }
};

// Input feature-map shape of each down block: block 0 sees the raw
// (z ++ condition) stack, block n>0 sees the downsampled output of block n-1.
inline std::vector<std::array<i64, 3>> injection_shapes(const BackboneConfig& cfg) {
    cfg.validate();
    std::vector<std::array<i64, 3>> out;
    out.push_back({2 * cfg.latent_channels, cfg.latent_h, cfg.latent_w});
    for (int n = 1; n < cfg.num_levels; ++n) {
        out.push_back({cfg.width(n - 1), cfg.latent_h >> n, cfg.latent_w >> n});
    }
    return out;
}

namespace detail_nn {

template <typename T>
struct ResBlock {
    GroupNormLayer<T> gn1, gn2;
    SiLULayer<T> silu1, silu2;
    Conv2dLayer<T> conv1, conv2;
    FiLMLayer<T> film;
    Conv2dLayer<T> skip;
    bool has_skip = false;

    ResBlock() = default;
    ResBlock(ParameterStore<T>& store, const std::string& name, i64 cin, i64 cout, i64 groups,
             i64 temb_dim, RandomEngine& rng)
        : gn1(store, name + ".gn1", cin, groups, rng),
          gn2(store, name + ".gn2", cout, groups, rng),
          conv1(store, name + ".conv1", cin, cout, 3, 1, 1, rng),
          conv2(store, name + ".conv2", cout, cout, 3, 1, 1, rng),
          film(store, name + ".film", temb_dim, cout, rng),
          has_skip(cin != cout) {
        if (has_skip) skip = Conv2dLayer<T>(store, name + ".skip", cin, cout, 1, 1, 0, rng);
    }

    void forward(const Tensor<T>& x, const Tensor<T>& temb_act, Tensor<T>& y) {
        Tensor<T> a, b;
        gn1.forward(x, a);
        silu1.forward(a, b);
        conv1.forward(b, a);
        gn2.forward(a, b);
        film.forward(b, temb_act, a);
        silu2.forward(a, b);
        conv2.forward(b, a);
        if (has_skip) {
            skip.forward(x, y);
        } else {
            y = x;
        }
        axpy(y.numel(), T(1), a.ptr(), y.ptr());
    }

    void backward(const Tensor<T>& dy, Tensor<T>* dx, Tensor<T>& dtemb_act_accum) {
        Tensor<T> t1, t2, dfilm_temb;
        conv2.backward(dy, &t1);
        silu2.backward(t1, &t2);
        film.backward(t2, &t1, &dfilm_temb);
        axpy(dtemb_act_accum.numel(), T(1), dfilm_temb.ptr(), dtemb_act_accum.ptr());
        gn2.backward(t1, &t2);
        conv1.backward(t2, &t1);
        silu1.backward(t1, &t2);
        gn1.backward(t2, dx);
        if (!dx) return;
        if (has_skip) {
            Tensor<T> ds;
            skip.backward(dy, &ds);
            axpy(dx->numel(), T(1), ds.ptr(), dx->ptr());
        } else {
            axpy(dx->numel(), T(1), dy.ptr(), dx->ptr());
        }
    }
};

template <typename T>
struct TemporalBlock {  // y = x + tconv(x)
    TemporalConvLayer<T> tc;

    TemporalBlock() = default;
    TemporalBlock(ParameterStore<T>& store, const std::string& name, i64 channels,
                  RandomEngine& rng)
        : tc(store, name, channels, rng) {}

    void forward(const Tensor<T>& x, Tensor<T>& y) {
        tc.forward(x, y);
        axpy(y.numel(), T(1), x.ptr(), y.ptr());
    }
    void backward(const Tensor<T>& dy, Tensor<T>* dx) {
        tc.backward(dy, dx);
        if (dx) axpy(dx->numel(), T(1), dy.ptr(), dx->ptr());
    }
};

}  // namespace detail_nn

template <typename T>
class Backbone {
public:
    Backbone(const BackboneConfig& cfg, ParameterStore<T>& store, RandomEngine& rng) : cfg_(cfg) {
        cfg_.validate();
        const i64 cin0 = 2 * cfg.latent_channels;
        const i64 D = cfg.temb_dim;
        temb_l1_ = LinearLayer<T>(store, "theta.temb.l1", D, D, rng);
        temb_l2_ = LinearLayer<T>(store, "theta.temb.l2", D, D, rng);

        i64 cin = cin0;
        for (int n = 0; n < cfg.num_levels; ++n) {
            const i64 w = cfg.width(n);
            Down d;
            d.res = detail_nn::ResBlock<T>(store, "theta.down" + std::to_string(n), cin, w,
                                           cfg.groups, D, rng);
            d.temporal =
                detail_nn::TemporalBlock<T>(store, "theta.down" + std::to_string(n) + ".t", w, rng);
            d.has_down = n + 1 < cfg.num_levels;
            if (d.has_down)
                d.down = Conv2dLayer<T>(store, "theta.down" + std::to_string(n) + ".ds", w, w, 3,
                                        2, 1, rng);
            downs_.push_back(std::move(d));
            cin = w;
        }

        const i64 wm = cfg.width(cfg.num_levels - 1);
        mid_res1_ = detail_nn::ResBlock<T>(store, "theta.mid.res1", wm, wm, cfg.groups, D, rng);
        if (cfg.attention) {
            mid_gn_ = GroupNormLayer<T>(store, "theta.mid.attn_gn", wm, cfg.groups, rng);
            mid_attn_ = AttentionLayer<T>(store, "theta.mid.attn", wm, cfg.attn_heads, rng);
        }
        mid_res2_ = detail_nn::ResBlock<T>(store, "theta.mid.res2", wm, wm, cfg.groups, D, rng);
        mid_temporal_ = detail_nn::TemporalBlock<T>(store, "theta.mid.t", wm, rng);

        for (int n = cfg.num_levels - 1; n >= 0; --n) {
            // incoming width equals the skip width at every level: the mid
            // block keeps width(N-1) and each up_conv steps down one level
            const i64 w = cfg.width(n);
            Up u;
            u.res = detail_nn::ResBlock<T>(store, "theta.up" + std::to_string(n), 2 * w, w,
                                           cfg.groups, D, rng);
            u.temporal =
                detail_nn::TemporalBlock<T>(store, "theta.up" + std::to_string(n) + ".t", w, rng);
            u.has_up = n > 0;
            if (u.has_up)
                u.up_conv = Conv2dLayer<T>(store, "theta.up" + std::to_string(n) + ".us", w,
                                           cfg.width(n - 1), 3, 1, 1, rng);
            ups_.push_back(std::move(u));
        }

        head_gn_ = GroupNormLayer<T>(store, "theta.head.gn", cfg.base_width, cfg.groups, rng);
        head_conv_ = Conv2dLayer<T>(store, "theta.head.conv", cfg.base_width,
                                    cfg.latent_channels, 3, 1, 1, rng, /*zero_init=*/true);
    }

    const BackboneConfig& config() const { return cfg_; }

    // z: (F, C_lat, h, w); c: (C_lat, h, w); residuals: optional per-block
    // additions matching injection_shapes.
    void denoise(const Tensor<T>& z, const Tensor<T>& c, double tau,
                 const std::vector<Tensor<T>>* residuals, Tensor<T>& v_out) {
        check_arg(z.ndim() == 4 && z.dim(0) == cfg_.frames && z.dim(1) == cfg_.latent_channels &&
                      z.dim(2) == cfg_.latent_h && z.dim(3) == cfg_.latent_w,
                  "denoise: bad z shape " + const_cast<Tensor<T>&>(z).shape_str());
        check_arg(c.ndim() == 3 && c.dim(0) == cfg_.latent_channels && c.dim(1) == cfg_.latent_h &&
                      c.dim(2) == cfg_.latent_w,
                  "denoise: bad condition shape");
        check_arg(tau >= 0.0 && tau <= 1.0, "denoise: tau outside [0,1]");
        if (residuals) {
            const auto shapes = injection_shapes(cfg_);
            check_arg(residuals->size() == shapes.size(), "denoise: wrong residual count");
            for (std::size_t n = 0; n < shapes.size(); ++n) {
                const Tensor<T>& r = (*residuals)[n];
                check_arg(r.ndim() == 4 && r.dim(0) == cfg_.frames && r.dim(1) == shapes[n][0] &&
                              r.dim(2) == shapes[n][1] && r.dim(3) == shapes[n][2],
                          "denoise: residual " + std::to_string(n) + " shape mismatch");
            }
        }

        // time embedding
        Tensor<T> sin_emb = sinusoidal_embedding<T>(tau, cfg_.temb_dim);
        Tensor<T> t1, temb;
        temb_l1_.forward(sin_emb, t1);
        temb_silu1_.forward(t1, sin_emb);
        temb_l2_.forward(sin_emb, temb);
        temb_silu2_.forward(temb, temb_act_);

        // condition broadcast + concat
        Tensor<T> cb({cfg_.frames, cfg_.latent_channels, cfg_.latent_h, cfg_.latent_w});
        const i64 plane = c.numel();
        for (i64 f = 0; f < cfg_.frames; ++f)
            std::copy(c.ptr(), c.ptr() + plane, cb.ptr() + f * plane);
        Tensor<T> h;
        concat_channels(z, cb, h);

        skips_.assign(static_cast<std::size_t>(cfg_.num_levels), Tensor<T>());
        for (int n = 0; n < cfg_.num_levels; ++n) {
            if (residuals) axpy(h.numel(), T(1), (*residuals)[static_cast<std::size_t>(n)].ptr(), h.ptr());
            Tensor<T> a;
            downs_[static_cast<std::size_t>(n)].res.forward(h, temb_act_, a);
            downs_[static_cast<std::size_t>(n)].temporal.forward(a, h);
            skips_[static_cast<std::size_t>(n)] = h;
            if (downs_[static_cast<std::size_t>(n)].has_down) {
                downs_[static_cast<std::size_t>(n)].down.forward(h, a);
                h = std::move(a);
            }
        }

        {
            Tensor<T> a;
            mid_res1_.forward(h, temb_act_, a);
            if (cfg_.attention) {
                Tensor<T> gn_out, attn_out;
                mid_gn_.forward(a, gn_out);
                mid_attn_.forward(gn_out, attn_out);
                axpy(a.numel(), T(1), attn_out.ptr(), a.ptr());
            }
            mid_res2_.forward(a, temb_act_, h);
            mid_temporal_.forward(h, a);
            h = std::move(a);
        }

        for (std::size_t ui = 0; ui < ups_.size(); ++ui) {
            const int n = cfg_.num_levels - 1 - static_cast<int>(ui);
            Tensor<T> cat, a;
            concat_channels(h, skips_[static_cast<std::size_t>(n)], cat);
            ups_[ui].cat_h_channels = h.dim(1);
            ups_[ui].res.forward(cat, temb_act_, a);
            ups_[ui].temporal.forward(a, h);
            if (ups_[ui].has_up) {
                ups_[ui].up.forward(h, a);
                Tensor<T> conv_out;
                ups_[ui].up_conv.forward(a, conv_out);
                h = std::move(conv_out);
            }
        }

        Tensor<T> g;
        head_gn_.forward(h, g);
        head_silu_.forward(g, h);
        head_conv_.forward(h, v_out);
    }

    // Backward from dv. If d_residuals is non-null it receives the gradient
    // at every down-block input (the injection points).
    void backward(const Tensor<T>& dv, std::vector<Tensor<T>>* d_residuals) {
        Tensor<T> dh, a;
        head_conv_.backward(dv, &a);
        head_silu_.backward(a, &dh);
        head_gn_.backward(dh, &a);
        dh = std::move(a);

        std::vector<Tensor<T>> dskips(static_cast<std::size_t>(cfg_.num_levels));
        Tensor<T> dtemb_act({1, static_cast<i64>(cfg_.temb_dim)});

        // reverse of the forward up path (last executed first)
        for (std::size_t ui = ups_.size(); ui > 0; --ui) {
            Up& u = ups_[ui - 1];
            if (u.has_up) {
                u.up_conv.backward(dh, &a);
                u.up.backward(a, &dh);
            }
            u.temporal.backward(dh, &a);
            Tensor<T> dcat;
            u.res.backward(a, &dcat, dtemb_act);
            const int n = cfg_.num_levels - static_cast<int>(ui);
            // dcat splits into the incoming path and the skip
            Tensor<T> dskip;
            split_channels_grad(dcat, u.cat_h_channels, &dh, &dskip);
            dskips[static_cast<std::size_t>(n)] = std::move(dskip);
        }

        {
            mid_temporal_.backward(dh, &a);
            Tensor<T> d1;
            mid_res2_.backward(a, &d1, dtemb_act);
            if (cfg_.attention) {
                Tensor<T> d_gn_out, d_gn_in;
                mid_attn_.backward(d1, &d_gn_out);
                mid_gn_.backward(d_gn_out, &d_gn_in);
                axpy(d1.numel(), T(1), d_gn_in.ptr(), d1.ptr());
            }
            mid_res1_.backward(d1, &dh, dtemb_act);
        }

        if (d_residuals) d_residuals->assign(static_cast<std::size_t>(cfg_.num_levels), Tensor<T>());
        for (int n = cfg_.num_levels - 1; n >= 0; --n) {
            Down& d = downs_[static_cast<std::size_t>(n)];
            if (d.has_down) {
                d.down.backward(dh, &a);
                dh = std::move(a);
            }
            axpy(dh.numel(), T(1), dskips[static_cast<std::size_t>(n)].ptr(), dh.ptr());
            d.temporal.backward(dh, &a);
            d.res.backward(a, &dh, dtemb_act);
            if (d_residuals) (*d_residuals)[static_cast<std::size_t>(n)] = dh;
        }

        // time-embedding MLP
        Tensor<T> dt1, dt2;
        temb_silu2_.backward(dtemb_act, &dt1);
        temb_l2_.backward(dt1, &dt2);
        temb_silu1_.backward(dt2, &dt1);
        temb_l1_.backward(dt1, nullptr);
    }

private:
    struct Down {
        detail_nn::ResBlock<T> res;
        detail_nn::TemporalBlock<T> temporal;
        Conv2dLayer<T> down;
        bool has_down = false;
    };
    struct Up {
        detail_nn::ResBlock<T> res;
        detail_nn::TemporalBlock<T> temporal;
        Upsample2x<T> up;
        Conv2dLayer<T> up_conv;
        bool has_up = false;
        i64 cat_h_channels = 0;
    };

    BackboneConfig cfg_;
    LinearLayer<T> temb_l1_, temb_l2_;
    SiLULayer<T> temb_silu1_, temb_silu2_;
    Tensor<T> temb_act_;
    std::vector<Down> downs_;
    detail_nn::ResBlock<T> mid_res1_, mid_res2_;
    GroupNormLayer<T> mid_gn_;
    AttentionLayer<T> mid_attn_;
    detail_nn::TemporalBlock<T> mid_temporal_;
    std::vector<Up> ups_;
    GroupNormLayer<T> head_gn_;
    SiLULayer<T> head_silu_;
    Conv2dLayer<T> head_conv_;
    std::vector<Tensor<T>> skips_;
};

}  // namespace trw
