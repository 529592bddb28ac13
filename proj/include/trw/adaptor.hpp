#pragma once

#include <string>
#include <vector>

#include "trw/backbone.hpp"
#include "trw/event.hpp"
#include "trw/latent_codec.hpp"
#include "trw/nn/layers.hpp"

namespace trw {

enum class InjectionMode { PerBlock, InputLatent };

inline const char* injection_mode_name(InjectionMode m) {
    return m == InjectionMode::PerBlock ? "per_block" : "input_latent";
}
inline InjectionMode injection_mode_from_name(const std::string& s) {
    if (s == "per_block") return InjectionMode::PerBlock;
    if (s == "input_latent") return InjectionMode::InputLatent;
    throw std::invalid_argument("unknown injection mode '" + s + "'");
}

// Trainable residual trunk: event images (space-to-depth aligned to the
// latent grid with the codec's layout) are concatenated with the noisy
// latent; each stage runs two convolutions with SiLU and a FiLM modulation
// from the diffusion-time embedding, taps a zero-initialized 1x1 projection
// as its residual head, and downsamples by 2 into the next stage.
struct AdaptorConfig {
    std::vector<int> widths = {64, 96, 128};  // one entry per backbone level
    InjectionMode mode = InjectionMode::PerBlock;
    bool zero_init = true;
    int temb_dim = 256;
    int event_channels = 48;  // 3*s*s after space-to-depth alignment

    void validate(const BackboneConfig& bb) const {
        if (mode == InjectionMode::PerBlock) {
            check_arg(static_cast<int>(widths.size()) == bb.num_levels,
                      "AdaptorConfig: widths must match backbone levels");
        } else {
            check_arg(!widths.empty(), "AdaptorConfig: need at least one stage width");
        }
        check_arg(temb_dim % 2 == 0, "AdaptorConfig: temb_dim must be even");
        check_arg(event_channels >= 3, "AdaptorConfig: bad event channel count");
    }
};

template <typename T>
struct AdaptorResiduals {
    InjectionMode mode = InjectionMode::PerBlock;
    std::vector<Tensor<T>> per_block;  // shapes = injection_shapes(backbone)
    Tensor<T> input_latent;            // shaped like z
};

// z_tilde = z + r (input_latent mode only).
template <typename T>
Tensor<T> inject_input_latent(const Tensor<T>& z, const AdaptorResiduals<T>& r) {
    check_arg(r.mode == InjectionMode::InputLatent, "inject: residuals are not input_latent");
    check_arg(r.input_latent.shape == z.shape, "inject: residual/latent shape mismatch");
    Tensor<T> out = z;
    axpy(out.numel(), T(1), r.input_latent.ptr(), out.ptr());
    return out;
}

// Event video -> (F, 3*s*s, h, w), matching the latent codec's
// space-to-depth channel layout. s is inferred from the event image size.
template <typename T>
Tensor<T> event_video_to_latent(const EventVideo& e, i64 frames, i64 latent_h, i64 latent_w) {
    check_arg(static_cast<i64>(e.frames.size()) == frames,
              "event video frame count does not match latent frames");
    check_arg(!e.frames.empty(), "empty event video");
    const i64 H = e.frames[0].data.dim(1), W = e.frames[0].data.dim(2);
    check_arg(H % latent_h == 0 && W % latent_w == 0,
              "event image size not divisible by latent size");
    const i64 s = H / latent_h;
    check_arg(W / latent_w == s, "event image aspect does not match latent grid");
    Tensor<T> out({frames, 3 * s * s, latent_h, latent_w});
    for (i64 f = 0; f < frames; ++f) {
        check_arg(e.frames[static_cast<std::size_t>(f)].data.dim(1) == H &&
                      e.frames[static_cast<std::size_t>(f)].data.dim(2) == W,
                  "event video frames differ in size");
        Tensor<T> img = e.frames[static_cast<std::size_t>(f)].data.template cast<T>();
        Tensor<T> aligned = space_to_depth(img, static_cast<int>(s));
        std::copy(aligned.data.begin(), aligned.data.end(), out.ptr() + f * aligned.numel());
    }
    return out;
}

template <typename T>
class Adaptor {
public:
    Adaptor(const AdaptorConfig& cfg, const BackboneConfig& bb, ParameterStore<T>& store,
            RandomEngine& rng)
        : cfg_(cfg), bb_(bb) {
        cfg.validate(bb);
        const i64 D = cfg.temb_dim;
        temb_l1_ = LinearLayer<T>(store, "phi.temb.l1", D, D, rng);
        temb_l2_ = LinearLayer<T>(store, "phi.temb.l2", D, D, rng);

        inj_shapes_ = injection_shapes(bb);
        n_stages_ = cfg.mode == InjectionMode::PerBlock ? bb.num_levels : 1;

        i64 cin = cfg.event_channels + bb_.latent_channels;
        for (int n = 0; n < n_stages_; ++n) {
            const i64 w = cfg_.widths[static_cast<std::size_t>(n)];
            Stage st;
            const std::string base = "phi.stage" + std::to_string(n);
            st.conv_a = Conv2dLayer<T>(store, base + ".conv_a", cin, w, 3, 1, 1, rng);
            st.conv_b = Conv2dLayer<T>(store, base + ".conv_b", w, w, 3, 1, 1, rng);
            st.film = FiLMLayer<T>(store, base + ".film", cfg_.temb_dim, w, rng);
            const i64 head_ch = cfg_.mode == InjectionMode::PerBlock
                                    ? inj_shapes_[static_cast<std::size_t>(n)][0]
                                    : bb_.latent_channels;
            st.head = Conv2dLayer<T>(store, base + ".head", w, head_ch, 1, 1, 0, rng,
                                     /*zero_init=*/cfg_.zero_init);
            st.has_down = n + 1 < n_stages_;
            if (st.has_down) {
                const i64 wn = cfg_.widths[static_cast<std::size_t>(n + 1)];
                st.down = Conv2dLayer<T>(store, base + ".down", w, wn, 3, 2, 1, rng);
                cin = wn;
            }
            stages_.push_back(std::move(st));
        }
    }

    // g_phi(e, tau, z): deterministic residuals for the frozen denoiser.
    AdaptorResiduals<T> adapt(const EventVideo& e, double tau, const Tensor<T>& z) {
        Tensor<T> e_lat = event_video_to_latent<T>(e, bb_.frames, bb_.latent_h, bb_.latent_w);
        return adapt_prepared(e_lat, tau, z);
    }

    // Same, with the event video already space-to-depth aligned.
    AdaptorResiduals<T> adapt_prepared(const Tensor<T>& e_lat, double tau, const Tensor<T>& z) {
        check_arg(z.ndim() == 4 && z.dim(0) == bb_.frames && z.dim(1) == bb_.latent_channels,
                  "adapt: bad latent shape");
        check_arg(tau >= 0.0 && tau <= 1.0, "adapt: tau outside [0,1]");
        check_arg(e_lat.ndim() == 4 && e_lat.dim(0) == bb_.frames &&
                      e_lat.dim(2) == bb_.latent_h && e_lat.dim(3) == bb_.latent_w,
                  "adapt: bad aligned event shape");
        check_arg(e_lat.dim(1) == cfg_.event_channels,
                  "adapt: event channels do not match the configured alignment");

        Tensor<T> sin_emb = sinusoidal_embedding<T>(tau, cfg_.temb_dim);
        Tensor<T> t1, temb;
        temb_l1_.forward(sin_emb, t1);
        temb_silu1_.forward(t1, sin_emb);
        temb_l2_.forward(sin_emb, temb);
        temb_silu2_.forward(temb, temb_act_);

        AdaptorResiduals<T> out;
        out.mode = cfg_.mode;
        Tensor<T> h;
        concat_channels(e_lat, z, h);

        for (std::size_t n = 0; n < stages_.size(); ++n) {
            Stage& st = stages_[n];
            Tensor<T> a, b;
            st.conv_a.forward(h, a);
            st.silu_a.forward(a, b);
            st.conv_b.forward(b, a);
            st.silu_b.forward(a, b);
            st.film.forward(b, temb_act_, st.feat);
            Tensor<T> r;
            st.head.forward(st.feat, r);
            if (cfg_.mode == InjectionMode::PerBlock) {
                out.per_block.push_back(std::move(r));
            } else {
                out.input_latent = std::move(r);
            }
            if (st.has_down) st.down.forward(st.feat, h);
        }
        return out;
    }

    // Backward from residual gradients; accumulates phi grads.
    void backward(const AdaptorResiduals<T>& d_res) {
        Tensor<T> d_next;  // gradient flowing into stage n+1's input
        Tensor<T> dtemb_act({1, static_cast<i64>(cfg_.temb_dim)});
        for (std::size_t n = stages_.size(); n > 0; --n) {
            Stage& st = stages_[n - 1];
            Tensor<T> dfeat;
            if (st.has_down) {
                st.down.backward(d_next, &dfeat);
            } else {
                dfeat.resize(st.feat.shape);
            }
            {
                const Tensor<T>& dr = cfg_.mode == InjectionMode::PerBlock
                                          ? d_res.per_block[n - 1]
                                          : d_res.input_latent;
                Tensor<T> dhead;
                st.head.backward(dr, &dhead);
                axpy(dfeat.numel(), T(1), dhead.ptr(), dfeat.ptr());
            }
            Tensor<T> t1, t2, dtemb_piece;
            st.film.backward(dfeat, &t1, &dtemb_piece);
            axpy(dtemb_act.numel(), T(1), dtemb_piece.ptr(), dtemb_act.ptr());
            st.silu_b.backward(t1, &t2);
            st.conv_b.backward(t2, &t1);
            st.silu_a.backward(t1, &t2);
            st.conv_a.backward(t2, n > 1 ? &d_next : nullptr);
        }
        Tensor<T> dt1, dt2;
        temb_silu2_.backward(dtemb_act, &dt1);
        temb_l2_.backward(dt1, &dt2);
        temb_silu1_.backward(dt2, &dt1);
        temb_l1_.backward(dt1, nullptr);
    }

    const AdaptorConfig& config() const { return cfg_; }

private:
    struct Stage {
        Conv2dLayer<T> conv_a, conv_b;
        SiLULayer<T> silu_a, silu_b;
        FiLMLayer<T> film;
        Conv2dLayer<T> head;
        Conv2dLayer<T> down;
        bool has_down = false;
        Tensor<T> feat;
    };

    AdaptorConfig cfg_;
    BackboneConfig bb_;
    std::vector<std::array<i64, 3>> inj_shapes_;
    int n_stages_ = 0;
    LinearLayer<T> temb_l1_, temb_l2_;
    SiLULayer<T> temb_silu1_, temb_silu2_;
    Tensor<T> temb_act_;
    std::vector<Stage> stages_;
};

}  // namespace trw
