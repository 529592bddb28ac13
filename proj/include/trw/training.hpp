#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "trw/adaptor.hpp"
#include "trw/backbone.hpp"
#include "trw/dataset.hpp"
#include "trw/diffusion.hpp"
#include "trw/latent_codec.hpp"

namespace trw {

struct TrainConfig {
    i64 iterations = 20000;  // desk scale; the reference protocol runs 100k at lr 1e-5
    double lr = 1e-4;
    int batch = 4;
    u64 seed = 0;
    i64 val_period = 1000;
    i64 ckpt_period = 5000;
    double grad_clip = 1.0;

    void validate() const {
        check_arg(iterations > 0, "TrainConfig: iterations must be > 0");
        check_arg(lr >= 0.0, "TrainConfig: negative learning rate");
        check_arg(batch >= 1, "TrainConfig: batch must be >= 1");
    }
};

// Raised when the loss goes non-finite; carries the diagnostic the CLI
// reports before exiting with the numeric-failure code.
struct NumericFailure : std::runtime_error {
    i64 step;
    i64 sample;
    double tau;
    NumericFailure(i64 step_, i64 sample_, double tau_)
        : std::runtime_error("non-finite loss at step " + std::to_string(step_) + ", sample " +
                             std::to_string(sample_) + ", tau " + std::to_string(tau_)),
          step(step_),
          sample(sample_),
          tau(tau_) {}
};

template <typename T>
class Adam {
public:
    Adam(ParameterStore<T>& store, double lr, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8)
        : store_(store), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
        for (const auto& p : store.all()) {
            if (!p->trainable) continue;
            targets_.push_back(p.get());
            m_.emplace_back(p->value.shape);
            v_.emplace_back(p->value.shape);
        }
    }

    // Global-norm clipping over the trainable gradients. Returns the norm.
    double clip(double max_norm) {
        double ss = 0.0;
        for (Parameter<T>* p : targets_) ss += static_cast<double>(sum_sq(p->grad.numel(), p->grad.ptr()));
        const double norm = std::sqrt(ss);
        if (max_norm > 0.0 && norm > max_norm) {
            const T scale = static_cast<T>(max_norm / norm);
            for (Parameter<T>* p : targets_)
                for (i64 i = 0; i < p->grad.numel(); ++i) p->grad.ptr()[i] *= scale;
        }
        return norm;
    }

    void step() {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t i = 0; i < targets_.size(); ++i) {
            Parameter<T>* p = targets_[i];
            T* m = m_[i].ptr();
            T* v = v_[i].ptr();
            const T* g = p->grad.ptr();
            T* w = p->value.ptr();
            const i64 n = p->value.numel();
            for (i64 k = 0; k < n; ++k) {
                m[k] = static_cast<T>(beta1_) * m[k] + static_cast<T>(1.0 - beta1_) * g[k];
                v[k] = static_cast<T>(beta2_) * v[k] + static_cast<T>(1.0 - beta2_) * g[k] * g[k];
                const double mhat = static_cast<double>(m[k]) / bc1;
                const double vhat = static_cast<double>(v[k]) / bc2;
                w[k] -= static_cast<T>(lr_ * mhat / (std::sqrt(vhat) + eps_));
            }
        }
    }

    void zero_grads() {
        for (Parameter<T>* p : targets_) p->grad.zero();
    }

    i64 steps_taken() const { return t_; }
    void set_lr(double lr) { lr_ = lr; }

    // Optimizer state round trip through the parameter store (opt.* tensors).
    void export_state(ParameterStore<T>& store) const {
        for (std::size_t i = 0; i < targets_.size(); ++i) {
            upsert(store, "opt.m." + targets_[i]->name, m_[i]);
            upsert(store, "opt.v." + targets_[i]->name, v_[i]);
        }
        Tensor<T> tstep({1});
        tstep.ptr()[0] = static_cast<T>(t_);
        upsert(store, "opt.t", tstep);
    }
    void import_state(ParameterStore<T>& store) {
        for (std::size_t i = 0; i < targets_.size(); ++i) {
            Parameter<T>* pm = store.find("opt.m." + targets_[i]->name);
            Parameter<T>* pv = store.find("opt.v." + targets_[i]->name);
            check_arg(pm && pv, "Adam: missing optimizer state for " + targets_[i]->name);
            m_[i] = pm->value;
            v_[i] = pv->value;
        }
        Parameter<T>* pt = store.find("opt.t");
        check_arg(pt != nullptr, "Adam: missing step counter");
        t_ = static_cast<i64>(pt->value.ptr()[0]);
    }

private:
    static void upsert(ParameterStore<T>& store, const std::string& name, const Tensor<T>& t) {
        if (Parameter<T>* p = store.find(name)) {
            p->value = t;
        } else {
            Parameter<T>* p2 = store.insert(name, t, false);
            (void)p2;
        }
    }

    ParameterStore<T>& store_;
    std::vector<Parameter<T>*> targets_;
    std::vector<Tensor<T>> m_, v_;
    double lr_, beta1_, beta2_, eps_;
    i64 t_ = 0;
};

// Per-clip tensors precomputed once per training run.
template <typename T>
struct ClipTensors {
    Tensor<T> x_latent;        // (F, C_lat, h, w) encoded ground-truth clip
    Tensor<T> capture_latent;  // (C_lat, h, w)
    Tensor<T> events_aligned;  // (F, 3*s*s, h, w) space-to-depth event video
};

template <typename T>
ClipTensors<T> clip_tensors_from_sample(const RewindSample& s, int latent_scale, int frames) {
    ClipTensors<T> out;
    LatentVideo<T> lat = encode(s.gt_clip.template cast<T>(), latent_scale);
    const i64 lh = lat.data.dim(2), lw = lat.data.dim(3);
    out.x_latent = std::move(lat.data);
    Tensor<T> cap4({1, 3, s.capture.dim(1), s.capture.dim(2)});
    std::copy(s.capture.data.begin(), s.capture.data.end(), cap4.ptr());
    LatentVideo<T> cap_lat = encode(cap4.template cast<T>(), latent_scale);
    out.capture_latent.resize({cap_lat.data.dim(1), cap_lat.data.dim(2), cap_lat.data.dim(3)});
    std::copy(cap_lat.data.data.begin(), cap_lat.data.data.end(), out.capture_latent.ptr());
    out.events_aligned = event_video_to_latent<T>(to_event_video(s.events, frames), frames, lh, lw);
    return out;
}

// slice frame k of the encoded clip as a condition latent
template <typename T>
Tensor<T> frame_latent(const ClipTensors<T>& clip, i64 k) {
    const i64 C = clip.x_latent.dim(1), h = clip.x_latent.dim(2), w = clip.x_latent.dim(3);
    Tensor<T> out({C, h, w});
    std::copy(clip.x_latent.ptr() + k * C * h * w, clip.x_latent.ptr() + (k + 1) * C * h * w,
              out.ptr());
    return out;
}

// One-sample loss of the adapted objective: v-prediction MSE through the
// (optionally adaptor-steered) denoiser. grad_scale > 0 runs backward with
// d(loss_total)/d(v_hat) scaled by grad_scale (use 1/batch for averaging);
// grad_scale == 0 skips backward.
template <typename T>
double loss_and_grad(Backbone<T>& bb, Adaptor<T>* ad, const ClipTensors<T>& clip,
                     const Tensor<T>& c_lat, double tau, const Tensor<T>& eps, T grad_scale) {
    const Tensor<T>& x = clip.x_latent;
    check_arg(x.shape == eps.shape, "loss: eps shape mismatch");
    NoisyLatent<T> nz = add_noise(x, tau, eps);
    Tensor<T> y = v_target(x, eps, tau);

    Tensor<T> v_hat;
    AdaptorResiduals<T> res;
    const bool input_latent_mode =
        ad != nullptr && ad->config().mode == InjectionMode::InputLatent;
    if (ad) {
        res = ad->adapt_prepared(clip.events_aligned, tau, nz.z);
        if (input_latent_mode) {
            Tensor<T> z_eff = inject_input_latent(nz.z, res);
            bb.denoise(z_eff, c_lat, tau, nullptr, v_hat);
        } else {
            bb.denoise(nz.z, c_lat, tau, &res.per_block, v_hat);
        }
    } else {
        bb.denoise(nz.z, c_lat, tau, nullptr, v_hat);
    }

    const i64 n = y.numel();
    double acc = 0.0;
    for (i64 i = 0; i < n; ++i) {
        const double d = static_cast<double>(v_hat.ptr()[i]) - static_cast<double>(y.ptr()[i]);
        acc += d * d;
    }
    const double loss = acc / static_cast<double>(n);

    if (grad_scale != T(0)) {
        Tensor<T> dv(v_hat.shape);
        const T s = T(2) * grad_scale / static_cast<T>(n);
        for (i64 i = 0; i < n; ++i) dv.ptr()[i] = s * (v_hat.ptr()[i] - y.ptr()[i]);
        std::vector<Tensor<T>> d_res;
        bb.backward(dv, &d_res);
        if (ad) {
            if (input_latent_mode) {
                // gradient w.r.t. z_tilde is the z-channel slice of the
                // block-0 injection gradient
                AdaptorResiduals<T> dr;
                dr.mode = InjectionMode::InputLatent;
                split_channels_grad(d_res[0], bb.config().latent_channels, &dr.input_latent,
                                    static_cast<Tensor<T>*>(nullptr));
                ad->backward(dr);
            } else {
                AdaptorResiduals<T> dr;
                dr.mode = InjectionMode::PerBlock;
                dr.per_block = std::move(d_res);
                ad->backward(dr);
            }
        }
    }
    return loss;
}

// Convenience wrapper mirroring the sample-level contract.
template <typename T>
double training_loss(Backbone<T>& bb, Adaptor<T>* ad, const RewindSample& sample,
                     int latent_scale, double tau, const Tensor<T>& eps) {
    ClipTensors<T> clip =
        clip_tensors_from_sample<T>(sample, latent_scale, bb.config().frames);
    return loss_and_grad<T>(bb, ad, clip, clip.capture_latent, tau, eps, T(0));
}

}  // namespace trw
