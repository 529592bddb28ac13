#pragma once

#include "trw/common.hpp"
#include "trw/tensor.hpp"

namespace trw {

// Variance-preserving cosine schedule on continuous tau in [0,1]:
// alpha = cos(pi*tau/2), sigma = sin(pi*tau/2); alpha^2 + sigma^2 = 1.
struct ScheduleValue {
    double alpha;
    double sigma;
};

ScheduleValue schedule(double tau);

template <typename T>
struct NoisyLatent {
    Tensor<T> z;
    double tau = 0.0;
    Tensor<T> eps;
};

// z = alpha*x + sigma*eps
template <typename T>
NoisyLatent<T> add_noise(const Tensor<T>& x, double tau, const Tensor<T>& eps) {
    check_arg(x.shape == eps.shape, "add_noise: shape mismatch " + const_cast<Tensor<T>&>(x).shape_str());
    const ScheduleValue sv = schedule(tau);
    NoisyLatent<T> out;
    out.tau = tau;
    out.eps = eps;
    out.z.resize(x.shape);
    const T a = static_cast<T>(sv.alpha), s = static_cast<T>(sv.sigma);
    for (i64 i = 0; i < x.numel(); ++i) out.z.ptr()[i] = a * x.ptr()[i] + s * eps.ptr()[i];
    return out;
}

// v = alpha*eps - sigma*x
template <typename T>
Tensor<T> v_target(const Tensor<T>& x, const Tensor<T>& eps, double tau) {
    check_arg(x.shape == eps.shape, "v_target: shape mismatch");
    const ScheduleValue sv = schedule(tau);
    Tensor<T> v(x.shape);
    const T a = static_cast<T>(sv.alpha), s = static_cast<T>(sv.sigma);
    for (i64 i = 0; i < x.numel(); ++i) v.ptr()[i] = a * eps.ptr()[i] - s * x.ptr()[i];
    return v;
}

// Deterministic reverse step: reconstruct (x_hat, eps_hat) from (z, v_hat) at
// tau_from and re-noise at tau_to.
template <typename T>
Tensor<T> ddim_step(const Tensor<T>& z, const Tensor<T>& v_hat, double tau_from, double tau_to) {
    check_arg(z.shape == v_hat.shape, "ddim_step: shape mismatch");
    check_arg(tau_from >= tau_to, "ddim_step: tau must be non-increasing");
    if (tau_from == tau_to) return z;  // zero-size step is the identity
    const ScheduleValue f = schedule(tau_from);
    const ScheduleValue t = schedule(tau_to);
    Tensor<T> out(z.shape);
    const T af = static_cast<T>(f.alpha), sf = static_cast<T>(f.sigma);
    const T at = static_cast<T>(t.alpha), st = static_cast<T>(t.sigma);
    for (i64 i = 0; i < z.numel(); ++i) {
        const T zi = z.ptr()[i], vi = v_hat.ptr()[i];
        const T x_hat = af * zi - sf * vi;
        const T e_hat = sf * zi + af * vi;
        out.ptr()[i] = at * x_hat + st * e_hat;
    }
    return out;
}

}  // namespace trw
