#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "trw/common.hpp"
#include "trw/rng.hpp"
#include "trw/tensor.hpp"

namespace trw {

template <typename T>
struct Parameter {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;
    bool trainable = true;
};

// Named parameter set with stable iteration order (insertion order). Models
// bind to parameters by name, so a store pre-populated from a checkpoint is
// picked up instead of fresh initialization.
template <typename T>
class ParameterStore {
public:
    using InitFn = std::function<void(Tensor<T>&, RandomEngine&)>;

    Parameter<T>* get_or_create(const std::string& name, const std::vector<i64>& shape,
                                RandomEngine& rng, const InitFn& init) {
        auto it = index_.find(name);
        if (it != index_.end()) {
            Parameter<T>* p = params_[static_cast<std::size_t>(it->second)].get();
            check_arg(p->value.shape == shape,
                      "parameter shape mismatch for '" + name + "': stored " +
                          p->value.shape_str());
            if (p->grad.shape != shape) p->grad.resize(shape);
            return p;
        }
        auto p = std::make_unique<Parameter<T>>();
        p->name = name;
        p->value.resize(shape);
        p->grad.resize(shape);
        init(p->value, rng);
        Parameter<T>* raw = p.get();
        index_[name] = static_cast<int>(params_.size());
        params_.push_back(std::move(p));
        return raw;
    }

    // Inserts a parameter with existing contents (checkpoint loading).
    Parameter<T>* insert(const std::string& name, Tensor<T> value, bool trainable) {
        check_arg(index_.find(name) == index_.end(), "duplicate parameter '" + name + "'");
        auto p = std::make_unique<Parameter<T>>();
        p->name = name;
        p->grad.resize(value.shape);
        p->value = std::move(value);
        p->trainable = trainable;
        Parameter<T>* raw = p.get();
        index_[name] = static_cast<int>(params_.size());
        params_.push_back(std::move(p));
        return raw;
    }

    Parameter<T>* find(const std::string& name) {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : params_[static_cast<std::size_t>(it->second)].get();
    }

    const std::vector<std::unique_ptr<Parameter<T>>>& all() const { return params_; }

    void zero_grads() {
        for (auto& p : params_) p->grad.zero();
    }

    void set_trainable(bool t) {
        for (auto& p : params_) p->trainable = t;
    }

    i64 total_size() const {
        i64 n = 0;
        for (const auto& p : params_) n += p->value.numel();
        return n;
    }

    // Digest over names, shapes and raw values, in insertion order.
    u64 fingerprint() const {
        u64 h = 0xcbf29ce484222325ull;
        for (const auto& p : params_) {
            h = fnv1a(p->name.data(), p->name.size(), h);
            h = fnv1a(p->value.shape.data(), p->value.shape.size() * sizeof(i64), h);
            h = fnv1a(p->value.data.data(), p->value.data.size() * sizeof(T), h);
        }
        return h;
    }

private:
    std::vector<std::unique_ptr<Parameter<T>>> params_;
    std::map<std::string, int> index_;
};

// Initializers.
template <typename T>
typename ParameterStore<T>::InitFn init_zero() {
    return [](Tensor<T>& t, RandomEngine&) { t.zero(); };
}

template <typename T>
typename ParameterStore<T>::InitFn init_normal(double stddev) {
    return [stddev](Tensor<T>& t, RandomEngine& rng) { rng.fill_normal(t.ptr(), t.numel(), stddev); };
}

// He initialization for convs/linears: std = sqrt(2 / fan_in).
template <typename T>
typename ParameterStore<T>::InitFn init_he(i64 fan_in) {
    return init_normal<T>(std::sqrt(2.0 / static_cast<double>(fan_in)));
}

}  // namespace trw
