#pragma once

#include <optional>
#include <string>

#include "trw/adaptor.hpp"
#include "trw/backbone.hpp"
#include "trw/nn/params.hpp"

namespace trw {

// Checkpoint directory: manifest.json (configs, fingerprints, training
// position) + params.bin (all named tensors: theta.*, phi.*, opt.*).

struct CheckpointMeta {
    int version = 1;
    std::string kind;  // "backbone" or "adaptor"
    BackboneConfig backbone;
    std::optional<AdaptorConfig> adaptor;
    int latent_scale = 4;
    std::string schedule = "vp_cosine";
    std::string fingerprint_theta;  // hex digests
    std::string fingerprint_phi;
    i64 step = 0;
    std::string rng_state;      // training RNG, for exact resume
    std::string train_config;   // JSON blob of the run's TrainConfig ("" if none)
};

u64 fingerprint_prefix(const ParameterStore<float>& store, const std::string& prefix);

void save_checkpoint(const std::string& dir, const ParameterStore<float>& store,
                     const CheckpointMeta& meta);

// Populates the store with every archived tensor; models built against the
// store afterwards bind to these values.
CheckpointMeta load_checkpoint(const std::string& dir, ParameterStore<float>& store);

CheckpointMeta read_checkpoint_meta(const std::string& dir);

}  // namespace trw
