#pragma once

#include <string>
#include <vector>

#include "trw/model.hpp"
#include "trw/training.hpp"

namespace trw {

// Dataset loaded into latent-space tensors once per run.
struct TrainingCache {
    std::vector<ClipTensors<float>> clips;
    int frames = 0;
    int latent_scale = 4;
};

TrainingCache load_training_cache(const std::string& dataset_dir, int latent_scale);

struct TrainRunResult {
    i64 steps = 0;
    double final_loss = 0.0;
    std::string checkpoint_dir;
};

// Pre-trains the video prior: theta trainable, no adaptor, the condition is
// a uniformly drawn frame of each clip. Writes a checkpoint + JSONL log
// into out_dir.
TrainRunResult pretrain_backbone(const TrainingCache& cache, const BackboneConfig& cfg,
                                 const TrainConfig& tc, const std::string& out_dir,
                                 bool verbose = true);

// Trains phi against the frozen backbone loaded from backbone_ckpt; the
// condition is the capture-frame latent. When resume is true and out_dir
// already holds an adaptor checkpoint, continues it to tc.iterations.
TrainRunResult train_adaptor(const TrainingCache& cache, const std::string& backbone_ckpt,
                             const AdaptorConfig& ad_cfg, const TrainConfig& tc,
                             const std::string& out_dir, bool resume = false,
                             bool verbose = true);

}  // namespace trw
