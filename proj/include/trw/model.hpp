#pragma once

#include <memory>
#include <optional>
#include <string>

#include "trw/adaptor.hpp"
#include "trw/backbone.hpp"
#include "trw/checkpoint.hpp"

namespace trw {

// Parameter store + bound module graph, as loaded from or saved to a
// checkpoint directory.
struct RewindModel {
    ParameterStore<float> store;
    BackboneConfig bb_cfg;
    std::optional<AdaptorConfig> ad_cfg;
    int latent_scale = 4;
    std::unique_ptr<Backbone<float>> backbone;
    std::unique_ptr<Adaptor<float>> adaptor;
    CheckpointMeta meta;  // as loaded; refreshed on save

    std::string fingerprint_theta_hex() const { return to_hex(fingerprint_prefix(store, "theta.")); }
    std::string fingerprint_phi_hex() const { return to_hex(fingerprint_prefix(store, "phi.")); }
};

inline std::unique_ptr<RewindModel> create_backbone_model(const BackboneConfig& cfg,
                                                          int latent_scale, u64 init_seed) {
    auto m = std::make_unique<RewindModel>();
    m->bb_cfg = cfg;
    m->latent_scale = latent_scale;
    RandomEngine rng(init_seed);
    m->backbone = std::make_unique<Backbone<float>>(cfg, m->store, rng);
    return m;
}

inline void attach_adaptor(RewindModel& m, const AdaptorConfig& cfg, u64 init_seed) {
    check_arg(!m.adaptor, "model already has an adaptor");
    RandomEngine rng(init_seed);
    m.ad_cfg = cfg;
    m.adaptor = std::make_unique<Adaptor<float>>(cfg, m.bb_cfg, m.store, rng);
}

inline std::unique_ptr<RewindModel> load_model(const std::string& ckpt_dir) {
    auto m = std::make_unique<RewindModel>();
    m->meta = load_checkpoint(ckpt_dir, m->store);
    m->bb_cfg = m->meta.backbone;
    m->latent_scale = m->meta.latent_scale;
    const std::size_t archived = m->store.all().size();
    RandomEngine rng(0);  // unused: all parameters bind to stored tensors
    m->backbone = std::make_unique<Backbone<float>>(m->bb_cfg, m->store, rng);
    if (m->meta.adaptor) {
        m->ad_cfg = *m->meta.adaptor;
        m->adaptor = std::make_unique<Adaptor<float>>(*m->ad_cfg, m->bb_cfg, m->store, rng);
    }
    check_arg(m->store.all().size() == archived,
              "checkpoint " + ckpt_dir + " is missing parameters for its declared config");
    return m;
}

inline void freeze_backbone(RewindModel& m) {
    for (const auto& p : m.store.all())
        if (p->name.rfind("theta.", 0) == 0) p->trainable = false;
}

}  // namespace trw
