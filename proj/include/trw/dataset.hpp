#pragma once

#include <string>
#include <vector>

#include "trw/event.hpp"
#include "trw/scene.hpp"
#include "trw/simulator.hpp"

namespace trw {

// Paired training/evaluation sample: the frame recorded at capture time, the
// ground-truth clip that ends at it (forward time order), and the event
// stream spanning the clip.
struct RewindSample {
    Tensor<double> capture;  // (3, H, W)
    Tensor<double> gt_clip;  // (F, 3, H, W), gt_clip[F-1] == capture
    EventStream events;      // window [0, (F-1)*dt) in scene-local microseconds

    void validate() const;
};

// Renders frames at k*frame_dt for k = 0..frames-1 and simulates events over
// the clip span. The capture frame is the last rendered frame.
RewindSample make_rewind_sample(const SceneSpec& scene, const SimulatorConfig& cfg, int frames,
                                double frame_dt);

// On-disk layout, one directory per clip:
//   out_dir/clip_%05d/{frame_%02d.png, capture.png, events.csv,
//                      events.meta.json, sample.json}
//   out_dir/manifest.json
struct DatasetManifest {
    int count = 0;
    int frames = 0;
    double frame_dt = 0.0;  // seconds
    int width = 0;
    int height = 0;
    SimulatorConfig sim;
    u64 seed = 0;
    std::vector<std::string> clips;  // relative directory names
};

DatasetManifest make_dataset(const std::vector<SceneSpec>& scenes, const SimulatorConfig& cfg,
                             int frames, double frame_dt, const std::string& out_dir, u64 seed);

DatasetManifest read_manifest(const std::string& dataset_dir);

// Loads one clip back from disk (frames quantized to 8-bit by the PNG round
// trip; events exact).
RewindSample load_sample(const std::string& clip_dir);

// Checks the RewindSample invariants for a stored clip; throws on violation.
void validate_sample_dir(const std::string& clip_dir);

}  // namespace trw
