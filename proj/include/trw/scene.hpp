#pragma once

#include <string>
#include <vector>

#include "trw/common.hpp"
#include "trw/rng.hpp"
#include "trw/tensor.hpp"

namespace trw {

enum class PrimitiveKind { Disc, Rect };

// Moving primitive with constant velocity and (rects only) angular velocity.
struct Primitive {
    PrimitiveKind kind = PrimitiveKind::Disc;
    double intensity = 0.8;  // (0,1]
    double cx = 0, cy = 0;   // initial center, px
    double vx = 0, vy = 0;   // px/s
    double radius = 5;       // disc
    double half_w = 4, half_h = 4;  // rect
    double angle = 0;               // rect rotation at t=0, rad
    double omega = 0;               // rad/s
};

struct SceneSpec {
    int width = 64;
    int height = 64;
    double background = 0.2;  // [0,1)
    double duration = 1.0;    // seconds
    double pan_vx = 0, pan_vy = 0;  // camera pan, px/s
    std::vector<Primitive> objects;

    void validate() const;
};

// Deterministic soft-edge rasterization (~1 px linear coverage ramp at
// object boundaries). Luma is the single-channel image; render_frame
// replicates it to 3 channels.
Tensor<double> render_luma(const SceneSpec& scene, double t);
Tensor<double> render_frame(const SceneSpec& scene, double t);

// JSON (de)serialization. Parsing is strict: unknown keys are errors and the
// offending keys are listed in the exception message.
SceneSpec scene_from_json(const std::string& json_text);
std::string scene_to_json(const SceneSpec& scene);
std::vector<SceneSpec> scenes_from_json_file(const std::string& path);
void scenes_to_json_file(const std::vector<SceneSpec>& scenes, const std::string& path);

// Random single-moving-shape scene generator.
struct SceneGenParams {
    int width = 64;
    int height = 64;
    double duration = 0.22;       // seconds; must cover the clip span
    double speed_min = 20.0;      // px/s
    double speed_max = 70.0;
    double radius_min = 5.0;
    double radius_max = 9.0;
    double rect_prob = 0.5;
    double spin_prob = 0.3;       // rects only
    double min_contrast = 0.25;   // |object - background|
};

SceneSpec random_scene(RandomEngine& rng, const SceneGenParams& p);
std::vector<SceneSpec> random_scenes(int n, u64 seed, const SceneGenParams& p);

}  // namespace trw
