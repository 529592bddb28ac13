#pragma once

#include "trw/event.hpp"
#include "trw/scene.hpp"

namespace trw {

// Event camera model. A pixel holds a reference log-intensity level; an
// event fires each time ln(I + log_eps) moves a full threshold C past the
// reference (integrate-and-fire: the reference advances by exactly C per
// event). Intensity is sampled S times per frame_dt interval.
struct SimulatorConfig {
    double contrast_threshold = 0.15;  // C, log-intensity units
    int substeps_per_frame = 10;       // S
    double log_eps = 0.01;
    double frame_dt = 0.030;  // seconds; the accumulation window one substep grid spans

    void validate() const {
        check_arg(contrast_threshold > 0.0, "SimulatorConfig: C must be positive");
        check_arg(substeps_per_frame >= 1, "SimulatorConfig: S must be >= 1");
        check_arg(log_eps > 0.0, "SimulatorConfig: log_eps must be positive");
        check_arg(frame_dt > 0.0, "SimulatorConfig: frame_dt must be positive");
    }
};

// Simulates events over [t0, t1) (seconds, within the scene duration).
// Event timestamps are microseconds relative to the scene clock, linearly
// interpolated within the substep that crossed the threshold, and the output
// is sorted by t (ties in row-major pixel order).
EventStream simulate_events(const SceneSpec& scene, const SimulatorConfig& cfg, double t0,
                            double t1);

// Number of sampling intervals simulate_events uses for [t0, t1).
i64 simulation_substeps(const SimulatorConfig& cfg, double t0, double t1);

}  // namespace trw
