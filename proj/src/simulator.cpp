#include "trw/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "trw/threading.hpp"

namespace trw {

i64 simulation_substeps(const SimulatorConfig& cfg, double t0, double t1) {
    const double h = cfg.frame_dt / cfg.substeps_per_frame;
    return std::max<i64>(1, static_cast<i64>(std::ceil((t1 - t0) / h - 1e-9)));
}

EventStream simulate_events(const SceneSpec& scene, const SimulatorConfig& cfg, double t0,
                            double t1) {
    cfg.validate();
    check_range(t0 < t1, "simulate_events: t0 must be < t1");
    check_range(t0 >= 0.0 && t1 <= scene.duration, "simulate_events: interval outside scene");

    const int H = scene.height, W = scene.width;
    const i64 n_px = static_cast<i64>(H) * W;
    const i64 t0_us = std::llround(t0 * 1e6);
    const i64 t1_us = std::llround(t1 * 1e6);
    const i64 n_sub = simulation_substeps(cfg, t0, t1);
    const double C = cfg.contrast_threshold;

    EventStream out;
    out.width = W;
    out.height = H;
    out.t_start = t0_us;
    out.t_end = t1_us;

    // Per-pixel state: base log-intensity at t0 and the integer level index j;
    // the reference level is base + j*C, recomputed (not accumulated) so the
    // dense counting oracle can reproduce the comparisons exactly.
    Tensor<double> luma_prev = render_luma(scene, t0);
    std::vector<double> base(static_cast<std::size_t>(n_px));
    std::vector<double> lprev(static_cast<std::size_t>(n_px));
    std::vector<i64> level(static_cast<std::size_t>(n_px), 0);
    for (i64 i = 0; i < n_px; ++i) {
        base[i] = std::log(luma_prev.ptr()[i] + cfg.log_eps);
        lprev[i] = base[i];
    }

    std::vector<std::vector<Event>> per_row(static_cast<std::size_t>(H));

    for (i64 step = 1; step <= n_sub; ++step) {
        const double ta = t0 + (t1 - t0) * static_cast<double>(step - 1) / n_sub;
        const double tb = t0 + (t1 - t0) * static_cast<double>(step) / n_sub;
        Tensor<double> luma = render_luma(scene, tb);

        #pragma omp parallel for schedule(static) if (thread_cap() > 1)
        for (int y = 0; y < H; ++y) {
            std::vector<Event>& row_events = per_row[static_cast<std::size_t>(y)];
            for (int x = 0; x < W; ++x) {
                const i64 i = static_cast<i64>(y) * W + x;
                const double lcur = std::log(luma.ptr()[i] + cfg.log_eps);
                const double d = lcur - base[i];
                i64 j = level[i];
                const double dprev = lprev[i] - base[i];

                auto emit = [&](double threshold, u8 polarity) {
                    // crossing fraction within [ta, tb]
                    double frac = 1.0;
                    const double denom = d - dprev;
                    if (denom != 0.0) frac = (threshold - dprev) / denom;
                    frac = std::clamp(frac, 0.0, 1.0);
                    const double tc = ta + (tb - ta) * frac;
                    i64 t_us = t0_us + static_cast<i64>(std::floor((tc - t0) * 1e6));
                    t_us = std::clamp(t_us, t0_us, t1_us - 1);
                    row_events.push_back(Event{t_us, x, y, polarity});
                };

                while (d >= static_cast<double>(j + 1) * C) {
                    emit(static_cast<double>(j + 1) * C, 1);
                    ++j;
                }
                while (d <= static_cast<double>(j - 1) * C) {
                    emit(static_cast<double>(j - 1) * C, 0);
                    --j;
                }
                level[i] = j;
                lprev[i] = lcur;
            }
        }
    }

    std::size_t total = 0;
    for (const auto& v : per_row) total += v.size();
    out.events.reserve(total);
    for (const auto& v : per_row) out.events.insert(out.events.end(), v.begin(), v.end());
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return out;
}

}  // namespace trw
