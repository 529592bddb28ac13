#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "trw/dataset.hpp"
#include "trw/event.hpp"
#include "trw/scene.hpp"
#include "trw/simulator.hpp"

using namespace trw;

namespace {

// Independent dense threshold-crossing oracle: walks the same substep grid
// per pixel and counts level crossings; no event objects, timestamps,
// merging or sorting involved.
void crossing_count_oracle(const SceneSpec& scene, const SimulatorConfig& cfg, double t0,
                           double t1, std::vector<i64>& pos, std::vector<i64>& neg) {
    const int H = scene.height, W = scene.width;
    const i64 n_px = static_cast<i64>(H) * W;
    const i64 n_sub = simulation_substeps(cfg, t0, t1);
    const double C = cfg.contrast_threshold;
    pos.assign(static_cast<std::size_t>(n_px), 0);
    neg.assign(static_cast<std::size_t>(n_px), 0);

    Tensor<double> first = render_luma(scene, t0);
    std::vector<double> base(static_cast<std::size_t>(n_px));
    std::vector<i64> level(static_cast<std::size_t>(n_px), 0);
    for (i64 i = 0; i < n_px; ++i) base[static_cast<std::size_t>(i)] = std::log(first.ptr()[i] + cfg.log_eps);

    for (i64 step = 1; step <= n_sub; ++step) {
        const double tb = t0 + (t1 - t0) * static_cast<double>(step) / n_sub;
        Tensor<double> luma = render_luma(scene, tb);
        for (i64 i = 0; i < n_px; ++i) {
            const double d = std::log(luma.ptr()[i] + cfg.log_eps) - base[static_cast<std::size_t>(i)];
            i64 j = level[static_cast<std::size_t>(i)];
            while (d >= static_cast<double>(j + 1) * C) {
                pos[static_cast<std::size_t>(i)]++;
                ++j;
            }
            while (d <= static_cast<double>(j - 1) * C) {
                neg[static_cast<std::size_t>(i)]++;
                --j;
            }
            level[static_cast<std::size_t>(i)] = j;
        }
    }
}

SceneSpec moving_disc_scene(double vx = 30.0, double vy = -10.0) {
    SceneSpec s;
    s.width = 32;
    s.height = 32;
    s.background = 0.2;
    s.duration = 0.3;
    Primitive o;
    o.kind = PrimitiveKind::Disc;
    o.intensity = 0.85;
    o.cx = 12;
    o.cy = 16;
    o.vx = vx;
    o.vy = vy;
    o.radius = 5;
    s.objects.push_back(o);
    return s;
}

i64 count_events(const EventStream& s, int x, int y, u8 p) {
    i64 n = 0;
    for (const Event& e : s.events)
        if (e.x == x && e.y == y && e.p == p) ++n;
    return n;
}

}  // namespace

TEST_CASE("render_frame: empty scene is the constant background") {
    SceneSpec s;
    s.width = 16;
    s.height = 12;
    s.background = 0.3;
    s.duration = 1.0;
    Tensor<double> img = render_frame(s, 0.5);
    REQUIRE(img.shape == std::vector<i64>{3, 12, 16});
    for (i64 i = 0; i < img.numel(); ++i) CHECK(img.ptr()[i] == 0.3);
}

TEST_CASE("render_frame: disc centroid moves with its velocity") {
    SceneSpec s = moving_disc_scene(10.0, 0.0);
    s.duration = 1.5;
    auto centroid_x = [&](double t) {
        Tensor<double> img = render_luma(s, t);
        double wsum = 0.0, cx = 0.0;
        for (int y = 0; y < s.height; ++y)
            for (int x = 0; x < s.width; ++x) {
                const double w = img.ptr()[y * s.width + x] - s.background;
                wsum += w;
                cx += w * (x + 0.5);
            }
        return cx / wsum;
    };
    CHECK(centroid_x(1.0) - centroid_x(0.0) == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("render_frame is deterministic") {
    SceneSpec s = moving_disc_scene();
    Tensor<double> a = render_frame(s, 0.123);
    Tensor<double> b = render_frame(s, 0.123);
    for (i64 i = 0; i < a.numel(); ++i) CHECK(a.ptr()[i] == b.ptr()[i]);
}

TEST_CASE("render_frame rejects out-of-duration times") {
    SceneSpec s = moving_disc_scene();
    CHECK_THROWS_AS(render_frame(s, -0.01), std::out_of_range);
    CHECK_THROWS_AS(render_frame(s, s.duration + 0.01), std::out_of_range);
}

TEST_CASE("simulate_events: static scene emits nothing") {
    SceneSpec s = moving_disc_scene(0.0, 0.0);
    SimulatorConfig cfg;
    EventStream ev = simulate_events(s, cfg, 0.0, 0.25);
    CHECK(ev.events.empty());
}

TEST_CASE("simulate_events: one-substep doubling with C=ln2 emits one positive event") {
    // Background jumps from 0.3 to slightly above 0.6 over one substep:
    // ln((0.6+eps)/(0.3+eps)) is just over ln 2 for small eps.
    SceneSpec s;
    s.width = 2;
    s.height = 2;
    s.duration = 1.0;
    s.background = 0.3;
    Primitive cover;
    cover.kind = PrimitiveKind::Rect;
    cover.intensity = 0.62;
    cover.cx = -50;  // far off-canvas, sweeps in at high speed
    cover.cy = 1.0;
    cover.vx = 1700.0;  // center reaches x=1 at t=0.03, covering the 2x2 canvas
    cover.half_w = 40.0;
    cover.half_h = 40.0;
    s.objects.push_back(cover);

    SimulatorConfig cfg;
    cfg.contrast_threshold = std::log(2.0);
    cfg.substeps_per_frame = 1;
    cfg.frame_dt = 0.030;
    // one substep: [0, 0.03); the rect covers everything by t=0.03
    EventStream ev = simulate_events(s, cfg, 0.0, 0.03);
    CHECK(count_events(ev, 0, 0, 1) == 1);
    CHECK(count_events(ev, 1, 1, 1) == 1);
    for (const Event& e : ev.events) CHECK(e.p == 1);
}

TEST_CASE("simulate_events matches the dense crossing oracle exactly") {
    RandomEngine rng(99);
    SceneGenParams p;
    p.width = 32;
    p.height = 32;
    p.duration = 0.21;
    SimulatorConfig cfg;
    for (int trial = 0; trial < 20; ++trial) {
        SceneSpec scene = random_scene(rng, p);
        EventStream ev = simulate_events(scene, cfg, 0.0, 0.21);
        std::vector<i64> pos, neg, got_pos(32 * 32, 0), got_neg(32 * 32, 0);
        crossing_count_oracle(scene, cfg, 0.0, 0.21, pos, neg);
        for (const Event& e : ev.events) {
            auto& v = e.p ? got_pos : got_neg;
            v[static_cast<std::size_t>(e.y * 32 + e.x)]++;
        }
        for (std::size_t i = 0; i < pos.size(); ++i) {
            CHECK(got_pos[i] == pos[i]);
            CHECK(got_neg[i] == neg[i]);
        }
    }
}

TEST_CASE("raising the threshold never increases any pixel count") {
    RandomEngine rng(7);
    SceneGenParams p;
    p.width = 24;
    p.height = 24;
    p.duration = 0.21;
    SceneSpec scene = random_scene(rng, p);
    SimulatorConfig lo, hi;
    lo.contrast_threshold = 0.1;
    hi.contrast_threshold = 0.2;
    std::vector<i64> lp, ln, hp, hn;
    crossing_count_oracle(scene, lo, 0.0, 0.21, lp, ln);
    crossing_count_oracle(scene, hi, 0.0, 0.21, hp, hn);
    EventStream elo = simulate_events(scene, lo, 0.0, 0.21);
    EventStream ehi = simulate_events(scene, hi, 0.0, 0.21);
    CHECK(ehi.events.size() <= elo.events.size());
    for (std::size_t i = 0; i < lp.size(); ++i) {
        CHECK(hp[i] <= lp[i]);
        CHECK(hn[i] <= ln[i]);
    }
}

TEST_CASE("monotonically brightening pixels emit only positive events") {
    SceneSpec s;
    s.width = 8;
    s.height = 8;
    s.duration = 0.5;
    s.background = 0.1;
    Primitive grow;
    grow.kind = PrimitiveKind::Disc;
    grow.intensity = 0.9;
    grow.cx = 4.0;
    grow.cy = 4.0;
    grow.vx = 0.0;
    grow.vy = 0.0;
    grow.radius = 1.0;
    s.objects.push_back(grow);
    // a slow pan moves the bright disc toward a fixed corner pixel; every
    // pixel it sweeps over brightens monotonically while it approaches
    s.pan_vx = 4.0;
    SimulatorConfig cfg;
    EventStream ev = simulate_events(s, cfg, 0.0, 0.3);
    for (const Event& e : ev.events) {
        if (e.x > 4) CHECK(e.p == 1);  // ahead of the disc: only brightening
    }
}

TEST_CASE("event timestamps stay strictly inside the window and sorted") {
    RandomEngine rng(21);
    SceneGenParams p;
    p.width = 24;
    p.height = 24;
    p.duration = 0.21;
    SceneSpec scene = random_scene(rng, p);
    SimulatorConfig cfg;
    EventStream ev = simulate_events(scene, cfg, 0.03, 0.18);
    CHECK(ev.t_start == 30000);
    CHECK(ev.t_end == 180000);
    i64 prev = ev.t_start;
    for (const Event& e : ev.events) {
        CHECK(e.t >= ev.t_start);
        CHECK(e.t < ev.t_end);
        CHECK(e.t >= prev);
        prev = e.t;
    }
    CHECK_THROWS_AS(simulate_events(scene, cfg, 0.2, 0.1), std::out_of_range);
}

TEST_CASE("substep refinement only jitters boundary crossings") {
    SceneSpec scene = moving_disc_scene();
    scene.duration = 0.21;
    SimulatorConfig cfg, fine;
    fine.substeps_per_frame = 20;
    EventStream a = simulate_events(scene, cfg, 0.0, 0.21);
    EventStream b = simulate_events(scene, fine, 0.0, 0.21);
    const i64 n_px = scene.width * scene.height;
    CHECK(std::llabs(static_cast<i64>(a.events.size()) - static_cast<i64>(b.events.size())) <=
          n_px);
}

TEST_CASE("make_rewind_sample invariants and dataset round trip") {
    SceneSpec scene = moving_disc_scene();
    scene.duration = 0.3;
    SimulatorConfig cfg;
    RewindSample s = make_rewind_sample(scene, cfg, 4, 0.03);
    s.validate();
    CHECK(s.gt_clip.dim(0) == 4);
    CHECK(s.events.t_end - s.events.t_start == 90000);

    const std::string dir = "trw_test_dataset";
    std::filesystem::remove_all(dir);
    DatasetManifest m = make_dataset({scene, moving_disc_scene(-20, 5)}, cfg, 4, 0.03, dir, 17);
    CHECK(m.count == 2);
    for (const std::string& c : m.clips) validate_sample_dir(dir + "/" + c);

    DatasetManifest r = read_manifest(dir);
    CHECK(r.frames == 4);
    CHECK(r.clips == m.clips);

    // determinism: regenerate and compare manifest + one events file byte-wise
    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    };
    const std::string manifest1 = slurp(dir + "/manifest.json");
    const std::string events1 = slurp(dir + "/clip_00000/events.csv");
    const std::string png1 = slurp(dir + "/clip_00000/frame_00.png");
    std::filesystem::remove_all(dir);
    make_dataset({scene, moving_disc_scene(-20, 5)}, cfg, 4, 0.03, dir, 17);
    CHECK(slurp(dir + "/manifest.json") == manifest1);
    CHECK(slurp(dir + "/clip_00000/events.csv") == events1);
    CHECK(slurp(dir + "/clip_00000/frame_00.png") == png1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("make_dataset rejects scenes shorter than the clip span") {
    SceneSpec scene = moving_disc_scene();
    scene.duration = 0.05;
    SimulatorConfig cfg;
    CHECK_THROWS_AS(make_dataset({scene}, cfg, 4, 0.03, "trw_test_reject", 1),
                    std::invalid_argument);
    std::filesystem::remove_all("trw_test_reject");
}

TEST_CASE("random scenes stay renderable over their duration") {
    RandomEngine rng(5);
    SceneGenParams p;
    for (int i = 0; i < 50; ++i) {
        SceneSpec s = random_scene(rng, p);
        s.validate();
        const Primitive& o = s.objects.at(0);
        const double x1 = o.cx + o.vx * s.duration;
        const double y1 = o.cy + o.vy * s.duration;
        CHECK(x1 >= 0.0);
        CHECK(x1 <= s.width);
        CHECK(y1 >= 0.0);
        CHECK(y1 <= s.height);
    }
}
