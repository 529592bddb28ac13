#include "trw/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "trw/event_io.hpp"
#include "trw/png_io.hpp"
#include "trw/threading.hpp"

namespace trw {

namespace fs = std::filesystem;
using nlohmann::json;

void RewindSample::validate() const {
    check_arg(capture.ndim() == 3 && capture.dim(0) == 3, "RewindSample: bad capture shape");
    check_arg(gt_clip.ndim() == 4 && gt_clip.dim(1) == 3, "RewindSample: bad clip shape");
    const i64 F = gt_clip.dim(0);
    check_arg(F >= 1, "RewindSample: empty clip");
    check_arg(gt_clip.dim(2) == capture.dim(1) && gt_clip.dim(3) == capture.dim(2),
              "RewindSample: capture/clip size mismatch");
    const i64 plane = capture.numel();
    const double* last = gt_clip.ptr() + (F - 1) * plane;
    for (i64 i = 0; i < plane; ++i)
        check_arg(last[i] == capture.ptr()[i], "RewindSample: last frame != capture");
    events.validate();
    check_arg(events.width == static_cast<int>(capture.dim(2)) &&
                  events.height == static_cast<int>(capture.dim(1)),
              "RewindSample: events sensor size mismatch");
}

RewindSample make_rewind_sample(const SceneSpec& scene, const SimulatorConfig& cfg, int frames,
                                double frame_dt) {
    check_arg(frames >= 2, "make_rewind_sample: need at least 2 frames");
    check_arg(frame_dt > 0.0, "make_rewind_sample: frame_dt must be positive");
    const double span = (frames - 1) * frame_dt;
    check_arg(scene.duration >= span, "make_rewind_sample: scene too short for clip");

    RewindSample s;
    s.gt_clip.resize({frames, 3, scene.height, scene.width});
    const i64 plane = static_cast<i64>(3) * scene.height * scene.width;
    for (int k = 0; k < frames; ++k) {
        Tensor<double> frame = render_frame(scene, k * frame_dt);
        std::copy(frame.data.begin(), frame.data.end(), s.gt_clip.ptr() + k * plane);
    }
    s.capture.resize({3, scene.height, scene.width});
    std::copy(s.gt_clip.ptr() + (frames - 1) * plane, s.gt_clip.ptr() + frames * plane,
              s.capture.ptr());
    s.events = simulate_events(scene, cfg, 0.0, span);
    return s;
}

namespace {

json sim_to_json(const SimulatorConfig& c) {
    return json{{"contrast_threshold", c.contrast_threshold},
                {"substeps_per_frame", c.substeps_per_frame},
                {"log_eps", c.log_eps},
                {"frame_dt", c.frame_dt}};
}

SimulatorConfig sim_from_json(const json& j) {
    SimulatorConfig c;
    c.contrast_threshold = j.at("contrast_threshold").get<double>();
    c.substeps_per_frame = j.at("substeps_per_frame").get<int>();
    c.log_eps = j.at("log_eps").get<double>();
    c.frame_dt = j.at("frame_dt").get<double>();
    return c;
}

std::string clip_name(int idx) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "clip_%05d", idx);
    return buf;
}

std::string frame_name(int idx) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%02d.png", idx);
    return buf;
}

}  // namespace

DatasetManifest make_dataset(const std::vector<SceneSpec>& scenes, const SimulatorConfig& cfg,
                             int frames, double frame_dt, const std::string& out_dir, u64 seed) {
    check_arg(!scenes.empty(), "make_dataset: no scenes");
    cfg.validate();
    const double span = (frames - 1) * frame_dt;
    for (const SceneSpec& s : scenes)
        check_arg(s.duration >= span, "make_dataset: scene too short for clip span");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    check_parse(fs::is_directory(out_dir), "make_dataset: cannot create " + out_dir);

    DatasetManifest m;
    m.count = static_cast<int>(scenes.size());
    m.frames = frames;
    m.frame_dt = frame_dt;
    m.width = scenes[0].width;
    m.height = scenes[0].height;
    m.sim = cfg;
    m.seed = seed;
    m.clips.resize(scenes.size());

    const int n = static_cast<int>(scenes.size());
    #pragma omp parallel for schedule(dynamic) if (thread_cap() > 1)
    for (int i = 0; i < n; ++i) {
        const SceneSpec& scene = scenes[static_cast<std::size_t>(i)];
        check_arg(scene.width == m.width && scene.height == m.height,
                  "make_dataset: all scenes must share one canvas size");
        RewindSample sample = make_rewind_sample(scene, cfg, frames, frame_dt);
        const std::string dir = std::string(out_dir) + "/" + clip_name(i);
        fs::create_directories(dir);

        const i64 plane = static_cast<i64>(3) * scene.height * scene.width;
        for (int k = 0; k < frames; ++k) {
            Tensor<double> fr({3, scene.height, scene.width});
            std::copy(sample.gt_clip.ptr() + k * plane, sample.gt_clip.ptr() + (k + 1) * plane,
                      fr.ptr());
            write_image(dir + "/" + frame_name(k), fr);
        }
        write_image(dir + "/capture.png", sample.capture);
        write_events(sample.events, dir + "/events.csv");

        json sj;
        sj["scene"] = json::parse(scene_to_json(scene));
        sj["frames"] = frames;
        sj["frame_dt"] = frame_dt;
        sj["sim"] = sim_to_json(cfg);
        sj["clip_span_us"] = sample.events.t_end - sample.events.t_start;
        std::ofstream sf(dir + "/sample.json", std::ios::binary);
        sf << sj.dump(2) << '\n';
        m.clips[static_cast<std::size_t>(i)] = clip_name(i);
    }

    json mj;
    mj["count"] = m.count;
    mj["frames"] = m.frames;
    mj["frame_dt"] = m.frame_dt;
    mj["width"] = m.width;
    mj["height"] = m.height;
    mj["sim"] = sim_to_json(cfg);
    mj["seed"] = m.seed;
    mj["clips"] = m.clips;
    std::ofstream mf(std::string(out_dir) + "/manifest.json", std::ios::binary);
    check_parse(mf.good(), "make_dataset: cannot write manifest");
    mf << mj.dump(2) << '\n';
    return m;
}

DatasetManifest read_manifest(const std::string& dataset_dir) {
    std::ifstream f(dataset_dir + "/manifest.json", std::ios::binary);
    check_parse(f.good(), "read_manifest: cannot open " + dataset_dir + "/manifest.json");
    json j;
    try {
        f >> j;
    } catch (const json::exception& ex) {
        throw std::runtime_error(dataset_dir + "/manifest.json: invalid JSON: " + ex.what());
    }
    DatasetManifest m;
    m.count = j.at("count").get<int>();
    m.frames = j.at("frames").get<int>();
    m.frame_dt = j.at("frame_dt").get<double>();
    m.width = j.at("width").get<int>();
    m.height = j.at("height").get<int>();
    m.sim = sim_from_json(j.at("sim"));
    m.seed = j.at("seed").get<u64>();
    m.clips = j.at("clips").get<std::vector<std::string>>();
    return m;
}

RewindSample load_sample(const std::string& clip_dir) {
    std::ifstream sf(clip_dir + "/sample.json", std::ios::binary);
    check_parse(sf.good(), "load_sample: cannot open " + clip_dir + "/sample.json");
    json sj;
    sf >> sj;
    const int frames = sj.at("frames").get<int>();

    RewindSample s;
    s.capture = read_image<double>(clip_dir + "/capture.png");
    const i64 H = s.capture.dim(1), W = s.capture.dim(2);
    s.gt_clip.resize({frames, 3, H, W});
    const i64 plane = 3 * H * W;
    for (int k = 0; k < frames; ++k) {
        Tensor<double> fr = read_image<double>(clip_dir + "/" + frame_name(k));
        check_parse(fr.dim(1) == H && fr.dim(2) == W, "load_sample: frame size mismatch");
        std::copy(fr.data.begin(), fr.data.end(), s.gt_clip.ptr() + k * plane);
    }
    s.events = read_events(clip_dir + "/events.csv");
    return s;
}

void validate_sample_dir(const std::string& clip_dir) {
    RewindSample s = load_sample(clip_dir);
    s.validate();

    std::ifstream sf(clip_dir + "/sample.json", std::ios::binary);
    json sj;
    sf >> sj;
    const i64 span_us = sj.at("clip_span_us").get<i64>();
    check_arg(s.events.t_end - s.events.t_start == span_us,
              clip_dir + ": events window does not match clip span");
}

}  // namespace trw
