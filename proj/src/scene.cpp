#include "trw/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "trw/threading.hpp"

namespace trw {

namespace {

double sdf_at(const Primitive& obj, double t, double pan_vx, double pan_vy, double px, double py) {
    const double cx = obj.cx + (obj.vx + pan_vx) * t;
    const double cy = obj.cy + (obj.vy + pan_vy) * t;
    const double dx = px - cx;
    const double dy = py - cy;
    if (obj.kind == PrimitiveKind::Disc) {
        return std::sqrt(dx * dx + dy * dy) - obj.radius;
    }
    const double a = obj.angle + obj.omega * t;
    const double ca = std::cos(a), sa = std::sin(a);
    const double qx = std::abs(ca * dx + sa * dy) - obj.half_w;
    const double qy = std::abs(-sa * dx + ca * dy) - obj.half_h;
    const double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
    return std::sqrt(ox * ox + oy * oy) + std::min(std::max(qx, qy), 0.0);
}

}  // namespace

void SceneSpec::validate() const {
    check_arg(width > 0 && height > 0, "SceneSpec: canvas must be positive");
    check_arg(background >= 0.0 && background < 1.0, "SceneSpec: background outside [0,1)");
    check_arg(duration > 0.0 && std::isfinite(duration), "SceneSpec: bad duration");
    for (const Primitive& o : objects) {
        check_arg(o.intensity > 0.0 && o.intensity <= 1.0, "SceneSpec: intensity outside (0,1]");
        check_arg(std::isfinite(o.cx) && std::isfinite(o.cy) && std::isfinite(o.vx) &&
                      std::isfinite(o.vy),
                  "SceneSpec: non-finite trajectory");
        if (o.kind == PrimitiveKind::Disc) {
            check_arg(o.radius > 0.0, "SceneSpec: disc radius must be positive");
        } else {
            check_arg(o.half_w > 0.0 && o.half_h > 0.0, "SceneSpec: rect extents must be positive");
        }
    }
}

Tensor<double> render_luma(const SceneSpec& scene, double t) {
    check_range(t >= 0.0 && t <= scene.duration, "render: t outside scene duration");
    const int H = scene.height, W = scene.width;
    Tensor<double> img({H, W});
    double* p = img.ptr();

    #pragma omp parallel for schedule(static) if (thread_cap() > 1)
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            double v = scene.background;
            const double px = x + 0.5, py = y + 0.5;
            for (const Primitive& obj : scene.objects) {
                const double d = sdf_at(obj, t, scene.pan_vx, scene.pan_vy, px, py);
                const double cov = std::clamp(0.5 - d, 0.0, 1.0);
                v = v * (1.0 - cov) + obj.intensity * cov;
            }
            p[y * W + x] = v;
        }
    }
    return img;
}

Tensor<double> render_frame(const SceneSpec& scene, double t) {
    Tensor<double> luma = render_luma(scene, t);
    const int H = scene.height, W = scene.width;
    Tensor<double> out({3, H, W});
    for (int c = 0; c < 3; ++c)
        std::copy(luma.data.begin(), luma.data.end(), out.ptr() + c * H * W);
    return out;
}

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    std::string bad;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) bad += (bad.empty() ? "" : ", ") + it.key();
    }
    check_parse(bad.empty(), ctx + ": unknown keys: " + bad);
}

Primitive primitive_from_json(const json& j) {
    check_keys(j,
               {"kind", "intensity", "center", "velocity", "radius", "half_extents", "angle",
                "angular_velocity"},
               "object");
    Primitive o;
    const std::string kind = j.at("kind").get<std::string>();
    check_parse(kind == "disc" || kind == "rect", "object: kind must be 'disc' or 'rect'");
    o.kind = (kind == "disc") ? PrimitiveKind::Disc : PrimitiveKind::Rect;
    o.intensity = j.at("intensity").get<double>();
    o.cx = j.at("center").at(0).get<double>();
    o.cy = j.at("center").at(1).get<double>();
    if (j.contains("velocity")) {
        o.vx = j["velocity"].at(0).get<double>();
        o.vy = j["velocity"].at(1).get<double>();
    }
    if (o.kind == PrimitiveKind::Disc) {
        o.radius = j.at("radius").get<double>();
    } else {
        o.half_w = j.at("half_extents").at(0).get<double>();
        o.half_h = j.at("half_extents").at(1).get<double>();
        if (j.contains("angle")) o.angle = j["angle"].get<double>();
        if (j.contains("angular_velocity")) o.omega = j["angular_velocity"].get<double>();
    }
    return o;
}

json primitive_to_json(const Primitive& o) {
    json j;
    j["kind"] = (o.kind == PrimitiveKind::Disc) ? "disc" : "rect";
    j["intensity"] = o.intensity;
    j["center"] = {o.cx, o.cy};
    j["velocity"] = {o.vx, o.vy};
    if (o.kind == PrimitiveKind::Disc) {
        j["radius"] = o.radius;
    } else {
        j["half_extents"] = {o.half_w, o.half_h};
        j["angle"] = o.angle;
        j["angular_velocity"] = o.omega;
    }
    return j;
}

SceneSpec scene_from_json_obj(const json& j) {
    check_keys(j, {"canvas", "background", "duration", "camera_pan", "objects"}, "scene");
    SceneSpec s;
    s.width = j.at("canvas").at("width").get<int>();
    s.height = j.at("canvas").at("height").get<int>();
    s.background = j.at("background").get<double>();
    s.duration = j.at("duration").get<double>();
    if (j.contains("camera_pan")) {
        s.pan_vx = j["camera_pan"].at("vx").get<double>();
        s.pan_vy = j["camera_pan"].at("vy").get<double>();
    }
    if (j.contains("objects"))
        for (const json& jo : j["objects"]) s.objects.push_back(primitive_from_json(jo));
    s.validate();
    return s;
}

json scene_to_json_obj(const SceneSpec& s) {
    json j;
    j["canvas"] = {{"width", s.width}, {"height", s.height}};
    j["background"] = s.background;
    j["duration"] = s.duration;
    if (s.pan_vx != 0.0 || s.pan_vy != 0.0) j["camera_pan"] = {{"vx", s.pan_vx}, {"vy", s.pan_vy}};
    j["objects"] = json::array();
    for (const Primitive& o : s.objects) j["objects"].push_back(primitive_to_json(o));
    return j;
}

}  // namespace

SceneSpec scene_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& ex) {
        throw std::runtime_error(std::string("scene JSON: ") + ex.what());
    }
    return scene_from_json_obj(j);
}

std::string scene_to_json(const SceneSpec& scene) { return scene_to_json_obj(scene).dump(2); }

std::vector<SceneSpec> scenes_from_json_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    check_parse(f.good(), "cannot open scene file " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& ex) {
        throw std::runtime_error(path + ": invalid JSON: " + ex.what());
    }
    check_parse(j.contains("scenes") && j["scenes"].is_array(),
                path + ": expected top-level 'scenes' array");
    std::vector<SceneSpec> out;
    for (const json& js : j["scenes"]) out.push_back(scene_from_json_obj(js));
    return out;
}

void scenes_to_json_file(const std::vector<SceneSpec>& scenes, const std::string& path) {
    json j;
    j["scenes"] = json::array();
    for (const SceneSpec& s : scenes) j["scenes"].push_back(scene_to_json_obj(s));
    std::ofstream f(path, std::ios::binary);
    check_parse(f.good(), "cannot open " + path);
    f << j.dump(2) << '\n';
    check_parse(f.good(), "write failed for " + path);
}

SceneSpec random_scene(RandomEngine& rng, const SceneGenParams& p) {
    SceneSpec s;
    s.width = p.width;
    s.height = p.height;
    s.duration = p.duration;
    s.background = rng.uniform(0.05, 0.35);

    Primitive o;
    o.kind = rng.uniform() < p.rect_prob ? PrimitiveKind::Rect : PrimitiveKind::Disc;
    do {
        o.intensity = rng.uniform(0.45, 0.95);
    } while (std::abs(o.intensity - s.background) < p.min_contrast);

    double extent;
    if (o.kind == PrimitiveKind::Disc) {
        o.radius = rng.uniform(p.radius_min, p.radius_max);
        extent = o.radius;
    } else {
        o.half_w = rng.uniform(p.radius_min * 0.7, p.radius_max * 0.9);
        o.half_h = rng.uniform(p.radius_min * 0.7, p.radius_max * 0.9);
        o.angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        if (rng.uniform() < p.spin_prob) o.omega = rng.uniform(-2.0, 2.0);
        extent = std::sqrt(o.half_w * o.half_w + o.half_h * o.half_h);
    }

    const double margin = extent + 2.0;
    for (int attempt = 0;; ++attempt) {
        const double speed = rng.uniform(p.speed_min, p.speed_max) /
                             (attempt >= 20 ? 2.0 : 1.0);  // relax if the canvas is tight
        const double dir = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        o.vx = speed * std::cos(dir);
        o.vy = speed * std::sin(dir);
        const double x0 = rng.uniform(margin, p.width - margin);
        const double y0 = rng.uniform(margin, p.height - margin);
        const double x1 = x0 + o.vx * s.duration;
        const double y1 = y0 + o.vy * s.duration;
        if (x1 >= margin && x1 <= p.width - margin && y1 >= margin && y1 <= p.height - margin) {
            o.cx = x0;
            o.cy = y0;
            break;
        }
        check_arg(attempt < 1000, "random_scene: cannot fit trajectory on canvas");
    }
    s.objects.push_back(o);
    s.validate();
    return s;
}

std::vector<SceneSpec> random_scenes(int n, u64 seed, const SceneGenParams& p) {
    std::vector<SceneSpec> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        RandomEngine rng(seed + static_cast<u64>(i) * 0x9e3779b97f4a7c15ull);
        out.push_back(random_scene(rng, p));
    }
    return out;
}

}  // namespace trw
