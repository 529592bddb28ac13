#include "trw/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace trw {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'T', 'R', 'W', 'P', '0', '0', '0', '1'};

json backbone_to_json(const BackboneConfig& c) {
    return json{{"num_levels", c.num_levels},   {"base_width", c.base_width},
                {"mults", c.mults},             {"latent_channels", c.latent_channels},
                {"frames", c.frames},           {"latent_h", c.latent_h},
                {"latent_w", c.latent_w},       {"temb_dim", c.temb_dim},
                {"attention", c.attention},     {"attn_heads", c.attn_heads},
                {"groups", c.groups}};
}

BackboneConfig backbone_from_json(const json& j) {
    BackboneConfig c;
    c.num_levels = j.at("num_levels").get<int>();
    c.base_width = j.at("base_width").get<int>();
    c.mults = j.at("mults").get<std::vector<int>>();
    c.latent_channels = j.at("latent_channels").get<int>();
    c.frames = j.at("frames").get<int>();
    c.latent_h = j.at("latent_h").get<int>();
    c.latent_w = j.at("latent_w").get<int>();
    c.temb_dim = j.at("temb_dim").get<int>();
    c.attention = j.at("attention").get<bool>();
    c.attn_heads = j.at("attn_heads").get<int>();
    c.groups = j.at("groups").get<int>();
    return c;
}

json adaptor_to_json(const AdaptorConfig& c) {
    return json{{"widths", c.widths},
                {"injection_mode", injection_mode_name(c.mode)},
                {"zero_init", c.zero_init},
                {"temb_dim", c.temb_dim},
                {"event_channels", c.event_channels}};
}

AdaptorConfig adaptor_from_json(const json& j) {
    AdaptorConfig c;
    c.widths = j.at("widths").get<std::vector<int>>();
    c.mode = injection_mode_from_name(j.at("injection_mode").get<std::string>());
    c.zero_init = j.at("zero_init").get<bool>();
    c.temb_dim = j.at("temb_dim").get<int>();
    c.event_channels = j.at("event_channels").get<int>();
    return c;
}

template <typename V>
void write_raw(std::ofstream& f, const V& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <typename V>
V read_raw(std::ifstream& f) {
    V v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(V));
    return v;
}

}  // namespace

u64 fingerprint_prefix(const ParameterStore<float>& store, const std::string& prefix) {
    u64 h = 0xcbf29ce484222325ull;
    for (const auto& p : store.all()) {
        if (p->name.rfind(prefix, 0) != 0) continue;
        h = fnv1a(p->name.data(), p->name.size(), h);
        h = fnv1a(p->value.shape.data(), p->value.shape.size() * sizeof(i64), h);
        h = fnv1a(p->value.data.data(), p->value.data.size() * sizeof(float), h);
    }
    return h;
}

void save_checkpoint(const std::string& dir, const ParameterStore<float>& store,
                     const CheckpointMeta& meta) {
    std::filesystem::create_directories(dir);

    {
        std::ofstream f(dir + "/params.bin", std::ios::binary);
        check_parse(f.good(), "save_checkpoint: cannot open " + dir + "/params.bin");
        f.write(kMagic, 8);
        write_raw<u64>(f, store.all().size());
        for (const auto& p : store.all()) {
            write_raw<u64>(f, p->name.size());
            f.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
            write_raw<u8>(f, p->trainable ? 1 : 0);
            write_raw<u64>(f, p->value.shape.size());
            for (i64 d : p->value.shape) write_raw<i64>(f, d);
            f.write(reinterpret_cast<const char*>(p->value.data.data()),
                    static_cast<std::streamsize>(p->value.data.size() * sizeof(float)));
        }
        check_parse(f.good(), "save_checkpoint: write failed");
    }

    json j;
    j["version"] = meta.version;
    j["kind"] = meta.kind;
    j["backbone"] = backbone_to_json(meta.backbone);
    j["adaptor"] = meta.adaptor ? adaptor_to_json(*meta.adaptor) : json(nullptr);
    j["latent_scale"] = meta.latent_scale;
    j["schedule"] = meta.schedule;
    j["fingerprint_theta"] = meta.fingerprint_theta;
    j["fingerprint_phi"] = meta.fingerprint_phi;
    j["step"] = meta.step;
    j["rng_state"] = meta.rng_state;
    j["train_config"] = meta.train_config;
    j["params_file"] = "params.bin";
    // parameter inventory for shape auditing
    json shapes = json::array();
    for (const auto& p : store.all())
        shapes.push_back(json{{"name", p->name}, {"shape", p->value.shape}});
    j["parameters"] = shapes;

    std::ofstream mf(dir + "/manifest.json", std::ios::binary);
    check_parse(mf.good(), "save_checkpoint: cannot open " + dir + "/manifest.json");
    mf << j.dump(2) << '\n';
    check_parse(mf.good(), "save_checkpoint: manifest write failed");
}

CheckpointMeta read_checkpoint_meta(const std::string& dir) {
    std::ifstream mf(dir + "/manifest.json", std::ios::binary);
    check_parse(mf.good(), "checkpoint: cannot open " + dir + "/manifest.json");
    json j;
    try {
        mf >> j;
    } catch (const json::exception& ex) {
        throw std::runtime_error(dir + "/manifest.json: invalid JSON: " + ex.what());
    }
    CheckpointMeta meta;
    meta.version = j.at("version").get<int>();
    meta.kind = j.at("kind").get<std::string>();
    meta.backbone = backbone_from_json(j.at("backbone"));
    if (!j.at("adaptor").is_null()) meta.adaptor = adaptor_from_json(j.at("adaptor"));
    meta.latent_scale = j.at("latent_scale").get<int>();
    meta.schedule = j.at("schedule").get<std::string>();
    meta.fingerprint_theta = j.at("fingerprint_theta").get<std::string>();
    meta.fingerprint_phi = j.at("fingerprint_phi").get<std::string>();
    meta.step = j.at("step").get<i64>();
    meta.rng_state = j.at("rng_state").get<std::string>();
    meta.train_config = j.at("train_config").get<std::string>();
    return meta;
}

CheckpointMeta load_checkpoint(const std::string& dir, ParameterStore<float>& store) {
    CheckpointMeta meta = read_checkpoint_meta(dir);

    std::ifstream f(dir + "/params.bin", std::ios::binary);
    check_parse(f.good(), "checkpoint: cannot open " + dir + "/params.bin");
    char magic[8];
    f.read(magic, 8);
    check_parse(f.good() && std::memcmp(magic, kMagic, 8) == 0,
                dir + "/params.bin: bad magic");
    const u64 count = read_raw<u64>(f);
    for (u64 i = 0; i < count; ++i) {
        const u64 name_len = read_raw<u64>(f);
        check_parse(f.good() && name_len < 4096, dir + "/params.bin: corrupt name length");
        std::string name(name_len, '\0');
        f.read(name.data(), static_cast<std::streamsize>(name_len));
        const u8 trainable = read_raw<u8>(f);
        const u64 ndim = read_raw<u64>(f);
        check_parse(f.good() && ndim <= 8, dir + "/params.bin: corrupt rank");
        std::vector<i64> shape(ndim);
        for (u64 d = 0; d < ndim; ++d) shape[d] = read_raw<i64>(f);
        Tensor<float> t(shape);
        f.read(reinterpret_cast<char*>(t.data.data()),
               static_cast<std::streamsize>(t.data.size() * sizeof(float)));
        check_parse(f.good(), dir + "/params.bin: truncated tensor data for " + name);
        store.insert(name, std::move(t), trainable != 0);
    }
    return meta;
}

}  // namespace trw
