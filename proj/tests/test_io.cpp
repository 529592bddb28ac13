#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "trw/event_io.hpp"
#include "trw/png_io.hpp"
#include "trw/rng.hpp"

using namespace trw;

namespace {

struct TempDir {
    std::string path;
    explicit TempDir(std::string p) : path(std::move(p)) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

}  // namespace

TEST_CASE("png round trip is exact for random images") {
    TempDir d("trw_test_png");
    RandomEngine rng(1);
    for (auto [W, H] : {std::pair<int, int>{16, 16}, {33, 7}, {1, 1}, {64, 64}}) {
        std::vector<u8> rgb(static_cast<std::size_t>(3 * W * H));
        for (auto& v : rgb) v = static_cast<u8>(rng.uniform_int(256));
        const std::string p = d.path + "/img.png";
        write_png_rgb8(p, W, H, rgb);
        int w2 = 0, h2 = 0;
        std::vector<u8> back;
        read_png_rgb8(p, w2, h2, back);
        CHECK(w2 == W);
        CHECK(h2 == H);
        CHECK(back == rgb);
    }
}

TEST_CASE("png writes identical bytes for identical pixels") {
    TempDir d("trw_test_png_det");
    RandomEngine rng(2);
    std::vector<u8> rgb(3 * 24 * 24);
    for (auto& v : rgb) v = static_cast<u8>(rng.uniform_int(256));
    write_png_rgb8(d.path + "/a.png", 24, 24, rgb);
    write_png_rgb8(d.path + "/b.png", 24, 24, rgb);
    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    };
    CHECK(slurp(d.path + "/a.png") == slurp(d.path + "/b.png"));
}

TEST_CASE("tensor/rgb8 conversions quantize as expected") {
    Tensor<double> img({3, 2, 2});
    img.fill(0.5);
    img.at3(0, 0, 0) = -0.2;  // clamps to 0
    img.at3(1, 0, 0) = 1.7;   // clamps to 255
    auto rgb = tensor_to_rgb8(img);
    CHECK(rgb[0] == 0);
    CHECK(rgb[1] == 255);
    CHECK(rgb[5] == 128);  // round(0.5*255) = 128
}

TEST_CASE("event file round trip preserves streams exactly") {
    TempDir d("trw_test_events");
    EventStream s;
    s.width = 16;
    s.height = 12;
    s.t_start = 1000;
    s.t_end = 50000;
    s.events = {{1000, 0, 0, 1}, {2500, 15, 11, 0}, {49999, 7, 3, 1}};
    write_events(s, d.path + "/events.csv");
    CHECK(std::filesystem::exists(d.path + "/events.meta.json"));
    EventStream r = read_events(d.path + "/events.csv");
    CHECK(r == s);
}

TEST_CASE("event file round trip on 10k random events") {
    TempDir d("trw_test_events_rand");
    RandomEngine rng(3);
    EventStream s;
    s.width = 64;
    s.height = 64;
    s.t_start = 0;
    s.t_end = 210000;
    for (int i = 0; i < 10000; ++i) {
        Event e;
        e.t = static_cast<i64>(rng.uniform_int(210000));
        e.x = static_cast<int>(rng.uniform_int(64));
        e.y = static_cast<int>(rng.uniform_int(64));
        e.p = static_cast<u8>(rng.uniform_int(2));
        s.events.push_back(e);
    }
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    write_events(s, d.path + "/events.csv");
    EventStream r = read_events(d.path + "/events.csv");
    CHECK(r == s);
}

TEST_CASE("event parser rejects malformed files with line numbers") {
    TempDir d("trw_test_events_bad");
    const std::string meta =
        R"({"width": 8, "height": 8, "t_start_us": 0, "t_end_us": 1000})";

    auto expect_throw = [&](const std::string& csv, const std::string& needle) {
        write_text(d.path + "/events.csv", csv);
        write_text(d.path + "/events.meta.json", meta);
        try {
            read_events(d.path + "/events.csv");
            FAIL_CHECK("expected parse error for: " << needle);
        } catch (const std::runtime_error& ex) {
            const std::string msg = ex.what();
            CHECK(msg.find(needle) != std::string::npos);
        }
    };

    expect_throw("t,x,y\n", "bad header");
    expect_throw("t,x,y,p\n10,1,1,2\n", ":2");          // p out of {0,1}
    expect_throw("t,x,y,p\n10,9,1,1\n", "out of bounds");
    expect_throw("t,x,y,p\n10,1,1,1\n5,1,1,1\n", "not sorted");
    expect_throw("t,x,y,p\n10,1,1\n", "expected 4 fields");
    expect_throw("t,x,y,p\nxx,1,1,1\n", "bad t");
    expect_throw("t,x,y,p\n2000,1,1,1\n", "outside window");
}

TEST_CASE("png reader rejects non-png and truncated input") {
    TempDir d("trw_test_png_bad");
    write_text(d.path + "/x.png", "definitely not a png");
    int w, h;
    std::vector<u8> rgb;
    CHECK_THROWS_AS(read_png_rgb8(d.path + "/x.png", w, h, rgb), std::runtime_error);
}
