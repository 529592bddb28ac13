#include "trw/event_io.hpp"

#include <charconv>
#include <fstream>
#include <string>

#include <json.hpp>

namespace trw {

namespace {

bool parse_i64(const std::string& field, i64& out) {
    const char* b = field.data();
    const char* e = b + field.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e && !field.empty();
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

std::string event_meta_path(const std::string& csv_path) {
    const std::string suffix = ".csv";
    if (csv_path.size() > suffix.size() &&
        csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return csv_path.substr(0, csv_path.size() - suffix.size()) + ".meta.json";
    }
    return csv_path + ".meta.json";
}

void write_events(const EventStream& s, const std::string& csv_path) {
    s.validate();
    std::ofstream f(csv_path, std::ios::binary);
    check_parse(f.good(), "write_events: cannot open " + csv_path);
    f << "t,x,y,p\n";
    for (const Event& e : s.events) {
        f << e.t << ',' << e.x << ',' << e.y << ',' << int(e.p) << '\n';
    }
    check_parse(f.good(), "write_events: write failed for " + csv_path);
    f.close();

    nlohmann::json meta = {
        {"width", s.width},
        {"height", s.height},
        {"t_start_us", s.t_start},
        {"t_end_us", s.t_end},
    };
    std::ofstream m(event_meta_path(csv_path), std::ios::binary);
    check_parse(m.good(), "write_events: cannot open " + event_meta_path(csv_path));
    m << meta.dump(2) << '\n';
    check_parse(m.good(), "write_events: write failed for meta sidecar");
}

EventStream read_events(const std::string& csv_path) {
    EventStream s;
    {
        std::ifstream m(event_meta_path(csv_path), std::ios::binary);
        check_parse(m.good(), "read_events: missing sidecar " + event_meta_path(csv_path));
        nlohmann::json meta;
        try {
            m >> meta;
        } catch (const nlohmann::json::exception& ex) {
            throw std::runtime_error(event_meta_path(csv_path) + ": invalid JSON: " + ex.what());
        }
        for (const char* key : {"width", "height", "t_start_us", "t_end_us"}) {
            check_parse(meta.contains(key),
                        event_meta_path(csv_path) + ": missing key '" + key + "'");
        }
        s.width = meta["width"].get<int>();
        s.height = meta["height"].get<int>();
        s.t_start = meta["t_start_us"].get<i64>();
        s.t_end = meta["t_end_us"].get<i64>();
    }
    check_parse(s.width > 0 && s.height > 0, event_meta_path(csv_path) + ": bad sensor size");
    check_parse(s.t_end > s.t_start, event_meta_path(csv_path) + ": bad window");

    std::ifstream f(csv_path, std::ios::binary);
    check_parse(f.good(), "read_events: cannot open " + csv_path);
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(f, line)) fail(csv_path, 1, "empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,x,y,p") fail(csv_path, lineno, "bad header, expected 't,x,y,p'");

    i64 prev_t = s.t_start;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            // allow a single trailing newline
            if (f.peek() == EOF) break;
            fail(csv_path, lineno, "empty row");
        }
        std::string fields[4];
        int nf = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (nf >= 4) fail(csv_path, lineno, "too many fields");
                fields[nf++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (nf != 4) fail(csv_path, lineno, "expected 4 fields, got " + std::to_string(nf));

        i64 t, x, y, p;
        if (!parse_i64(fields[0], t)) fail(csv_path, lineno, "bad t '" + fields[0] + "'");
        if (!parse_i64(fields[1], x)) fail(csv_path, lineno, "bad x '" + fields[1] + "'");
        if (!parse_i64(fields[2], y)) fail(csv_path, lineno, "bad y '" + fields[2] + "'");
        if (!parse_i64(fields[3], p)) fail(csv_path, lineno, "bad p '" + fields[3] + "'");
        if (p != 0 && p != 1) fail(csv_path, lineno, "polarity must be 0 or 1");
        if (x < 0 || x >= s.width || y < 0 || y >= s.height)
            fail(csv_path, lineno, "coordinates out of bounds");
        if (t < prev_t) fail(csv_path, lineno, "timestamps not sorted");
        if (t < s.t_start || t >= s.t_end) fail(csv_path, lineno, "timestamp outside window");
        prev_t = t;
        s.events.push_back(Event{t, static_cast<int>(x), static_cast<int>(y), static_cast<u8>(p)});
    }
    return s;
}

}  // namespace trw
