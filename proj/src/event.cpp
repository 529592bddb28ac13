#include "trw/event.hpp"

#include <algorithm>
#include <string>

namespace trw {

bool EventStream::operator==(const EventStream& o) const {
    if (width != o.width || height != o.height || t_start != o.t_start || t_end != o.t_end)
        return false;
    if (events.size() != o.events.size()) return false;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& a = events[i];
        const Event& b = o.events[i];
        if (a.t != b.t || a.x != b.x || a.y != b.y || a.p != b.p) return false;
    }
    return true;
}

void EventStream::validate() const {
    check_arg(width > 0 && height > 0, "EventStream: sensor size must be positive");
    check_arg(t_end > t_start, "EventStream: empty or inverted window");
    i64 prev = t_start;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        check_arg(e.p <= 1, "EventStream: polarity out of {0,1} at index " + std::to_string(i));
        check_arg(e.x >= 0 && e.x < width && e.y >= 0 && e.y < height,
                  "EventStream: coordinates out of bounds at index " + std::to_string(i));
        check_arg(e.t >= prev, "EventStream: timestamps not sorted at index " + std::to_string(i));
        check_arg(e.t >= t_start && e.t < t_end,
                  "EventStream: timestamp outside window at index " + std::to_string(i));
        prev = e.t;
    }
}

EventStream slice_window(const EventStream& s, i64 t0, i64 t1) {
    check_range(t0 < t1, "slice_window: t0 must be < t1");
    check_range(t0 >= s.t_start && t1 <= s.t_end, "slice_window: slice outside stream window");
    EventStream out;
    out.width = s.width;
    out.height = s.height;
    out.t_start = t0;
    out.t_end = t1;
    auto lo = std::lower_bound(s.events.begin(), s.events.end(), t0,
                               [](const Event& e, i64 t) { return e.t < t; });
    auto hi = std::lower_bound(lo, s.events.end(), t1,
                               [](const Event& e, i64 t) { return e.t < t; });
    out.events.assign(lo, hi);
    return out;
}

EventImage to_event_image(const EventStream& s) {
    check_range(s.t_end > s.t_start, "to_event_image: degenerate window");
    const int H = s.height, W = s.width;
    EventImage img;
    img.t_start = s.t_start;
    img.t_end = s.t_end;
    img.data.resize({3, H, W});

    std::vector<i64> n_pos(static_cast<std::size_t>(H * W), 0);
    std::vector<i64> n_neg(static_cast<std::size_t>(H * W), 0);
    std::vector<double> ts_pos(static_cast<std::size_t>(H * W), 0.0);
    std::vector<double> ts_neg(static_cast<std::size_t>(H * W), 0.0);

    const double span = static_cast<double>(s.t_end - s.t_start);
    for (const Event& e : s.events) {
        const std::size_t i = static_cast<std::size_t>(e.y * W + e.x);
        const double tn = static_cast<double>(e.t - s.t_start) / span;
        if (e.p) {
            n_pos[i] += 1;
            ts_pos[i] += tn;
        } else {
            n_neg[i] += 1;
            ts_neg[i] += tn;
        }
    }

    i64 max_n = 0;
    for (std::size_t i = 0; i < n_pos.size(); ++i) max_n = std::max(max_n, n_pos[i] + n_neg[i]);

    double* ch0 = img.data.ptr();
    double* ch1 = ch0 + H * W;
    double* ch2 = ch1 + H * W;
    for (std::size_t i = 0; i < n_pos.size(); ++i) {
        const i64 n = n_pos[i] + n_neg[i];
        ch0[i] = max_n > 0 ? static_cast<double>(n) / static_cast<double>(max_n) : 0.0;
        ch1[i] = n_pos[i] > 0 ? ts_pos[i] / static_cast<double>(n_pos[i]) : 0.0;
        ch2[i] = n_neg[i] > 0 ? ts_neg[i] / static_cast<double>(n_neg[i]) : 0.0;
    }
    return img;
}

EventVideo to_event_video(const EventStream& s, int frame_count) {
    check_arg(frame_count >= 1, "to_event_video: frame count must be >= 1");
    const i64 span = s.t_end - s.t_start;
    check_arg(span >= frame_count, "to_event_video: window shorter than frame count (us)");
    EventVideo video;
    video.frames.reserve(static_cast<std::size_t>(frame_count));
    for (int k = 0; k < frame_count; ++k) {
        const i64 b0 = s.t_start + span * k / frame_count;
        const i64 b1 = s.t_start + span * (k + 1) / frame_count;
        video.frames.push_back(to_event_image(slice_window(s, b0, b1)));
    }
    return video;
}

}  // namespace trw
