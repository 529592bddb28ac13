#pragma once

#include <vector>

#include "trw/common.hpp"
#include "trw/tensor.hpp"

namespace trw {

// One polarity event. p = 1 for an intensity increase, 0 for a decrease.
struct Event {
    i64 t = 0;  // microseconds
    int x = 0;
    int y = 0;
    u8 p = 0;
};

// Time-ordered event stream over a sensor window [t_start, t_end).
struct EventStream {
    int width = 0;
    int height = 0;
    i64 t_start = 0;  // microseconds
    i64 t_end = 0;
    std::vector<Event> events;  // non-decreasing t

    bool operator==(const EventStream& o) const;
    void validate() const;  // throws on invariant violations
};

// Dense 3-channel rendering of a windowed stream: normalized event count,
// positive and negative mean normalized timestamps. All entries in [0, 1].
struct EventImage {
    Tensor<double> data;  // (3, H, W)
    i64 t_start = 0;
    i64 t_end = 0;
};

// Per-target-frame event images over contiguous sub-windows.
struct EventVideo {
    std::vector<EventImage> frames;
};

// All events with t0 <= t < t1, order preserved; result window = [t0, t1).
// Requires t0 < t1 and [t0, t1) within the stream window.
EventStream slice_window(const EventStream& s, i64 t0, i64 t1);

EventImage to_event_image(const EventStream& s);

// Splits [t_start, t_end) into frame_count integer-boundary sub-windows
// (sizes differ by at most 1 us when the window is not divisible) and
// accumulates each independently.
EventVideo to_event_video(const EventStream& s, int frame_count);

}  // namespace trw
