#pragma once

#include <string>

#include "trw/event.hpp"

namespace trw {

// Event file format: UTF-8 CSV with header line `t,x,y,p`, one event per
// row, t in integer microseconds, rows sorted by t. Sensor geometry and the
// window live in a JSON sidecar (width, height, t_start_us, t_end_us) named
// by replacing the `.csv` suffix with `.meta.json`.

std::string event_meta_path(const std::string& csv_path);

void write_events(const EventStream& s, const std::string& csv_path);

// Throws std::runtime_error naming the offending line on malformed rows,
// unsorted timestamps or out-of-bounds coordinates.
EventStream read_events(const std::string& csv_path);

}  // namespace trw
