#pragma once

#include "evsim/types.hpp"

namespace evsim {

/// Per-pixel signed subtraction curr - prev. Throws on dimension mismatch.
DifferenceFrame difference_frame(const Frame& prev, const Frame& curr);

/// Thresholds a difference frame: value > c_pos emits a positive event,
/// value < c_neg a negative one (strict inequalities). All events carry
/// event_time. In magnitude mode a pixel emits floor(|value| / |threshold|)
/// events instead of one.
std::vector<Event> threshold_events(const DifferenceFrame& diff, const SimulatorConfig& config,
                                    time_us event_time);

/// threshold_events into an existing vector, avoids reallocation in pipelines.
void threshold_events_into(const DifferenceFrame& diff, const SimulatorConfig& config,
                           time_us event_time, std::vector<Event>& out);

}  // namespace evsim
