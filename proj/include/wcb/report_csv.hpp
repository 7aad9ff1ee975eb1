#pragma once

// CSV export of run reports: one summary row per run, the trajectory grid,
// and the per-epoch protocol trace.

#include "wcb/cosim.hpp"

#include <ostream>
#include <vector>

namespace wcb::report {

void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const cosim::RunReport& r);

void write_trajectory(std::ostream& out, const cosim::RunReport& r);

/// epoch, event_flag, U, recovery_rounds, latency_ms_1..A, radio_on_ms_0..N-1,
/// missing_after_recovery. Missed commands leave the latency cell empty.
void write_trace(std::ostream& out, const cosim::RunReport& r);

}  // namespace wcb::report
