#include "wcb/report_csv.hpp"

#include <cstdio>
#include <string>

namespace wcb::report {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_summary_header(std::ostream& out) {
  out << "seed,variant,testbed,sample_count,IAE_sum,IAE_max,DC_pct,mean_latency_ms\n";
}

void write_summary_row(std::ostream& out, const cosim::RunReport& r) {
  const auto& m = r.metrics;
  out << r.seed << ',' << protocol::to_string(r.variant) << ',' << r.testbed << ',' << m.sample_count << ','
      << num(m.iae_sum) << ',' << num(m.iae_max) << ',' << num(m.dc_pct) << ','
      << num(m.mean_latency_ms) << '\n';
}

void write_trajectory(std::ostream& out, const cosim::RunReport& r) {
  out << "t_min";
  for (int i = 1; i <= plant::kPools; ++i) out << ",y" << i;
  for (int i = 1; i <= plant::kPools; ++i) out << ",u" << i;
  out << ",d5\n";
  for (const auto& s : r.trajectory) {
    out << num(s.t);
    for (int i = 0; i < plant::kPools; ++i) out << ',' << num(s.y[i]);
    for (int i = 0; i < plant::kPools; ++i) out << ',' << num(s.u[i]);
    out << ',' << num(s.d5) << '\n';
  }
}

void write_trace(std::ostream& out, const cosim::RunReport& r) {
  const std::size_t actuators = r.traces.empty() ? plant::kPools : r.traces.front().latency_ms.size();
  const std::size_t nodes = r.traces.empty() ? 0 : r.traces.front().radio_on_ms.size();
  out << "epoch,event_flag,U,recovery_rounds";
  for (std::size_t i = 1; i <= actuators; ++i) out << ",latency_ms_" << i;
  for (std::size_t n = 0; n < nodes; ++n) out << ",radio_on_ms_" << n;
  out << ",missing_after_recovery\n";
  for (const auto& t : r.traces) {
    out << t.epoch << ',' << (t.event ? 1 : 0) << ',' << t.U << ',' << t.recovery_rounds;
    for (const auto& l : t.latency_ms) {
      out << ',';
      if (l) out << num(*l);
    }
    for (double on : t.radio_on_ms) out << ',' << num(on);
    out << ',' << t.missing_after_recovery << '\n';
  }
}

}  // namespace wcb::report
