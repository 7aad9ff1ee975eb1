#pragma once

// Closed-form per-epoch radio-on time and duty cycle for both variants.

#include "wcb/protocol.hpp"

#include <vector>

namespace wcb::energy {

struct TonEstimate {
  double ton_e_ms = 0.0;
  double ton_p_ms = 0.0;
  double dc_e_pct = 0.0;
  double dc_p_pct = 0.0;

  double savings() const { return 1.0 - dc_e_pct / dc_p_pct; }
};

/// Radio-on of a lossless WCB-P epoch: S, K x T, A, C x CTRL.
double periodic_epoch_ton(const protocol::EpochConfig& cfg, const protocol::SlotConfig& slots);

/// Radio-on of a quiet WCB-E epoch: S plus E x EV.
double quiet_epoch_ton(const protocol::EpochConfig& cfg, const protocol::SlotConfig& slots);

/// T_on,E = F (T_on,P + E t_EV) + (1 - F)(t_S + E t_EV); DC = T_on / T_epoch.
TonEstimate analytic_ton(const protocol::EpochConfig& cfg, const protocol::SlotConfig& slots, double f_ev);

/// Event fraction at which both variants consume the same energy.
double break_even_fev(const protocol::EpochConfig& cfg, const protocol::SlotConfig& slots);

struct SweepRow {
  double epoch_s = 0.0;
  int events = 0;
  int epochs = 0;
  TonEstimate estimate;
};

/// One row per epoch duration over an experiment of `duration_s` seconds,
/// with the number of event epochs observed at that duration.
std::vector<SweepRow> epoch_sweep(const protocol::EpochConfig& cfg, const protocol::SlotConfig& slots,
                                  const std::vector<double>& epoch_s, const std::vector<int>& events,
                                  double duration_s = 86400.0);

/// Event counts observed per epoch duration over one day, for 60, 45, 30, 15, 5 and 1 s.
struct ReferenceSweep {
  std::vector<double> epoch_s{60, 45, 30, 15, 5, 1};
  std::vector<int> events{187, 195, 211, 234, 237, 268};
};

}  // namespace wcb::energy
