#include "wcb/energy.hpp"

#include "wcb/errors.hpp"

#include <cmath>

namespace wcb::energy {

double periodic_epoch_ton(const protocol::EpochConfig& cfg, const protocol::SlotConfig& slots) {
  return slots.S.t_on_ms + cfg.K * slots.T.t_on_ms + slots.A.t_on_ms + cfg.C * slots.Ctrl.t_on_ms;
}

double quiet_epoch_ton(const protocol::EpochConfig& cfg, const protocol::SlotConfig& slots) {
  return slots.S.t_on_ms + cfg.E * slots.EV.t_on_ms;
}

TonEstimate analytic_ton(const protocol::EpochConfig& cfg, const protocol::SlotConfig& slots, double f_ev) {
  if (!(f_ev >= 0.0 && f_ev <= 1.0)) throw ConfigError("F_ev must lie in [0, 1]");
  TonEstimate est;
  est.ton_p_ms = periodic_epoch_ton(cfg, slots);
  const double ev = cfg.E * slots.EV.t_on_ms;
  est.ton_e_ms = f_ev * (est.ton_p_ms + ev) + (1.0 - f_ev) * quiet_epoch_ton(cfg, slots);
  const double epoch_ms = cfg.epoch_s * 1000.0;
  est.dc_e_pct = 100.0 * est.ton_e_ms / epoch_ms;
  est.dc_p_pct = 100.0 * est.ton_p_ms / epoch_ms;
  return est;
}

double break_even_fev(const protocol::EpochConfig& cfg, const protocol::SlotConfig& slots) {
  const double p = periodic_epoch_ton(cfg, slots);
  const double quiet = quiet_epoch_ton(cfg, slots);
  const double denom = p - slots.S.t_on_ms;
  if (!(denom > 0.0)) throw ConfigError("periodic epoch must cost more than the S slot alone");
  return (p - quiet) / denom;
}

std::vector<SweepRow> epoch_sweep(const protocol::EpochConfig& cfg, const protocol::SlotConfig& slots,
                                  const std::vector<double>& epoch_s, const std::vector<int>& events,
                                  double duration_s) {
  if (epoch_s.size() != events.size()) throw ConfigError("one event count per epoch duration is required");
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < epoch_s.size(); ++k) {
    SweepRow row;
    row.epoch_s = epoch_s[k];
    row.events = events[k];
    row.epochs = static_cast<int>(std::lround(duration_s / epoch_s[k]));
    if (row.epochs < 1 || row.events < 0 || row.events > row.epochs) {
      throw ConfigError("event count out of range for epoch duration " + std::to_string(epoch_s[k]));
    }
    protocol::EpochConfig c = cfg;
    c.epoch_s = epoch_s[k];
    row.estimate = analytic_ton(c, slots, double(row.events) / row.epochs);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wcb::energy
