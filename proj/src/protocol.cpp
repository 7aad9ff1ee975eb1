#include "wcb/protocol.hpp"

#include "wcb/errors.hpp"

#include <algorithm>
#include <cmath>

namespace wcb::protocol {

using rng::SlotKind;
using rng::slot_id;
using rng::Stream;

std::string to_string(Variant v) { return v == Variant::WcbE ? "WCB-E" : "WCB-P"; }

std::string to_string(SlotType t) {
  switch (t) {
    case SlotType::S: return "S";
    case SlotType::EV: return "EV";
    case SlotType::T: return "T";
    case SlotType::A: return "A";
    case SlotType::Ctrl: return "CTRL";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "WCB-E" || s == "wcb-e" || s == "etc" || s == "E") return Variant::WcbE;
  if (s == "WCB-P" || s == "wcb-p" || s == "periodic" || s == "P") return Variant::WcbP;
  throw ConfigError("unknown variant '" + s + "'");
}

double SdrTable::at(int U, int E) const {
  if (U <= 0 || E <= 0 || senders.empty()) return 0.0;
  auto interp = [&](const std::vector<double>& col) {
    if (U <= senders.front()) return col.front();
    if (U >= senders.back()) return col.back();
    const auto hi = std::upper_bound(senders.begin(), senders.end(), U) - senders.begin();
    const auto lo = hi - 1;
    const double w = double(U - senders[lo]) / double(senders[hi] - senders[lo]);
    return col[lo] + w * (col[hi] - col[lo]);
  };
  const double one = interp(e1);
  if (E == 1) return one;
  if (E == 2 && e2.size() == senders.size()) return interp(e2);
  return 1.0 - std::pow(1.0 - one, E);
}

const SlotParams& SlotConfig::operator[](SlotType t) const {
  switch (t) {
    case SlotType::S: return S;
    case SlotType::EV: return EV;
    case SlotType::T: return T;
    case SlotType::A: return A;
    case SlotType::Ctrl: return Ctrl;
  }
  return S;
}

double SlotConfig::contention(int U) const {
  if (contention_success.empty() || U <= 0) return sink_pdr();
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(U - 1), contention_success.size() - 1);
  return contention_success[idx];
}

SlotConfig SlotConfig::lossless() const {
  SlotConfig c = *this;
  for (SlotParams* p : {&c.S, &c.EV, &c.T, &c.A, &c.Ctrl}) p->pdr = 1.0;
  std::fill(c.sdr.e1.begin(), c.sdr.e1.end(), 1.0);
  std::fill(c.sdr.e2.begin(), c.sdr.e2.end(), 1.0);
  if (c.sink_pdr_T) c.sink_pdr_T = 1.0;
  std::fill(c.contention_success.begin(), c.contention_success.end(), 1.0);
  return c;
}

void validate(const EpochConfig& cfg, const SlotConfig& slots) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  for (SlotType t : {SlotType::S, SlotType::EV, SlotType::T, SlotType::A, SlotType::Ctrl}) {
    const auto& s = slots[t];
    const std::string tag = "slot " + to_string(t) + ": ";
    if (!(s.duration_ms > 0.0)) throw ConfigError(tag + "duration must be positive");
    if (!prob(s.pdr)) throw ConfigError(tag + "pdr must lie in [0, 1]");
    if (!(s.t_on_ms >= 0.0) || s.t_on_ms > s.duration_ms + cfg.gap_ms) {
      throw ConfigError(tag + "radio-on time must lie in [0, W + gap]");
    }
    if (s.retransmissions < 1) throw ConfigError(tag + "retransmissions must be >= 1");
  }
  if (slots.sdr.senders.size() != slots.sdr.e1.size() ||
      (!slots.sdr.e2.empty() && slots.sdr.e2.size() != slots.sdr.senders.size())) {
    throw ConfigError("SDR table columns have different lengths");
  }
  if (!std::is_sorted(slots.sdr.senders.begin(), slots.sdr.senders.end())) {
    throw ConfigError("SDR table sender counts must be increasing");
  }
  for (double v : slots.sdr.e1) if (!prob(v)) throw ConfigError("SDR values must lie in [0, 1]");
  for (double v : slots.sdr.e2) if (!prob(v)) throw ConfigError("SDR values must lie in [0, 1]");
  if (slots.sink_pdr_T && !prob(*slots.sink_pdr_T)) throw ConfigError("sink T pdr must lie in [0, 1]");
  for (double v : slots.contention_success) if (!prob(v)) throw ConfigError("contention success must lie in [0, 1]");

  if (cfg.K < 1) throw ConfigError("K must be >= 1");
  if (cfg.R < 0) throw ConfigError("R must be >= 0");
  if (cfg.C < 1) throw ConfigError("C must be >= 1");
  if (cfg.variant == Variant::WcbE && cfg.E < 1) throw ConfigError("WCB-E needs E >= 1");
  if (cfg.actuators < 1) throw ConfigError("at least one actuator is required");
  if (!(cfg.gap_ms >= 0.0) || !(cfg.preamble_ms >= 0.0)) throw ConfigError("gap and preamble must be >= 0");
  if (!(cfg.fp_rate >= 0.0 && cfg.fp_rate <= 1.0)) throw ConfigError("fp_rate must lie in [0, 1]");
  if (!(cfg.epoch_s > 0.0)) throw ConfigError("epoch duration must be positive");
  build_schedule(cfg, slots);
}

double EpochSchedule::ctrl_end(int c) const {
  int seen = 0;
  for (const auto& s : slots) {
    if (s.type == SlotType::Ctrl && seen++ == c) return s.end_ms();
  }
  throw ConfigError("schedule has no CTRL slot " + std::to_string(c));
}

int EpochSchedule::count(SlotType t) const {
  return static_cast<int>(std::count_if(slots.begin(), slots.end(), [t](const Slot& s) { return s.type == t; }));
}

EpochSchedule build_schedule(const EpochConfig& cfg, const SlotConfig& slots) {
  EpochSchedule sched;
  double t = cfg.preamble_ms;
  auto add = [&](SlotType type, int index, int owner, bool recovery) {
    const double w = slots[type].duration_ms;
    sched.slots.push_back({type, index, owner, recovery, t, w});
    t += w + cfg.gap_ms;
  };
  add(SlotType::S, 0, -1, false);
  if (cfg.variant == Variant::WcbE) {
    for (int e = 0; e < cfg.E; ++e) add(SlotType::EV, e, -1, false);
  }
  for (int k = 0; k < cfg.K; ++k) add(SlotType::T, k, sensor_node(k), false);
  add(SlotType::A, 0, kController, false);
  for (int r = 0; r < cfg.R; ++r) {
    add(SlotType::T, r, -1, true);
    add(SlotType::A, r, kController, true);
  }
  for (int c = 0; c < cfg.C; ++c) add(SlotType::Ctrl, c, kController, false);
  sched.active_ms = t;
  if (sched.active_ms >= cfg.epoch_s * 1000.0) {
    throw ConfigError("active portion (" + std::to_string(sched.active_ms) + " ms) does not fit in the epoch");
  }
  return sched;
}

std::vector<bool> flood_outcome(double pdr, const std::vector<bool>& receivers, const rng::Key& key,
                                std::uint32_t slot) {
  std::vector<bool> got(receivers.size(), false);
  for (std::size_t n = 0; n < receivers.size(); ++n) {
    if (receivers[n]) got[n] = key.bernoulli(pdr, Stream::Network, slot, static_cast<std::uint32_t>(n));
  }
  return got;
}

std::vector<bool> event_phase(const std::vector<bool>& triggered_sensors, const EpochConfig& cfg,
                              const SlotConfig& slots, const rng::Key& key) {
  const int n = cfg.node_count();
  std::vector<bool> detected(n, false);
  const int U = static_cast<int>(std::count(triggered_sensors.begin(), triggered_sensors.end(), true));
  if (U == 0) {
    for (int node = 0; node < n; ++node) {
      detected[node] = key.bernoulli(cfg.fp_rate, Stream::FalsePositive, slot_id(SlotKind::EV),
                                     static_cast<std::uint32_t>(node));
    }
    return detected;
  }
  const double sdr = slots.sdr.at(U, cfg.E);
  for (int node = 0; node < n; ++node) {
    const int j = node - 1;
    if (j >= 0 && j < cfg.K && j < static_cast<int>(triggered_sensors.size()) && triggered_sensors[j]) {
      detected[node] = true;
    } else {
      detected[node] = key.bernoulli(sdr, Stream::Network, slot_id(SlotKind::EV),
                                     static_cast<std::uint32_t>(node));
    }
  }
  return detected;
}

bool EpochTrace::collected() const {
  return !participating.empty() && participating[kController] &&
         std::any_of(received.begin(), received.end(), [](bool b) { return b; });
}

EpochTrace run_epoch(const EpochSchedule& schedule, const std::vector<bool>& participating,
                     const EpochConfig& cfg, const SlotConfig& slots, const rng::Key& key) {
  const int n = cfg.node_count();
  if (static_cast<int>(participating.size()) != n) {
    throw DimensionMismatch("run_epoch: participation vector must cover every node");
  }
  EpochTrace tr;
  tr.epoch = static_cast<std::int64_t>(key.epoch);
  tr.participating = participating;
  tr.received.assign(cfg.K, false);
  tr.acknowledged.assign(cfg.K, false);
  tr.latency_ms.assign(cfg.actuators, std::nullopt);

  const int ev_slots = schedule.count(SlotType::EV);
  tr.radio_on_ms.assign(n, slots.S.t_on_ms + ev_slots * slots.EV.t_on_ms);
  tr.event = std::any_of(participating.begin(), participating.end(), [](bool b) { return b; });
  if (!tr.event) return tr;

  const double pair_ms = slots.T.t_on_ms + slots.A.t_on_ms;
  for (int node = 0; node < n; ++node) {
    if (participating[node]) {
      tr.radio_on_ms[node] += cfg.K * slots.T.t_on_ms + slots.A.t_on_ms + cfg.C * slots.Ctrl.t_on_ms;
    }
  }
  auto is_sensor = [&](int node) { return node >= 1 && node <= cfg.K; };
  for (int j = 0; j < cfg.K; ++j) {
    if (participating[sensor_node(j)]) ++tr.missing_after_recovery;
  }

  if (!participating[kController]) {
    // Nobody acknowledges: the other participants wait through every recovery pair.
    for (int node = 1; node < n; ++node) {
      if (participating[node]) tr.radio_on_ms[node] += cfg.R * pair_ms;
    }
    return tr;
  }

  // Collection.
  for (int j = 0; j < cfg.K; ++j) {
    if (participating[sensor_node(j)]) {
      tr.received[j] = key.bernoulli(slots.sink_pdr(), Stream::Network, slot_id(SlotKind::T, j), kController);
    }
  }

  // Acknowledgment, then recovery while any sensor lacks a confirmed bit.
  std::vector<bool> listeners(participating);
  listeners[kController] = false;
  std::vector<bool> awake(n, false);
  auto acknowledge = [&](std::uint32_t slot) {
    const auto heard = flood_outcome(slots.A.pdr, listeners, key, slot);
    for (int node = 1; node < n; ++node) {
      if (!listeners[node]) continue;
      if (is_sensor(node) && heard[node] && tr.received[node - 1]) tr.acknowledged[node - 1] = true;
      awake[node] = !heard[node] || (is_sensor(node) && !tr.received[node - 1]);
    }
    listeners = awake;
  };
  acknowledge(slot_id(SlotKind::A));

  bool ended_early = false;
  for (int r = 0; r < cfg.R; ++r) {
    std::vector<int> contenders;
    for (int j = 0; j < cfg.K; ++j) {
      if (awake[sensor_node(j)]) contenders.push_back(j);
    }
    if (contenders.empty()) {
      ended_early = true;
      break;
    }
    ++tr.recovery_rounds;
    tr.radio_on_ms[kController] += pair_ms;
    for (int node = 1; node < n; ++node) {
      if (awake[node]) tr.radio_on_ms[node] += pair_ms;
    }
    const int U = static_cast<int>(contenders.size());
    if (key.bernoulli(slots.contention(U), Stream::Network, slot_id(SlotKind::RecoveryT, r), kController)) {
      const double draw = key.uniform(Stream::Network, slot_id(SlotKind::Winner, r), kController);
      const int winner = contenders[std::min(U - 1, static_cast<int>(draw * U))];
      tr.received[winner] = true;
    }
    acknowledge(slot_id(SlotKind::RecoveryA, r));
  }
  if (ended_early) {
    // Nodes that missed the last ACK listen to one more silent pair before sleeping.
    for (int node = 1; node < n; ++node) {
      if (awake[node]) tr.radio_on_ms[node] += pair_ms;
    }
  }

  tr.missing_after_recovery = 0;
  for (int j = 0; j < cfg.K; ++j) {
    if (participating[sensor_node(j)] && !tr.received[j]) ++tr.missing_after_recovery;
  }

  // Dissemination.
  for (int i = 0; i < cfg.actuators; ++i) {
    const int node = actuator_node(cfg, i);
    if (!participating[node]) continue;
    for (int c = 0; c < cfg.C; ++c) {
      if (key.bernoulli(slots.Ctrl.pdr, Stream::Network, slot_id(SlotKind::Ctrl, c),
                        static_cast<std::uint32_t>(node))) {
        tr.latency_ms[i] = schedule.ctrl_end(c);
        break;
      }
    }
  }
  return tr;
}

EpochTrace execute_epoch(const EpochSchedule& schedule, const std::vector<bool>& triggered_sensors,
                         const EpochConfig& cfg, const SlotConfig& slots, const rng::Key& key, bool force) {
  std::vector<bool> participating;
  if (force || cfg.variant == Variant::WcbP) {
    participating.assign(cfg.node_count(), true);
  } else {
    participating = event_phase(triggered_sensors, cfg, slots, key);
  }
  EpochTrace tr = run_epoch(schedule, participating, cfg, slots, key);
  tr.U = static_cast<int>(std::count(triggered_sensors.begin(), triggered_sensors.end(), true));
  return tr;
}

double collection_success_prob(double pdr, int K, int max_lost) {
  if (K < 1) throw ConfigError("K must be >= 1");
  const double q = 1.0 - pdr;
  double total = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= std::min(max_lost, K); ++k) {
    if (k > 0) binom = binom * (K - k + 1) / k;
    total += binom * std::pow(q, k) * std::pow(pdr, K - k);
  }
  return std::min(1.0, total);
}

}  // namespace wcb::protocol
