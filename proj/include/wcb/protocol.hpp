#pragma once

// Slot-level model of one Wireless Control Bus epoch. Floods are abstracted
// as per-receiver Bernoulli trials with per-slot-type delivery rates; all
// draws come from the counter-based generator in rng.hpp.
//
// Node numbering: 0 is the controller, 1..K the sensors (sensor j owns T
// slot j), K+1..K+A the actuators.

#include "wcb/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wcb::protocol {

enum class Variant { WcbE, WcbP };
enum class SlotType { S, EV, T, A, Ctrl };

std::string to_string(Variant v);
std::string to_string(SlotType t);
Variant parse_variant(const std::string& s);

struct SlotParams {
  int retransmissions = 1;
  double duration_ms = 0.0;  // W
  double pdr = 1.0;
  double t_on_ms = 0.0;      // radio-on charged per node per slot awake
};

/// Event-phase signal detection rate as a function of concurrent senders U,
/// tabulated for one and two EV slots. Linear in U between rows, clamped
/// beyond the last row; other E use 1 - (1 - sdr_1)^E.
struct SdrTable {
  std::vector<int> senders;
  std::vector<double> e1;
  std::vector<double> e2;

  double at(int U, int E) const;
};

struct SlotConfig {
  SlotParams S, EV, T, A, Ctrl;
  SdrTable sdr;
  std::optional<double> sink_pdr_T;         // controller-side T delivery, defaults to T.pdr
  std::vector<double> contention_success;   // by U-1; empty means sink T delivery for any U

  const SlotParams& operator[](SlotType t) const;
  double sink_pdr() const { return sink_pdr_T.value_or(T.pdr); }
  double contention(int U) const;

  /// Copy with every pdr and sdr set to 1.
  SlotConfig lossless() const;
};

struct EpochConfig {
  Variant variant = Variant::WcbE;
  double epoch_s = 60.0;
  int K = 10;          // sensor T slots (one per sensor)
  int E = 2;           // EV slots
  int R = 3;           // recovery T/A pairs
  int C = 2;           // CTRL slots
  int actuators = 5;
  double gap_ms = 2.0;
  double preamble_ms = 0.0;
  double fp_rate = 3e-5;

  int node_count() const { return 1 + K + actuators; }
};

inline constexpr int kController = 0;
inline int sensor_node(int j) { return 1 + j; }
inline int actuator_node(const EpochConfig& cfg, int i) { return 1 + cfg.K + i; }

/// Throws ConfigError on violated slot or epoch invariants.
void validate(const EpochConfig& cfg, const SlotConfig& slots);

struct Slot {
  SlotType type;
  int index = 0;        // position among slots of the same phase
  int owner = -1;       // sensor node for collection T slots, -1 if shared
  bool recovery = false;
  double start_ms = 0.0;
  double duration_ms = 0.0;

  double end_ms() const { return start_ms + duration_ms; }
};

struct EpochSchedule {
  std::vector<Slot> slots;
  double active_ms = 0.0;  // end of the last slot plus its gap

  /// End of the c-th dissemination slot, relative to epoch start.
  double ctrl_end(int c) const;
  int count(SlotType t) const;
};

/// preamble, S, E x EV (WCB-E only), K x T, A, R x (T, A), C x CTRL with
/// `gap` after every slot. Recovery slots are always scheduled.
/// Throws ConfigError if the active portion does not fit in the epoch.
EpochSchedule build_schedule(const EpochConfig& cfg, const SlotConfig& slots);

/// Independent reception per node in `receivers` with probability pdr.
std::vector<bool> flood_outcome(double pdr, const std::vector<bool>& receivers, const rng::Key& key,
                                std::uint32_t slot);

/// Per-node event detection. Triggered sensors always detect; with U > 0
/// every other node detects with sdr(U, E); with U = 0 each node detects
/// falsely with probability fp_rate.
std::vector<bool> event_phase(const std::vector<bool>& triggered_sensors, const EpochConfig& cfg,
                              const SlotConfig& slots, const rng::Key& key);

struct EpochTrace {
  std::int64_t epoch = 0;
  bool event = false;          // at least one node took part beyond the event phase
  int U = 0;                   // triggered sensors
  std::vector<bool> participating;      // per node
  std::vector<bool> received;           // per sensor: reading at the controller
  std::vector<bool> acknowledged;       // per sensor: heard an ACK carrying its own bit
  std::vector<std::optional<double>> latency_ms;  // per actuator, end of first received CTRL
  std::vector<double> radio_on_ms;      // per node
  int recovery_rounds = 0;
  int missing_after_recovery = 0;       // participating sensors never received

  bool collected() const;               // controller took part and holds at least one reading
};

/// Collection, acknowledgment, recovery and dissemination for the given
/// participants (per node). Nodes sleep as soon as they hold a complete
/// acknowledgment; the controller only runs recovery rounds while some
/// sensor still contends.
EpochTrace run_epoch(const EpochSchedule& schedule, const std::vector<bool>& participating,
                     const EpochConfig& cfg, const SlotConfig& slots, const rng::Key& key);

/// Event phase followed by run_epoch. WCB-P (or `force`) makes every node participate.
EpochTrace execute_epoch(const EpochSchedule& schedule, const std::vector<bool>& triggered_sensors,
                         const EpochConfig& cfg, const SlotConfig& slots, const rng::Key& key,
                         bool force = false);

/// P(at most max_lost of K independent floods fail) at delivery rate pdr.
double collection_success_prob(double pdr, int K, int max_lost);

}  // namespace wcb::protocol
