#pragma once

// Epoch loop binding plant, triggers, network and controller. Sensors
// sample at each epoch start, commands take effect at their delivery
// offsets inside the epoch, and the plant integrates on a fixed dt grid.

#include "wcb/control.hpp"
#include "wcb/plant.hpp"
#include "wcb/profile.hpp"
#include "wcb/protocol.hpp"
#include "wcb/trigger.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wcb::cosim {

enum class X3Mode {
  Continuous,  // sampled from the plant's integrator
  Discrete,    // x3 += h * x1 on true samples
  DiscreteNoisy,  // x3 += h * x1 on noisy samples
};

std::string to_string(X3Mode m);
X3Mode parse_x3_mode(const std::string& s);

struct NoiseConfig {
  double level_std = 0.0;  // [m]
  double flow_std = 0.0;   // [m^3/min], mapped to x2 through its static gain
};

struct Scenario {
  std::string name = "custom";
  protocol::Variant variant = protocol::Variant::WcbE;
  int epochs = 1440;
  double epoch_s = 60.0;
  double dt = 0.001;  // [min]
  std::uint64_t seed = 1;
  double trajectory_stride = 0.1;  // [min]
  bool bootstrap = true;           // every node takes part in epoch 0

  plant::PoolSet pools = plant::wis_pools();
  plant::PoolVector y0 = plant::PoolVector::Constant(0.05);
  plant::DisturbanceSchedule disturbances = plant::DisturbanceSchedule::wis_default();
  X3Mode x3_mode = X3Mode::Continuous;

  control::LqrWeights weights = control::LqrWeights::wis_default();
  trigger::TriggerParams trigger = trigger::TriggerParams::wis_default();

  profile::Profile network = profile::hall();
  bool lossless = false;

  NoiseConfig noise;

  /// Throws ScenarioError on invalid combinations.
  void validate() const;

  /// Epoch and slot configuration actually used by the run.
  protocol::EpochConfig epoch_config() const;
  protocol::SlotConfig slot_config() const;
};

struct TrajectorySample {
  double t = 0.0;
  plant::PoolVector y, u;
  double d5 = 0.0;
};

struct Metrics {
  plant::PoolVector iae = plant::PoolVector::Zero();
  double iae_sum = 0.0;
  double iae_max = 0.0;
  int sample_count = 0;
  double dc_pct = 0.0;
  double mean_latency_ms = 0.0;
  double max_latency_ms = 0.0;
  double latency_std_ms = 0.0;
  int epochs_with_missing = 0;
  int actuator_misses = 0;  // actuator-epochs of a collection that got no command
};

struct RunReport {
  std::string testbed;
  protocol::Variant variant = protocol::Variant::WcbE;
  std::uint64_t seed = 0;
  std::vector<TrajectorySample> trajectory;
  std::vector<protocol::EpochTrace> traces;
  Metrics metrics;
};

/// Throws NonFiniteState if the plant diverges, ScenarioError on bad input,
/// NoStabilizingSolution if the controller cannot be designed.
RunReport run_experiment(const Scenario& scenario);

/// Same, reusing a precomputed gain.
RunReport run_experiment(const Scenario& scenario, const control::ControllerGain& gain);

/// (1/T) * integral of |x - x_star| by the trapezoidal rule on a uniform grid
/// of spacing dt starting at 0; T = (samples - 1) * dt. Throws EmptyGrid.
double iae(const std::vector<double>& samples, double x_star, double dt);

/// Per-pool IAE, sums and maxima.
struct IaeSummary {
  double sum = 0.0;
  double max = 0.0;
};
IaeSummary iae_summary(const plant::PoolVector& iae);

/// Duty cycle in percent: mean over nodes of radio-on over the run length.
double duty_cycle_pct(const std::vector<protocol::EpochTrace>& traces, int nodes, double run_ms);

}  // namespace wcb::cosim
