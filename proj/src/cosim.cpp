#include "wcb/cosim.hpp"

#include "wcb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wcb::cosim {

using control::x1_index;
using control::x2_index;
using control::x3_index;
using plant::kPools;
using plant::PoolVector;

std::string to_string(X3Mode m) {
  switch (m) {
    case X3Mode::Continuous: return "continuous";
    case X3Mode::Discrete: return "discrete";
    case X3Mode::DiscreteNoisy: return "discrete_noisy";
  }
  return "?";
}

X3Mode parse_x3_mode(const std::string& s) {
  if (s == "continuous") return X3Mode::Continuous;
  if (s == "discrete") return X3Mode::Discrete;
  if (s == "discrete_noisy") return X3Mode::DiscreteNoisy;
  throw ScenarioError("unknown x3 mode '" + s + "'");
}

protocol::EpochConfig Scenario::epoch_config() const {
  protocol::EpochConfig c = network.epoch;
  c.variant = variant;
  c.epoch_s = epoch_s;
  if (lossless) c.fp_rate = 0.0;
  return c;
}

protocol::SlotConfig Scenario::slot_config() const {
  return lossless ? network.slots.lossless() : network.slots;
}

namespace {

std::int64_t steps_per_epoch(double epoch_s, double dt) {
  const double ratio = epoch_s / 60.0 / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * ratio) {
    throw ScenarioError("integration step must divide the epoch duration");
  }
  return static_cast<std::int64_t>(rounded);
}

}  // namespace

void Scenario::validate() const {
  if (epochs < 1) throw ScenarioError("duration must be at least one epoch");
  if (!(dt > 0.0)) throw ScenarioError("dt must be positive");
  if (!(trajectory_stride > 0.0)) throw ScenarioError("trajectory stride must be positive");
  if (!(noise.level_std >= 0.0) || !(noise.flow_std >= 0.0)) throw ScenarioError("noise std must be >= 0");
  if (!y0.allFinite()) throw ScenarioError("initial levels must be finite");
  try {
    plant::PlantModel model(pools, dt);
    steps_per_epoch(epoch_s, dt);
    weights.validate();
    protocol::validate(epoch_config(), slot_config());
  } catch (const ConfigError& e) {
    throw ScenarioError(e.what());
  }
  const auto issues = trigger::validate_params(trigger);
  if (!issues.empty()) throw ScenarioError("trigger parameters: " + issues.front());
  if (trigger.node_count() != network.epoch.K) {
    throw ScenarioError("one sensor T slot per trigger node is required (K = " +
                        std::to_string(network.epoch.K) + ", nodes = " + std::to_string(trigger.node_count()) + ")");
  }
  if (trigger.scale.size() != control::kStates) throw ScenarioError("trigger scale must cover all 15 states");
  if (network.epoch.actuators != kPools) throw ScenarioError("one actuator per pool is required");
}

double iae(const std::vector<double>& samples, double x_star, double dt) {
  if (samples.size() < 2) throw EmptyGrid("IAE needs at least two samples");
  if (!(dt > 0.0)) throw EmptyGrid("IAE grid spacing must be positive");
  double acc = 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    acc += 0.5 * (std::abs(samples[k - 1] - x_star) + std::abs(samples[k] - x_star));
  }
  return acc / static_cast<double>(samples.size() - 1);
}

IaeSummary iae_summary(const PoolVector& v) { return {v.sum(), v.maxCoeff()}; }

double duty_cycle_pct(const std::vector<protocol::EpochTrace>& traces, int nodes, double run_ms) {
  if (nodes < 1 || !(run_ms > 0.0)) return 0.0;
  double total = 0.0;
  for (const auto& tr : traces) {
    for (double on : tr.radio_on_ms) total += on;
  }
  return 100.0 * total / nodes / run_ms;
}

RunReport run_experiment(const Scenario& scenario) {
  scenario.validate();
  const auto gain = control::lqr_gain(control::build_state_space(scenario.pools), scenario.weights);
  return run_experiment(scenario, gain);
}

RunReport run_experiment(const Scenario& sc, const control::ControllerGain& gain) {
  sc.validate();
  const plant::PlantModel model(sc.pools, sc.dt);
  const auto cfg = sc.epoch_config();
  const auto slots = sc.slot_config();
  const auto schedule = protocol::build_schedule(cfg, slots);
  const std::int64_t steps = steps_per_epoch(sc.epoch_s, sc.dt);
  const double h = sc.epoch_s / 60.0;
  const auto stride = std::max<std::int64_t>(1, std::llround(sc.trajectory_stride / sc.dt));
  const int n_sensors = cfg.K;

  RunReport rep;
  rep.testbed = sc.network.name;
  rep.variant = sc.variant;
  rep.seed = sc.seed;
  rep.traces.reserve(sc.epochs);
  rep.trajectory.reserve(static_cast<std::size_t>(sc.epochs * steps / stride + 1));

  PoolVector x2_noise_gain;
  for (int i = 0; i < kPools; ++i) x2_noise_gain[i] = 2.0 * sc.pools[i].tau / sc.pools[i].alpha;

  plant::WisPlantState state = model.initial_state(sc.y0);
  PoolVector x3_discrete = PoolVector::Zero();
  Eigen::VectorXd ctrl_xhat = Eigen::VectorXd::Zero(control::kStates);
  Eigen::VectorXd node_xhat = Eigen::VectorXd::Zero(control::kStates);
  PoolVector u_applied = PoolVector::Zero();
  PoolVector iae_acc = PoolVector::Zero();
  const auto record = [&](const plant::WisPlantState& s) {
    rep.trajectory.push_back({s.t, s.y, u_applied, plant::disturbance_at(sc.disturbances, s.t)[kPools - 1]});
  };
  record(state);

  // Welford accumulation of actuation latency.
  double latency_mean = 0.0, latency_m2 = 0.0;
  int latency_n = 0;
  std::vector<bool> triggered(n_sensors, false);

  for (int k = 0; k < sc.epochs; ++k) {
    const rng::Key key{sc.seed, static_cast<std::uint64_t>(k)};

    // Acquisition at the epoch start.
    PoolVector level = state.y, x2 = state.x2;
    PoolVector noisy_level = level;
    if (sc.noise.level_std > 0.0 || sc.noise.flow_std > 0.0) {
      auto gen = key.engine(rng::Stream::PlantNoise);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (int i = 0; i < kPools; ++i) noisy_level[i] += sc.noise.level_std * normal(gen);
      for (int i = 0; i < kPools; ++i) x2[i] += sc.noise.flow_std * x2_noise_gain[i] * normal(gen);
    }
    Eigen::VectorXd meas(control::kStates);
    for (int i = 0; i < kPools; ++i) {
      meas[x1_index(i)] = noisy_level[i];
      meas[x2_index(i)] = x2[i];
      meas[x3_index(i)] = sc.x3_mode == X3Mode::Continuous ? state.x3[i] : x3_discrete[i];
    }
    if (sc.x3_mode == X3Mode::Discrete) x3_discrete += h * level;
    if (sc.x3_mode == X3Mode::DiscreteNoisy) x3_discrete += h * noisy_level;

    const bool force = sc.bootstrap && k == 0;
    if (cfg.variant == protocol::Variant::WcbE && !force) {
      for (int j = 0; j < n_sensors; ++j) {
        triggered[j] = trigger::node_trigger(sc.trigger, j, trigger::local(sc.trigger, j, meas),
                                             trigger::local(sc.trigger, j, node_xhat));
      }
    } else {
      std::fill(triggered.begin(), triggered.end(), force || cfg.variant == protocol::Variant::WcbP);
    }

    auto tr = protocol::execute_epoch(schedule, triggered, cfg, slots, key, force);

    // Controller: refresh received readings, hold the rest.
    PoolVector u_cmd = u_applied;
    std::vector<std::int64_t> apply_at(kPools, -1);
    if (tr.participating[protocol::kController]) {
      for (int j = 0; j < n_sensors; ++j) {
        if (!tr.received[j]) continue;
        for (int s : sc.trigger.nodes[j].states) ctrl_xhat[s] = meas[s];
      }
    }
    if (tr.collected()) {
      ++rep.metrics.sample_count;
      const Eigen::VectorXd u = control::control_law(gain, ctrl_xhat);
      for (int i = 0; i < kPools; ++i) {
        if (tr.latency_ms[i]) {
          u_cmd[i] = u[i];
          apply_at[i] = std::llround(*tr.latency_ms[i] / 60000.0 / sc.dt);
          const double delta = *tr.latency_ms[i] - latency_mean;
          latency_mean += delta / (latency_n + 1);
          latency_m2 += delta * (*tr.latency_ms[i] - latency_mean);
          rep.metrics.max_latency_ms = std::max(rep.metrics.max_latency_ms, *tr.latency_ms[i]);
          ++latency_n;
        } else {
          ++rep.metrics.actuator_misses;
        }
      }
    }
    if (tr.event && tr.missing_after_recovery > 0) ++rep.metrics.epochs_with_missing;
    for (int j = 0; j < n_sensors; ++j) {
      if (!tr.acknowledged[j]) continue;
      for (int s : sc.trigger.nodes[j].states) node_xhat[s] = meas[s];
    }
    rep.traces.push_back(std::move(tr));

    // Plant over the epoch, with commands taking effect at their delivery offsets.
    for (std::int64_t s = 0; s < steps; ++s) {
      for (int i = 0; i < kPools; ++i) {
        if (apply_at[i] == s) u_applied[i] = u_cmd[i];
      }
      const PoolVector d = plant::disturbance_at(sc.disturbances, state.t);
      const PoolVector before = state.y.cwiseAbs();
      state = plant::wis_step(model, std::move(state), u_applied, d);
      iae_acc += 0.5 * sc.dt * (before + state.y.cwiseAbs());
      if (state.step % stride == 0) record(state);
    }
  }

  const double t_exp = static_cast<double>(sc.epochs) * steps * sc.dt;
  auto& m = rep.metrics;
  m.iae = iae_acc / t_exp;
  const auto summary = iae_summary(m.iae);
  m.iae_sum = summary.sum;
  m.iae_max = summary.max;
  m.dc_pct = duty_cycle_pct(rep.traces, cfg.node_count(), sc.epochs * sc.epoch_s * 1000.0);
  if (latency_n > 0) {
    m.mean_latency_ms = latency_mean;
    m.latency_std_ms = std::sqrt(latency_m2 / latency_n);
  }
  return rep;
}

}  // namespace wcb::cosim
