#pragma once

// Five-pool irrigation channel: third-order wave model per pool with a
// transport delay on the upstream gate flow, integrated with fixed-step RK4.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace wcb::plant {

inline constexpr int kPools = 5;

using PoolVector = Eigen::Matrix<double, kPools, 1>;

struct PoolParams {
  double tau = 0.0;    // transport delay [min]
  double alpha = 0.0;  // surface area [m^2]
  double phi = 0.0;    // dominant wave frequency [rad/min]
  double zeta = 0.0;   // damping ratio
};

using PoolSet = std::array<PoolParams, kPools>;

/// Throws ConfigError unless tau, alpha, phi > 0 and 0 <= zeta < 1.
void validate(const PoolParams& p);

/// Natural frequency of the first wave mode, phi / sqrt(1 - zeta^2).
double omega_n(const PoolParams& p);

/// The New South Wales channel section used throughout (zeta = 0.0151).
PoolSet wis_pools();

struct DisturbanceStep {
  double time = 0.0;  // [min]
  int pool = 0;       // 0-based
  double flow = 0.0;  // new off-take [m^3/min], held until the next step of the same pool
};

class DisturbanceSchedule {
 public:
  DisturbanceSchedule() = default;
  /// Throws ConfigError on non-increasing times, negative flows or bad pool index.
  explicit DisturbanceSchedule(std::vector<DisturbanceStep> steps);

  const std::vector<DisturbanceStep>& steps() const { return steps_; }

  /// Off-take at pool 5: 16 m^3/min from minute 180, 34 from 450, 0 from 600.
  static DisturbanceSchedule wis_default();

 private:
  std::vector<DisturbanceStep> steps_;
};

/// Piecewise-constant off-take vector at time t (zero before the first step).
PoolVector disturbance_at(const DisturbanceSchedule& schedule, double t);

/// Holds the last `lag` + 1 applied gate flows; `delayed()` returns the
/// flow that was applied `lag` steps before the newest one.
class DelayLine {
 public:
  DelayLine() = default;
  DelayLine(std::int64_t lag, double initial_flow);

  void push(double u);
  double delayed() const { return buf_[head_ == buf_.size() - 1 ? 0 : head_ + 1]; }
  std::int64_t lag() const { return static_cast<std::int64_t>(buf_.size()) - 1; }
  std::size_t size() const { return buf_.size(); }

  bool operator==(const DelayLine&) const = default;

 private:
  std::vector<double> buf_;
  std::size_t head_ = 0;
};

struct WisPlantState {
  PoolVector y = PoolVector::Zero();      // level deviation from setpoint [m]
  PoolVector ydot = PoolVector::Zero();   // [m/min]
  PoolVector yddot = PoolVector::Zero();  // [m/min^2]
  PoolVector x2 = PoolVector::Zero();     // gate-flow filter state [m]
  PoolVector x3 = PoolVector::Zero();     // level-error integral [m min]
  std::array<DelayLine, kPools> delay;
  double t = 0.0;
  std::int64_t step = 0;

  /// Inflow u_i(t - tau_i) acting on pool i during the step just taken.
  double delayed_inflow(int pool) const { return delay[pool].delayed(); }

  bool operator==(const WisPlantState&) const = default;
};

/// Static part of the plant: pools, step size, and derived delay lags.
class PlantModel {
 public:
  /// Throws ConfigError if a pool is invalid or dt does not divide every
  /// tau to within one part in 10^6.
  PlantModel(PoolSet pools, double dt);

  const PoolSet& pools() const { return pools_; }
  double dt() const { return dt_; }
  std::int64_t lag(int pool) const { return lags_[pool]; }

  /// Zero wave derivatives, the given level deviations, delay lines
  /// pre-filled with `initial_flow`.
  WisPlantState initial_state(const PoolVector& y0,
                              const PoolVector& initial_flow = PoolVector::Zero(),
                              const PoolVector& x2_0 = PoolVector::Zero(),
                              const PoolVector& x3_0 = PoolVector::Zero()) const;

 private:
  PoolSet pools_;
  double dt_;
  std::array<std::int64_t, kPools> lags_{};
  PoolVector w2_, two_zeta_w_, w2_over_alpha_, filter_pole_, filter_gain_;

  friend WisPlantState wis_step(const PlantModel&, WisPlantState, const PoolVector&,
                                const PoolVector&);
};

/// Advances one step of dt with gate flows `u` and off-takes `d` held
/// constant. Pool 5 has no downstream gate. Throws NonFiniteState.
WisPlantState wis_step(const PlantModel& model, WisPlantState state, const PoolVector& u,
                       const PoolVector& d);

}  // namespace wcb::plant
