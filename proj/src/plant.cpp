#include "wcb/plant.hpp"

#include "wcb/errors.hpp"

#include <cmath>
#include <string>

namespace wcb::plant {

void validate(const PoolParams& p) {
  if (!(p.tau > 0.0) || !(p.alpha > 0.0) || !(p.phi > 0.0) || !(p.zeta >= 0.0 && p.zeta < 1.0)) {
    throw ConfigError("pool parameters must satisfy tau, alpha, phi > 0 and 0 <= zeta < 1");
  }
}

double omega_n(const PoolParams& p) { return p.phi / std::sqrt(1.0 - p.zeta * p.zeta); }

PoolSet wis_pools() {
  constexpr double zeta = 0.0151;
  return {{{4.0, 6492.0, 0.48, zeta},
           {2.0, 2478.0, 1.05, zeta},
           {4.0, 6084.0, 0.48, zeta},
           {4.0, 5658.0, 0.48, zeta},
           {6.0, 7650.0, 0.42, zeta}}};
}

DisturbanceSchedule::DisturbanceSchedule(std::vector<DisturbanceStep> steps)
    : steps_(std::move(steps)) {
  for (std::size_t k = 0; k < steps_.size(); ++k) {
    const auto& s = steps_[k];
    if (s.pool < 0 || s.pool >= kPools) throw ConfigError("disturbance pool index out of range");
    if (!(s.flow >= 0.0) || !std::isfinite(s.flow)) throw ConfigError("disturbance flow must be >= 0");
    if (!(s.time >= 0.0)) throw ConfigError("disturbance time must be >= 0");
    if (k > 0 && !(s.time > steps_[k - 1].time)) {
      throw ConfigError("disturbance times must be strictly increasing");
    }
  }
}

DisturbanceSchedule DisturbanceSchedule::wis_default() {
  return DisturbanceSchedule({{180.0, 4, 16.0}, {450.0, 4, 34.0}, {600.0, 4, 0.0}});
}

PoolVector disturbance_at(const DisturbanceSchedule& schedule, double t) {
  PoolVector d = PoolVector::Zero();
  for (const auto& s : schedule.steps()) {
    if (s.time > t) break;
    d[s.pool] = s.flow;
  }
  return d;
}

DelayLine::DelayLine(std::int64_t lag, double initial_flow)
    : buf_(static_cast<std::size_t>(lag) + 1, initial_flow), head_(static_cast<std::size_t>(lag)) {}

void DelayLine::push(double u) {
  head_ = head_ + 1 == buf_.size() ? 0 : head_ + 1;
  buf_[head_] = u;
}

PlantModel::PlantModel(PoolSet pools, double dt) : pools_(pools), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("integration step must be positive");
  for (int i = 0; i < kPools; ++i) {
    const auto& p = pools_[i];
    validate(p);
    const double ratio = p.tau / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-6 * ratio) {
      throw ConfigError("integration step must divide every pool delay (pool " +
                        std::to_string(i + 1) + ")");
    }
    lags_[i] = static_cast<std::int64_t>(rounded);
    const double w = omega_n(p);
    w2_[i] = w * w;
    two_zeta_w_[i] = 2.0 * p.zeta * w;
    w2_over_alpha_[i] = w * w / p.alpha;
    filter_pole_[i] = 2.0 / p.tau;
    filter_gain_[i] = 4.0 / p.alpha;
  }
}

WisPlantState PlantModel::initial_state(const PoolVector& y0, const PoolVector& initial_flow,
                                        const PoolVector& x2_0, const PoolVector& x3_0) const {
  WisPlantState s;
  s.y = y0;
  s.x2 = x2_0;
  s.x3 = x3_0;
  for (int i = 0; i < kPools; ++i) s.delay[i] = DelayLine(lags_[i], initial_flow[i]);
  return s;
}

namespace {

using Arr = Eigen::Array<double, kPools, 1>;

struct Deriv {
  Arr y, ydot, yddot, x2, x3;
};

}  // namespace

WisPlantState wis_step(const PlantModel& m, WisPlantState s, const PoolVector& u,
                       const PoolVector& d) {
  for (int i = 0; i < kPools; ++i) s.delay[i].push(u[i]);

  Arr inflow;
  for (int i = 0; i < kPools; ++i) inflow[i] = s.delay[i].delayed();
  Arr outflow = Arr::Zero();
  outflow.head<kPools - 1>() = u.tail<kPools - 1>().array();

  const Arr forcing = m.w2_over_alpha_.array() * (inflow - outflow - d.array());
  const Arr filter_in = m.filter_gain_.array() * u.array();

  auto f = [&](const Arr& y, const Arr& y1, const Arr& y2, const Arr& x2) {
    Deriv k;
    k.y = y1;
    k.ydot = y2;
    k.yddot = -m.two_zeta_w_.array() * y2 - m.w2_.array() * y1 + forcing;
    k.x2 = -m.filter_pole_.array() * x2 + filter_in;
    k.x3 = y;
    return k;
  };

  const double h = m.dt_;
  const Arr y = s.y.array(), y1 = s.ydot.array(), y2 = s.yddot.array(), x2 = s.x2.array();
  const Deriv k1 = f(y, y1, y2, x2);
  const Deriv k2 = f(y + 0.5 * h * k1.y, y1 + 0.5 * h * k1.ydot, y2 + 0.5 * h * k1.yddot,
                     x2 + 0.5 * h * k1.x2);
  const Deriv k3 = f(y + 0.5 * h * k2.y, y1 + 0.5 * h * k2.ydot, y2 + 0.5 * h * k2.yddot,
                     x2 + 0.5 * h * k2.x2);
  const Deriv k4 = f(y + h * k3.y, y1 + h * k3.ydot, y2 + h * k3.yddot, x2 + h * k3.x2);

  const double w = h / 6.0;
  s.y += (w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y)).matrix();
  s.ydot += (w * (k1.ydot + 2.0 * k2.ydot + 2.0 * k3.ydot + k4.ydot)).matrix();
  s.yddot += (w * (k1.yddot + 2.0 * k2.yddot + 2.0 * k3.yddot + k4.yddot)).matrix();
  s.x2 += (w * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2)).matrix();
  s.x3 += (w * (k1.x3 + 2.0 * k2.x3 + 2.0 * k3.x3 + k4.x3)).matrix();
  s.step += 1;
  s.t = static_cast<double>(s.step) * h;

  if (!(s.y.allFinite() && s.ydot.allFinite() && s.yddot.allFinite() && s.x2.allFinite() &&
        s.x3.allFinite())) {
    throw NonFiniteState("plant state diverged at t = " + std::to_string(s.t) + " min");
  }
  return s;
}

}  // namespace wcb::plant
