#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wcb/errors.hpp"
#include "wcb/plant.hpp"

#include <cmath>
#include <random>

using namespace wcb;
using namespace wcb::plant;

namespace {

WisPlantState run(const PlantModel& m, WisPlantState s, const PoolVector& u, const PoolVector& d, int steps) {
  for (int k = 0; k < steps; ++k) s = wis_step(m, std::move(s), u, d);
  return s;
}

}  // namespace

TEST_CASE("omega_n") {
  CHECK(omega_n({4, 6492, 0.48, 0.0}) == doctest::Approx(0.48).epsilon(1e-15));
  // Hand evaluation: sqrt(1 - 0.0151^2) = 0.9998859935..., 0.48 / that = 0.48005473...
  const long double z = 0.0151L;
  const long double ref1 = 0.48L / std::sqrt(1.0L - z * z);
  const long double ref5 = 0.42L / std::sqrt(1.0L - z * z);
  const auto pools = wis_pools();
  CHECK(omega_n(pools[0]) == doctest::Approx(double(ref1)).epsilon(1e-14));
  CHECK(omega_n(pools[0]) == doctest::Approx(0.480055).epsilon(1e-6));
  CHECK(omega_n(pools[4]) == doctest::Approx(double(ref5)).epsilon(1e-14));
  CHECK(omega_n(pools[4]) >= pools[4].phi);
}

TEST_CASE("pool parameters are validated") {
  CHECK_THROWS_AS(validate(PoolParams{0, 1, 1, 0.1}), ConfigError);
  CHECK_THROWS_AS(validate(PoolParams{1, -1, 1, 0.1}), ConfigError);
  CHECK_THROWS_AS(validate(PoolParams{1, 1, 1, 1.0}), ConfigError);
  CHECK_NOTHROW(validate(PoolParams{1, 1, 1, 0.5}));
  CHECK_THROWS_AS(PlantModel(wis_pools(), 0.003), ConfigError);
  CHECK_NOTHROW(PlantModel(wis_pools(), 0.001));
}

TEST_CASE("disturbance schedule") {
  const auto s = DisturbanceSchedule::wis_default();
  CHECK(disturbance_at(s, 100).isZero());
  CHECK(disturbance_at(s, 200) == (PoolVector() << 0, 0, 0, 0, 16).finished());
  CHECK(disturbance_at(s, 500) == (PoolVector() << 0, 0, 0, 0, 34).finished());
  CHECK(disturbance_at(s, 700).isZero());
  CHECK(disturbance_at(s, 180)[4] == 16.0);
  CHECK_THROWS_AS(DisturbanceSchedule({{10, 0, 1}, {10, 0, 2}}), ConfigError);
  CHECK_THROWS_AS(DisturbanceSchedule({{10, 0, -1}}), ConfigError);
  CHECK_THROWS_AS(DisturbanceSchedule({{10, 5, 1}}), ConfigError);
}

TEST_CASE("equilibrium stays at zero") {
  const PlantModel m(wis_pools(), 0.001);
  const auto s = run(m, m.initial_state(PoolVector::Zero()), PoolVector::Zero(), PoolVector::Zero(), 5000);
  CHECK(s.y.isZero());
  CHECK(s.ydot.isZero());
  CHECK(s.yddot.isZero());
  CHECK(s.x2.isZero());
  CHECK(s.x3.isZero());
  CHECK(s.t == doctest::Approx(5.0));
}

TEST_CASE("mass balance keeps levels constant") {
  const PlantModel m(wis_pools(), 0.001);
  const PoolVector u = PoolVector::Constant(10.0);
  const PoolVector d = (PoolVector() << 0, 0, 0, 0, 10).finished();
  const PoolVector y0 = (PoolVector() << 0.01, -0.02, 0.03, 0, 0.05).finished();
  const auto s = run(m, m.initial_state(y0, u), u, d, 20000);
  CHECK((s.y - y0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant inflow step gives slope delta / alpha") {
  // Oracle: alpha * ydot = u(t - tau) once the wave mode has decayed.
  const PlantModel m(wis_pools(), 0.001);
  const double delta = 5.0;
  PoolVector u = PoolVector::Zero();
  u[0] = delta;
  const auto s = run(m, m.initial_state(PoolVector::Zero()), u, PoolVector::Zero(), 1'000'000);
  // Pool 1 receives u1 and loses nothing downstream (u2 = 0).
  CHECK(s.ydot[0] == doctest::Approx(delta / 6492.0).epsilon(5e-3));
  CHECK(std::abs(s.ydot[1]) < 1e-15);
}

TEST_CASE("RK4 global error is fourth order") {
  auto pools = wis_pools();
  auto final_y = [&](double dt) {
    const PlantModel m(pools, dt);
    const PoolVector u = (PoolVector() << 3, 1, 2, 0.5, 1).finished();
    auto s = m.initial_state(PoolVector::Constant(0.02), u);
    s.ydot = PoolVector::Constant(0.01);
    s.yddot = PoolVector::Constant(-0.005);
    const int steps = static_cast<int>(std::lround(12.0 / dt));
    return run(m, std::move(s), u, PoolVector::Constant(0.7), steps);
  };
  const auto ref = final_y(0.005);
  const auto coarse = final_y(0.04);
  const auto fine = final_y(0.02);
  const double e_coarse = (coarse.y - ref.y).norm() + (coarse.ydot - ref.ydot).norm();
  const double e_fine = (fine.y - ref.y).norm() + (fine.ydot - ref.ydot).norm();
  const double ratio = e_coarse / e_fine;
  MESSAGE("RK4 error ratio for dt 0.04 -> 0.02: " << ratio);
  CHECK(ratio > 13.0);
  CHECK(ratio < 19.0);
}

TEST_CASE("delay line shifts the input by exactly tau") {
  const PlantModel m(wis_pools(), 0.01);
  auto s = m.initial_state(PoolVector::Zero());
  const int horizon = 700;
  std::vector<std::array<double, kPools>> seen(horizon);
  for (int k = 0; k < horizon; ++k) {
    PoolVector u = PoolVector::Zero();
    if (k == 0 || k == 50) u = PoolVector::Ones();
    s = wis_step(m, std::move(s), u, PoolVector::Zero());
    for (int i = 0; i < kPools; ++i) seen[k][i] = s.delayed_inflow(i);
  }
  for (int i = 0; i < kPools; ++i) {
    const int lag = static_cast<int>(std::lround(wis_pools()[i].tau / 0.01));
    CHECK(m.lag(i) == lag);
    CHECK(s.delay[i].size() == static_cast<std::size_t>(lag + 1));
    for (int k = 0; k < horizon; ++k) {
      const bool pulse = (k == lag || k == lag + 50);
      CHECK(seen[k][i] == (pulse ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("response is linear in the input") {
  const PlantModel m(wis_pools(), 0.001);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  const int blocks = 40, per_block = 500;
  std::vector<PoolVector> u1(blocks), u2(blocks);
  for (int b = 0; b < blocks; ++b) {
    for (int i = 0; i < kPools; ++i) {
      u1[b][i] = dist(gen);
      u2[b][i] = dist(gen);
    }
  }
  auto simulate = [&](auto input) {
    auto s = m.initial_state(PoolVector::Zero());
    for (int b = 0; b < blocks; ++b) s = run(m, std::move(s), input(b), PoolVector::Zero(), per_block);
    return s;
  };
  const auto a = simulate([&](int b) { return u1[b]; });
  const auto c = simulate([&](int b) { return u2[b]; });
  const auto sum = simulate([&](int b) { return PoolVector(u1[b] + u2[b]); });
  const double scale = (a.y.cwiseAbs() + c.y.cwiseAbs()).maxCoeff();
  CHECK((sum.y - a.y - c.y).cwiseAbs().maxCoeff() <= 1e-9 * scale);
  CHECK((sum.x2 - a.x2 - c.x2).cwiseAbs().maxCoeff() <= 1e-9 * (a.x2.cwiseAbs() + c.x2.cwiseAbs()).maxCoeff());
}

TEST_CASE("integrator is exact on a constant level") {
  const PlantModel m(wis_pools(), 0.001);
  const PoolVector c = (PoolVector() << 0.05, -0.01, 0.0, 0.2, 0.003).finished();
  const auto s = run(m, m.initial_state(c), PoolVector::Zero(), PoolVector::Zero(), 1000);
  for (int i = 0; i < kPools; ++i) CHECK(s.x3[i] == doctest::Approx(c[i] * 1.0).epsilon(1e-12));
}

TEST_CASE("non-finite state is reported") {
  const PlantModel m(wis_pools(), 0.001);
  auto s = m.initial_state(PoolVector::Zero());
  const PoolVector u = PoolVector::Constant(1e308);
  bool threw = false;
  try {
    for (int k = 0; k < 10000; ++k) s = wis_step(m, std::move(s), u, -u);
  } catch (const NonFiniteState&) {
    threw = true;
  }
  CHECK(threw);
}
