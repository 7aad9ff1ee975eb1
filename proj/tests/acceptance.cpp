// Acceptance report: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "wcb/control.hpp"
#include "wcb/cosim.hpp"
#include "wcb/energy.hpp"
#include "wcb/report_csv.hpp"
#include "wcb/scenario.hpp"
#include "wcb/trigger.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wcb;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

bool within(double v, double ref, double rel) { return std::abs(v - ref) <= rel * std::abs(ref); }

std::string num(double v, int prec = 5) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

struct Stats {
  double mean = 0.0, std = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.std += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(s.std / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

const control::ControllerGain& gain() {
  static const auto g =
      control::lqr_gain(control::build_state_space(plant::wis_pools()), control::LqrWeights::wis_default());
  return g;
}

std::vector<cosim::RunReport> run_seeds(const std::string& preset, int seeds, bool lossless = false) {
  std::vector<std::future<cosim::RunReport>> jobs;
  for (int s = 1; s <= seeds; ++s) {
    auto sc = scenario::preset(preset);
    sc.seed = static_cast<std::uint64_t>(s);
    sc.lossless = lossless;
    jobs.push_back(std::async(std::launch::async, [sc] { return cosim::run_experiment(sc, gain()); }));
  }
  std::vector<cosim::RunReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

Stats metric(const std::vector<cosim::RunReport>& runs, double cosim::Metrics::*field) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.metrics.*field);
  return stats(v);
}

Stats samples(const std::vector<cosim::RunReport>& runs) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.metrics.sample_count);
  return stats(v);
}

std::string csv(const cosim::RunReport& r) {
  std::ostringstream out;
  report::write_summary_row(out, r);
  report::write_trajectory(out, r);
  report::write_trace(out, r);
  return out.str();
}

constexpr double kIaeSum = 0.1085;
constexpr double kIaeMax = 0.0329;
const char* kTestbeds[] = {"hall", "dept"};

}  // namespace

int main() {
  std::map<std::string, std::vector<cosim::RunReport>> runs;
  for (const char* tb : kTestbeds) {
    const std::string t = tb;
    runs[t + "_etc_noiseless"] = run_seeds(t + "_etc_noiseless", 8);
    runs[t + "_etc_noisy"] = run_seeds(t + "_etc_noisy", 8);
    runs[t + "_periodic_noiseless"] = run_seeds(t + "_periodic_noiseless", 1);
    runs[t + "_periodic_noisy"] = run_seeds(t + "_periodic_noisy", 1);
    runs[t + "_etc_lossless"] = run_seeds(t + "_etc_noiseless", 1, true);
    runs[t + "_periodic_lossless"] = run_seeds(t + "_periodic_noiseless", 1, true);
  }

  {
    const auto& g = gain();
    const double qnorm = control::LqrWeights::wis_default().q.norm();
    const bool ok = -g.rho <= -0.006 && g.care_residual <= 1e-8 * qnorm;
    verdict(1, ok, "abscissa=" + num(-g.rho) + "/min residual=" + num(g.care_residual) + " bound=" + num(1e-8 * qnorm));
  }

  {
    bool ok = true;
    std::string detail;
    for (const char* tb : kTestbeds) {
      const auto& r = runs[std::string(tb) + "_etc_noiseless"];
      const auto n = samples(r).mean;
      const auto sum = metric(r, &cosim::Metrics::iae_sum).mean;
      const auto mx = metric(r, &cosim::Metrics::iae_max).mean;
      const bool tb_ok = n >= 135 && n <= 165 && within(sum, kIaeSum, 0.10) && within(mx, kIaeMax, 0.10);
      ok = ok && tb_ok;
      detail += std::string(tb) + ": samples=" + num(n) + " IAE_sum=" + num(sum) + " (" +
                num(100 * (sum / kIaeSum - 1), 3) + "%) IAE_max=" + num(mx) + " (" +
                num(100 * (mx / kIaeMax - 1), 3) + "%)  ";
    }
    verdict(2, ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (const char* tb : kTestbeds) {
      const auto noisy = samples(runs[std::string(tb) + "_etc_noisy"]);
      const auto clean = samples(runs[std::string(tb) + "_etc_noiseless"]);
      ok = ok && noisy.mean >= 165 && noisy.mean <= 210 && noisy.std > 0 && clean.std == 0;
      detail += std::string(tb) + ": noisy mean=" + num(noisy.mean) + " std=" + num(noisy.std, 3) +
                " noiseless std=" + num(clean.std) + "  ";
    }
    verdict(3, ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (const char* tb : kTestbeds) {
      const auto& per = runs[std::string(tb) + "_periodic_noiseless"].front().metrics;
      const auto etc = metric(runs[std::string(tb) + "_etc_noiseless"], &cosim::Metrics::iae_sum).mean;
      const double gap = std::abs(etc - per.iae_sum) / per.iae_sum;
      ok = ok && per.sample_count == 1440 && within(per.iae_sum, kIaeSum, 0.10) && gap <= 0.01;
      detail += std::string(tb) + ": samples=" + std::to_string(per.sample_count) + " IAE_sum=" + num(per.iae_sum) +
                " (" + num(100 * (per.iae_sum / kIaeSum - 1), 3) + "%) ETC gap=" + num(100 * gap, 3) + "%  ";
    }
    verdict(4, ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (const char* tb : kTestbeds) {
      const double clean = 1.0 - samples(runs[std::string(tb) + "_etc_noiseless"]).mean / 1440.0;
      const double noisy = 1.0 - samples(runs[std::string(tb) + "_etc_noisy"]).mean / 1440.0;
      ok = ok && clean >= 0.85 && noisy >= 0.83;
      detail += std::string(tb) + ": noiseless " + num(100 * clean, 4) + "% noisy " + num(100 * noisy, 4) + "%  ";
    }
    verdict(5, ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (const char* tb : kTestbeds) {
      const auto p = profile::by_name(tb);
      const auto sched = protocol::build_schedule(p.epoch, p.slots);
      const std::vector<bool> trig(p.epoch.K, true);
      int missing = 0, actuator_misses = 0;
      for (std::uint64_t seed = 1; seed <= 16; ++seed) {
        for (std::uint64_t k = 0; k < 1440; ++k) {
          const auto tr = protocol::execute_epoch(sched, trig, p.epoch, p.slots, rng::Key{seed, k}, true);
          if (tr.missing_after_recovery > 0) ++missing;
          for (const auto& l : tr.latency_ms) actuator_misses += !l.has_value();
        }
      }
      ok = ok && missing == 0 && actuator_misses == 0;
      detail += std::string(tb) + ": unrecovered=" + std::to_string(missing) +
                " actuator misses=" + std::to_string(actuator_misses) + "  ";
    }
    const double tail = 1.0 - protocol::collection_success_prob(profile::hall().slots.T.pdr, 10, 3);
    ok = ok && tail < 1e-7;
    verdict(6, ok, detail + "P(lose >3 of 10)=" + num(tail, 3));
  }

  {
    const double reference[2][2] = {{192.021, 180.023}, {253.0, 237.017}};
    bool ok = true;
    std::string detail;
    int i = 0;
    for (const char* tb : kTestbeds) {
      const auto p = profile::by_name(tb);
      const auto& e = runs[std::string(tb) + "_etc_lossless"].front().metrics;
      const auto& per = runs[std::string(tb) + "_periodic_lossless"].front().metrics;
      const double expected = p.epoch.E * (p.slots.EV.duration_ms + p.epoch.gap_ms);
      const double lossy_e = metric(runs[std::string(tb) + "_etc_noisy"], &cosim::Metrics::mean_latency_ms).mean;
      const double lossy_p = runs[std::string(tb) + "_periodic_noisy"].front().metrics.mean_latency_ms;
      ok = ok && std::abs((e.mean_latency_ms - per.mean_latency_ms) - expected) < 1e-9 &&
           std::abs(lossy_e - reference[i][0]) <= 1.0 && std::abs(lossy_p - reference[i][1]) <= 1.0 &&
           e.latency_std_ms < 1e-6 && per.latency_std_ms < 1e-6;
      detail += std::string(tb) + ": E-P=" + num(e.mean_latency_ms - per.mean_latency_ms, 8) + " (expect " +
                num(expected) + ") E=" + num(lossy_e, 7) + " P=" + num(lossy_p, 7) +
                " lossless std=" + num(std::max(e.latency_std_ms, per.latency_std_ms), 3) + "  ";
      ++i;
    }
    verdict(7, ok, detail);
  }

  {
    const double reference_dc[2] = {0.0319, 0.0413};
    bool ok = true;
    std::string detail;
    int i = 0;
    for (const char* tb : kTestbeds) {
      const auto p = profile::by_name(tb);
      const double dc_e = metric(runs[std::string(tb) + "_etc_noiseless"], &cosim::Metrics::dc_pct).mean;
      const double dc_p = runs[std::string(tb) + "_periodic_noiseless"].front().metrics.dc_pct;
      const double reduction = 1.0 - dc_e / dc_p;
      const double f = energy::break_even_fev(p.epoch, p.slots);
      ok = ok && within(dc_e, reference_dc[i], 0.10) && reduction >= 0.60 && f >= 0.85 && f <= 0.95;
      detail += std::string(tb) + ": DC_E=" + num(dc_e, 4) + "% DC_P=" + num(dc_p, 4) + "% reduction=" +
                num(100 * reduction, 4) + "% break-even=" + num(f, 4) + "  ";
      ++i;
    }
    verdict(8, ok, detail);
  }

  {
    const auto h = profile::hall();
    const energy::ReferenceSweep ref;
    const auto rows = energy::epoch_sweep(h.epoch, h.slots, ref.epoch_s, ref.events);
    const double expected[] = {65.50, 67.96, 70.42, 73.26, 75.60, 76.52};
    bool ok = rows.size() == 6;
    std::string detail;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const double s = 100.0 * rows[k].estimate.savings();
      ok = ok && std::abs(s - expected[k]) <= 3.0;
      if (k > 0) ok = ok && rows[k].estimate.savings() > rows[k - 1].estimate.savings();
      detail += num(rows[k].epoch_s) + "s:" + num(s, 4) + "% ";
    }
    verdict(9, ok, detail);
  }

  {
    std::string detail;
    bool ok = true;

    // No re-trigger right after an update, and centralized implies some node.
    const auto tp = trigger::TriggerParams::wis_default();
    const auto c = trigger::assemble(tp);
    std::mt19937_64 gen(1);
    std::normal_distribution<double> n01;
    auto draw = [&](double spread) {
      Eigen::VectorXd x(control::kStates);
      for (int k = 0; k < control::kStates; ++k) x[k] = spread * (k < 5 ? 0.01 : k < 10 ? 1.0 : 0.3) * n01(gen);
      return x;
    };
    int retrigger = 0, violations = 0, central = 0;
    for (int trial = 0; trial < 100000; ++trial) {
      const Eigen::VectorXd x = draw(5.0);
      if (trigger::centralized_trigger(Eigen::VectorXd::Zero(control::kStates), x, c.M, c.N, c.epsilon_sq, tp))
        ++retrigger;
      for (int j = 0; j < tp.node_count(); ++j) {
        const auto xj = trigger::local(tp, j, x);
        if (trigger::node_trigger(tp, j, xj, xj)) ++retrigger;
      }
      const Eigen::VectorXd xhat = x + draw(2.0);
      if (trigger::centralized_trigger(xhat - x, x, c.M, c.N, c.epsilon_sq, tp)) {
        ++central;
        bool any = false;
        for (int j = 0; j < tp.node_count(); ++j)
          any = any || trigger::node_trigger(tp, j, trigger::local(tp, j, x), trigger::local(tp, j, xhat));
        if (!any) ++violations;
      }
    }
    ok = ok && retrigger == 0 && violations == 0 && central > 0;
    detail += "retrigger=" + std::to_string(retrigger) + " implication violations=" + std::to_string(violations) +
              "/" + std::to_string(central) + " ";

    // RK4 convergence order.
    auto final_y = [](double dt) {
      const plant::PlantModel m(plant::wis_pools(), dt);
      const plant::PoolVector u = (plant::PoolVector() << 3, 1, 2, 0.5, 1).finished();
      auto s = m.initial_state(plant::PoolVector::Constant(0.02), u);
      s.ydot = plant::PoolVector::Constant(0.01);
      s.yddot = plant::PoolVector::Constant(-0.005);
      const auto steps = std::lround(12.0 / dt);
      for (long k = 0; k < steps; ++k) s = plant::wis_step(m, std::move(s), u, plant::PoolVector::Constant(0.7));
      return s;
    };
    const auto ref = final_y(0.005), coarse = final_y(0.04), fine = final_y(0.02);
    const double ratio = ((coarse.y - ref.y).norm() + (coarse.ydot - ref.ydot).norm()) /
                         ((fine.y - ref.y).norm() + (fine.ydot - ref.ydot).norm());
    ok = ok && ratio > 13.0 && ratio < 19.0;
    detail += "RK4 ratio=" + num(ratio, 4) + " ";

    // Bernoulli flood rate.
    const int n = 1'000'000;
    const double pdr = profile::hall().slots.T.pdr;
    const auto got = protocol::flood_outcome(pdr, std::vector<bool>(n, true), rng::Key{7, 0}, 1);
    const double hits = static_cast<double>(std::count(got.begin(), got.end(), true));
    const double z = (hits - n * pdr) / std::sqrt(n * pdr * (1 - pdr));
    ok = ok && std::abs(z) < 3.0;
    detail += "flood z=" + num(z, 3) + " ";

    // Determinism.
    auto sc = scenario::preset("dept_etc_noisy");
    sc.seed = 5;
    const bool same = csv(cosim::run_experiment(sc, gain())) == csv(cosim::run_experiment(sc, gain()));
    ok = ok && same;
    detail += std::string("deterministic=") + (same ? "yes" : "no") + " ";

    // Periodic equals forced event mode without EV slots.
    auto p = profile::dept();
    auto pe = p.epoch, fe = p.epoch;
    pe.variant = protocol::Variant::WcbP;
    fe.variant = protocol::Variant::WcbE;
    fe.E = 0;
    const auto sp = protocol::build_schedule(pe, p.slots), sf = protocol::build_schedule(fe, p.slots);
    int mismatches = 0;
    const std::vector<bool> none(p.epoch.K, false);
    for (std::uint64_t k = 0; k < 20000; ++k) {
      const auto a = protocol::execute_epoch(sp, none, pe, p.slots, rng::Key{3, k});
      const auto b = protocol::execute_epoch(sf, none, fe, p.slots, rng::Key{3, k}, true);
      if (a.received != b.received || a.radio_on_ms != b.radio_on_ms || a.latency_ms != b.latency_ms ||
          a.acknowledged != b.acknowledged)
        ++mismatches;
    }
    ok = ok && mismatches == 0;
    detail += "P vs forced-E mismatches=" + std::to_string(mismatches);
    verdict(10, ok, detail);
  }

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
