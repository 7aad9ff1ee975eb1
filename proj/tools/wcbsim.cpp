// wcbsim: run experiments, design the controller, sweep the energy model.
//
// Exit codes: 0 ok, 2 scenario/configuration error, 3 numeric divergence,
// 4 Riccati failure. Nothing is written to --out unless every run succeeds.

#include "wcb/control.hpp"
#include "wcb/cosim.hpp"
#include "wcb/energy.hpp"
#include "wcb/errors.hpp"
#include "wcb/ini.hpp"
#include "wcb/report_csv.hpp"
#include "wcb/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace wcb;

namespace {

constexpr int kOk = 0;
constexpr int kScenarioError = 2;
constexpr int kDiverged = 3;
constexpr int kCareFailed = 4;

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dots)), hi = std::stoull(item.substr(dots + 2));
        if (hi < lo) throw ScenarioError("empty seed range " + item);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw ScenarioError("bad seed list '" + spec + "'");
    }
  }
  if (seeds.empty()) throw ScenarioError("no seeds given");
  return seeds;
}

cosim::Scenario load_scenario(const std::string& name, const std::string& profile_name,
                              const std::vector<std::string>& overrides) {
  cosim::Scenario sc = name.empty() ? scenario::preset("hall_etc_noiseless") : scenario::load(name);
  if (!profile_name.empty()) {
    const bool lossless = sc.lossless;
    sc.network = profile_name.find('.') == std::string::npos ? profile::by_name(profile_name)
                                                              : profile::load(profile_name);
    sc.lossless = lossless;
  }
  scenario::apply_overrides(sc, overrides);
  return sc;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

int cmd_run(const std::string& scenario_name, const std::string& profile_name,
            const std::vector<std::string>& overrides, const std::string& seeds_spec, const std::string& out_dir,
            bool write_series) {
  const auto base = load_scenario(scenario_name, profile_name, overrides);
  const auto seeds = parse_seeds(seeds_spec);
  const auto gain = control::lqr_gain(control::build_state_space(base.pools), base.weights);

  std::vector<std::future<cosim::RunReport>> jobs;
  for (auto seed : seeds) {
    cosim::Scenario sc = base;
    sc.seed = seed;
    jobs.push_back(std::async(std::launch::async, [sc, &gain] { return cosim::run_experiment(sc, gain); }));
  }
  std::vector<cosim::RunReport> reports;
  for (auto& j : jobs) reports.push_back(j.get());

  std::ostringstream summary;
  report::write_summary_header(summary);
  for (const auto& r : reports) report::write_summary_row(summary, r);
  std::cout << summary.str();

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "summary.csv", summary.str());
    if (write_series) {
      for (const auto& r : reports) {
        std::ostringstream traj, trace;
        report::write_trajectory(traj, r);
        report::write_trace(trace, r);
        const auto tag = "seed" + std::to_string(r.seed) + ".csv";
        write_file(fs::path(out_dir) / ("trajectory_" + tag), traj.str());
        write_file(fs::path(out_dir) / ("trace_" + tag), trace.str());
      }
    }
  }
  return kOk;
}

// Design file: [design] n, m, A, B, Q, R with matrices row-major.
struct DesignProblem {
  Eigen::MatrixXd A, B, Q, R;
};

DesignProblem load_design(const std::string& path) {
  int n = 0, m = 0;
  std::map<std::string, std::vector<double>> mats;
  for (const auto& e : ini::parse(ini::read_file(path))) {
    if (e.section != "design") throw ScenarioError("design file: unknown section '" + e.section + "'");
    if (e.key == "n") n = ini::to_int(e);
    else if (e.key == "m") m = ini::to_int(e);
    else if (e.key == "A" || e.key == "B" || e.key == "Q" || e.key == "R") mats[e.key] = ini::to_doubles(e);
    else throw ScenarioError("design file: unknown key '" + e.key + "'");
  }
  auto mat = [&](const std::string& k, int rows, int cols) {
    const auto it = mats.find(k);
    if (rows < 1 || cols < 1 || it == mats.end() || it->second.size() != std::size_t(rows * cols)) {
      throw ScenarioError("design file: " + k + " must have " + std::to_string(rows * cols) + " entries");
    }
    return Eigen::MatrixXd(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        it->second.data(), rows, cols));
  };
  return {mat("A", n, n), mat("B", n, m), mat("Q", n, n), mat("R", m, m)};
}

void print_matrix(std::ostream& out, const std::string& label, const Eigen::MatrixXd& M) {
  out << label << '\n';
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) out << (c ? "," : "") << ini::fmt(M(r, c));
    out << '\n';
  }
}

int cmd_design(const std::string& scenario_name, const std::vector<std::string>& overrides,
               const std::string& design_file) {
  control::ControllerGain g;
  if (!design_file.empty()) {
    const auto p = load_design(design_file);
    g.P = control::solve_care(p.A, p.B, p.Q, p.R);
    g.K = p.R.ldlt().solve(p.B.transpose() * g.P);
    Eigen::EigenSolver<Eigen::MatrixXd> es(p.A - p.B * g.K, false);
    g.closed_loop_eigenvalues = es.eigenvalues();
    g.rho = -es.eigenvalues().real().maxCoeff();
    g.care_residual = control::care_residual(p.A, p.B, p.Q, p.R, g.P).norm();
  } else {
    const auto sc = load_scenario(scenario_name, "", overrides);
    g = control::lqr_gain(control::build_state_space(sc.pools), sc.weights);
  }
  print_matrix(std::cout, "# K (u = sign * K * x), sign = " + ini::fmt(g.sign), g.K);
  std::cout << "# closed-loop eigenvalues\nre,im\n";
  for (Eigen::Index k = 0; k < g.closed_loop_eigenvalues.size(); ++k) {
    std::cout << ini::fmt(g.closed_loop_eigenvalues[k].real()) << ',' << ini::fmt(g.closed_loop_eigenvalues[k].imag())
              << '\n';
  }
  std::cout << "# rho,care_residual\n" << ini::fmt(g.rho) << ',' << ini::fmt(g.care_residual) << '\n';
  return kOk;
}

int cmd_energy(const std::string& scenario_name, const std::string& profile_name,
               const std::vector<std::string>& overrides, const std::string& out_dir, int fev_steps,
               const std::vector<int>& events) {
  const auto sc = load_scenario(scenario_name, profile_name, overrides);
  const auto cfg = sc.epoch_config();
  const auto& slots = sc.network.slots;
  for (auto t : {protocol::SlotType::S, protocol::SlotType::EV, protocol::SlotType::T, protocol::SlotType::A,
                 protocol::SlotType::Ctrl}) {
    if (!(slots[t].t_on_ms > 0.0)) {
      throw ScenarioError("profile lacks a calibrated radio-on time for slot " + protocol::to_string(t));
    }
  }
  if (fev_steps < 1) throw ScenarioError("--fev-steps must be >= 1");
  std::ostringstream fev, sweep;
  fev << "F_ev,T_on_E_ms,T_on_P_ms,DC_E_pct,DC_P_pct,savings_pct\n";
  for (int k = 0; k <= fev_steps; ++k) {
    const double f = double(k) / fev_steps;
    const auto est = energy::analytic_ton(cfg, slots, f);
    fev << ini::fmt(f) << ',' << ini::fmt(est.ton_e_ms) << ',' << ini::fmt(est.ton_p_ms) << ','
        << ini::fmt(est.dc_e_pct) << ',' << ini::fmt(est.dc_p_pct) << ',' << ini::fmt(100.0 * est.savings()) << '\n';
  }
  energy::ReferenceSweep ref;
  if (!events.empty()) {
    if (events.size() != ref.epoch_s.size()) throw ScenarioError("--events needs one count per epoch duration");
    ref.events = events;
  }
  sweep << "T_epoch_s,events,epochs,F_ev,DC_E_pct,DC_P_pct,savings_pct\n";
  for (const auto& row : energy::epoch_sweep(cfg, slots, ref.epoch_s, ref.events)) {
    sweep << ini::fmt(row.epoch_s) << ',' << row.events << ',' << row.epochs << ','
          << ini::fmt(double(row.events) / row.epochs) << ',' << ini::fmt(row.estimate.dc_e_pct) << ','
          << ini::fmt(row.estimate.dc_p_pct) << ',' << ini::fmt(100.0 * row.estimate.savings()) << '\n';
  }
  std::cout << "# break_even_F_ev," << ini::fmt(energy::break_even_fev(cfg, slots)) << '\n'
            << fev.str() << '\n'
            << sweep.str();
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "energy_fev.csv", fev.str());
    write_file(fs::path(out_dir) / "energy_epoch_sweep.csv", sweep.str());
  }
  return kOk;
}

int cmd_validate(const std::string& scenario_name, const std::string& profile_name,
                 const std::vector<std::string>& overrides) {
  const auto sc = load_scenario(scenario_name, profile_name, overrides);
  const auto issues = trigger::validate_params(sc.trigger);
  for (const auto& i : issues) std::cerr << "trigger: " << i << '\n';
  const auto sched = protocol::build_schedule(sc.epoch_config(), sc.slot_config());
  std::cout << "slot,index,owner,recovery,start_ms,end_ms\n";
  for (const auto& s : sched.slots) {
    std::cout << protocol::to_string(s.type) << ',' << s.index << ',' << s.owner << ',' << (s.recovery ? 1 : 0) << ','
              << ini::fmt(s.start_ms) << ',' << ini::fmt(s.end_ms()) << '\n';
  }
  std::cout << "# epsilon_sq," << ini::fmt(sc.trigger.epsilon_sq()) << "\n# active_ms," << ini::fmt(sched.active_ms)
            << '\n';
  return issues.empty() ? kOk : kScenarioError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wireless Control Bus co-simulator for a five-pool irrigation channel"};
  app.require_subcommand(1);

  std::string scenario_name, out_dir, seeds = "1", profile_name, design_file;
  std::vector<std::string> overrides;
  std::vector<int> events;
  bool no_series = false;
  int fev_steps = 20;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_name, "Preset name or scenario file");
    sub->add_option("--override", overrides, "section.key=value, repeatable");
    sub->add_option("--profile", profile_name, "Testbed profile: hall, dept or a profile file");
  };
  auto* run = app.add_subcommand("run", "Run one experiment per seed and write CSV reports");
  common(run);
  run->add_option("--seeds", seeds, "Seed list, e.g. 1..8 or 1,3,5");
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--summary-only", no_series, "Skip trajectory and trace files");

  auto* design = app.add_subcommand("design", "Print the LQR gain, closed-loop eigenvalues and decay rate");
  design->add_option("--scenario", scenario_name, "Preset name or scenario file");
  design->add_option("--override", overrides, "section.key=value, repeatable");
  design->add_option("--matrices", design_file, "Design file with [design] n, m, A, B, Q, R");

  auto* energy = app.add_subcommand("energy-model", "Analytic duty cycle versus event fraction and epoch length");
  common(energy);
  energy->add_option("--out", out_dir, "Output directory");
  energy->add_option("--fev-steps", fev_steps, "Grid points over F_ev in [0, 1]");
  energy->add_option("--events", events, "Event epochs per day for T_epoch = 60,45,30,15,5,1 s")->delimiter(',');

  auto* validate = app.add_subcommand("validate", "Check trigger parameters and print the epoch schedule");
  common(validate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario_name, profile_name, overrides, seeds, out_dir, !no_series);
    if (*design) return cmd_design(scenario_name, overrides, design_file);
    if (*energy) return cmd_energy(scenario_name, profile_name, overrides, out_dir, fev_steps, events);
    if (*validate) return cmd_validate(scenario_name, profile_name, overrides);
  } catch (const NonFiniteState& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const NoStabilizingSolution& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCareFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kScenarioError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kScenarioError;
  }
  return kOk;
}
