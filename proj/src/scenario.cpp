#include "wcb/scenario.hpp"

#include "wcb/errors.hpp"
#include "wcb/ini.hpp"

#include <filesystem>
#include <sstream>

namespace wcb::scenario {

using cosim::Scenario;
namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& path, const std::string& base_dir) {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base_dir) / p).string();
}

Eigen::VectorXd fixed_length(const ini::Entry& e, int n) {
  const auto v = ini::to_doubles(e);
  if (static_cast<int>(v.size()) != n) {
    throw ScenarioError("line " + std::to_string(e.line) + ": " + e.key + " needs " + std::to_string(n) + " values");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

plant::DisturbanceSchedule parse_disturbances(const ini::Entry& e) {
  std::vector<plant::DisturbanceStep> steps;
  if (e.value != "none" && !e.value.empty()) {
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) {
      ini::Entry one = e;
      one.value = item;
      const auto v = ini::to_doubles(one);
      if (v.size() != 3) throw ScenarioError("line " + std::to_string(e.line) + ": disturbance needs 'time pool flow'");
      steps.push_back({v[0], static_cast<int>(v[1]) - 1, v[2]});
    }
  }
  return plant::DisturbanceSchedule(std::move(steps));
}

std::string format_disturbances(const plant::DisturbanceSchedule& d) {
  if (d.steps().empty()) return "none";
  std::string s;
  for (std::size_t k = 0; k < d.steps().size(); ++k) {
    const auto& st = d.steps()[k];
    s += (k ? ", " : "") + ini::fmt(st.time) + ' ' + std::to_string(st.pool + 1) + ' ' + ini::fmt(st.flow);
  }
  return s;
}

// node<j> = <states> / <M row-major> / <N row-major> / <theta>
trigger::NodeParams parse_node(const ini::Entry& e) {
  std::vector<std::string> parts;
  std::istringstream in(e.value);
  std::string part;
  while (std::getline(in, part, '/')) parts.push_back(part);
  if (parts.size() != 4) throw ScenarioError("line " + std::to_string(e.line) + ": node needs states / M / N / theta");
  auto numbers = [&](const std::string& text) {
    ini::Entry one = e;
    one.value = text;
    return ini::to_doubles(one);
  };
  trigger::NodeParams n;
  for (double s : numbers(parts[0])) n.states.push_back(static_cast<int>(s));
  const auto dim = n.states.size();
  const auto m = numbers(parts[1]), nn = numbers(parts[2]), theta = numbers(parts[3]);
  if (dim == 0 || m.size() != dim * dim || nn.size() != dim * dim || theta.size() != 1) {
    throw ScenarioError("line " + std::to_string(e.line) + ": node matrix sizes do not match its states");
  }
  n.M.resize(dim, dim);
  n.N.resize(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      n.M(r, c) = m[r * dim + c];
      n.N(r, c) = nn[r * dim + c];
    }
  }
  n.theta = theta[0];
  return n;
}

std::string format_node(const trigger::NodeParams& n) {
  std::vector<double> states(n.states.begin(), n.states.end());
  std::vector<double> m(n.M.size()), nn(n.N.size());
  for (Eigen::Index r = 0; r < n.M.rows(); ++r) {
    for (Eigen::Index c = 0; c < n.M.cols(); ++c) {
      m[r * n.M.cols() + c] = n.M(r, c);
      nn[r * n.N.cols() + c] = n.N(r, c);
    }
  }
  return ini::fmt(states) + " / " + ini::fmt(m) + " / " + ini::fmt(nn) + " / " + ini::fmt(n.theta);
}

std::string vec_text(const Eigen::VectorXd& v) { return ini::fmt(std::vector<double>(v.data(), v.data() + v.size())); }

void apply_entry(Scenario& s, const ini::Entry& e, const std::string& base_dir) {
  const auto& sec = e.section;
  const auto& key = e.key;
  auto unknown = [&]() {
    throw ScenarioError("line " + std::to_string(e.line) + ": unknown key '" + (sec.empty() ? "" : sec + ".") + key + "'");
  };
  if (sec == "run") {
    if (key == "name") s.name = e.value;
    else if (key == "variant") s.variant = protocol::parse_variant(e.value);
    else if (key == "epochs") s.epochs = ini::to_int(e);
    else if (key == "epoch_s") s.epoch_s = ini::to_double(e);
    else if (key == "dt") s.dt = ini::to_double(e);
    else if (key == "seed") s.seed = std::stoull(e.value);
    else if (key == "trajectory_stride") s.trajectory_stride = ini::to_double(e);
    else if (key == "bootstrap") s.bootstrap = ini::to_bool(e);
    else unknown();
  } else if (sec == "plant") {
    if (key.size() == 5 && key.rfind("pool", 0) == 0 && key[4] >= '1' && key[4] <= '5') {
      const auto v = fixed_length(e, 4);
      s.pools[key[4] - '1'] = {v[0], v[1], v[2], v[3]};
    } else if (key == "y0") {
      s.y0 = fixed_length(e, plant::kPools);
    } else if (key == "disturbances") {
      s.disturbances = parse_disturbances(e);
    } else if (key == "x3_mode") {
      s.x3_mode = cosim::parse_x3_mode(e.value);
    } else {
      unknown();
    }
  } else if (sec == "control") {
    if (key == "q") s.weights.q = fixed_length(e, control::kStates);
    else if (key == "r") s.weights.r = fixed_length(e, control::kInputs);
    else unknown();
  } else if (sec == "trigger") {
    if (key == "file") {
      s.trigger = trigger::load_params(resolve(e.value, base_dir));
    } else if (key == "scale") {
      s.trigger.scale = fixed_length(e, control::kStates);
    } else if (key == "nodes") {
      const int n = ini::to_int(e);
      if (n < 1) throw ScenarioError("line " + std::to_string(e.line) + ": nodes must be >= 1");
      s.trigger.nodes.resize(n);
    } else if (key.rfind("node", 0) == 0 && key.size() > 4) {
      int j = 0;
      try {
        j = std::stoi(key.substr(4));
      } catch (const std::exception&) {
        unknown();
      }
      if (j < 1 || j > s.trigger.node_count()) {
        throw ScenarioError("line " + std::to_string(e.line) + ": " + key + " outside 1..nodes");
      }
      s.trigger.nodes[j - 1] = parse_node(e);
    } else {
      unknown();
    }
  } else if (sec == "network") {
    if (key == "lossless") s.lossless = ini::to_bool(e);
    else if (key == "file") s.network = profile::load(resolve(e.value, base_dir));
    else if (!profile::apply(s.network, e)) unknown();
  } else if (sec == "noise") {
    if (key == "level_std") s.noise.level_std = ini::to_double(e);
    else if (key == "flow_std") s.noise.flow_std = ini::to_double(e);
    else unknown();
  } else {
    unknown();
  }
}

template <typename F>
void rethrow_as_scenario(F&& f) {
  try {
    f();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  } catch (const std::out_of_range& e) {
    throw ScenarioError(e.what());
  }
}

}  // namespace

Scenario parse(const std::string& text, const std::string& base_dir) {
  Scenario s;
  rethrow_as_scenario([&] {
    for (const auto& e : ini::parse(text)) apply_entry(s, e, base_dir);
  });
  s.validate();
  return s;
}

std::string serialize(const Scenario& s) {
  std::ostringstream out;
  out << "[run]\n";
  out << "name = " << s.name << '\n';
  out << "variant = " << protocol::to_string(s.variant) << '\n';
  out << "epochs = " << s.epochs << '\n';
  out << "epoch_s = " << ini::fmt(s.epoch_s) << '\n';
  out << "dt = " << ini::fmt(s.dt) << '\n';
  out << "seed = " << s.seed << '\n';
  out << "trajectory_stride = " << ini::fmt(s.trajectory_stride) << '\n';
  out << "bootstrap = " << (s.bootstrap ? "true" : "false") << '\n';

  out << "\n[plant]\n";
  for (int i = 0; i < plant::kPools; ++i) {
    const auto& p = s.pools[i];
    out << "pool" << i + 1 << " = " << ini::fmt({p.tau, p.alpha, p.phi, p.zeta}) << '\n';
  }
  out << "y0 = " << vec_text(s.y0) << '\n';
  out << "disturbances = " << format_disturbances(s.disturbances) << '\n';
  out << "x3_mode = " << cosim::to_string(s.x3_mode) << '\n';

  out << "\n[control]\n";
  out << "q = " << vec_text(s.weights.q) << '\n';
  out << "r = " << vec_text(s.weights.r) << '\n';

  out << "\n[trigger]\n";
  out << "scale = " << vec_text(s.trigger.scale) << '\n';
  out << "nodes = " << s.trigger.node_count() << '\n';
  for (int j = 0; j < s.trigger.node_count(); ++j) {
    out << "node" << j + 1 << " = " << format_node(s.trigger.nodes[j]) << '\n';
  }

  out << '\n' << profile::format(s.network);
  out << "lossless = " << (s.lossless ? "true" : "false") << '\n';

  out << "\n[noise]\n";
  out << "level_std = " << ini::fmt(s.noise.level_std) << '\n';
  out << "flow_std = " << ini::fmt(s.noise.flow_std) << '\n';
  return out.str();
}

void apply_overrides(Scenario& s, const std::vector<std::string>& overrides, const std::string& base_dir) {
  rethrow_as_scenario([&] {
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      const auto dot = o.find('.');
      if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ScenarioError("override '" + o + "' must look like section.key=value");
      }
      auto entries = ini::parse("[" + o.substr(0, dot) + "]\n" + o.substr(dot + 1));
      for (auto& e : entries) {
        e.line = 0;
        apply_entry(s, e, base_dir);
      }
    }
  });
  s.validate();
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const char* tb : {"hall", "dept"})
    for (const char* v : {"etc", "periodic"})
      for (const char* n : {"noiseless", "noisy"}) names.push_back(std::string(tb) + "_" + v + "_" + n);
  return names;
}

bool is_preset(const std::string& name) {
  for (const auto& n : preset_names()) {
    if (n == name) return true;
  }
  return false;
}

Scenario preset(const std::string& name) {
  if (!is_preset(name)) throw ScenarioError("unknown preset '" + name + "'");
  Scenario s;
  s.name = name;
  const auto first = name.find('_');
  const auto second = name.find('_', first + 1);
  s.network = profile::by_name(name.substr(0, first));
  s.variant = name.substr(first + 1, second - first - 1) == "etc" ? protocol::Variant::WcbE : protocol::Variant::WcbP;
  if (name.substr(second + 1) == "noisy") {
    s.noise.level_std = 0.001;
    s.noise.flow_std = 1.0;
  }
  s.validate();
  return s;
}

Scenario load(const std::string& name_or_path) {
  if (is_preset(name_or_path)) return preset(name_or_path);
  const fs::path p(name_or_path);
  std::string text;
  try {
    text = ini::read_file(name_or_path);
  } catch (const ConfigError& e) {
    throw ScenarioError(std::string(e.what()) + " (and not a preset name)");
  }
  return parse(text, p.has_parent_path() ? p.parent_path().string() : ".");
}

}  // namespace wcb::scenario
