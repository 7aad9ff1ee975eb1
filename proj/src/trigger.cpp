#include "wcb/trigger.hpp"

#include "wcb/errors.hpp"
#include "wcb/ini.hpp"

#include <Eigen/Eigenvalues>

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace wcb::trigger {

using control::x1_index;
using control::x2_index;
using control::x3_index;

double TriggerParams::epsilon_sq() const {
  return std::accumulate(nodes.begin(), nodes.end(), 0.0,
                         [](double acc, const NodeParams& n) { return acc + n.theta; });
}

Eigen::VectorXd default_scale() {
  Eigen::VectorXd s(control::kStates);
  for (int i = 0; i < plant::kPools; ++i) {
    s[x1_index(i)] = kX1Scale;
    s[x2_index(i)] = kX2Scale;
    s[x3_index(i)] = kX3Scale;
  }
  return s;
}

TriggerParams TriggerParams::wis_default() {
  TriggerParams p;
  p.scale = default_scale();
  auto height = [&](int pool, double m11, double m12, double m22, double n11, double theta) {
    NodeParams n;
    n.states = {x1_index(pool), x3_index(pool)};
    n.M.resize(2, 2);
    n.M << m11, m12, m12, m22;
    n.N = Eigen::MatrixXd::Zero(2, 2);
    n.N(0, 0) = n11;
    n.theta = theta;
    p.nodes.push_back(std::move(n));
  };
  height(0, 0.621, 0.003, 0.0001, 2.5e-8, 0.415);
  height(1, 0.414, 0.003, 0.0002, 0.0503, 0.24);
  height(2, 1.854, -0.083, 0.13, 1.2e-8, 0.987);
  height(3, 2.48, 0.012, 0.001, 1e-6, 1.18);
  height(4, 7.639, 0.027, 0.006, 0.9497, 2.15);

  const double flow_m[plant::kPools] = {0.1147, 0.0841, 0.2337, 0.5352, 1.4786};
  for (int i = 0; i < plant::kPools; ++i) {
    NodeParams n;
    n.states = {x2_index(i)};
    n.M = Eigen::MatrixXd::Constant(1, 1, flow_m[i]);
    n.N = Eigen::MatrixXd::Zero(1, 1);
    n.theta = 9.0;
    p.nodes.push_back(std::move(n));
  }
  return p;
}

namespace {

const NodeParams& node_at(const TriggerParams& params, int j) {
  if (j < 0 || j >= params.node_count()) throw DimensionMismatch("trigger node index out of range");
  return params.nodes[j];
}

Eigen::VectorXd node_scale(const TriggerParams& params, const NodeParams& n) {
  Eigen::VectorXd s(n.states.size());
  for (std::size_t k = 0; k < n.states.size(); ++k) s[k] = params.scale[n.states[k]];
  return s;
}

}  // namespace

Eigen::VectorXd local(const TriggerParams& params, int j, const Eigen::VectorXd& x) {
  const auto& n = node_at(params, j);
  Eigen::VectorXd out(n.states.size());
  for (std::size_t k = 0; k < n.states.size(); ++k) {
    if (n.states[k] >= x.size()) throw DimensionMismatch("state vector too short for node");
    out[k] = x[n.states[k]];
  }
  return out;
}

double node_margin(const TriggerParams& params, int j, const Eigen::VectorXd& x_j,
                   const Eigen::VectorXd& xhat_j) {
  const auto& n = node_at(params, j);
  const auto dim = static_cast<Eigen::Index>(n.states.size());
  if (x_j.size() != dim || xhat_j.size() != dim) {
    throw DimensionMismatch("node_trigger: measurement dimension does not match node " +
                            std::to_string(j + 1));
  }
  const Eigen::VectorXd s = node_scale(params, n);
  const Eigen::VectorXd x = s.cwiseProduct(x_j);
  const Eigen::VectorXd e = s.cwiseProduct(xhat_j - x_j);
  return e.dot(n.M * e) - x.dot(n.N * x) - n.theta;
}

bool node_trigger(const TriggerParams& params, int j, const Eigen::VectorXd& x_j,
                  const Eigen::VectorXd& xhat_j) {
  return node_margin(params, j, x_j, xhat_j) > 0.0;
}

Centralized assemble(const TriggerParams& params) {
  const auto n = params.scale.size();
  Centralized c{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), params.epsilon_sq()};
  for (const auto& node : params.nodes) {
    const Eigen::VectorXd s = node_scale(params, node);
    for (std::size_t a = 0; a < node.states.size(); ++a) {
      for (std::size_t b = 0; b < node.states.size(); ++b) {
        c.M(node.states[a], node.states[b]) = s[a] * node.M(a, b) * s[b];
        c.N(node.states[a], node.states[b]) = s[a] * node.N(a, b) * s[b];
      }
    }
  }
  return c;
}

bool centralized_trigger(const Eigen::VectorXd& e, const Eigen::VectorXd& x, const Eigen::MatrixXd& M,
                         const Eigen::MatrixXd& N, double epsilon_sq, const TriggerParams& partition) {
  const auto n = e.size();
  if (x.size() != n || M.rows() != n || M.cols() != n || N.rows() != n || N.cols() != n) {
    throw DimensionMismatch("centralized_trigger: inconsistent dimensions");
  }
  std::vector<int> owner(n, -1);
  for (int j = 0; j < partition.node_count(); ++j) {
    for (int s : partition.nodes[j].states) {
      if (s >= 0 && s < n) owner[s] = j;
    }
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if ((M(a, b) != 0.0 || N(a, b) != 0.0) && (owner[a] != owner[b] || owner[a] < 0)) {
        throw BlockStructureViolation("triggering matrices couple states of different nodes");
      }
    }
  }
  return e.dot(M * e) - x.dot(N * x) > epsilon_sq;
}

std::vector<std::string> validate_params(const TriggerParams& params) {
  std::vector<std::string> issues;
  const auto n_states = params.scale.size();
  if ((params.scale.array() <= 0.0).any() || !params.scale.allFinite()) {
    issues.push_back("scale entries must be positive and finite");
  }
  std::set<int> seen;
  for (int j = 0; j < params.node_count(); ++j) {
    const auto& n = params.nodes[j];
    const std::string tag = "node " + std::to_string(j + 1) + ": ";
    const auto dim = static_cast<Eigen::Index>(n.states.size());
    if (dim == 0) issues.push_back(tag + "no states assigned");
    if (n.M.rows() != dim || n.M.cols() != dim || n.N.rows() != dim || n.N.cols() != dim) {
      issues.push_back(tag + "matrix dimensions do not match the state set");
      continue;
    }
    for (int s : n.states) {
      if (s < 0 || s >= n_states) issues.push_back(tag + "state index " + std::to_string(s) + " out of range");
      if (!seen.insert(s).second) issues.push_back(tag + "state " + std::to_string(s) + " owned by more than one node");
    }
    if ((n.M - n.M.transpose()).norm() > 1e-12) {
      issues.push_back(tag + "M is not symmetric");
    }
    if ((n.N - n.N.transpose()).norm() > 1e-12) {
      issues.push_back(tag + "N is not symmetric");
    } else if (dim > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(n.N, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-12) issues.push_back(tag + "N is not positive semidefinite");
    }
    if (!(n.theta > 0.0) || !std::isfinite(n.theta)) issues.push_back(tag + "theta must be positive");
  }
  return issues;
}

namespace {

std::vector<double> read_numbers(std::istringstream& in, const std::string& what, int line_no) {
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(line_no) + ": bad number '" + tok + "' in " + what);
    }
  }
  return v;
}

Eigen::MatrixXd square(const std::vector<double>& v, std::size_t dim, const std::string& what, int line_no) {
  if (v.size() != dim * dim) {
    throw ConfigError("line " + std::to_string(line_no) + ": " + what + " needs " +
                      std::to_string(dim * dim) + " entries");
  }
  Eigen::MatrixXd m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = v[r * dim + c];
  return m;
}

}  // namespace

TriggerParams parse_params(const std::string& text) {
  TriggerParams p;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  NodeParams* current = nullptr;
  std::vector<bool> have;  // M, N, theta seen for the current node
  auto finish = [&]() {
    if (current && !(have[0] && have[1] && have[2])) {
      throw ConfigError("node " + std::to_string(p.nodes.size()) + " is missing M, N or theta");
    }
  };
  while (std::getline(lines, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream in(line);
    std::string key;
    if (!(in >> key)) continue;
    if (key == "scale") {
      const auto v = read_numbers(in, "scale", line_no);
      if (v.size() != static_cast<std::size_t>(control::kStates)) {
        throw ConfigError("line " + std::to_string(line_no) + ": scale needs " +
                          std::to_string(control::kStates) + " entries");
      }
      p.scale = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else if (key == "node") {
      finish();
      NodeParams n;
      for (double s : read_numbers(in, "node", line_no)) n.states.push_back(static_cast<int>(s));
      if (n.states.empty()) throw ConfigError("line " + std::to_string(line_no) + ": node without states");
      p.nodes.push_back(std::move(n));
      current = &p.nodes.back();
      have.assign(3, false);
    } else if (key == "M" || key == "N" || key == "theta") {
      if (!current) throw ConfigError("line " + std::to_string(line_no) + ": " + key + " before any node");
      const auto v = read_numbers(in, key, line_no);
      if (key == "M") {
        current->M = square(v, current->states.size(), "M", line_no);
        have[0] = true;
      } else if (key == "N") {
        current->N = square(v, current->states.size(), "N", line_no);
        have[1] = true;
      } else {
        if (v.size() != 1) throw ConfigError("line " + std::to_string(line_no) + ": theta needs one value");
        current->theta = v[0];
        have[2] = true;
      }
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  finish();
  if (p.nodes.empty()) throw ConfigError("trigger file defines no nodes");
  const auto issues = validate_params(p);
  if (!issues.empty()) throw ConfigError("invalid trigger parameters: " + issues.front());
  return p;
}

TriggerParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trigger file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str());
}

std::string format_params(const TriggerParams& params) {
  std::ostringstream out;
  out << "scale";
  for (Eigen::Index k = 0; k < params.scale.size(); ++k) out << ' ' << ini::fmt(params.scale[k]);
  out << '\n';
  for (const auto& n : params.nodes) {
    out << "node";
    for (int s : n.states) out << ' ' << s;
    out << "\nM";
    for (Eigen::Index r = 0; r < n.M.rows(); ++r)
      for (Eigen::Index c = 0; c < n.M.cols(); ++c) out << ' ' << ini::fmt(n.M(r, c));
    out << "\nN";
    for (Eigen::Index r = 0; r < n.N.rows(); ++r)
      for (Eigen::Index c = 0; c < n.N.cols(); ++c) out << ' ' << ini::fmt(n.N(r, c));
    out << "\ntheta " << ini::fmt(n.theta) << '\n';
  }
  return out.str();
}

}  // namespace wcb::trigger
