#pragma once

// Decentralized periodic event-triggering: each node j owns a subset I_j of
// the 15 design states and fires when e_j' M_j e_j - x_j' N_j x_j > theta_j.

#include "wcb/control.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace wcb::trigger {

struct NodeParams {
  std::vector<int> states;  // indices into the 15-state vector, in matrix order
  Eigen::MatrixXd M;
  Eigen::MatrixXd N;
  double theta = 0.0;
};

struct TriggerParams {
  std::vector<NodeParams> nodes;

  // Per-state multiplier applied to e and x before the quadratic forms
  // (unit conversion from m / m min). All ones means SI units.
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(control::kStates);

  double epsilon_sq() const;
  int node_count() const { return static_cast<int>(nodes.size()); }

  /// Matrices of the 10-node channel design: height nodes 1-5 over
  /// [x1_j, x3_j], flow nodes 6-10 over x2_j, with the default unit scale.
  static TriggerParams wis_default();
};

/// Default coordinate scale, calibrated so the noiseless day samples
/// roughly one epoch in ten.
inline constexpr double kX1Scale = 150.0;
inline constexpr double kX2Scale = 1.0;
inline constexpr double kX3Scale = 5.5;
Eigen::VectorXd default_scale();

/// Local measurement of node j (0-based) extracted from a full state vector.
Eigen::VectorXd local(const TriggerParams& params, int j, const Eigen::VectorXd& x);

/// True iff e' M e - x' N x > theta for e = xhat - x (scaled coordinates).
/// Throws DimensionMismatch when x or xhat do not match the node's states.
bool node_trigger(const TriggerParams& params, int j, const Eigen::VectorXd& x_j,
                  const Eigen::VectorXd& xhat_j);

/// Value of e' M e - x' N x - theta; positive means the node fires.
double node_margin(const TriggerParams& params, int j, const Eigen::VectorXd& x_j,
                   const Eigen::VectorXd& xhat_j);

/// Block-diagonal centralized matrices (scale folded in) over the full state.
struct Centralized {
  Eigen::MatrixXd M;
  Eigen::MatrixXd N;
  double epsilon_sq = 0.0;
};
Centralized assemble(const TriggerParams& params);

/// True iff e' M e - x' N x > epsilon_sq. Throws BlockStructureViolation if
/// M or N couple states owned by different nodes of `params`, and
/// DimensionMismatch on size errors.
bool centralized_trigger(const Eigen::VectorXd& e, const Eigen::VectorXd& x, const Eigen::MatrixXd& M,
                         const Eigen::MatrixXd& N, double epsilon_sq, const TriggerParams& partition);

/// Symmetry, PSD of N_j (eigenvalues >= -1e-12), disjoint index sets,
/// dimensions and positive scale. Empty result means valid.
std::vector<std::string> validate_params(const TriggerParams& params);

/// Plain-text format, one block per node:
///   scale <s_1> ... <s_15>
///   node <states...>
///   M <row-major entries>
///   N <row-major entries>
///   theta <value>
/// Lines starting with '#' are ignored. Throws ConfigError on malformed input.
TriggerParams parse_params(const std::string& text);
TriggerParams load_params(const std::string& path);
std::string format_params(const TriggerParams& params);

}  // namespace wcb::trigger
