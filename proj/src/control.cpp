#include "wcb/control.hpp"

namespace wcb::control {

StateSpaceModel build_state_space(const plant::PoolSet& pools) {
  constexpr int n = plant::kPools;
  StateSpaceModel m{Eigen::MatrixXd::Zero(kStates, kStates), Eigen::MatrixXd::Zero(kStates, kInputs),
                    Eigen::MatrixXd::Zero(kStates, kInputs)};
  for (int i = 0; i < n; ++i) {
    const auto& p = pools[i];
    plant::validate(p);
    m.A(x1_index(i), x2_index(i)) = 1.0 / p.tau;
    m.B(x1_index(i), i) = -1.0 / p.alpha;
    if (i + 1 < n) m.B(x1_index(i), i + 1) = -1.0 / p.alpha;
    m.E(x1_index(i), i) = -1.0 / p.alpha;

    m.A(x2_index(i), x2_index(i)) = -2.0 / p.tau;
    m.B(x2_index(i), i) = 4.0 / p.alpha;

    m.A(x3_index(i), x1_index(i)) = 1.0;
  }
  return m;
}

LqrWeights LqrWeights::wis_default() {
  LqrWeights w;
  w.q = Eigen::VectorXd::Zero(kStates);
  w.q << 1250, 1250, 2500, 5000, 7500, 0, 0, 0, 0, 0, 1.25, 1.25, 2.5, 5, 7.5;
  w.r = Eigen::VectorXd::Ones(kInputs);
  return w;
}

void LqrWeights::validate() const {
  if ((q.array() < 0.0).any() || !q.allFinite()) throw ConfigError("Q diagonal entries must be >= 0");
  if ((r.array() <= 0.0).any() || !r.allFinite()) throw ConfigError("R diagonal entries must be > 0");
}

ControllerGain lqr_gain(const StateSpaceModel& model, const LqrWeights& weights) {
  weights.validate();
  if (weights.q.size() != model.A.rows() || weights.r.size() != model.B.cols()) {
    throw DimensionMismatch("LQR weights do not match the model dimensions");
  }
  const Eigen::MatrixXd Q = weights.q.asDiagonal();
  const Eigen::MatrixXd R = weights.r.asDiagonal();

  ControllerGain g;
  g.P = solve_care(model.A, model.B, Q, R);
  g.K = R.ldlt().solve(model.B.transpose() * g.P);
  g.care_residual = care_residual(model.A, model.B, Q, R, g.P).norm();

  for (double sign : {-1.0, 1.0}) {
    const Eigen::MatrixXd closed = model.A + sign * model.B * g.K;
    Eigen::EigenSolver<Eigen::MatrixXd> es(closed, false);
    const double abscissa = es.eigenvalues().real().maxCoeff();
    if (abscissa < 0.0) {
      g.sign = sign;
      g.rho = -abscissa;
      g.closed_loop_eigenvalues = es.eigenvalues();
      return g;
    }
  }
  throw NoStabilizingSolution("neither sign of the LQR gain stabilizes the design model");
}

Eigen::VectorXd control_law(const ControllerGain& gain, const Eigen::VectorXd& xhat) {
  if (xhat.size() != gain.K.cols()) throw DimensionMismatch("control_law: state dimension mismatch");
  return gain.sign * (gain.K * xhat);
}

}  // namespace wcb::control
