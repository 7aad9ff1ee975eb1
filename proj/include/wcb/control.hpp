#pragma once

// LQR synthesis for the irrigation channel design model.
//
// The dense solvers below are templated on the Eigen expression type so they
// work for any real scalar; the model-specific pieces live in control.cpp.

#include "wcb/errors.hpp"
#include "wcb/plant.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace wcb::control {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Solves A^T X + X A + Q = 0 through a complex Schur decomposition of A
/// followed by triangular back-substitution. Requires lambda_i + conj(lambda_j)
/// != 0 for all eigenvalue pairs (e.g. A Hurwitz).
template <typename DerivedA, typename DerivedQ>
Matrix<typename DerivedA::Scalar> solve_lyapunov(const Eigen::MatrixBase<DerivedA>& A,
                                                 const Eigen::MatrixBase<DerivedQ>& Q) {
  using Scalar = typename DerivedA::Scalar;
  using Complex = std::complex<Scalar>;
  using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw DimensionMismatch("solve_lyapunov: A and Q must be square and of equal size");
  }
  const Matrix<Scalar> Ad = A;
  Eigen::ComplexSchur<Matrix<Scalar>> schur(Ad);
  const CMatrix& T = schur.matrixT();
  const CMatrix& U = schur.matrixU();
  const CMatrix C = -(U.adjoint() * Q.template cast<Complex>() * U);

  const Scalar scale = std::max<Scalar>(A.norm(), Scalar(1));
  CMatrix Y = CMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex acc = C(i, j);
      for (Eigen::Index k = 0; k < i; ++k) acc -= std::conj(T(k, i)) * Y(k, j);
      for (Eigen::Index k = 0; k < j; ++k) acc -= Y(i, k) * T(k, j);
      const Complex denom = std::conj(T(i, i)) + T(j, j);
      if (std::abs(denom) <= Scalar(100) * std::numeric_limits<Scalar>::epsilon() * scale) {
        throw NoStabilizingSolution("Lyapunov operator is singular (eigenvalues symmetric about the imaginary axis)");
      }
      Y(i, j) = acc / denom;
    }
  }
  Matrix<Scalar> X = (U * Y * U.adjoint()).real();
  return (X + X.transpose()) / Scalar(2);
}

/// Largest real part of the eigenvalues of a square matrix.
template <typename Derived>
typename Derived::Scalar spectral_abscissa(const Eigen::MatrixBase<Derived>& A) {
  Eigen::EigenSolver<Matrix<typename Derived::Scalar>> es(A.eval(), false);
  return es.eigenvalues().real().maxCoeff();
}

/// PBH test: every eigenvalue with Re >= 0 must keep [A - lambda I, B] full row rank.
template <typename DerivedA, typename DerivedB>
bool is_stabilizable(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B) {
  using Scalar = typename DerivedA::Scalar;
  using Complex = std::complex<Scalar>;
  using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = A.rows(), m = B.cols();
  Eigen::EigenSolver<Matrix<Scalar>> es(A.eval(), false);
  const Scalar tol = std::sqrt(std::numeric_limits<Scalar>::epsilon()) *
                     std::max<Scalar>(Scalar(1), A.norm() + B.norm());
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex lambda = es.eigenvalues()[k];
    if (lambda.real() < -tol) continue;
    CMatrix pbh(n, n + m);
    pbh.leftCols(n) = A.template cast<Complex>() - lambda * CMatrix::Identity(n, n);
    pbh.rightCols(m) = B.template cast<Complex>();
    Eigen::JacobiSVD<CMatrix> svd(pbh);
    if (svd.singularValues()[n - 1] <= tol) return false;
  }
  return true;
}

/// Stabilizing feedback K0 (A - B K0 Hurwitz) via the shifted-Gramian
/// construction: solve (A + bI) X + X (A + bI)^T = 2 B B^T with b above the
/// spectral radius, then K0 = B^T X^{-1}.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> stabilizing_gain(const Eigen::MatrixBase<DerivedA>& A,
                                                   const Eigen::MatrixBase<DerivedB>& B) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index n = A.rows();
  if (spectral_abscissa(A) < Scalar(0)) return Matrix<Scalar>::Zero(B.cols(), n);

  Eigen::EigenSolver<Matrix<Scalar>> es(A.eval(), false);
  const Scalar shift = es.eigenvalues().cwiseAbs().maxCoeff() + Scalar(1);
  const Matrix<Scalar> shifted = -(A + shift * Matrix<Scalar>::Identity(n, n)).transpose();
  const Matrix<Scalar> X = solve_lyapunov(shifted, Scalar(2) * B * B.transpose());
  Eigen::CompleteOrthogonalDecomposition<Matrix<Scalar>> cod(X);
  const Matrix<Scalar> K0 = B.transpose() * cod.pseudoInverse();
  if (!(spectral_abscissa(A - B * K0) < Scalar(0))) {
    throw NoStabilizingSolution("could not construct an initial stabilizing gain");
  }
  return K0;
}

struct CareOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
};

/// Residual A^T P + P A - P B R^{-1} B^T P + Q.
template <typename DA, typename DB, typename DQ, typename DR, typename DP>
Matrix<typename DA::Scalar> care_residual(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B,
                                          const Eigen::MatrixBase<DQ>& Q, const Eigen::MatrixBase<DR>& R,
                                          const Eigen::MatrixBase<DP>& P) {
  const auto BtP = (B.transpose() * P).eval();
  return A.transpose() * P + P * A - BtP.transpose() * R.ldlt().solve(BtP) + Q;
}

/// Stabilizing solution of the continuous algebraic Riccati equation by
/// Newton-Kleinman iteration. Throws NoStabilizingSolution when (A, B) is not
/// stabilizable, the iteration stalls, or the limit is not stabilizing.
template <typename DA, typename DB, typename DQ, typename DR>
Matrix<typename DA::Scalar> solve_care(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B,
                                       const Eigen::MatrixBase<DQ>& Q, const Eigen::MatrixBase<DR>& R,
                                       const CareOptions& opts = {}) {
  using Scalar = typename DA::Scalar;
  const Eigen::Index n = A.rows(), m = B.cols();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != m ||
      R.cols() != m) {
    throw DimensionMismatch("solve_care: inconsistent matrix dimensions");
  }
  if (!is_stabilizable(A, B)) throw NoStabilizingSolution("(A, B) is not stabilizable");

  const auto Rldlt = R.eval().ldlt();
  if (Rldlt.info() != Eigen::Success || !Rldlt.isPositive()) {
    throw NoStabilizingSolution("R must be positive definite");
  }
  Matrix<Scalar> K = stabilizing_gain(A, B);
  Matrix<Scalar> P = Matrix<Scalar>::Zero(n, n);
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Matrix<Scalar> Ak = A - B * K;
    const Matrix<Scalar> Pn = solve_lyapunov(Ak, Q + K.transpose() * R * K);
    const Scalar change = (Pn - P).norm();
    P = Pn;
    K = Rldlt.solve(B.transpose() * P);
    if (it > 0 && change <= Scalar(opts.relative_tolerance) * P.norm()) {
      if (!(spectral_abscissa(A - B * K) < Scalar(0))) {
        throw NoStabilizingSolution("Riccati limit does not stabilize the pair");
      }
      return P;
    }
  }
  throw NoStabilizingSolution("Newton-Kleinman iteration did not converge in " +
                              std::to_string(opts.max_iterations) + " steps");
}

// ---------------------------------------------------------------------------
// Irrigation channel design model

inline constexpr int kStates = 3 * plant::kPools;
inline constexpr int kInputs = plant::kPools;

using StateVector = Eigen::Matrix<double, kStates, 1>;

/// Index of x1_i, x2_i, x3_i (0-based pool) in the 15-state ordering.
constexpr int x1_index(int pool) { return pool; }
constexpr int x2_index(int pool) { return plant::kPools + pool; }
constexpr int x3_index(int pool) { return 2 * plant::kPools + pool; }

struct StateSpaceModel {
  Eigen::MatrixXd A;  // 15 x 15
  Eigen::MatrixXd B;  // 15 x 5
  Eigen::MatrixXd E;  // 15 x 5, off-take input (not used by the controller)
};

/// Delay replaced by its (1,1) Pade approximant, plus an integrator per pool:
///   x1' = (1/tau) x2 - (u_i + u_{i+1} + d_i) / alpha
///   x2' = -(2/tau) x2 + (4/alpha) u_i
///   x3' = x1
/// The x2 coupling is positive so that a delayed inflow raises the level.
StateSpaceModel build_state_space(const plant::PoolSet& pools);

struct LqrWeights {
  Eigen::VectorXd q;  // diagonal of Q, >= 0
  Eigen::VectorXd r;  // diagonal of R, > 0

  /// Q = diag(1250,1250,2500,5000,7500 | 0 x5 | 1.25,1.25,2.5,5,7.5), R = I.
  static LqrWeights wis_default();
  void validate() const;
};

struct ControllerGain {
  Eigen::MatrixXd K;       // R^{-1} B^T P
  double sign = -1.0;      // u = sign * K * xhat
  double rho = 0.0;        // -(spectral abscissa of the closed loop) [1/min]
  Eigen::VectorXcd closed_loop_eigenvalues;
  Eigen::MatrixXd P;
  double care_residual = 0.0;  // Frobenius norm

  Eigen::MatrixXd effective() const { return sign * K; }
};

/// LQR gain and closed-loop decay rate. The sign of the law is chosen once
/// here so that A + B * effective() is Hurwitz; throws otherwise.
ControllerGain lqr_gain(const StateSpaceModel& model, const LqrWeights& weights);

/// u = effective gain * xhat.
Eigen::VectorXd control_law(const ControllerGain& gain, const Eigen::VectorXd& xhat);

}  // namespace wcb::control
