#pragma once

#include <Eigen/Core>
#include <vector>

#include "cdmkit/polynomial.hpp"
#include "cdmkit/squared.hpp"

namespace cdmkit {

/// [[A, -B R^-1 B^T], [-Q, -A^T]]. Throws std::invalid_argument on
/// inconsistent dimensions or a singular R.
Eigen::MatrixXd hamiltonian(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

struct CareOptions {
  // Q may be sign-indefinite; the stabilizing solution still exists when the
  // Hamiltonian has no imaginary-axis eigenvalues and (A, B) is stabilizable.
  bool allow_indefinite_q = false;
  double imaginary_axis_tolerance = 1e-8;
  int max_newton_iterations = 50;
};

struct LqDesign {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  Eigen::MatrixXd P_riccati;
  Eigen::MatrixXd K;
  std::vector<Complex> closed_loop_poles;
  double residual = 0.0;  // ||A'P + PA - PBR^-1B'P + Q||_inf / (1 + ||P||_inf)
  int newton_iterations = 0;
};

/// Stabilizing solution of A'P + PA - P B R^-1 B' P + Q = 0 and the gain
/// K = R^-1 B' P. The initial solution comes from the matrix sign function
/// of the Hamiltonian and is refined with Newton-Kleinman steps.
///
/// Throws DomainError for an imaginary-axis Hamiltonian eigenvalue (the
/// message carries its value), a non-stabilizable pair, or a refinement that
/// cannot reach a stabilizing solution; std::invalid_argument for an
/// asymmetric or (unless allowed) indefinite Q and a non-positive-definite R.
LqDesign solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                    const Eigen::MatrixXd& R, const CareOptions& options = {});

/// Solution X of F' X + X F + W = 0 (Bartels-Stewart on the complex Schur
/// form of F). F must have no eigenvalue pair with lambda_i + conj(lambda_j) = 0.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& F, const Eigen::MatrixXd& W);

/// Monic det(sI - M), from the eigenvalues of the balanced matrix.
Polynomial char_poly(const Eigen::MatrixXd& M);

struct DetIdentityReport {
  Polynomial closed_loop;            // monic det(sI - (A - BK))
  SquaredPolynomial pp_from_poles;   // P(-s)P(s) / a_n^2
  SquaredPolynomial pp_from_H;       // (-1)^n det(sI - H) rewritten in Omega
  double max_relative_error = 0.0;
  double odd_power_residual = 0.0;   // largest odd-power coefficient of det(sI - H), relative
};

/// Checks P(-s)P(s)/a_n^2 = (-1)^n det(sI_2n - H) for the LQ closed loop.
DetIdentityReport verify_det_identity(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                                      const CareOptions& options = {});

/// PBH test on every eigenvalue of A with non-negative real part.
bool is_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double tolerance = 1e-9);

}  // namespace cdmkit
