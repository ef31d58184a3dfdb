#include "cdmkit/lqr.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "balance.hpp"
#include "cdmkit/errors.hpp"

namespace cdmkit {

namespace {

double inf_norm(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

void check_dimensions(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const auto n = A.rows();
  const auto m = B.cols();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != m ||
      R.cols() != m) {
    throw std::invalid_argument("LQ problem: inconsistent matrix dimensions");
  }
  if (!A.allFinite() || !B.allFinite() || !Q.allFinite() || !R.allFinite()) {
    throw std::invalid_argument("LQ problem: non-finite entry");
  }
}

double riccati_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const Eigen::MatrixXd& Q, const Eigen::LLT<Eigen::MatrixXd>& r_llt,
                        const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd res =
      A.transpose() * P + P * A - P * B * r_llt.solve(B.transpose() * P) + Q;
  return inf_norm(res) / (1.0 + inf_norm(P));
}

// Stabilizing Riccati solution from sign(H); accurate to roughly
// cond(H) * eps, refined afterwards.
Eigen::MatrixXd sign_function_solution(const Eigen::MatrixXd& H) {
  const Eigen::Index n2 = H.rows();
  const Eigen::Index n = n2 / 2;
  Eigen::MatrixXd Z = H;
  constexpr int max_iterations = 100;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Z);
    // Determinant scaling, computed in log space to avoid overflow.
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n2; ++i) log_det += std::log(std::abs(lu.matrixLU()(i, i)));
    const double c = std::exp(-log_det / static_cast<double>(n2));
    const Eigen::MatrixXd next = 0.5 * (c * Z + lu.inverse() / c);
    const double change = (next - Z).lpNorm<1>();
    Z = next;
    if (change <= 1e-13 * Z.lpNorm<1>()) break;
  }
  // (sign(H) + I) [I; P] = 0.
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd lhs(n2, n);
  Eigen::MatrixXd rhs(n2, n);
  lhs << Z.topRightCorner(n, n), Z.bottomRightCorner(n, n) + I;
  rhs << Z.topLeftCorner(n, n) + I, Z.bottomLeftCorner(n, n);
  Eigen::MatrixXd P = lhs.colPivHouseholderQr().solve(-rhs);
  return 0.5 * (P + P.transpose());
}

bool is_hurwitz(const Eigen::MatrixXd& M) {
  if (M.rows() == 0) return true;
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  return (es.eigenvalues().real().array() < 0.0).all();
}

}  // namespace

Eigen::MatrixXd hamiltonian(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  check_dimensions(A, B, Q, R);
  const auto n = A.rows();
  Eigen::FullPivLU<Eigen::MatrixXd> r_lu(R);
  if (!r_lu.isInvertible()) throw std::invalid_argument("hamiltonian: R is singular");
  Eigen::MatrixXd H(2 * n, 2 * n);
  H << A, -B * r_lu.solve(B.transpose()), -Q, -A.transpose();
  return H;
}

bool is_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double tolerance) {
  const auto n = A.rows();
  if (n == 0) return true;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  Eigen::MatrixXd ab(n, n + B.cols());
  ab << A, B;
  const double scale = std::max(1.0, ab.norm());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex lambda = es.eigenvalues()(i);
    if (lambda.real() < -tolerance * std::max(1.0, std::abs(lambda))) continue;
    Eigen::MatrixXcd pbh(n, n + B.cols());
    pbh << lambda * Eigen::MatrixXcd::Identity(n, n) - A.cast<Complex>(), B.cast<Complex>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pbh);
    if (svd.singularValues()(n - 1) <= tolerance * scale) return false;
  }
  return true;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& F, const Eigen::MatrixXd& W) {
  const auto n = F.rows();
  if (F.cols() != n || W.rows() != n || W.cols() != n) {
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");
  }
  if (n == 0) return Eigen::MatrixXd(0, 0);
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(F.cast<Complex>());
  const Eigen::MatrixXcd& T = schur.matrixT();
  const Eigen::MatrixXcd& U = schur.matrixU();
  // T^H Y + Y T = C with C = -U^H W U, solved column by column.
  const Eigen::MatrixXcd C = -(U.adjoint() * W.cast<Complex>() * U);
  const Eigen::MatrixXcd Th = T.adjoint();
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd rhs = C.col(j);
    for (Eigen::Index k = 0; k < j; ++k) rhs -= T(k, j) * Y.col(k);
    Eigen::MatrixXcd lower = Th;
    lower.diagonal().array() += T(j, j);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(lower(i, i)) == 0.0) {
        throw DomainError("solve_lyapunov: F has eigenvalues symmetric about the imaginary axis");
      }
    }
    Y.col(j) = lower.triangularView<Eigen::Lower>().solve(rhs);
  }
  Eigen::MatrixXd X = (U * Y * U.adjoint()).real();
  return 0.5 * (X + X.transpose());
}

LqDesign solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                    const Eigen::MatrixXd& R, const CareOptions& options) {
  check_dimensions(A, B, Q, R);
  const auto n = A.rows();
  if (!Q.isApprox(Q.transpose(), 1e-10) && (Q - Q.transpose()).norm() > 1e-10 * (1.0 + Q.norm())) {
    throw std::invalid_argument("solve_care: Q must be symmetric");
  }
  if ((R - R.transpose()).norm() > 1e-10 * (1.0 + R.norm())) {
    throw std::invalid_argument("solve_care: R must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> r_llt(R);
  if (r_llt.info() != Eigen::Success) {
    throw std::invalid_argument("solve_care: R must be positive definite");
  }
  if (!options.allow_indefinite_q && n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qe(Q, Eigen::EigenvaluesOnly);
    if (qe.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, Q.norm())) {
      throw std::invalid_argument("solve_care: Q is not positive semidefinite");
    }
  }

  LqDesign d;
  d.Q = Q;
  d.R = R;
  if (n == 0) {
    d.P_riccati = Eigen::MatrixXd(0, 0);
    d.K = Eigen::MatrixXd(B.cols(), 0);
    return d;
  }

  const Eigen::MatrixXd H = hamiltonian(A, B, Q, R);
  {
    Eigen::MatrixXd balanced = H;
    internal::balance(balanced);
    Eigen::EigenSolver<Eigen::MatrixXd> es(balanced, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const Complex l = es.eigenvalues()(i);
      if (std::abs(l.real()) <= options.imaginary_axis_tolerance * std::max(1.0, std::abs(l))) {
        std::ostringstream msg;
        msg << "solve_care: Hamiltonian eigenvalue on the imaginary axis: " << l.real()
            << (l.imag() < 0 ? "" : "+") << l.imag() << "i";
        throw DomainError(msg.str());
      }
    }
  }
  if (!is_stabilizable(A, B)) throw DomainError("solve_care: (A, B) is not stabilizable");

  Eigen::MatrixXd P = sign_function_solution(H);
  double residual = riccati_residual(A, B, Q, r_llt, P);
  Eigen::MatrixXd best = P;
  double best_residual = residual;
  int stalls = 0;
  for (int it = 0; it < options.max_newton_iterations; ++it) {
    const Eigen::MatrixXd K = r_llt.solve(B.transpose() * P);
    const Eigen::MatrixXd closed = A - B * K;
    if (!is_hurwitz(closed)) break;
    P = solve_lyapunov(closed, Q + K.transpose() * R * K);
    residual = riccati_residual(A, B, Q, r_llt, P);
    ++d.newton_iterations;
    if (residual < best_residual) {
      stalls = best_residual - residual < 0.5 * best_residual ? stalls + 1 : 0;
      best = P;
      best_residual = residual;
    } else {
      ++stalls;
    }
    if (best_residual < 1e-15 || stalls >= 3) break;
  }

  d.P_riccati = best;
  d.residual = best_residual;
  d.K = r_llt.solve(B.transpose() * best);
  const Eigen::MatrixXd closed = A - B * d.K;
  Eigen::EigenSolver<Eigen::MatrixXd> es(closed, false);
  for (Eigen::Index i = 0; i < n; ++i) d.closed_loop_poles.push_back(es.eigenvalues()(i));
  std::sort(d.closed_loop_poles.begin(), d.closed_loop_poles.end(),
            [](Complex a, Complex b) {
              return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
  for (const Complex pole : d.closed_loop_poles) {
    if (!(pole.real() < 0.0)) {
      throw DomainError("solve_care: no stabilizing solution found");
    }
  }
  return d;
}

Polynomial char_poly(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("char_poly: matrix must be square");
  if (M.rows() == 0) return Polynomial::constant(1.0);
  Eigen::MatrixXd balanced = M;
  internal::balance(balanced);
  Eigen::EigenSolver<Eigen::MatrixXd> es(balanced, false);
  if (es.info() != Eigen::Success) throw DomainError("char_poly: eigenvalue iteration failed");
  std::vector<Complex> ev(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  return from_roots(ev, 1.0);
}

DetIdentityReport verify_det_identity(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                                      const CareOptions& options) {
  const LqDesign design = solve_care(A, B, Q, R, options);
  const auto n = static_cast<int>(A.rows());

  DetIdentityReport report;
  report.closed_loop = char_poly(A - B * design.K);
  report.pp_from_poles = square_poly(report.closed_loop);

  const Polynomial det_h = char_poly(hamiltonian(A, B, Q, R));
  std::vector<double> omega(static_cast<std::size_t>(n) + 1);
  double scale = 0.0;
  for (double c : det_h.coeffs()) scale = std::max(scale, std::abs(c));
  for (int i = 0; i <= n; ++i) {
    const double sign = ((n + i) % 2 == 0) ? 1.0 : -1.0;
    omega[static_cast<std::size_t>(i)] = sign * det_h[2 * i];
    if (2 * i + 1 <= 2 * n) {
      report.odd_power_residual =
          std::max(report.odd_power_residual, std::abs(det_h[2 * i + 1]) / scale);
    }
  }
  report.pp_from_H = SquaredPolynomial(Polynomial(std::move(omega)));
  report.max_relative_error =
      max_relative_coefficient_error(report.pp_from_H.in_omega(), report.pp_from_poles.in_omega());
  return report;
}

}  // namespace cdmkit
