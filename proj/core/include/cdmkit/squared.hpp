#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "cdmkit/plant.hpp"
#include "cdmkit/polynomial.hpp"
#include "cdmkit/state_space.hpp"

namespace cdmkit {

/// Polynomial in Omega = -s^2, ascending powers. Produced from P(s) as
/// PP(Omega) = P(-s) P(s).
class SquaredPolynomial {
 public:
  SquaredPolynomial() = default;
  explicit SquaredPolynomial(Polynomial in_omega) : omega_(std::move(in_omega)) {}
  SquaredPolynomial(std::initializer_list<double> ascending) : omega_(ascending) {}

  const Polynomial& in_omega() const { return omega_; }
  std::span<const double> coeffs() const { return omega_.coeffs(); }
  int degree() const { return omega_.degree(); }
  double operator[](int power) const { return omega_[power]; }

  Complex eval_omega(Complex omega) const { return omega_.eval(omega); }
  /// PP(-s^2).
  Complex eval_s(Complex s) const { return omega_.eval(-s * s); }

  friend bool operator==(const SquaredPolynomial&, const SquaredPolynomial&) = default;

 private:
  Polynomial omega_;
};

/// aq_i = a_i^2 + 2 sum_{j=1}^{min(i, n-i)} (-1)^j a_{i-j} a_{i+j}.
SquaredPolynomial square_poly(const Polynomial& p);

/// Stable spectral factor: the P(s) with all roots in the open left half
/// plane, positive leading coefficient sqrt(aq_n), and square_poly(P) = pp.
/// Throws std::invalid_argument for a non-positive leading coefficient and
/// DomainError when pp has a positive-real Omega root or a root that maps
/// onto the imaginary s axis.
Polynomial square_root_poly(const SquaredPolynomial& pp);

/// Multiplies the denominator by s^nc; numerators are unchanged.
PlantTF augment_integrator(const PlantTF& plant, int nc);

/// LQ weights of the hover formulation
///   s^nc u = u_nc,  A_p(s) y = B_p(s) u,
///   J = int sum_{i=0}^{nc} qu_i (s^i u)^2 + sum_{i=0}^{np-1} qy_i (s^i y)^2 dt.
/// qu_nc is the control weight R; the remaining entries form Q.
struct HoverFormulation {
  int nc = 0;
  int np = 0;
  int mp = 0;
  std::vector<double> qu;  // qu_0..qu_nc
  std::vector<double> qy;  // qy_0..qy_{np-1}
  double residual = 0.0;   // max relative coefficient mismatch of the identity
  bool q_indefinite = false;
  std::vector<std::string> warnings;

  double control_weight() const { return qu.back(); }
};

/// Solves PP = Q_u(Omega) AA_p(Omega) + Q_y(Omega) BB_p(Omega) for the
/// weight polynomials by least squares over every Omega power, rejecting
/// rank-deficient or inconsistent systems with DomainError. Negative
/// weights are not an error; they set q_indefinite and add a warning.
HoverFormulation recover_weights(const SquaredPolynomial& pp_target,
                                 const SquaredPolynomial& plant_den_sq,
                                 const SquaredPolynomial& plant_num_sq, int nc, int np);

/// diag(qu_{nc-1}, ..., qu_0, qy_{np-1}, ..., qy_0), matching the state
/// ordering of hover_state_space.
Eigen::MatrixXd assemble_Q(const HoverFormulation& f);

/// State space of s^nc u = u_nc, A_p(s) y = b0 u with states
/// [u_{nc-1}, ..., u_0, y_{np-1}, ..., y_0] (u_i = s^i u, y_i = s^i y)
/// and the single input u_nc.
StateSpace hover_state_space(const Polynomial& plant_den, double b0, int nc);

struct HoverDesign {
  HoverFormulation formulation;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  StateSpace system;
};

/// Weights that make the LQ closed loop of hover_state_space(plant_den, b0, nc)
/// have the characteristic polynomial proportional to `target`.
HoverDesign hover_design(const Polynomial& plant_den, double b0, int nc, const Polynomial& target);

}  // namespace cdmkit
