#include "cdmkit/squared.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cdmkit/errors.hpp"

namespace cdmkit {

namespace {

constexpr double kRootTolerance = 1e-8;
constexpr double kIdentityTolerance = 1e-6;

}  // namespace

SquaredPolynomial square_poly(const Polynomial& p) {
  const int n = p.degree();
  std::vector<double> aq(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    double acc = p[i] * p[i];
    const int m = std::min(i, n - i);
    double cross = 0.0;
    for (int j = 1; j <= m; ++j) {
      const double term = p[i - j] * p[i + j];
      cross += (j % 2 == 0) ? term : -term;
    }
    acc += 2.0 * cross;
    aq[static_cast<std::size_t>(i)] = acc;
  }
  return SquaredPolynomial(Polynomial(std::move(aq)));
}

Polynomial square_root_poly(const SquaredPolynomial& pp) {
  const int n = pp.degree();
  const double lead = pp.in_omega().leading();
  if (!(lead > 0.0)) {
    throw std::invalid_argument("square_root_poly: leading coefficient must be positive");
  }
  if (n == 0) return Polynomial::constant(std::sqrt(lead));
  if (pp[0] == 0.0) {
    throw DomainError("square_root_poly: Omega = 0 is a root, s = 0 lies on the imaginary axis");
  }

  std::vector<Complex> s_roots;
  s_roots.reserve(static_cast<std::size_t>(n));
  for (const Complex omega : roots(pp.in_omega())) {
    const bool real = std::abs(omega.imag()) <= kRootTolerance * std::abs(omega);
    if (real && omega.real() > 0.0) {
      throw DomainError("square_root_poly: positive real Omega root " +
                        std::to_string(omega.real()) + ", no stable square root exists");
    }
    // Principal sqrt has Re >= 0; its negative is the left-half-plane member.
    Complex s = -std::sqrt(-(real ? Complex(omega.real(), 0.0) : omega));
    if (std::abs(s.real()) <= kRootTolerance * std::max(1.0, std::abs(s))) {
      throw DomainError("square_root_poly: root on the imaginary axis at s = " +
                        std::to_string(s.real()) + (s.imag() < 0 ? "" : "+") +
                        std::to_string(s.imag()) + "i");
    }
    s_roots.push_back(s);
  }
  return from_roots(s_roots, std::sqrt(lead));
}

PlantTF augment_integrator(const PlantTF& plant, int nc) {
  if (nc < 0) throw std::invalid_argument("augment_integrator: nc must be >= 0");
  PlantTF out = plant;
  out.den = mul(Polynomial::monomial(nc), plant.den);
  return out;
}

HoverFormulation recover_weights(const SquaredPolynomial& pp_target,
                                 const SquaredPolynomial& plant_den_sq,
                                 const SquaredPolynomial& plant_num_sq, int nc, int np) {
  if (nc < 0 || np < 0) throw std::invalid_argument("recover_weights: nc and np must be >= 0");
  if (nc + np != pp_target.degree()) {
    throw std::invalid_argument("recover_weights: nc + np must equal the target degree");
  }
  const int mp = plant_num_sq.degree();
  if (np > 0 && plant_num_sq.in_omega().is_zero()) {
    throw DomainError("recover_weights: plant numerator is zero");
  }

  const int unknowns = nc + 1 + np;
  const int top = std::max({pp_target.degree(), nc + plant_den_sq.degree(),
                            np > 0 ? np - 1 + mp : 0});
  const int rows = top + 1;

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, unknowns);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
  for (int r = 0; r < rows; ++r) rhs(r) = pp_target[r];
  for (int i = 0; i <= nc; ++i) {
    for (int j = 0; j <= plant_den_sq.degree(); ++j) m(i + j, i) += plant_den_sq[j];
  }
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j <= mp; ++j) m(i + j, nc + 1 + i) += plant_num_sq[j];
  }

  // Column equilibration before the rank-revealing solve.
  Eigen::VectorXd col_scale = m.colwise().norm().transpose();
  for (int c = 0; c < unknowns; ++c) {
    if (col_scale(c) == 0.0) {
      throw DomainError("recover_weights: weight " + std::to_string(c) + " multiplies nothing");
    }
    m.col(c) /= col_scale(c);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-12);
  if (qr.rank() < unknowns) {
    throw DomainError("recover_weights: rank-deficient matching system (rank " +
                      std::to_string(qr.rank()) + " of " + std::to_string(unknowns) +
                      "); plant numerator and denominator share Omega structure");
  }
  Eigen::VectorXd x = qr.solve(rhs);
  x += qr.solve(rhs - m * x);
  x = x.cwiseQuotient(col_scale);

  HoverFormulation f;
  f.nc = nc;
  f.np = np;
  f.mp = mp;
  f.qu.assign(x.data(), x.data() + nc + 1);
  f.qy.assign(x.data() + nc + 1, x.data() + unknowns);

  Polynomial qu_poly(f.qu);
  Polynomial qy_poly(f.qy.empty() ? std::vector<double>{0.0} : f.qy);
  const Polynomial rebuilt = add(mul(qu_poly, plant_den_sq.in_omega()),
                                 mul(qy_poly, plant_num_sq.in_omega()));
  f.residual = max_relative_coefficient_error(rebuilt, pp_target.in_omega());
  if (!(f.residual <= kIdentityTolerance)) {
    throw DomainError("recover_weights: weight identity cannot be matched (relative residual " +
                      std::to_string(f.residual) + ")");
  }

  for (int i = 0; i <= nc; ++i) {
    if (f.qu[static_cast<std::size_t>(i)] < 0.0) {
      f.q_indefinite = true;
      f.warnings.push_back("qu[" + std::to_string(i) + "] is negative");
    }
  }
  for (int i = 0; i < np; ++i) {
    if (f.qy[static_cast<std::size_t>(i)] < 0.0) {
      f.q_indefinite = true;
      f.warnings.push_back("qy[" + std::to_string(i) + "] is negative");
    }
  }
  if (f.control_weight() <= 0.0) {
    f.warnings.push_back("control weight qu[nc] is not positive; R is not positive definite");
  }
  return f;
}

Eigen::MatrixXd assemble_Q(const HoverFormulation& f) {
  const int n = f.nc + f.np;
  if (static_cast<int>(f.qu.size()) != f.nc + 1 || static_cast<int>(f.qy.size()) != f.np) {
    throw std::invalid_argument("assemble_Q: weight vector lengths do not match nc, np");
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < f.nc; ++i) q(f.nc - 1 - i, f.nc - 1 - i) = f.qu[static_cast<std::size_t>(i)];
  for (int i = 0; i < f.np; ++i) {
    q(n - 1 - i, n - 1 - i) = f.qy[static_cast<std::size_t>(i)];
  }
  return q;
}

StateSpace hover_state_space(const Polynomial& plant_den, double b0, int nc) {
  const int np = plant_den.degree();
  if (nc < 0 || np < 1) throw std::invalid_argument("hover_state_space: need nc >= 0 and deg A_p >= 1");
  const int n = nc + np;
  const double lead = plant_den.leading();
  auto u_pos = [&](int i) { return nc - 1 - i; };
  auto y_pos = [&](int i) { return n - 1 - i; };

  StateSpace ss;
  ss.A = Eigen::MatrixXd::Zero(n, n);
  ss.B = Eigen::MatrixXd::Zero(n, 1);
  for (int i = 0; i + 1 < nc; ++i) ss.A(u_pos(i), u_pos(i + 1)) = 1.0;
  if (nc > 0) ss.B(u_pos(nc - 1), 0) = 1.0;
  for (int i = 0; i + 1 < np; ++i) ss.A(y_pos(i), y_pos(i + 1)) = 1.0;
  for (int j = 0; j < np; ++j) ss.A(y_pos(np - 1), y_pos(j)) = -plant_den[j] / lead;
  if (nc > 0) {
    ss.A(y_pos(np - 1), u_pos(0)) = b0 / lead;
  } else {
    ss.B(y_pos(np - 1), 0) = b0 / lead;
  }

  ss.C = Eigen::MatrixXd::Zero(nc > 0 ? 2 : 1, n);
  ss.C(0, y_pos(0)) = 1.0;
  ss.output_labels = {"y"};
  if (nc > 0) {
    ss.C(1, u_pos(0)) = 1.0;
    ss.output_labels.push_back("u");
  }
  ss.D = Eigen::MatrixXd::Zero(ss.C.rows(), 1);
  for (int k = 0; k < n; ++k) ss.state_labels.emplace_back();
  for (int i = 0; i < nc; ++i) ss.state_labels[static_cast<std::size_t>(u_pos(i))] = "u" + std::to_string(i);
  for (int i = 0; i < np; ++i) ss.state_labels[static_cast<std::size_t>(y_pos(i))] = "y" + std::to_string(i);
  ss.input_labels = {"u" + std::to_string(nc)};
  ss.validate();
  return ss;
}

HoverDesign hover_design(const Polynomial& plant_den, double b0, int nc, const Polynomial& target) {
  const int np = plant_den.degree();
  if (target.degree() != nc + np) {
    throw std::invalid_argument("hover_design: target degree must equal nc + deg A_p");
  }
  HoverDesign d;
  d.formulation = recover_weights(square_poly(target), square_poly(plant_den),
                                  square_poly(Polynomial::constant(b0)), nc, np);
  d.Q = assemble_Q(d.formulation);
  d.R = Eigen::MatrixXd::Constant(1, 1, d.formulation.control_weight());
  d.system = hover_state_space(plant_den, b0, nc);
  return d;
}

}  // namespace cdmkit
