#include "cdmkit/synthesis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "cdmkit/errors.hpp"

namespace cdmkit {

namespace {

constexpr double kMaxCondition = 1e14;

const Polynomial& channel_numerator(const PlantTF& plant, const std::string& label) {
  auto it = plant.nums.find(label);
  if (it == plant.nums.end()) {
    throw std::invalid_argument("channel '" + label + "' is not a plant output");
  }
  return it->second;
}

bool natural_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

Polynomial close_loop(const ControllerABF& controller, const PlantTF& plant) {
  if (controller.a_poly.is_zero()) {
    throw std::invalid_argument("close_loop: controller denominator is zero");
  }
  Polynomial p = mul(controller.a_poly, plant.den);
  for (const auto& [label, b] : controller.b_polys) {
    p = add(p, mul(b, channel_numerator(plant, label)));
  }
  return p;
}

ClosedLoopTransfers closed_loop_transfers(const ControllerABF& controller, const PlantTF& plant) {
  ClosedLoopTransfers out;
  out.characteristic = close_loop(controller, plant);
  const Polynomial& p = out.characteristic;
  for (const auto& [label, n] : plant.nums) {
    out.y_from_r[label] = {mul(n, controller.f_poly), p};
    out.y_from_d[label] = {mul(controller.a_poly, n), p};
    for (const auto& [noise, b] : controller.b_polys) {
      out.y_from_n[label][noise] = {-mul(n, b), p};
    }
  }
  out.u_from_r = {mul(plant.den, controller.f_poly), p};
  return out;
}

std::vector<std::string> GainStructure::unknowns() const {
  std::set<std::string> names;
  for (const auto& [channel, terms] : feedback) {
    for (const auto& t : terms) names.insert(t.gain);
  }
  std::vector<std::string> out(names.begin(), names.end());
  std::sort(out.begin(), out.end(), natural_less);
  return out;
}

GainStructure speed_control_structure() {
  GainStructure s;
  s.feedback["u"] = {{"k0", 0}, {"k1", 1}};
  s.feedback["theta"] = {{"k2", 0}, {"k3", 1}};
  s.feedback["w"] = {{"k4", 1}};
  s.integrator_order = 1;
  s.reference = "dc";
  s.reference_channel = "u";
  s.matched_powers = {5, 4, 3, 2, 1};
  return s;
}

GainSystem build_gain_system(const GainStructure& structure, const PlantTF& plant,
                             const Polynomial& target, std::vector<int> matched_powers) {
  if (matched_powers.empty()) matched_powers = structure.matched_powers;
  if (structure.integrator_order < 0) {
    throw std::invalid_argument("gain system: negative integrator order");
  }
  const auto names = structure.unknowns();
  if (names.size() != matched_powers.size()) {
    throw std::invalid_argument("gain system: " + std::to_string(names.size()) + " unknowns but " +
                                std::to_string(matched_powers.size()) + " matched powers");
  }
  const int closed_degree = structure.integrator_order + plant.den.degree();
  if (target.degree() != closed_degree) {
    throw std::invalid_argument("gain system: target degree " + std::to_string(target.degree()) +
                                " does not match s^nc D degree " + std::to_string(closed_degree));
  }

  const Polynomial open_loop =
      mul(Polynomial::monomial(structure.integrator_order), plant.den);

  GainSystem sys;
  sys.unknowns = names;
  sys.powers = matched_powers;
  const auto rows = static_cast<Eigen::Index>(matched_powers.size());
  sys.matrix = Eigen::MatrixXd::Zero(rows, rows);
  sys.rhs = Eigen::VectorXd::Zero(rows);

  for (Eigen::Index r = 0; r < rows; ++r) {
    const int power = matched_powers[static_cast<std::size_t>(r)];
    sys.rhs(r) = target[power] - open_loop[power];
    for (const auto& [channel, terms] : structure.feedback) {
      const Polynomial& num = channel_numerator(plant, channel);
      for (const auto& term : terms) {
        const auto col = std::find(names.begin(), names.end(), term.gain) - names.begin();
        sys.matrix(r, col) += num[power - term.power];
      }
    }
  }

  for (Eigen::Index c = 0; c < rows; ++c) {
    if (sys.matrix.col(c).isZero(0.0)) {
      throw DomainError("gain system: unknown '" + names[static_cast<std::size_t>(c)] +
                        "' appears in no matched row (structurally singular)");
    }
  }
  return sys;
}

GainSolution solve_gains(const GainSystem& system) {
  const auto n = system.matrix.rows();
  if (system.matrix.cols() != n || system.rhs.size() != n) {
    throw std::invalid_argument("solve_gains: system must be square");
  }
  GainSolution out;
  if (n == 0) return out;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.matrix);
  const auto& sv = svd.singularValues();
  out.condition = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  if (!(out.condition < kMaxCondition)) {
    throw DomainError("solve_gains: singular gain matrix (condition estimate " +
                      std::to_string(out.condition) + ")");
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.matrix);
  Eigen::VectorXd k = lu.solve(system.rhs);
  // One step of iterative refinement.
  k += lu.solve(system.rhs - system.matrix * k);
  out.residual_inf = (system.matrix * k - system.rhs).lpNorm<Eigen::Infinity>();

  for (Eigen::Index i = 0; i < n; ++i) {
    out.gains[system.unknowns[static_cast<std::size_t>(i)]] = k(i);
  }
  return out;
}

ControllerABF make_controller(const GainStructure& structure,
                              const std::map<std::string, double>& gains, const PlantTF& plant) {
  ControllerABF c;
  c.a_poly = Polynomial::monomial(structure.integrator_order);
  for (const auto& [channel, terms] : structure.feedback) {
    Polynomial b;
    for (const auto& t : terms) {
      auto it = gains.find(t.gain);
      if (it == gains.end()) throw std::invalid_argument("controller: missing gain '" + t.gain + "'");
      b = add(b, Polynomial::monomial(t.power, it->second));
    }
    c.b_polys[channel] = b;
  }

  if (structure.reference == "dc") {
    const Polynomial& n_ref = channel_numerator(plant, structure.reference_channel);
    c.f_poly = Polynomial::constant(1.0);
    const double p0 = close_loop(c, plant)[0];
    if (n_ref[0] == 0.0) {
      throw DomainError("controller: reference channel has zero DC gain, F = P(0)/N(0) undefined");
    }
    c.f_poly = Polynomial::constant(p0 / n_ref[0]);
  } else {
    auto it = gains.find(structure.reference);
    if (it == gains.end()) {
      throw std::invalid_argument("controller: reference gain '" + structure.reference + "' not solved");
    }
    c.f_poly = Polynomial::constant(it->second);
  }
  return c;
}

StateSpace closed_loop_system(const ControllerABF& controller, const PlantTF& plant,
                              const std::string& reference_channel) {
  const StateSpace ps = realize(plant);
  const int m = controller.a_poly.degree();
  if (controller.a_poly.is_zero()) {
    throw std::invalid_argument("closed loop: controller denominator is zero");
  }
  if (controller.f_poly.degree() > m) {
    throw std::invalid_argument("closed loop: F(s)/A(s) is not proper");
  }

  // Controller inputs: [r, y_1..y_p] in plant output order; numerators F, -B_k.
  const auto p = ps.outputs();
  std::vector<Polynomial> nums;
  nums.push_back(controller.f_poly);
  for (Eigen::Index k = 0; k < p; ++k) {
    const auto& label = ps.output_labels[static_cast<std::size_t>(k)];
    auto it = controller.b_polys.find(label);
    Polynomial b = it == controller.b_polys.end() ? Polynomial() : it->second;
    if (b.degree() > m) throw std::invalid_argument("closed loop: B(s)/A(s) is not proper");
    nums.push_back(-b);
  }
  for (const auto& [label, b] : controller.b_polys) {
    channel_numerator(plant, label);
  }

  // Observable canonical realization of [F, -B_1, ..., -B_p] / A.
  const double lead = controller.a_poly.leading();
  const auto ni = static_cast<Eigen::Index>(nums.size());
  Eigen::MatrixXd ac = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd bc = Eigen::MatrixXd::Zero(m, ni);
  Eigen::MatrixXd cc = Eigen::MatrixXd::Zero(1, m);
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(1, ni);
  if (m > 0) {
    for (int i = 0; i < m; ++i) ac(i, 0) = -controller.a_poly[m - 1 - i] / lead;
    for (int i = 0; i + 1 < m; ++i) ac(i, i + 1) = 1.0;
    cc(0, 0) = 1.0;
  }
  for (Eigen::Index j = 0; j < ni; ++j) {
    const Polynomial& b = nums[static_cast<std::size_t>(j)];
    const double feed = b[m] / lead;
    dc(0, j) = feed;
    for (int i = 0; i < m; ++i) {
      bc(i, j) = (b[m - 1 - i] - feed * controller.a_poly[m - 1 - i]) / lead;
    }
  }

  // u = cc xc + dr r + dy y,  y = Cp xp + Dp (u + d).
  const Eigen::MatrixXd dr = dc.col(0);
  const Eigen::MatrixXd dy = dc.rightCols(p);
  const double loop_gain = 1.0 - (dy * ps.D)(0, 0);
  if (std::abs(loop_gain) < 1e-12) throw DomainError("closed loop: ill-posed algebraic loop");

  const Eigen::Index np = ps.states();
  const Eigen::Index n = np + m;
  // u = Ku x + Kr r + Kd d over x = [xp; xc].
  Eigen::MatrixXd ku(1, n);
  ku << dy * ps.C, cc;
  ku /= loop_gain;
  const double kr = dr(0, 0) / loop_gain;
  const double kd = (dy * ps.D)(0, 0) / loop_gain;

  // y = Cp xp + Dp (Ku x + Kr r + (Kd + 1) d).
  Eigen::MatrixXd cy = Eigen::MatrixXd::Zero(p, n);
  cy.leftCols(np) = ps.C;
  cy += ps.D * ku;
  const Eigen::MatrixXd dyr = ps.D * kr;
  const Eigen::MatrixXd dyd = ps.D * (kd + 1.0);

  StateSpace cl;
  cl.A = Eigen::MatrixXd::Zero(n, n);
  cl.B = Eigen::MatrixXd::Zero(n, 2);
  cl.A.topLeftCorner(np, np) = ps.A;
  cl.A.topRows(np) += ps.B * ku;
  cl.B.topRows(np).col(0) = ps.B * kr;
  cl.B.topRows(np).col(1) = ps.B * (kd + 1.0);
  if (m > 0) {
    const Eigen::MatrixXd by = bc.rightCols(p);
    cl.A.bottomRightCorner(m, m) = ac;
    cl.A.bottomRows(m) += by * cy;
    cl.B.bottomRows(m).col(0) = bc.col(0) + by * dyr;
    cl.B.bottomRows(m).col(1) = by * dyd;
  }

  cl.C = Eigen::MatrixXd::Zero(p + 1, n);
  cl.D = Eigen::MatrixXd::Zero(p + 1, 2);
  cl.C.topRows(p) = cy;
  cl.D.topRows(p).col(0) = dyr;
  cl.D.topRows(p).col(1) = dyd;
  cl.C.bottomRows(1) = ku;
  cl.D(p, 0) = kr;
  cl.D(p, 1) = kd;

  cl.state_labels = ps.state_labels;
  for (int i = 0; i < m; ++i) cl.state_labels.push_back("c" + std::to_string(i + 1));
  cl.input_labels = {reference_channel.empty() ? "r" : "r." + reference_channel,
                     "d." + plant.input_label};
  cl.output_labels = ps.output_labels;
  cl.output_labels.push_back(plant.input_label);
  cl.validate();
  return cl;
}

}  // namespace cdmkit
