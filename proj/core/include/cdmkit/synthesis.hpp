#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "cdmkit/plant.hpp"
#include "cdmkit/polynomial.hpp"
#include "cdmkit/state_space.hpp"

namespace cdmkit {

/// Controller A(s) u = F(s) r - sum_k B_k(s) (y_k + n_k).
struct ControllerABF {
  Polynomial a_poly = Polynomial::constant(1.0);
  std::map<std::string, Polynomial> b_polys;
  Polynomial f_poly;
};

/// P(s) = A(s) D(s) + sum_k B_k(s) N_k(s). Throws std::invalid_argument when
/// a feedback channel is not a plant output or A is identically zero.
Polynomial close_loop(const ControllerABF& controller, const PlantTF& plant);

struct RationalFunction {
  Polynomial num;
  Polynomial den;
  Complex eval(Complex s) const { return num.eval(s) / den.eval(s); }
};

/// Closed-loop transfer functions, all over the common denominator P:
///   y_k from r   = N_k F / P
///   y_k from d   = A N_k / P          (d enters at the plant input)
///   y_k from n_j = -N_k B_j / P
///   u from r     = D F / P
struct ClosedLoopTransfers {
  Polynomial characteristic;
  std::map<std::string, RationalFunction> y_from_r;
  std::map<std::string, RationalFunction> y_from_d;
  std::map<std::string, std::map<std::string, RationalFunction>> y_from_n;
  RationalFunction u_from_r;
};

ClosedLoopTransfers closed_loop_transfers(const ControllerABF& controller, const PlantTF& plant);

/// One term gain * s^power of a feedback polynomial.
struct GainTerm {
  std::string gain;
  int power = 0;
};

/// Parametrized controller with integral action on the actuator:
///   s^integrator_order u = F r - sum_channel (sum_terms gain s^power) y_channel.
///
/// `reference` selects F: the name of a gain (F equals that gain), or
/// "dc" for the unity-DC-gain choice F = P(0) / N_ref(0) on
/// `reference_channel`.
struct GainStructure {
  std::map<std::string, std::vector<GainTerm>> feedback;
  int integrator_order = 1;
  std::string reference = "dc";
  std::string reference_channel;
  std::vector<int> matched_powers;

  /// Gain names in natural order (k0, k1, ..., k10).
  std::vector<std::string> unknowns() const;
};

/// The pitch-cyclic speed controller
///   s delta_lon = F u_r - [(k0 + k1 s) u + (k2 + k3 s) theta + k4 s w]
/// matched on s^5..s^1.
GainStructure speed_control_structure();

struct GainSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  std::vector<std::string> unknowns;
  std::vector<int> powers;  // row i matches the coefficient of s^powers[i]
};

/// Row for power j: coeff_j(s^nc D + sum gains * s^power N_channel) = target_j,
/// with the open-loop part moved to the right-hand side. Uses
/// structure.matched_powers when `matched_powers` is empty.
GainSystem build_gain_system(const GainStructure& structure, const PlantTF& plant,
                             const Polynomial& target,
                             std::vector<int> matched_powers = {});

struct GainSolution {
  std::map<std::string, double> gains;
  double residual_inf = 0.0;
  double condition = 0.0;
};

/// Throws DomainError for a singular or numerically singular matrix
/// (condition estimate above 1e14, reported in the message).
GainSolution solve_gains(const GainSystem& system);

/// Instantiates the structure with solved gains.
ControllerABF make_controller(const GainStructure& structure,
                              const std::map<std::string, double>& gains, const PlantTF& plant);

/// State-space interconnection of the controller and the plant realization.
/// Inputs: "r.<reference_channel>" (or "r" when no channel is given) and
/// "d.<plant input>". Outputs: every plant channel followed by the actuator.
/// Requires deg F, deg B_k <= deg A.
StateSpace closed_loop_system(const ControllerABF& controller, const PlantTF& plant,
                              const std::string& reference_channel = "");

}  // namespace cdmkit
