#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdmkit/lqr.hpp"
#include "cdmkit/plant.hpp"
#include "cdmkit/polynomial.hpp"
#include "cdmkit/sim.hpp"
#include "cdmkit/squared.hpp"
#include "cdmkit/stability.hpp"
#include "cdmkit/state_space.hpp"
#include "cdmkit/synthesis.hpp"

// Plain-text formats. Every parser throws std::invalid_argument with the
// offending line on malformed input. Numbers are written with 12 significant
// digits so repeated runs produce identical bytes.

namespace cdmkit {

std::string format_number(double v);

/// Whitespace-separated reals; throws on anything else.
std::vector<double> parse_reals(std::string_view line);

/// One line of ascending coefficients; '#' lines and blank lines are skipped.
Polynomial parse_polynomial(std::string_view text);
std::string format_polynomial(const Polynomial& p);

/// `key = value` lines; '#' comments and blank lines skipped. Order kept.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
KeyValues parse_key_values(std::string_view text);

/// den = ..., num.<label> = ..., input = <label>, unit.<label> = <unit>.
PlantTF parse_plant(std::string_view text);
std::string format_plant(const PlantTF& plant);

/// gain.<channel> = k0:0 k1:1      (gain name : power of s)
/// integrator = 1
/// reference = dc | <gain name>
/// reference_channel = u
/// match = 5 4 3 2 1
GainStructure parse_gain_structure(std::string_view text);
std::string format_gain_structure(const GainStructure& structure);

/// name = value lines.
std::map<std::string, double> parse_gains(std::string_view text);
std::string format_gains(const std::map<std::string, double>& gains);

/// One matrix row per line.
Eigen::MatrixXd parse_matrix(std::string_view text);
std::string format_matrix(const Eigen::MatrixXd& m);

/// Header `n m p`, then the rows of A (n), B (n), C (p) and D (p).
StateSpace parse_state_space(std::string_view text);
std::string format_state_space(const StateSpace& sys);

std::string format_profile(const StabilityProfile& profile);
std::string format_verdict(const StabilityVerdict& verdict);
std::string format_hover_formulation(const HoverFormulation& f);
std::string format_gain_solution(const GainSolution& solution);
std::string format_controller(const ControllerABF& controller);
std::string format_lq_design(const LqDesign& design);
std::string format_det_identity(const DetIdentityReport& report);
std::string format_metrics(const SimMetrics& metrics);
std::string format_sweep_report(const SweepReport& report);

std::string format_diagram_csv(const DiagramData& data);
std::string format_trace_csv(const SimTrace& trace);

/// kind:channel[:amplitude[:start[:width]]]. A channel written "d.<input>"
/// is an input disturbance, "r.<channel>" or a bare name a reference.
SignalSpec parse_signal(std::string_view text);

/// target=fraction pairs separated by commas.
PerturbationSpec parse_perturbation(std::string_view text);

}  // namespace cdmkit
