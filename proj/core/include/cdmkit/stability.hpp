#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdmkit/polynomial.hpp"

namespace cdmkit {

/// CDM design parameters of a characteristic polynomial
/// a_n s^n + ... + a_1 s + a_0.
///
/// gamma[k], gamma_star[k] and tau_i[k] hold index i = k + 1, so all three
/// vectors have n - 1 entries. An entry is empty when the defining ratio
/// divides by a zero coefficient.
struct StabilityProfile {
  int order = 0;
  double tau = 0.0;
  std::vector<std::optional<double>> gamma;       // a_i^2 / (a_{i+1} a_{i-1})
  std::vector<std::optional<double>> gamma_star;  // 1/gamma_{i+1} + 1/gamma_{i-1}
  std::vector<std::optional<double>> tau_i;       // a_{i+1} / a_i

  // 1-based accessors matching the index notation.
  std::optional<double> gamma_at(int i) const { return gamma.at(i - 1); }
  std::optional<double> gamma_star_at(int i) const { return gamma_star.at(i - 1); }
  std::optional<double> tau_at(int i) const { return tau_i.at(i - 1); }

  // Indices i whose gamma is undefined.
  std::vector<int> undefined_indices() const;
};

/// Requires degree >= 2 and a_0 != 0 (std::invalid_argument otherwise).
StabilityProfile stability_indices(const Polynomial& p);

/// Standard-form stability indices: gamma_1 = 2.5, gamma_{i>=2} = 2.
std::vector<double> standard_gammas(int order);

/// Target characteristic polynomial
///   a_0 [ sum_{i>=2} (tau s)^i / prod_{j=1}^{i-1} gamma_{i-j}^j + tau s + 1 ].
/// gamma must hold gamma_1..gamma_{order-1}.
Polynomial synth_target(int order, double tau, const std::vector<double>& gamma,
                        double a0 = 1.0);

struct StabilityVerdict {
  // Sufficient conditions on the stability indices. `*_applicable` is false when the
  // polynomial is too short for the index range to exist.
  bool stable_applicable = false;
  bool unstable_applicable = false;
  bool sufficiently_stable = false;
  bool sufficiently_unstable = false;
  // gamma_i - 1.12 gamma*_i for i = 2..n-2 (empty entries where undefined).
  std::vector<std::optional<double>> margins;
};

inline constexpr double kStabilityMarginFactor = 1.12;

StabilityVerdict check_stability(const Polynomial& p);

struct DiagramPoint {
  int index = 0;
  double coefficient = 0.0;
  double abs_coefficient = 0.0;
  int sign = 0;
};

struct DiagramSeries {
  std::string label;
  std::vector<DiagramPoint> points;
  std::optional<StabilityProfile> profile;  // empty when indices are undefined
};

using DiagramData = std::vector<DiagramSeries>;

/// Coefficient-diagram series for each labeled polynomial, in label order.
DiagramData coefficient_diagram(const std::map<std::string, Polynomial>& polys);

}  // namespace cdmkit
