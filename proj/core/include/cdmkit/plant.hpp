#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cdmkit/polynomial.hpp"
#include "cdmkit/state_space.hpp"

namespace cdmkit {

/// Single-input plant y_k = N_k(s) / D(s) * u sharing one denominator.
struct PlantTF {
  Polynomial den;
  std::map<std::string, Polynomial> nums;
  std::string input_label = "u_in";
  std::map<std::string, std::string> units;

  /// Throws std::invalid_argument when the denominator is zero or a channel
  /// is improper (deg N_k > deg D).
  void validate() const;
};

std::vector<std::string> corpus_names();

/// Bundled X-Cell 60 models:
///   longitudinal_speed      pitch-cyclic channel with the higher-precision
///                           coefficients of the speed-control design
///   longitudinal_speed_eq15 the same channel with the rounded figures of the
///                           first printing
///   longitudinal_hover      longitudinal/vertical mode characteristic polynomial
///   lateral_hover           lateral/directional mode (denominator only)
/// Throws std::invalid_argument for an unknown name.
PlantTF corpus_load(const std::string& name);

/// Controllable canonical realization: companion A from the denominator,
/// B = e_n, one C row per numerator channel (in label order).
StateSpace realize(const PlantTF& plant);

/// Perturbation targets:
///   "den[i]"          denominator coefficient i (the leading one is fixed)
///   "num.<label>[i]"  numerator coefficient i of a channel
///   "num.<label>"     whole channel gain
/// Each targeted value is scaled by (1 + draw * fraction) with draw uniform
/// in [-1, 1]. Draws are taken in target-name order from a generator seeded
/// with `seed`, so the result is reproducible across platforms.
using PerturbationSpec = std::map<std::string, double>;

PlantTF perturb(const PlantTF& plant, const PerturbationSpec& spec, std::uint64_t seed);

/// Uniform draws in [-1, 1] that are bit-identical on every platform:
/// std::mt19937_64 seeded through std::seed_seq, mapped to doubles by hand
/// (the standard distributions are implementation-defined).
class UniformDraws {
 public:
  explicit UniformDraws(std::uint64_t seed, std::uint64_t stream = 0);
  double next();

 private:
  std::mt19937_64 engine_;
};

}  // namespace cdmkit
