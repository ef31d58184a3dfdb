#include "cdmkit/plant.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <regex>
#include <stdexcept>

namespace cdmkit {

void StateSpace::validate() {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("state space: A must be square");
  if (B.rows() != n) throw std::invalid_argument("state space: B row count must match A");
  if (C.cols() != n) throw std::invalid_argument("state space: C column count must match A");
  if (D.size() == 0 && (C.rows() > 0 || B.cols() > 0)) {
    D = Eigen::MatrixXd::Zero(C.rows(), B.cols());
  }
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw std::invalid_argument("state space: D must be outputs x inputs");
  }
  if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite()) {
    throw std::invalid_argument("state space: non-finite entry");
  }
  auto fill = [](std::vector<std::string>& labels, Eigen::Index count, const char* prefix) {
    if (labels.empty()) {
      for (Eigen::Index i = 0; i < count; ++i) labels.push_back(prefix + std::to_string(i + 1));
    }
    if (static_cast<Eigen::Index>(labels.size()) != count) {
      throw std::invalid_argument(std::string("state space: wrong number of ") + prefix + " labels");
    }
  };
  fill(state_labels, n, "x");
  fill(input_labels, B.cols(), "u");
  fill(output_labels, C.rows(), "y");
}

int StateSpace::input_index(const std::string& label) const {
  for (std::size_t i = 0; i < input_labels.size(); ++i) {
    if (input_labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

int StateSpace::output_index(const std::string& label) const {
  for (std::size_t i = 0; i < output_labels.size(); ++i) {
    if (output_labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

void PlantTF::validate() const {
  if (den.is_zero()) throw std::invalid_argument("plant: zero denominator");
  for (const auto& [label, num] : nums) {
    if (num.degree() > den.degree()) {
      throw std::invalid_argument("plant: channel '" + label + "' is not proper");
    }
  }
}

std::vector<std::string> corpus_names() {
  return {"lateral_hover", "longitudinal_hover", "longitudinal_speed",
          "longitudinal_speed_eq15"};
}

namespace {

// Pitch-cyclic numerators at the precision used for the gain solve.
std::map<std::string, Polynomial> longitudinal_numerators() {
  return {
      {"u", Polynomial({-12522.15, -131287.6, -8918.95, -840.09, -41.80})},
      {"q", Polynomial({0.0, 4.0, 1710.0, 13457.0, 904.0})},
      {"theta", Polynomial({40.846, 1705.16, 13416.5, 901.27})},
      {"w", Polynomial({6.85, 214.61, 14.53, 0.676})},
  };
}

std::map<std::string, std::string> longitudinal_units() {
  return {{"u", "m/s"}, {"q", "rad/s"}, {"theta", "rad"}, {"w", "m/s"}};
}

}  // namespace

PlantTF corpus_load(const std::string& name) {
  PlantTF p;
  if (name == "longitudinal_speed") {
    p.den = Polynomial({0.9583, 11.020, 41.42, 321.74, 31.65, 1.0});
    p.nums = longitudinal_numerators();
    p.input_label = "delta_lon";
    p.units = longitudinal_units();
  } else if (name == "longitudinal_speed_eq15") {
    p.den = Polynomial({0.9, 11.02, 41.4, 321.7, 31.65, 1.0});
    p.nums = {
        {"u", Polynomial({-12522.0, -131290.0, -8919.0, -840.0, -41.8})},
        {"q", Polynomial({0.0, 4.0, 1710.0, 13457.0, 904.0})},
        {"theta", Polynomial({4.0, 1705.0, 13417.0, 901.0})},
        {"w", Polynomial({6.85, 214.0, 14.5, 0.67})},
    };
    p.input_label = "delta_lon";
    p.units = longitudinal_units();
  } else if (name == "longitudinal_hover") {
    p.den = Polynomial({0.9581, 11.0203, 41.4357, 321.7496, 31.6547, 1.0});
    p.nums = longitudinal_numerators();
    p.input_label = "delta_lon";
    p.units = longitudinal_units();
  } else if (name == "lateral_hover") {
    p.den = Polynomial({0.6663, -17.8504, 42.5467, 603.6828, 50.7248, 1.0});
    p.input_label = "delta_lat";
  } else {
    throw std::invalid_argument("corpus: unknown plant '" + name + "'");
  }
  return p;
}

StateSpace realize(const PlantTF& plant) {
  plant.validate();
  const int n = plant.den.degree();
  const double lead = plant.den.leading();

  StateSpace ss;
  ss.A = Eigen::MatrixXd::Zero(n, n);
  ss.B = Eigen::MatrixXd::Zero(n, 1);
  ss.C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(plant.nums.size()), n);
  ss.D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(plant.nums.size()), 1);
  if (n > 0) {
    for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
    for (int i = 0; i < n; ++i) ss.A(n - 1, i) = -plant.den[i] / lead;
    ss.B(n - 1, 0) = 1.0;
  }

  Eigen::Index row = 0;
  for (const auto& [label, num] : plant.nums) {
    // N/D = b_n/a_n + (N - (b_n/a_n) D)/D for the biproper part.
    const double feedthrough = num.degree() == n ? num[n] / lead : 0.0;
    for (int i = 0; i < n; ++i) {
      ss.C(row, i) = (num[i] - feedthrough * plant.den[i]) / lead;
    }
    ss.D(row, 0) = feedthrough;
    ss.output_labels.push_back(label);
    ++row;
  }
  for (int i = 0; i < n; ++i) ss.state_labels.push_back("x" + std::to_string(i + 1));
  ss.input_labels.push_back(plant.input_label);
  ss.validate();
  return ss;
}

UniformDraws::UniformDraws(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double UniformDraws::next() {
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

PlantTF perturb(const PlantTF& plant, const PerturbationSpec& spec, std::uint64_t seed) {
  static const std::regex den_re(R"(den\[(\d+)\])");
  static const std::regex num_re(R"(num\.([A-Za-z_][A-Za-z0-9_]*)(?:\[(\d+)\])?)");

  PlantTF out = plant;
  UniformDraws draws(seed);
  for (const auto& [target, fraction] : spec) {
    if (!(fraction > -1.0 && fraction < 1.0)) {
      throw std::invalid_argument("perturb: fraction for '" + target + "' must lie in (-1, 1)");
    }
    const double factor = 1.0 + draws.next() * fraction;
    std::smatch m;
    if (std::regex_match(target, m, den_re)) {
      const int idx = std::stoi(m[1]);
      if (idx >= out.den.degree()) {
        throw std::invalid_argument("perturb: '" + target + "' is not a free denominator coefficient");
      }
      std::vector<double> c(out.den.coeffs().begin(), out.den.coeffs().end());
      c[static_cast<std::size_t>(idx)] *= factor;
      out.den = Polynomial(std::move(c));
    } else if (std::regex_match(target, m, num_re)) {
      auto it = out.nums.find(m[1]);
      if (it == out.nums.end()) {
        throw std::invalid_argument("perturb: unknown channel in '" + target + "'");
      }
      if (m[2].matched) {
        const int idx = std::stoi(m[2]);
        if (idx > it->second.degree()) {
          throw std::invalid_argument("perturb: '" + target + "' is beyond the numerator degree");
        }
        std::vector<double> c(it->second.coeffs().begin(), it->second.coeffs().end());
        c[static_cast<std::size_t>(idx)] *= factor;
        it->second = Polynomial(std::move(c));
      } else {
        it->second = scale(it->second, factor);
      }
    } else {
      throw std::invalid_argument("perturb: unknown target '" + target + "'");
    }
  }
  return out;
}

}  // namespace cdmkit
