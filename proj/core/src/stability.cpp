#include "cdmkit/stability.hpp"

#include <cmath>
#include <stdexcept>

namespace cdmkit {

std::vector<int> StabilityProfile::undefined_indices() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    if (!gamma[k]) out.push_back(static_cast<int>(k) + 1);
  }
  return out;
}

StabilityProfile stability_indices(const Polynomial& p) {
  const int n = p.degree();
  if (n < 2) {
    throw std::invalid_argument("stability_indices: degree must be >= 2");
  }
  if (p[0] == 0.0) {
    throw std::invalid_argument("stability_indices: a_0 = 0, tau undefined");
  }

  StabilityProfile out;
  out.order = n;
  out.tau = p[1] / p[0];
  out.gamma.resize(static_cast<std::size_t>(n - 1));
  out.gamma_star.resize(static_cast<std::size_t>(n - 1));
  out.tau_i.resize(static_cast<std::size_t>(n - 1));

  for (int i = 1; i < n; ++i) {
    const double denom = p[i + 1] * p[i - 1];
    if (denom != 0.0) out.gamma[static_cast<std::size_t>(i - 1)] = p[i] * p[i] / denom;
    if (p[i] != 0.0) out.tau_i[static_cast<std::size_t>(i - 1)] = p[i + 1] / p[i];
  }

  // gamma_0 = gamma_n = infinity contribute 1/inf = 0.
  auto inverse_gamma = [&](int i) -> std::optional<double> {
    if (i <= 0 || i >= n) return 0.0;
    const auto g = out.gamma[static_cast<std::size_t>(i - 1)];
    if (!g || *g == 0.0) return std::nullopt;
    return 1.0 / *g;
  };
  for (int i = 1; i < n; ++i) {
    const auto lo = inverse_gamma(i - 1);
    const auto hi = inverse_gamma(i + 1);
    if (lo && hi) out.gamma_star[static_cast<std::size_t>(i - 1)] = *lo + *hi;
  }
  return out;
}

std::vector<double> standard_gammas(int order) {
  if (order < 2) throw std::invalid_argument("standard_gammas: order must be >= 2");
  std::vector<double> g(static_cast<std::size_t>(order - 1), 2.0);
  g[0] = 2.5;
  return g;
}

Polynomial synth_target(int order, double tau, const std::vector<double>& gamma,
                        double a0) {
  if (order < 2) throw std::invalid_argument("synth_target: order must be >= 2");
  if (!(tau > 0.0)) throw std::invalid_argument("synth_target: tau must be positive");
  if (!(a0 > 0.0)) throw std::invalid_argument("synth_target: a0 must be positive");
  if (gamma.size() != static_cast<std::size_t>(order - 1)) {
    throw std::invalid_argument("synth_target: need exactly order - 1 stability indices");
  }
  for (double g : gamma) {
    if (!(g > 0.0)) throw std::invalid_argument("synth_target: stability indices must be positive");
  }

  // a_i = a_{i-1} * tau_{i-1} with tau_i = tau_{i-1} / gamma_i, tau_0 = tau.
  std::vector<double> a(static_cast<std::size_t>(order) + 1);
  a[0] = a0;
  double tau_prev = tau;
  for (int i = 1; i <= order; ++i) {
    if (i >= 2) tau_prev /= gamma[static_cast<std::size_t>(i - 2)];
    a[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i - 1)] * tau_prev;
  }
  return Polynomial(std::move(a));
}

StabilityVerdict check_stability(const Polynomial& p) {
  StabilityVerdict v;
  const int n = p.degree();
  if (n < 3 || p[0] == 0.0) return v;

  const auto profile = stability_indices(p);

  v.unstable_applicable = true;
  for (int i = 1; i <= n - 2; ++i) {
    const auto gi = profile.gamma_at(i);
    const auto gn = profile.gamma_at(i + 1);
    if (gi && gn && *gn * *gi <= 1.0) v.sufficiently_unstable = true;
  }

  if (n < 4) return v;
  v.stable_applicable = true;
  bool all = true;
  for (int i = 2; i <= n - 2; ++i) {
    const auto gi = profile.gamma_at(i);
    const auto gs = profile.gamma_star_at(i);
    if (gi && gs) {
      const double margin = *gi - kStabilityMarginFactor * *gs;
      v.margins.emplace_back(margin);
      if (!(margin > 0.0)) all = false;
    } else {
      v.margins.emplace_back(std::nullopt);
      all = false;
    }
  }
  // The index conditions presume positive coefficients; a sign change
  // already forces a right-half-plane root.
  for (double c : p.coeffs()) {
    if (c * p.leading() <= 0.0) all = false;
  }
  v.sufficiently_stable = all;
  return v;
}

DiagramData coefficient_diagram(const std::map<std::string, Polynomial>& polys) {
  if (polys.empty()) throw std::invalid_argument("coefficient_diagram: no polynomials");
  DiagramData out;
  for (const auto& [label, p] : polys) {
    DiagramSeries series;
    series.label = label;
    for (int i = 0; i <= p.degree(); ++i) {
      const double c = p[i];
      series.points.push_back({i, c, std::abs(c), (c > 0.0) - (c < 0.0)});
    }
    if (p.degree() >= 2 && p[0] != 0.0) series.profile = stability_indices(p);
    out.push_back(std::move(series));
  }
  return out;
}

}  // namespace cdmkit
