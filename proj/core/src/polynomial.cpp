#include "cdmkit/polynomial.hpp"

#include "balance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdmkit {

namespace {

constexpr double kConjugatePairTolerance = 1e-8;

}  // namespace

Polynomial::Polynomial() : coeffs_{0.0} {}

Polynomial::Polynomial(std::initializer_list<double> ascending)
    : coeffs_(ascending) {
  trim();
}

Polynomial::Polynomial(std::vector<double> ascending)
    : coeffs_(std::move(ascending)) {
  trim();
}

Polynomial Polynomial::constant(double c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(int power, double c) {
  if (power < 0) throw std::invalid_argument("monomial: negative power");
  std::vector<double> v(static_cast<std::size_t>(power) + 1, 0.0);
  v.back() = c;
  return Polynomial(std::move(v));
}

void Polynomial::trim() {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("polynomial coefficient is not finite");
    }
  }
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

double Polynomial::operator[](int power) const {
  if (power < 0 || power > degree()) return 0.0;
  return coeffs_[static_cast<std::size_t>(power)];
}

Complex Polynomial::eval(Complex z) const {
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double Polynomial::eval(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::operator-() const { return scale(*this, -1.0); }

Polynomial& Polynomial::operator*=(double c) {
  *this = scale(*this, c);
  return *this;
}

Polynomial add(const Polynomial& p, const Polynomial& q) {
  const int n = std::max(p.degree(), q.degree());
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) out[static_cast<std::size_t>(i)] = p[i] + q[i];
  return Polynomial(std::move(out));
}

Polynomial sub(const Polynomial& p, const Polynomial& q) {
  const int n = std::max(p.degree(), q.degree());
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) out[static_cast<std::size_t>(i)] = p[i] - q[i];
  return Polynomial(std::move(out));
}

Polynomial mul(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) return Polynomial();
  const auto a = p.coeffs();
  const auto b = q.coeffs();
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return Polynomial(std::move(out));
}

Polynomial scale(const Polynomial& p, double c) {
  std::vector<double> out(p.coeffs().begin(), p.coeffs().end());
  for (double& v : out) v *= c;
  return Polynomial(std::move(out));
}

Complex eval(const Polynomial& p, Complex z) { return p.eval(z); }

std::vector<Complex> roots(const Polynomial& p) {
  const int n = p.degree();
  if (n < 1) {
    throw std::invalid_argument("roots: polynomial must have degree >= 1");
  }
  const double lead = p.leading();
  if (n == 1) return {Complex(-p[0] / lead, 0.0)};

  // Companion matrix with the normalized coefficients in the last column.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[i] / lead;
  internal::balance(companion);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("roots: eigenvalue iteration did not converge");
  }
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    out.push_back(solver.eigenvalues()[i]);
  }
  return out;
}

Polynomial from_roots(std::span<const Complex> rs, double leading) {
  std::vector<Complex> pending(rs.begin(), rs.end());
  std::vector<bool> used(pending.size(), false);
  Polynomial acc = Polynomial::constant(leading);

  auto is_real = [](Complex r) {
    return std::abs(r.imag()) <= kConjugatePairTolerance * std::max(1.0, std::abs(r));
  };

  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (used[i]) continue;
    const Complex r = pending[i];
    used[i] = true;
    if (is_real(r)) {
      acc = mul(acc, Polynomial({-r.real(), 1.0}));
      continue;
    }
    // Closest unused conjugate partner.
    std::size_t best = pending.size();
    double best_dist = 0.0;
    for (std::size_t j = i + 1; j < pending.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(pending[j] - std::conj(r));
      if (best == pending.size() || d < best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best == pending.size() ||
        best_dist > kConjugatePairTolerance * std::max(1.0, std::abs(r))) {
      throw std::invalid_argument("from_roots: complex root without conjugate partner");
    }
    used[best] = true;
    const Complex mean = 0.5 * (r + std::conj(pending[best]));
    acc = mul(acc, Polynomial({std::norm(mean), -2.0 * mean.real(), 1.0}));
  }
  return acc;
}

double max_relative_coefficient_error(const Polynomial& p, const Polynomial& q,
                                      double floor_fraction) {
  const int n = std::max(p.degree(), q.degree());
  double scale_q = 0.0;
  for (double c : q.coeffs()) scale_q = std::max(scale_q, std::abs(c));
  const double floor = floor_fraction * scale_q;
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double denom = std::max(std::abs(q[i]), floor);
    const double diff = std::abs(p[i] - q[i]);
    if (denom == 0.0) {
      if (diff != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, diff / denom);
  }
  return worst;
}

}  // namespace cdmkit
