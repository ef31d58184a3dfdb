#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace cdmkit {

using Complex = std::complex<double>;

/// Real polynomial with coefficients stored in ascending powers:
/// coeffs()[i] multiplies s^i.
///
/// Trailing zeros are trimmed on construction (exact zeros only), so the
/// leading coefficient is nonzero unless the polynomial is identically zero,
/// which is stored as the single coefficient 0.
class Polynomial {
 public:
  Polynomial();
  Polynomial(std::initializer_list<double> ascending);
  explicit Polynomial(std::vector<double> ascending);

  static Polynomial constant(double c);
  static Polynomial monomial(int power, double c = 1.0);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  double leading() const { return coeffs_.back(); }
  std::span<const double> coeffs() const { return coeffs_; }

  // Coefficient of s^power, zero beyond the degree.
  double operator[](int power) const;

  Complex eval(Complex z) const;
  double eval(double x) const;

  Polynomial operator-() const;
  Polynomial& operator*=(double c);

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim();
  std::vector<double> coeffs_;
};

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial sub(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
Polynomial scale(const Polynomial& p, double c);
Complex eval(const Polynomial& p, Complex z);

inline Polynomial operator+(const Polynomial& p, const Polynomial& q) { return add(p, q); }
inline Polynomial operator-(const Polynomial& p, const Polynomial& q) { return sub(p, q); }
inline Polynomial operator*(const Polynomial& p, const Polynomial& q) { return mul(p, q); }
inline Polynomial operator*(double c, const Polynomial& p) { return scale(p, c); }

/// All degree() roots of p, computed as eigenvalues of the balanced
/// companion matrix. Throws std::invalid_argument for constant polynomials.
std::vector<Complex> roots(const Polynomial& p);

/// Real polynomial leading * prod(s - r). Non-real roots must come in
/// conjugate pairs (imaginary parts matched to 1e-8 relative); the imaginary
/// residue of the expanded product is discarded. Throws std::invalid_argument
/// on an unpaired complex root.
Polynomial from_roots(std::span<const Complex> rs, double leading = 1.0);

/// Largest coefficientwise relative error |p_i - q_i| / max(|q_i|, floor),
/// with floor = floor_fraction * max_i |q_i|.
double max_relative_coefficient_error(const Polynomial& p, const Polynomial& q,
                                      double floor_fraction = 1e-12);

}  // namespace cdmkit
