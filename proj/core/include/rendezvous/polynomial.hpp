#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace rdv {

/// Dense univariate polynomial, coefficients in ascending order of degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);
  Polynomial(std::initializer_list<double> coefficients);

  double operator()(double x) const noexcept;

  std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  Polynomial derivative() const;
  /// Antiderivative with zero constant term.
  Polynomial antiderivative() const;
  Polynomial pow(unsigned exponent) const;

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim();
  std::vector<double> coeffs_;
};

}  // namespace rdv
