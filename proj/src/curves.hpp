#pragma once

#include <vector>

namespace ndcglab {

// Scalar function on [0,1]: affine, polynomial, or piecewise linear through
// (x, y) knots spanning the whole interval. Integrals are closed-form.
class Curve {
 public:
  enum class Family { Affine, Polynomial, PiecewiseLinear };

  static Curve affine(double a, double b);                 // a + b*s
  static Curve constant(double v) { return affine(v, 0.0); }
  static Curve polynomial(std::vector<double> coeffs);     // c0 + c1 s + c2 s^2 ...
  static Curve piecewise_linear(std::vector<double> xs, std::vector<double> ys);

  double operator()(double s) const;  // s clamped to [0,1]
  double integral(double lo, double hi) const;
  double integral() const { return integral(0.0, 1.0); }
  // 1 - f, for building complements of probability curves.
  Curve complement() const;

  Family family() const { return family_; }
  const std::vector<double>& coefficients() const { return coef_; }
  const std::vector<double>& knots_x() const { return xs_; }
  const std::vector<double>& knots_y() const { return ys_; }

 private:
  Curve() = default;
  Family family_ = Family::Affine;
  std::vector<double> coef_;
  std::vector<double> xs_, ys_;
};

}  // namespace ndcglab
