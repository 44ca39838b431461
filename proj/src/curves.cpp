#include "curves.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace ndcglab {

Curve Curve::affine(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b), Errc::invalid_argument,
          "affine curve needs finite coefficients");
  Curve c;
  c.family_ = Family::Affine;
  c.coef_ = {a, b};
  return c;
}

Curve Curve::polynomial(std::vector<double> coeffs) {
  require(!coeffs.empty(), Errc::invalid_argument, "polynomial curve needs coefficients");
  for (const double v : coeffs)
    require(std::isfinite(v), Errc::invalid_argument, "polynomial coefficients must be finite");
  Curve c;
  c.family_ = Family::Polynomial;
  c.coef_ = std::move(coeffs);
  return c;
}

Curve Curve::piecewise_linear(std::vector<double> xs, std::vector<double> ys) {
  require(xs.size() == ys.size(), Errc::invalid_argument, "knot arrays must be parallel");
  require(xs.size() >= 2, Errc::invalid_argument, "piecewise curve needs at least two knots");
  require(xs.front() == 0.0 && xs.back() == 1.0, Errc::invalid_argument,
          "piecewise knots must span [0,1]");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(std::isfinite(ys[i]), Errc::invalid_argument, "knot values must be finite");
    require(i == 0 || xs[i] > xs[i - 1], Errc::invalid_argument,
            "knot positions must be strictly increasing");
  }
  Curve c;
  c.family_ = Family::PiecewiseLinear;
  c.xs_ = std::move(xs);
  c.ys_ = std::move(ys);
  return c;
}

double Curve::operator()(double s) const {
  s = std::clamp(s, 0.0, 1.0);
  switch (family_) {
    case Family::Affine:
      return coef_[0] + coef_[1] * s;
    case Family::Polynomial: {
      double v = 0.0;
      for (std::size_t i = coef_.size(); i-- > 0;) v = v * s + coef_[i];
      return v;
    }
    case Family::PiecewiseLinear: {
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), s);
      const std::size_t hi = std::min<std::size_t>(xs_.size() - 1,
                                                   static_cast<std::size_t>(it - xs_.begin()));
      const std::size_t lo = hi - 1;
      const double t = (s - xs_[lo]) / (xs_[hi] - xs_[lo]);
      return ys_[lo] * (1.0 - t) + ys_[hi] * t;
    }
  }
  return 0.0;
}

double Curve::integral(double lo, double hi) const {
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  require(lo <= hi, Errc::invalid_argument, "integral bounds out of order");
  switch (family_) {
    case Family::Affine:
      return coef_[0] * (hi - lo) + 0.5 * coef_[1] * (hi * hi - lo * lo);
    case Family::Polynomial: {
      double vhi = 0.0, vlo = 0.0;
      for (std::size_t i = coef_.size(); i-- > 0;) {
        vhi = vhi * hi + coef_[i] / static_cast<double>(i + 1);
        vlo = vlo * lo + coef_[i] / static_cast<double>(i + 1);
      }
      return vhi * hi - vlo * lo;
    }
    case Family::PiecewiseLinear: {
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
        const double a = std::max(lo, xs_[i]);
        const double b = std::min(hi, xs_[i + 1]);
        if (a >= b) continue;
        const double w = xs_[i + 1] - xs_[i];
        const double ya = ys_[i] + (ys_[i + 1] - ys_[i]) * (a - xs_[i]) / w;
        const double yb = ys_[i] + (ys_[i + 1] - ys_[i]) * (b - xs_[i]) / w;
        total += 0.5 * (ya + yb) * (b - a);
      }
      return total;
    }
  }
  return 0.0;
}

Curve Curve::complement() const {
  Curve c = *this;
  switch (family_) {
    case Family::Affine:
      c.coef_ = {1.0 - coef_[0], -coef_[1]};
      break;
    case Family::Polynomial:
      for (auto& v : c.coef_) v = -v;
      c.coef_[0] += 1.0;
      break;
    case Family::PiecewiseLinear:
      for (auto& v : c.ys_) v = 1.0 - v;
      break;
  }
  return c;
}

}  // namespace ndcglab
