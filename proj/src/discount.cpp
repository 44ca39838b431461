#include "discount.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "errors.hpp"
#include "quadrature.hpp"

namespace ndcglab {
namespace {

// Slope margin around 1/r inside which a fitted custom tail is not called
// either way.
constexpr double kSlopeMargin = 0.05;

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

CutoffRule CutoffRule::fixed(std::uint64_t k) {
  require(k >= 1, Errc::invalid_argument, "cutoff k must be >= 1");
  CutoffRule r;
  r.kind = Kind::FixedK;
  r.k = k;
  return r;
}

CutoffRule CutoffRule::linear_fraction(double c) {
  require(c > 0.0 && c < 1.0, Errc::invalid_argument, "cutoff fraction c must be in (0,1)");
  CutoffRule r;
  r.kind = Kind::LinearFraction;
  r.c = c;
  return r;
}

CutoffRule CutoffRule::sublinear_power(double gamma) {
  require(gamma > 0.0 && gamma < 1.0, Errc::invalid_argument, "cutoff gamma must be in (0,1)");
  CutoffRule r;
  r.kind = Kind::SublinearPower;
  r.gamma = gamma;
  return r;
}

std::uint64_t CutoffRule::resolve(std::uint64_t n) const {
  require(n >= 1, Errc::invalid_argument, "cutoff needs n >= 1");
  std::uint64_t cut = n;
  switch (kind) {
    case Kind::FixedK:
      cut = k;
      break;
    case Kind::LinearFraction:
      cut = static_cast<std::uint64_t>(std::ceil(c * static_cast<double>(n)));
      break;
    case Kind::SublinearPower:
      cut = static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(n), gamma)));
      break;
  }
  return std::clamp<std::uint64_t>(cut, 1, n);
}

std::string CutoffRule::label() const {
  switch (kind) {
    case Kind::FixedK:
      return "@k=" + std::to_string(k);
    case Kind::LinearFraction:
      return "@c=" + fmt_num(c);
    case Kind::SublinearPower:
      return "@n^" + fmt_num(gamma);
  }
  return "";
}

Discount Discount::log_inverse() {
  Discount d;
  d.family_ = DiscountFamily::LogInverse;
  return d;
}

Discount Discount::power(double beta) {
  require(beta > 0.0 && beta < 1.0, Errc::invalid_argument, "power discount beta must be in (0,1)");
  Discount d;
  d.family_ = DiscountFamily::Power;
  d.beta_ = beta;
  return d;
}

Discount Discount::zipfian() {
  Discount d;
  d.family_ = DiscountFamily::Zipfian;
  return d;
}

Discount Discount::exponential(double base) {
  require(base > 1.0, Errc::invalid_argument, "exponential discount base must be > 1");
  Discount d;
  d.family_ = DiscountFamily::Exponential;
  d.base_ = base;
  return d;
}

Discount Discount::custom(std::vector<double> values, CustomTail tail) {
  require(!values.empty(), Errc::invalid_argument, "custom discount table is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(values[i] > 0.0, Errc::invalid_argument, "custom discount values must be positive");
    require(i == 0 || values[i] <= values[i - 1], Errc::invalid_argument,
            "custom discount values must be nonincreasing");
  }
  Discount d;
  d.family_ = DiscountFamily::Custom;
  d.table_ = std::move(values);
  d.tail_ = tail;
  if (tail == CustomTail::Extend) {
    // Fit D(r) ~ A * r^-theta on the tail half by least squares in log-log.
    const std::size_t m = d.table_.size();
    std::size_t lo = std::max<std::size_t>(1, (m + 1) / 2);
    if (m >= 2 && lo == m) lo = m - 1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t r = lo; r <= m; ++r, ++cnt) {
      const double x = std::log(static_cast<double>(r));
      const double y = std::log(d.table_[r - 1]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double theta = 0.0;
    const double det = cnt * sxx - sx * sx;
    if (cnt >= 2 && det > 0.0) theta = -(cnt * sxy - sx * sy) / det;
    d.tail_theta_ = std::max(0.0, theta);
    d.tail_scale_ = d.table_.back() * std::pow(static_cast<double>(m), d.tail_theta_);
  }
  return d;
}

Discount Discount::with_cutoff(CutoffRule rule) const {
  Discount d = *this;
  d.cutoff_ = rule;
  return d;
}

Discount Discount::without_cutoff() const {
  Discount d = *this;
  d.cutoff_.reset();
  return d;
}

double Discount::eval(std::uint64_t r, std::uint64_t n) const {
  require(r >= 1 && r <= n, Errc::invalid_argument, "discount rank out of range");
  if (cutoff_ && r > cutoff_->resolve(n)) return 0.0;
  return raw(r);
}

double Discount::raw(std::uint64_t r) const {
  require(r >= 1, Errc::invalid_argument, "discount rank must be >= 1");
  const double rd = static_cast<double>(r);
  switch (family_) {
    case DiscountFamily::LogInverse:
      return 1.0 / std::log1p(rd);
    case DiscountFamily::Power:
      return std::pow(rd, -beta_);
    case DiscountFamily::Zipfian:
      return 1.0 / rd;
    case DiscountFamily::Exponential:
      return std::pow(base_, -rd);
    case DiscountFamily::Custom:
      if (r <= table_.size()) return table_[r - 1];
      if (tail_ == CustomTail::Zero) return 0.0;
      return tail_scale_ * std::pow(rd, -tail_theta_);
  }
  return 0.0;
}

double Discount::raw_real(double r) const {
  require(r >= 1.0, Errc::invalid_argument, "discount argument must be >= 1");
  switch (family_) {
    case DiscountFamily::LogInverse:
      return 1.0 / std::log1p(r);
    case DiscountFamily::Power:
      return std::pow(r, -beta_);
    case DiscountFamily::Zipfian:
      return 1.0 / r;
    case DiscountFamily::Exponential:
      return std::pow(base_, -r);
    case DiscountFamily::Custom: {
      const double m = static_cast<double>(table_.size());
      if (r <= m) {
        // linear interpolation between tabulated ranks
        const double fl = std::floor(r);
        const std::size_t i = static_cast<std::size_t>(fl);
        if (r == fl || i >= table_.size()) return table_[std::min<std::size_t>(i, table_.size()) - 1];
        const double t = r - fl;
        return table_[i - 1] * (1.0 - t) + table_[i] * t;
      }
      if (tail_ == CustomTail::Zero) return 0.0;
      return tail_scale_ * std::pow(r, -tail_theta_);
    }
  }
  return 0.0;
}

double Discount::partial_sum(std::uint64_t k) const {
  require(k >= 1, Errc::invalid_argument, "partial_sum needs k >= 1");
  if (cutoff_) {
    require(cutoff_->kind == CutoffRule::Kind::FixedK && cutoff_->k >= k, Errc::invalid_argument,
            "partial_sum needs the cutoff inactive below k");
  }
  double s = 0.0;
  for (std::uint64_t r = 1; r <= k; ++r) {
    const double term = raw(r);
    if (term == 0.0 && family_ == DiscountFamily::Exponential) break;
    s += term;
  }
  return s;
}

double Discount::antiderivative(double t) const {
  require(t >= 1.0, Errc::invalid_argument, "antiderivative needs t >= 1");
  require(!cutoff_, Errc::invalid_argument, "antiderivative is defined for the raw discount");
  switch (family_) {
    case DiscountFamily::LogInverse:
      return li_offset(1.0 + t);
    case DiscountFamily::Power:
      return (std::pow(t, 1.0 - beta_) - 1.0) / (1.0 - beta_);
    case DiscountFamily::Zipfian:
      return std::log(t);
    case DiscountFamily::Exponential:
      return (1.0 / base_ - std::pow(base_, -t)) / std::log(base_);
    case DiscountFamily::Custom:
      return integrate([this](double s) { return raw_real(s); }, 1.0, t, 1e-10).value;
  }
  return 0.0;
}

bool Discount::summable() const {
  switch (family_) {
    case DiscountFamily::Exponential:
      return true;
    case DiscountFamily::Custom:
      return tail_ == CustomTail::Zero || tail_theta_ > 1.0;
    default:
      return false;
  }
}

Feasibility Discount::classify() const {
  // a constant-k truncation makes the effective sum finite no matter the family
  if (cutoff_ && cutoff_->kind == CutoffRule::Kind::FixedK) {
    return {FeasibilityClass::Infeasible, false};
  }
  switch (family_) {
    case DiscountFamily::LogInverse:
    case DiscountFamily::Power:
      return {FeasibilityClass::Feasible, false};
    case DiscountFamily::Zipfian:
      return {FeasibilityClass::Borderline, false};
    case DiscountFamily::Exponential:
      return {FeasibilityClass::Infeasible, false};
    case DiscountFamily::Custom:
      break;
  }
  if (tail_ == CustomTail::Zero) return {FeasibilityClass::Infeasible, false};
  if (tail_theta_ <= 1.0 - kSlopeMargin) return {FeasibilityClass::Feasible, false};
  if (tail_theta_ >= 1.0 + kSlopeMargin) return {FeasibilityClass::Infeasible, false};
  return {FeasibilityClass::Borderline, true};
}

std::string Discount::label() const {
  std::string s;
  switch (family_) {
    case DiscountFamily::LogInverse:
      s = "log";
      break;
    case DiscountFamily::Power:
      s = "power(" + fmt_num(beta_) + ")";
      break;
    case DiscountFamily::Zipfian:
      s = "zipfian";
      break;
    case DiscountFamily::Exponential:
      s = "exp(" + fmt_num(base_) + ")";
      break;
    case DiscountFamily::Custom:
      s = "custom[" + std::to_string(table_.size()) + "]";
      break;
  }
  if (cutoff_) s += cutoff_->label();
  return s;
}

double li_offset(double t) {
  require(t >= 2.0, Errc::invalid_argument, "li_offset needs t >= 2");
  if (t == 2.0) return 0.0;
  return integrate([](double x) { return 1.0 / std::log(x); }, 2.0, t, 1e-10).value;
}

}  // namespace ndcglab
