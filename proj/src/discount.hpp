#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ndcglab {

enum class DiscountFamily { LogInverse, Power, Zipfian, Exponential, Custom };
enum class FeasibilityClass { Feasible, Borderline, Infeasible };

struct Feasibility {
  FeasibilityClass value = FeasibilityClass::Borderline;
  bool ambiguous = false;  // custom tail too close to 1/r to call
};

struct CutoffRule {
  enum class Kind { FixedK, LinearFraction, SublinearPower };
  Kind kind = Kind::FixedK;
  std::uint64_t k = 0;  // FixedK
  double c = 0.0;       // LinearFraction, in (0,1)
  double gamma = 0.0;   // SublinearPower, in (0,1)

  static CutoffRule fixed(std::uint64_t k);
  static CutoffRule linear_fraction(double c);
  static CutoffRule sublinear_power(double gamma);

  // k(n), clamped to [1, n].
  std::uint64_t resolve(std::uint64_t n) const;
  std::string label() const;
};

enum class CustomTail { Zero, Extend };

// A rank discount D(r). Custom tables are extended past the last entry either
// by zero or by a power law fitted to the tail half of the table.
class Discount {
 public:
  static Discount log_inverse();
  static Discount power(double beta);        // D(r) = r^-beta, beta in (0,1)
  static Discount zipfian();                 // D(r) = 1/r
  static Discount exponential(double base);  // D(r) = base^-r, base > 1
  static Discount custom(std::vector<double> values, CustomTail tail);

  Discount with_cutoff(CutoffRule rule) const;
  Discount without_cutoff() const;

  DiscountFamily family() const { return family_; }
  const std::optional<CutoffRule>& cutoff() const { return cutoff_; }
  double beta() const { return beta_; }
  double base() const { return base_; }
  const std::vector<double>& table() const { return table_; }
  CustomTail tail() const { return tail_; }
  double tail_slope() const { return tail_theta_; }

  // Discount applied at rank r in a list of length n (cutoff-aware).
  double eval(std::uint64_t r, std::uint64_t n) const;
  // D(r) at integer rank, ignoring any cutoff.
  double raw(std::uint64_t r) const;
  // Continuous extension of D for quadrature, r >= 1.
  double raw_real(double r) const;
  // sum_{r=1..k} D(r).
  double partial_sum(std::uint64_t k) const;
  // F(t) = integral of D over [1, t]; closed form except for Custom.
  double antiderivative(double t) const;

  bool summable() const;
  Feasibility classify() const;
  std::string label() const;

 private:
  Discount() = default;

  DiscountFamily family_ = DiscountFamily::LogInverse;
  double beta_ = 0.0;
  double base_ = 0.0;
  std::vector<double> table_;
  CustomTail tail_ = CustomTail::Zero;
  double tail_theta_ = 0.0;  // fitted tail exponent (Custom + Extend)
  double tail_scale_ = 0.0;
  std::optional<CutoffRule> cutoff_;
};

// Integral of 1/ln(tau) over [2, t]; t >= 2.
double li_offset(double t);

}  // namespace ndcglab
