#include "limits.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "quadrature.hpp"

namespace ndcglab {
namespace {

constexpr double kQuadTol = 1e-10;

bool is_binary(const DistributionSpec& spec) {
  const auto& gs = spec.grade_set();
  return gs.size() == 2 && gs.grades()[0] == 1.0 && gs.grades()[1] == 0.0 &&
         gs.gain() == Gain::Identity;
}

// E[gain | canonical value s], the curve every limit integrates.
std::function<double(double)> mean_gain_fn(const DistributionSpec& spec) {
  return [&spec](double s) { return spec.mean_gain(s); };
}

void check_masses(const DistributionSpec& spec, bool binary, LimitResult& out) {
  const auto p = spec.marginals();
  if (binary) {
    const bool ok = p[0] > 0.0;
    out.assumptions.emplace_back("top-grade mass positive", ok);
    require(ok, Errc::assumption_violated, "limit needs Pr(Y = 1) > 0");
  } else {
    const bool ok = std::all_of(p.begin(), p.end(), [](double v) { return v > 0.0; });
    out.assumptions.emplace_back("all grade masses positive", ok);
    require(ok, Errc::assumption_violated, "limit needs every grade mass positive");
  }
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

// Masses R_0..R_J and the index t with R_t < c <= R_{t+1}.
std::size_t t_index(const std::vector<double>& r, double c) {
  std::size_t t = 0;
  while (t + 1 < r.size() - 1 && r[t + 1] < c) ++t;
  return t;
}

// int_{1-c}^{1} m(s) (1-s)^{-beta} ds with the endpoint singularity removed by
// u = (1-s)^{1-beta}; c = 1 covers the full-list case.
QuadResult power_integral(const std::function<double(double)>& m, double beta, double c) {
  const double e = 1.0 - beta;
  const double upper = std::pow(c, e);
  return integrate(
      [&m, e](double u) { return m(1.0 - std::pow(u, 1.0 / e)); }, 0.0, upper, kQuadTol);
}

LimitResult power_form(const DistributionSpec& spec, double beta, std::optional<double> cut_c) {
  require(beta > 0.0 && beta < 1.0, Errc::invalid_argument, "beta must be in (0,1)");
  const bool binary = is_binary(spec);
  LimitResult out;
  if (cut_c) {
    out.theorem = binary ? "Thm9" : "Thm13";
  } else {
    out.theorem = binary ? "Thm3" : "Thm10";
  }
  check_masses(spec, binary, out);

  const double e = 1.0 - beta;
  const double c = cut_c.value_or(1.0);
  const auto& gs = spec.grade_set();
  const auto r = spec.grade_masses();

  double den = 0.0;
  if (cut_c) {
    const auto t = t_index(r, c);
    for (std::size_t j = 0; j < t; ++j) {
      den += gs.gain_at(j) * (std::pow(r[j + 1], e) - std::pow(r[j], e));
    }
    den += gs.gain_at(t) * (std::pow(c, e) - std::pow(r[t], e));
  } else {
    for (std::size_t j = 0; j + 1 < r.size(); ++j) {
      den += gs.gain_at(j) * (std::pow(r[j + 1], e) - std::pow(r[j], e));
    }
  }

  const auto m = mean_gain_fn(spec);
  const auto q = power_integral(m, beta, c);  // equals (1-beta) * singular integral
  out.value = clamp_unit(q.value / den);
  out.quadrature_error_bound = q.error_bound / den;
  out.assumptions.emplace_back("quadrature converged", q.converged);
  return out;
}

LimitResult top_value_form(const DistributionSpec& spec, const char* theorem_binary) {
  const bool binary = is_binary(spec);
  LimitResult out;
  out.theorem = binary ? theorem_binary : "Thm11";
  check_masses(spec, binary, out);
  const double gain_top = spec.grade_set().gain_at(0);
  out.value = clamp_unit(spec.mean_gain(1.0) / gain_top);
  return out;
}

LimitResult no_limit(std::string note) {
  LimitResult out;
  out.theorem = "Thm6";
  out.assumptions.emplace_back("discount sum divergent", false);
  out.note = std::move(note);
  return out;
}

LimitResult standard_limit(const DistributionSpec& spec) {
  LimitResult out;
  out.theorem = "Thm1";
  check_masses(spec, is_binary(spec), out);
  out.assumptions.emplace_back("discount sum divergent", true);
  out.value = 1.0;
  out.note = "standard NDCG converges to 1 for every scorer";
  return out;
}

}  // namespace

LimitResult limit_power(const DistributionSpec& spec, double beta) {
  return power_form(spec, beta, std::nullopt);
}

LimitResult limit_zipfian(const DistributionSpec& spec) {
  return top_value_form(spec, "Thm5");
}

LimitResult limit_topk(const DistributionSpec& spec, const Discount& d) {
  require(d.cutoff().has_value(), Errc::invalid_argument, "limit_topk needs a cutoff rule");
  const auto& cut = *d.cutoff();

  if (cut.kind == CutoffRule::Kind::FixedK) {
    return no_limit("constant k truncates the discount to a finite sum; "
                    "NDCG@k keeps fluctuating with the top-k draw");
  }
  if (d.summable()) {
    return no_limit("summable discount: the measure concentrates on the top ranks "
                    "and never settles");
  }

  if (cut.kind == CutoffRule::Kind::SublinearPower) {
    // k = o(n) with a divergent discount sum behaves like the Zipfian limit
    auto out = top_value_form(spec, "Thm7");
    out.assumptions.emplace_back("cutoff sublinear in n", true);
    return out;
  }

  // LinearFraction
  const double c = cut.c;
  if (d.family() == DiscountFamily::Power) {
    auto out = power_form(spec, d.beta(), c);
    out.assumptions.emplace_back("cutoff linear in n", true);
    return out;
  }
  require(d.family() == DiscountFamily::LogInverse, Errc::assumption_violated,
          "no closed form for this discount family with a linear cutoff");

  const bool binary = is_binary(spec);
  LimitResult out;
  out.theorem = binary ? "Thm8" : "Thm12";
  check_masses(spec, binary, out);
  out.assumptions.emplace_back("cutoff linear in n", true);

  const auto& gs = spec.grade_set();
  const auto r = spec.grade_masses();
  const auto t = t_index(r, c);
  double den = 0.0;
  for (std::size_t j = 0; j < t; ++j) den += gs.gain_at(j) * (r[j + 1] - r[j]);
  den += gs.gain_at(t) * (c - r[t]);

  const auto m = mean_gain_fn(spec);
  const auto q = integrate(m, 1.0 - c, 1.0, kQuadTol);
  out.value = clamp_unit(q.value / den);
  out.quadrature_error_bound = q.error_bound / den;
  out.assumptions.emplace_back("quadrature converged", q.converged);
  return out;
}

LimitResult asymptotic_limit(const DistributionSpec& spec, const Discount& d) {
  if (d.cutoff()) return limit_topk(spec, d);

  switch (d.family()) {
    case DiscountFamily::LogInverse:
      return standard_limit(spec);
    case DiscountFamily::Power:
      return limit_power(spec, d.beta());
    case DiscountFamily::Zipfian:
      return limit_zipfian(spec);
    case DiscountFamily::Exponential:
      return no_limit("exponential discount is summable");
    case DiscountFamily::Custom:
      break;
  }

  const auto cls = d.classify();
  if (cls.value == FeasibilityClass::Infeasible) {
    return no_limit("tabulated discount tail is summable");
  }
  if (cls.value == FeasibilityClass::Feasible) {
    if (d.tail_slope() <= 1e-9) {  // zero up to fit noise
      // flat tail: slowly varying, same regime as the standard discount
      auto out = standard_limit(spec);
      out.note = "tabulated tail is flat; treated as slowly varying";
      return out;
    }
    // tail fitted as A r^-theta with theta < 1: limit depends on the tail only
    auto out = limit_power(spec, d.tail_slope());
    out.note = "tabulated tail treated as a power discount with the fitted exponent";
    out.assumptions.emplace_back("tail fit unambiguous", true);
    return out;
  }
  auto out = limit_zipfian(spec);
  out.note = "tabulated tail is close to 1/r; treated as Zipfian";
  out.assumptions.emplace_back("tail fit unambiguous", !cls.ambiguous);
  return out;
}

PseudoExpectation pseudo_expectation(const Curve& ybar, const Discount& d, std::uint64_t n,
                                     double p) {
  require(n >= 2, Errc::invalid_argument, "pseudo-expectation needs n >= 2");
  require(p > 0.0 && p <= 1.0, Errc::invalid_argument, "p must be in (0,1]");
  require(!d.cutoff().has_value(), Errc::assumption_violated,
          "pseudo-expectation is defined for untruncated discounts");
  require(!d.summable(), Errc::assumption_violated,
          "pseudo-expectation needs a divergent discount sum");
  const double np = static_cast<double>(n) * p;
  require(np >= 1.0, Errc::invalid_argument, "n*p must be at least 1");

  const double nd = static_cast<double>(n);
  const auto q = integrate_rel(
      [&](double s) { return ybar(1.0 - s / nd) * d.raw_real(s); }, 1.0, nd, 1e-8);

  PseudoExpectation out;
  out.n = n;
  out.unnormalized = q.value;
  out.normalized = q.value / d.antiderivative(np);
  return out;
}

}  // namespace ndcglab
