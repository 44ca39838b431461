#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "datagen.hpp"
#include "discount.hpp"

namespace ndcglab {

// Closed-form almost-sure limit of NDCG under i.i.d. data, when one exists.
// An empty value means the measure provably has no deterministic limit.
struct LimitResult {
  std::optional<double> value;
  std::string theorem;
  std::vector<std::pair<std::string, bool>> assumptions;
  double quadrature_error_bound = 0.0;
  std::string note;
};

struct PseudoExpectation {
  std::uint64_t n = 0;
  double unnormalized = 0.0;  // integral of ybar(1 - s/n) D(s) over [1, n]
  double normalized = 0.0;    // unnormalized / F(n p)
};

// Full-list limit for D(r) = r^-beta.
LimitResult limit_power(const DistributionSpec& spec, double beta);
// Full-list limit for D(r) = 1/r: the conditional mean gain at the top.
LimitResult limit_zipfian(const DistributionSpec& spec);
// Truncated NDCG@k limit; d must carry a cutoff rule.
LimitResult limit_topk(const DistributionSpec& spec, const Discount& d);
// Dispatch on family and cutoff; the entry point used by the CLI.
LimitResult asymptotic_limit(const DistributionSpec& spec, const Discount& d);

// Deterministic stand-in for E[NDCG] at finite n, binary relevance.
PseudoExpectation pseudo_expectation(const Curve& ybar, const Discount& d, std::uint64_t n,
                                     double p);

inline std::vector<double> grade_masses(const DistributionSpec& spec) {
  return spec.grade_masses();
}

}  // namespace ndcglab
