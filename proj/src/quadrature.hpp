#pragma once

#include <cstddef>
#include <functional>

namespace ndcglab {

struct QuadResult {
  double value = 0.0;
  double error_bound = 0.0;  // sum of local error estimates
  std::size_t evals = 0;
  bool converged = true;  // false if any panel hit the depth cap
};

// Adaptive Simpson on [a, b] with a global absolute tolerance. The budget is
// spread over subintervals in proportion to width so each region refines
// independently; accepted panels get Richardson extrapolation.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_depth = 60);

// Same routine targeting |error| <= rel_tol * |integral|, with the scale taken
// from a coarse composite pass.
QuadResult integrate_rel(const std::function<double(double)>& f, double a, double b,
                         double rel_tol, int max_depth = 60);

}  // namespace ndcglab
