#include "quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ndcglab {
namespace {

struct Ctx {
  const std::function<double(double)>& f;
  double tol_per_width;
  int max_depth;
  double err = 0.0;
  std::size_t evals = 0;
  bool converged = true;
};

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(Ctx& c, double a, double b, double fa, double fm, double fb, double whole,
               int depth) {
  const double m = 0.5 * (a + b);
  const double flm = c.f(0.5 * (a + m));
  const double frm = c.f(0.5 * (m + b));
  c.evals += 2;
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  const double width = b - a;
  const bool width_floor = width <= 1e-14 * (std::abs(a) + std::abs(b) + 1.0);
  if (std::abs(delta) <= 15.0 * c.tol_per_width * width || width_floor) {
    c.err += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  if (depth >= c.max_depth) {
    c.converged = false;
    c.err += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return recurse(c, a, m, fa, flm, fm, left, depth + 1) +
         recurse(c, m, b, fm, frm, fb, right, depth + 1);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_depth) {
  if (a == b) return {0.0, 0.0, 0, true};
  Ctx c{f, abs_tol / std::abs(b - a), max_depth};
  const double fa = f(a);
  const double fm = f(0.5 * (a + b));
  const double fb = f(b);
  c.evals = 3;
  const double whole = simpson(fa, fm, fb, b - a);
  const double v = recurse(c, a, b, fa, fm, fb, whole, 0);
  return {v, c.err, c.evals, c.converged};
}

QuadResult integrate_rel(const std::function<double(double)>& f, double a, double b,
                         double rel_tol, int max_depth) {
  constexpr int kPanels = 64;
  const double h = (b - a) / kPanels;
  double coarse = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double x0 = a + i * h;
    coarse += simpson(f(x0), f(x0 + 0.5 * h), f(x0 + h), h);
  }
  const double scale = std::max(std::abs(coarse), 1e-300);
  return integrate(f, a, b, rel_tol * scale, max_depth);
}

}  // namespace ndcglab
