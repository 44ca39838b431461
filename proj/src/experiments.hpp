#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "datagen.hpp"
#include "discount.hpp"
#include "limits.hpp"

namespace ndcglab {

// One aggregated cell of a convergence run. trials counts the sample paths
// that produced a value at this n; degenerate all-zero prefixes are skipped
// and counted, never imputed.
struct CurvePoint {
  std::uint64_t n = 0;
  std::string scorer;
  double mean = 0.0;
  double sd = 0.0;  // across trials, ddof = 1
  double ci = 0.0;  // 1.96 sd / sqrt(trials)
  std::uint32_t trials = 0;
  std::uint32_t skipped = 0;
};

// Mean NDCG per (scorer, n) over independent sample paths. Within a trial all
// scorers and all prefixes share one stream; trial t uses stream id t, so the
// result is a pure function of (config, master_seed) whatever the thread
// count. Rows are grouped by scorer in input order, n ascending within.
std::vector<CurvePoint> convergence_curve(const DistributionSpec& world,
                                          const std::vector<ScorerSpec>& scorers,
                                          const Discount& measure,
                                          const std::vector<std::uint64_t>& n_grid,
                                          std::uint32_t trials, std::uint64_t master_seed,
                                          std::uint32_t threads = 1);

// Empirical consistent-distinguishability estimate for a scorer pair. Each
// trial evaluates both scorers on the same labeled stream over a geometric n
// grid; a trial flips at threshold N when the sign of NDCG(f0) - NDCG(f1) is
// not constant over the grid points >= N (exact zeros are ties, not flips).
struct DistinguishReport {
  std::vector<std::uint64_t> thresholds;  // report grid (input N values)
  std::vector<std::uint64_t> eval_grid;   // geometric evaluation points
  std::vector<double> flip_rate;          // per threshold, fraction of trials
  std::uint64_t tie_count = 0;            // exact-zero differences seen
  std::uint64_t eval_count = 0;           // defined paired evaluations
  std::uint32_t trials = 0;
  std::string winner;        // "f0", "f1", or "undecided" (majority < 55%)
  double winner_share = 0.0;  // majority fraction of signed trials at max n
};

DistinguishReport distinguish(const DistributionSpec& world, const ScorerSpec& f0,
                              const ScorerSpec& f1, const Discount& measure,
                              const std::vector<std::uint64_t>& N_grid,
                              std::uint32_t n_per_decade, std::uint32_t trials,
                              std::uint64_t master_seed, std::uint32_t threads = 1);

struct NonconvergencePoint {
  std::uint64_t n = 0;
  double freq_high = 0.0;  // Pr[NDCG >= theta_hi]
  double freq_low = 0.0;   // Pr[NDCG <= theta_lo]
  double sd = 0.0;
  std::uint32_t trials = 0;
  std::uint32_t skipped = 0;
};

struct NonconvergenceReport {
  std::vector<NonconvergencePoint> points;
  double theta_hi = 0.0, theta_lo = 0.0;
  double floor_high = 0.0, floor_low = 0.0;
  bool non_convergent = false;  // both floors cleared at the two largest n
};

// Detects the summable-discount regime: NDCG keeps landing both above
// theta_hi and below theta_lo with nonvanishing frequency. The world must
// declare a conditional floor delta; the discount must classify Infeasible.
NonconvergenceReport nonconvergence_test(const DistributionSpec& world,
                                         const ScorerSpec& scorer, const Discount& measure,
                                         const std::vector<std::uint64_t>& n_grid,
                                         std::uint32_t trials, std::uint64_t master_seed,
                                         double theta_hi = 0.6, double theta_lo = 0.3,
                                         double floor_high = 0.3, double floor_low = 0.05,
                                         std::uint32_t threads = 1);

struct ResidualPoint {
  std::uint64_t n = 0;
  std::string scorer;
  double residual = 0.0;  // |mean - limit value|
};

struct ResidualSeries {
  std::vector<ResidualPoint> points;
  bool tail_nonincreasing = false;  // last three points per scorer, with slack
};

ResidualSeries limit_gap(const std::vector<CurvePoint>& curve, const LimitResult& limit,
                         double slack = 1e-3);

}  // namespace ndcglab
