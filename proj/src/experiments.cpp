#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <thread>

#include "errors.hpp"
#include "metrics.hpp"

namespace ndcglab {
namespace {

void validate_grid(const std::vector<std::uint64_t>& grid) {
  require(!grid.empty(), Errc::invalid_argument, "empty n grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] >= 1, Errc::invalid_argument, "n grid entries must be >= 1");
    require(i == 0 || grid[i] > grid[i - 1], Errc::invalid_argument,
            "n grid must be strictly increasing");
  }
  require(grid.back() <= kMaxSampleN, Errc::resource, "sample size exceeds the 1e8 cap");
}

// Trials are independent; workers pull indexes from a shared counter and write
// into preallocated per-trial slots, so the output never depends on schedule.
void run_trials(std::uint32_t trials, std::uint32_t threads,
                const std::function<void(std::uint32_t)>& body) {
  threads = std::clamp<std::uint32_t>(threads, 1, trials);
  if (threads == 1) {
    for (std::uint32_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<std::uint32_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::uint32_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::uint32_t t = next.fetch_add(1, std::memory_order_relaxed);
        if (t >= trials) return;
        try {
          body(t);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// One stream's worth of labels and scores, shared by every prefix evaluation
// inside a trial.
void generate(const DistributionSpec& spec, const std::vector<ScorerSpec>& scorers,
              const SampleStream& stream, std::uint64_t n, std::vector<std::uint8_t>& gidx,
              std::vector<std::vector<double>>& scores) {
  gidx.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    gidx[i] = static_cast<std::uint8_t>(stream.grade_index(spec, i));
  }
  scores.resize(scorers.size());
  for (std::size_t sc = 0; sc < scorers.size(); ++sc) {
    scores[sc].resize(n);
    for (std::uint64_t i = 0; i < n; ++i) scores[sc][i] = stream.scorer_score(scorers[sc], sc, i);
  }
}

struct CellStats {
  double mean = 0.0, sd = 0.0, ci = 0.0;
  std::uint32_t used = 0, skipped = 0;
};

CellStats aggregate(const std::vector<std::optional<double>>& column) {
  CellStats s;
  double sum = 0.0;
  for (const auto& v : column) {
    if (v) {
      sum += *v;
      ++s.used;
    } else {
      ++s.skipped;
    }
  }
  if (s.used == 0) return s;
  s.mean = sum / s.used;
  if (s.used >= 2) {
    double ss = 0.0;
    for (const auto& v : column) {
      if (v) ss += (*v - s.mean) * (*v - s.mean);
    }
    s.sd = std::sqrt(ss / (s.used - 1));
  }
  s.ci = 1.96 * s.sd / std::sqrt(static_cast<double>(s.used));
  return s;
}

}  // namespace

std::vector<CurvePoint> convergence_curve(const DistributionSpec& world,
                                          const std::vector<ScorerSpec>& scorers,
                                          const Discount& measure,
                                          const std::vector<std::uint64_t>& n_grid,
                                          std::uint32_t trials, std::uint64_t master_seed,
                                          std::uint32_t threads) {
  require(!scorers.empty(), Errc::invalid_argument, "need at least one scorer");
  validate_grid(n_grid);
  require(trials >= 30, Errc::invalid_argument, "convergence curves need at least 30 trials");

  const MetricEngine engine(measure, world.grade_set(), n_grid.back());
  const std::size_t cells = scorers.size() * n_grid.size();
  std::vector<std::optional<double>> results(static_cast<std::size_t>(trials) * cells);

  run_trials(trials, threads, [&](std::uint32_t trial) {
    thread_local std::vector<std::uint8_t> gidx;
    thread_local std::vector<std::vector<double>> scores;
    thread_local EvalScratch ws;
    const SampleStream stream(master_seed, trial);
    generate(world, scorers, stream, n_grid.back(), gidx, scores);
    for (std::size_t sc = 0; sc < scorers.size(); ++sc) {
      for (std::size_t g = 0; g < n_grid.size(); ++g) {
        const auto n = static_cast<std::size_t>(n_grid[g]);
        results[static_cast<std::size_t>(trial) * cells + sc * n_grid.size() + g] =
            engine.ndcg(std::span(scores[sc].data(), n), std::span(gidx.data(), n),
                        TieBreak::ByIndex, ws);
      }
    }
  });

  std::vector<CurvePoint> out;
  out.reserve(cells);
  std::vector<std::optional<double>> column(trials);
  for (std::size_t sc = 0; sc < scorers.size(); ++sc) {
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
      for (std::uint32_t t = 0; t < trials; ++t) {
        column[t] = results[static_cast<std::size_t>(t) * cells + sc * n_grid.size() + g];
      }
      const auto s = aggregate(column);
      out.push_back({n_grid[g], scorers[sc].label(), s.mean, s.sd, s.ci, s.used, s.skipped});
    }
  }
  return out;
}

namespace {

// Geometric fill between the thresholds, thresholds always included.
std::vector<std::uint64_t> build_eval_grid(const std::vector<std::uint64_t>& thresholds,
                                           std::uint32_t per_decade) {
  std::vector<std::uint64_t> grid(thresholds);
  const double lo = static_cast<double>(thresholds.front());
  const double hi = static_cast<double>(thresholds.back());
  const auto k_lo = static_cast<long>(std::ceil(per_decade * std::log10(lo) - 1e-9));
  const auto k_hi = static_cast<long>(std::floor(per_decade * std::log10(hi) + 1e-9));
  for (long k = k_lo; k <= k_hi; ++k) {
    const double v = std::pow(10.0, static_cast<double>(k) / per_decade);
    const auto n = static_cast<std::uint64_t>(std::llround(v));
    if (n >= thresholds.front() && n <= thresholds.back()) grid.push_back(n);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

DistinguishReport distinguish(const DistributionSpec& world, const ScorerSpec& f0,
                              const ScorerSpec& f1, const Discount& measure,
                              const std::vector<std::uint64_t>& N_grid,
                              std::uint32_t n_per_decade, std::uint32_t trials,
                              std::uint64_t master_seed, std::uint32_t threads) {
  validate_grid(N_grid);
  require(n_per_decade >= 1 && n_per_decade <= 100, Errc::invalid_argument,
          "grid density must be in [1, 100] points per decade");
  require(trials >= 100, Errc::invalid_argument, "distinguishability needs at least 100 trials");

  DistinguishReport rep;
  rep.thresholds = N_grid;
  rep.eval_grid = build_eval_grid(N_grid, n_per_decade);
  rep.trials = trials;
  const auto& grid = rep.eval_grid;

  std::vector<std::size_t> thresh_at(N_grid.size());
  for (std::size_t i = 0; i < N_grid.size(); ++i) {
    thresh_at[i] = static_cast<std::size_t>(
        std::lower_bound(grid.begin(), grid.end(), N_grid[i]) - grid.begin());
  }

  const MetricEngine engine(measure, world.grade_set(), grid.back());
  const std::vector<ScorerSpec> pair = {f0, f1};

  struct TrialOut {
    std::vector<std::uint8_t> flips;  // per threshold
    std::int8_t last_sign = 2;        // sign at the largest n; 2 = undefined
    std::uint32_t ties = 0, evals = 0;
  };
  std::vector<TrialOut> results(trials);

  run_trials(trials, threads, [&](std::uint32_t trial) {
    thread_local std::vector<std::uint8_t> gidx;
    thread_local std::vector<std::vector<double>> scores;
    thread_local EvalScratch ws;
    thread_local std::vector<std::int8_t> signs;
    const SampleStream stream(master_seed, trial);
    generate(world, pair, stream, grid.back(), gidx, scores);

    signs.resize(grid.size());
    auto& out = results[trial];
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto n = static_cast<std::size_t>(grid[g]);
      const auto a = engine.ndcg(std::span(scores[0].data(), n), std::span(gidx.data(), n),
                                 TieBreak::ByIndex, ws);
      const auto b = engine.ndcg(std::span(scores[1].data(), n), std::span(gidx.data(), n),
                                 TieBreak::ByIndex, ws);
      if (!a || !b) {
        signs[g] = 2;
        continue;
      }
      ++out.evals;
      const double diff = *a - *b;
      signs[g] = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
      if (signs[g] == 0) ++out.ties;
    }
    out.last_sign = signs.back();

    // suffix sign mix: a flip at N means both signs occur at some n >= N
    out.flips.assign(N_grid.size(), 0);
    bool pos = false, neg = false;
    std::size_t ti = N_grid.size();
    for (std::size_t g = grid.size(); g-- > 0;) {
      pos = pos || signs[g] == 1;
      neg = neg || signs[g] == -1;
      while (ti > 0 && thresh_at[ti - 1] == g) {
        out.flips[ti - 1] = pos && neg;
        --ti;
      }
    }
  });

  rep.flip_rate.assign(N_grid.size(), 0.0);
  std::uint32_t won0 = 0, won1 = 0;
  for (const auto& out : results) {
    for (std::size_t i = 0; i < N_grid.size(); ++i) rep.flip_rate[i] += out.flips[i];
    rep.tie_count += out.ties;
    rep.eval_count += out.evals;
    if (out.last_sign == 1) ++won0;
    if (out.last_sign == -1) ++won1;
  }
  for (auto& f : rep.flip_rate) f /= trials;

  const std::uint32_t signed_trials = won0 + won1;
  if (signed_trials == 0) {
    rep.winner = "undecided";
    rep.winner_share = 0.0;
  } else {
    rep.winner_share = static_cast<double>(std::max(won0, won1)) / signed_trials;
    rep.winner = rep.winner_share >= 0.55 ? (won0 > won1 ? "f0" : "f1") : "undecided";
  }
  return rep;
}

NonconvergenceReport nonconvergence_test(const DistributionSpec& world,
                                         const ScorerSpec& scorer, const Discount& measure,
                                         const std::vector<std::uint64_t>& n_grid,
                                         std::uint32_t trials, std::uint64_t master_seed,
                                         double theta_hi, double theta_lo, double floor_high,
                                         double floor_low, std::uint32_t threads) {
  validate_grid(n_grid);
  require(n_grid.size() >= 2, Errc::invalid_argument,
          "nonconvergence verdict needs at least two grid points");
  require(trials >= 30, Errc::invalid_argument, "nonconvergence test needs at least 30 trials");
  require(theta_lo > 0.0 && theta_lo < theta_hi && theta_hi < 1.0, Errc::invalid_argument,
          "need 0 < theta_lo < theta_hi < 1");
  require(floor_high > 0.0 && floor_high < 1.0 && floor_low > 0.0 && floor_low < 1.0,
          Errc::invalid_argument, "frequency floors must be in (0,1)");
  require(measure.classify().value == FeasibilityClass::Infeasible, Errc::assumption_violated,
          "nonconvergence regime needs a summable (Infeasible) discount");
  require(world.delta().has_value(), Errc::assumption_violated,
          "nonconvergence test needs the conditional floor delta declared");

  const MetricEngine engine(measure, world.grade_set(), n_grid.back());
  const std::vector<ScorerSpec> one = {scorer};
  std::vector<std::optional<double>> results(static_cast<std::size_t>(trials) * n_grid.size());

  run_trials(trials, threads, [&](std::uint32_t trial) {
    thread_local std::vector<std::uint8_t> gidx;
    thread_local std::vector<std::vector<double>> scores;
    thread_local EvalScratch ws;
    const SampleStream stream(master_seed, trial);
    generate(world, one, stream, n_grid.back(), gidx, scores);
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
      const auto n = static_cast<std::size_t>(n_grid[g]);
      results[static_cast<std::size_t>(trial) * n_grid.size() + g] = engine.ndcg(
          std::span(scores[0].data(), n), std::span(gidx.data(), n), TieBreak::ByIndex, ws);
    }
  });

  NonconvergenceReport rep;
  rep.theta_hi = theta_hi;
  rep.theta_lo = theta_lo;
  rep.floor_high = floor_high;
  rep.floor_low = floor_low;
  std::vector<std::optional<double>> column(trials);
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    std::uint32_t high = 0, low = 0;
    for (std::uint32_t t = 0; t < trials; ++t) {
      column[t] = results[static_cast<std::size_t>(t) * n_grid.size() + g];
      if (column[t]) {
        if (*column[t] >= theta_hi) ++high;
        if (*column[t] <= theta_lo) ++low;
      }
    }
    const auto s = aggregate(column);
    NonconvergencePoint pt;
    pt.n = n_grid[g];
    pt.trials = s.used;
    pt.skipped = s.skipped;
    pt.sd = s.sd;
    if (s.used > 0) {
      pt.freq_high = static_cast<double>(high) / s.used;
      pt.freq_low = static_cast<double>(low) / s.used;
    }
    rep.points.push_back(pt);
  }

  const auto& a = rep.points[rep.points.size() - 2];
  const auto& b = rep.points.back();
  rep.non_convergent = a.freq_high >= floor_high && a.freq_low >= floor_low &&
                       b.freq_high >= floor_high && b.freq_low >= floor_low;
  return rep;
}

ResidualSeries limit_gap(const std::vector<CurvePoint>& curve, const LimitResult& limit,
                         double slack) {
  require(limit.value.has_value(), Errc::invalid_argument, "limit_gap needs a limit value");
  require(slack >= 0.0, Errc::invalid_argument, "slack must be nonnegative");
  ResidualSeries out;
  out.points.reserve(curve.size());
  std::map<std::string, std::vector<double>> per_scorer;
  for (const auto& pt : curve) {
    const double r = std::abs(pt.mean - *limit.value);
    out.points.push_back({pt.n, pt.scorer, r});
    per_scorer[pt.scorer].push_back(r);
  }
  out.tail_nonincreasing = true;
  for (const auto& [name, rs] : per_scorer) {
    const std::size_t start = rs.size() > 3 ? rs.size() - 3 : 0;
    for (std::size_t i = start; i + 1 < rs.size(); ++i) {
      if (rs[i + 1] > rs[i] + slack) out.tail_nonincreasing = false;
    }
  }
  return out;
}

}  // namespace ndcglab
