#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace ndcglab {
namespace {

std::vector<std::size_t> grade_indexes(std::span<const double> grades, const GradeSet& gs) {
  std::vector<std::size_t> idx(grades.size());
  for (std::size_t i = 0; i < grades.size(); ++i) {
    const auto j = gs.index_of(grades[i]);
    require(j.has_value(), Errc::invalid_argument, "grade value not in the grade set");
    idx[i] = *j;
  }
  return idx;
}

std::uint64_t cutoff_at(const Discount& d, std::uint64_t n) {
  return d.cutoff() ? d.cutoff()->resolve(n) : n;
}

}  // namespace

std::vector<std::uint32_t> rank(std::span<const double> scores, std::span<const double> grades,
                                const GradeSet& gs, TieBreak tb) {
  require(scores.size() == grades.size(), Errc::invalid_argument,
          "scores and grades must be parallel");
  require(!scores.empty(), Errc::invalid_argument, "empty dataset");
  for (const double s : scores)
    require(std::isfinite(s), Errc::invalid_argument, "scores must be finite");
  const auto gidx = grade_indexes(grades, gs);

  std::vector<std::uint32_t> perm(scores.size());
  for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (tb != TieBreak::ByIndex) {
      const double ga = gs.gain_at(gidx[a]);
      const double gb = gs.gain_at(gidx[b]);
      if (ga != gb) return tb == TieBreak::Pessimistic ? ga < gb : ga > gb;
    }
    return a < b;
  });
  return perm;
}

double dcg(std::span<const double> ranked_grades, const Discount& d, const GradeSet& gs) {
  require(!ranked_grades.empty(), Errc::invalid_argument, "empty dataset");
  const auto gidx = grade_indexes(ranked_grades, gs);
  const std::uint64_t n = ranked_grades.size();
  const std::uint64_t k = cutoff_at(d, n);
  double sum = 0.0;
  for (std::uint64_t r = 1; r <= k; ++r) sum += gs.gain_at(gidx[r - 1]) * d.raw(r);
  return sum;
}

double idcg(std::span<const double> grades, const Discount& d, const GradeSet& gs) {
  require(!grades.empty(), Errc::invalid_argument, "empty dataset");
  const auto gidx = grade_indexes(grades, gs);
  std::vector<std::uint64_t> counts(gs.size(), 0);
  for (const auto j : gidx) ++counts[j];

  const std::uint64_t n = grades.size();
  const std::uint64_t k = cutoff_at(d, n);
  double sum = 0.0;
  std::uint64_t r = 1;
  for (std::size_t j = 0; j < counts.size() && r <= k; ++j) {
    for (std::uint64_t c = 0; c < counts[j] && r <= k; ++c, ++r) {
      sum += gs.gain_at(j) * d.raw(r);
    }
  }
  return sum;
}

double ndcg(const Dataset& data, const Discount& d, const GradeSet& gs, TieBreak tb) {
  const auto perm = rank(data.scores, data.grades, gs, tb);
  std::vector<double> ranked(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) ranked[i] = data.grades[perm[i]];
  const double num = dcg(ranked, d, gs);
  const double den = idcg(data.grades, d, gs);
  require(den > 0.0, Errc::degenerate_dataset, "ideal DCG is zero (no positive gains)");
  return num / den;
}

double brute_force_idcg(std::span<const double> grades, const Discount& d, const GradeSet& gs) {
  require(grades.size() <= 10, Errc::resource, "brute force ideal DCG is capped at n = 10");
  std::vector<double> g(grades.begin(), grades.end());
  std::sort(g.begin(), g.end());
  double best = -std::numeric_limits<double>::infinity();
  do {
    best = std::max(best, dcg(g, d, gs));
  } while (std::next_permutation(g.begin(), g.end()));
  return best;
}

MetricEngine::MetricEngine(Discount d, GradeSet gs, std::uint64_t max_n)
    : d_(std::move(d)), gs_(std::move(gs)), max_n_(max_n) {
  require(max_n >= 1, Errc::invalid_argument, "engine needs max_n >= 1");
  require(max_n <= (1ull << 32), Errc::resource, "engine table too large");
  disc_.resize(max_n + 1);
  prefix_.resize(max_n + 1);
  disc_[0] = 0.0;
  prefix_[0] = 0.0;
  // Kahan-compensated prefix sums: idcg comes from differences of these.
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t r = 1; r <= max_n; ++r) {
    disc_[r] = d_.raw(r);
    const double y = disc_[r] - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    prefix_[r] = sum;
  }
}

std::optional<double> MetricEngine::ndcg(std::span<const double> scores,
                                         std::span<const std::uint8_t> grade_idx, TieBreak tb,
                                         EvalScratch& ws) const {
  const std::uint64_t n = scores.size();
  require(n >= 1, Errc::invalid_argument, "empty dataset");
  require(n <= max_n_, Errc::invalid_argument, "prefix larger than engine max_n");
  require(grade_idx.size() == n, Errc::invalid_argument, "scores and grades must be parallel");

  ws.order.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) ws.order[i] = {scores[i], i};
  std::sort(ws.order.begin(), ws.order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    if (tb != TieBreak::ByIndex) {
      const double ga = gs_.gain_at(grade_idx[a.second]);
      const double gb = gs_.gain_at(grade_idx[b.second]);
      if (ga != gb) return tb == TieBreak::Pessimistic ? ga < gb : ga > gb;
    }
    return a.second < b.second;
  });

  const std::uint64_t k = d_.cutoff() ? d_.cutoff()->resolve(n) : n;
  double num = 0.0;
  for (std::uint64_t r = 1; r <= k; ++r) {
    num += gs_.gain_at(grade_idx[ws.order[r - 1].second]) * disc_[r];
  }

  ws.counts.assign(gs_.size(), 0);
  for (const auto gi : grade_idx) ++ws.counts[gi];
  double den = 0.0;
  std::uint64_t r = 1;
  for (std::size_t j = 0; j < ws.counts.size() && r <= k; ++j) {
    if (ws.counts[j] == 0) continue;
    const std::uint64_t end = std::min<std::uint64_t>(k, r + ws.counts[j] - 1);
    den += gs_.gain_at(j) * (prefix_[end] - prefix_[r - 1]);
    r = end + 1;
  }
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

}  // namespace ndcglab
