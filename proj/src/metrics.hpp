#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "discount.hpp"
#include "grades.hpp"

namespace ndcglab {

enum class TieBreak { ByIndex, Pessimistic, Optimistic };

struct Dataset {
  std::vector<double> scores;
  std::vector<double> grades;
};

// Permutation of [0, n) by descending score; ties broken by policy
// (Pessimistic puts low gains first, Optimistic high gains first), then by
// original index.
std::vector<std::uint32_t> rank(std::span<const double> scores, std::span<const double> grades,
                                const GradeSet& gs, TieBreak tb);

// DCG of grades already in ranked order; the cutoff resolves at n = size.
double dcg(std::span<const double> ranked_grades, const Discount& d, const GradeSet& gs);
// Ideal DCG of the grade multiset (best ordering, same cutoff behavior).
double idcg(std::span<const double> grades, const Discount& d, const GradeSet& gs);
// Throws Errc::degenerate_dataset when the ideal DCG is zero.
double ndcg(const Dataset& data, const Discount& d, const GradeSet& gs,
            TieBreak tb = TieBreak::ByIndex);
// Reference ideal DCG maximizing over every permutation; n <= 10.
double brute_force_idcg(std::span<const double> grades, const Discount& d, const GradeSet& gs);

// Precomputed discount/gain tables for repeated evaluation at scale. Grades
// are passed as indexes into the grade set; scores must be finite (the bulk
// callers generate them). Thread-safe once built; each thread brings its own
// scratch.
struct EvalScratch {
  std::vector<std::pair<double, std::uint32_t>> order;
  std::vector<std::uint64_t> counts;
};

class MetricEngine {
 public:
  MetricEngine(Discount d, GradeSet gs, std::uint64_t max_n);

  // nullopt means the prefix is degenerate (ideal DCG zero).
  std::optional<double> ndcg(std::span<const double> scores,
                             std::span<const std::uint8_t> grade_idx, TieBreak tb,
                             EvalScratch& ws) const;

  const Discount& discount() const { return d_; }
  const GradeSet& grade_set() const { return gs_; }
  std::uint64_t max_n() const { return max_n_; }

 private:
  Discount d_;
  GradeSet gs_;
  std::uint64_t max_n_;
  std::vector<double> disc_;    // disc_[r] = D(r), r in [1, max_n]
  std::vector<double> prefix_;  // prefix_[k] = sum_{r<=k} D(r)
};

}  // namespace ndcglab
