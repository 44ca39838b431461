#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace ndcglab {

enum class Gain { Identity, Exponential2 };

// Grade alphabet, highest grade first, plus the gain map. The smallest grade
// must map to a nonnegative gain so DCG stays a nonnegative sum and NDCG stays
// inside [0,1].
class GradeSet {
 public:
  GradeSet(std::vector<double> grades, Gain gain);

  static GradeSet binary() { return GradeSet({1.0, 0.0}, Gain::Identity); }

  const std::vector<double>& grades() const { return grades_; }
  Gain gain() const { return gain_; }
  std::size_t size() const { return grades_.size(); }

  double gain_at(std::size_t j) const { return gains_[j]; }
  double apply_gain(double y) const;
  // Exact-match position of a grade value, if it is a member.
  std::optional<std::size_t> index_of(double y) const;

 private:
  std::vector<double> grades_;
  std::vector<double> gains_;
  Gain gain_;
};

}  // namespace ndcglab
