#include "grades.hpp"

#include <cmath>

#include "errors.hpp"

namespace ndcglab {

GradeSet::GradeSet(std::vector<double> grades, Gain gain)
    : grades_(std::move(grades)), gain_(gain) {
  require(grades_.size() >= 2, Errc::invalid_argument, "grade set needs at least two grades");
  for (std::size_t j = 0; j < grades_.size(); ++j) {
    require(std::isfinite(grades_[j]), Errc::invalid_argument, "grades must be finite");
    require(j == 0 || grades_[j] < grades_[j - 1], Errc::invalid_argument,
            "grades must be strictly decreasing");
  }
  require(grades_.back() >= 0.0, Errc::invalid_argument,
          "smallest grade must map to a nonnegative gain");
  gains_.reserve(grades_.size());
  for (const double y : grades_) gains_.push_back(apply_gain(y));
}

double GradeSet::apply_gain(double y) const {
  return gain_ == Gain::Identity ? y : std::exp2(y) - 1.0;
}

std::optional<std::size_t> GradeSet::index_of(double y) const {
  for (std::size_t j = 0; j < grades_.size(); ++j)
    if (grades_[j] == y) return j;
  return std::nullopt;
}

}  // namespace ndcglab
