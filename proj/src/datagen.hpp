#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curves.hpp"
#include "grades.hpp"
#include "metrics.hpp"
#include "rng.hpp"

namespace ndcglab {

// Population model: grade probabilities conditioned on the canonical score
// scale. curves[j](s) = Pr(Y = grades[j] | s), highest grade first.
class DistributionSpec {
 public:
  DistributionSpec(GradeSet grade_set, std::vector<Curve> curves,
                   std::optional<double> holder_alpha = std::nullopt,
                   std::optional<double> holder_c = std::nullopt,
                   std::optional<double> delta = std::nullopt);

  static DistributionSpec binary(Curve ybar, std::optional<double> holder_alpha = std::nullopt,
                                 std::optional<double> holder_c = std::nullopt,
                                 std::optional<double> delta = std::nullopt);

  const GradeSet& grade_set() const { return grade_set_; }
  const std::vector<Curve>& curves() const { return curves_; }
  const Curve& ybar() const { return curves_.front(); }
  std::optional<double> holder_alpha() const { return holder_alpha_; }
  std::optional<double> holder_c() const { return holder_c_; }
  std::optional<double> delta() const { return delta_; }

  // E[gain(Y) | s].
  double mean_gain(double s) const;
  // p_j = Pr(Y = grades[j]).
  std::vector<double> marginals() const;
  // R_0..R_J with R_j = Pr(Y >= grades[j-1]) = p_1 + ... + p_j.
  std::vector<double> grade_masses() const;
  // Draw a grade index given the canonical value and a uniform variate.
  std::size_t sample_grade(double s, double u) const;

 private:
  GradeSet grade_set_;
  std::vector<Curve> curves_;
  std::optional<double> holder_alpha_, holder_c_, delta_;
};

struct ScorerSpec {
  enum class Kind { Canonical, MonotoneDistort, PartialCorrupt, IndependentNoise };
  enum class Distort { Affine, Exp, Cube };

  Kind kind = Kind::Canonical;
  Distort phi = Distort::Affine;
  double a = 1.0, b = 0.0;  // affine distortion a*s + b, a > 0
  std::vector<std::pair<double, double>> segments;  // reflected intervals
  double noise_weight = 0.0;
  std::string name;

  static ScorerSpec canonical();
  static ScorerSpec monotone_affine(double a, double b);
  static ScorerSpec monotone_exp();
  static ScorerSpec monotone_cube();
  static ScorerSpec partial_corrupt(std::vector<std::pair<double, double>> segments);
  static ScorerSpec independent_noise(double w);

  bool order_preserving() const {
    return kind == Kind::Canonical || kind == Kind::MonotoneDistort;
  }
  double score(double s, double noise_u) const;
  std::string label() const;
};

// One i.i.d. element stream: slot 0 feeds the canonical value, slot 1 the
// grade draw, slots 2+ the per-scorer noise. Pure function of
// (master_seed, stream_id, index), so prefixes never change when n grows.
class SampleStream {
 public:
  SampleStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : stream_(derive_stream(master_seed, stream_id)) {}

  double canonical(std::uint64_t i) const { return draw_u01(stream_, i, 0); }
  std::size_t grade_index(const DistributionSpec& spec, std::uint64_t i) const {
    return spec.sample_grade(canonical(i), draw_u01(stream_, i, 1));
  }
  double scorer_score(const ScorerSpec& sc, std::size_t scorer_idx, std::uint64_t i) const {
    return sc.score(canonical(i), draw_u01(stream_, i, 2 + scorer_idx));
  }

 private:
  std::uint64_t stream_;
};

inline constexpr std::uint64_t kMaxSampleN = 100'000'000;

// Prefix datasets: result[scorer][grid position] holds the first n_grid[g]
// elements scored by scorer. Grades are shared across scorers.
std::vector<std::vector<Dataset>> sample_prefixes(const DistributionSpec& spec,
                                                  const std::vector<ScorerSpec>& scorers,
                                                  const SampleStream& stream,
                                                  const std::vector<std::uint64_t>& n_grid);

// Empirical conditional curves on the scorer's own canonical scale: rank/n
// plays the canonical value, grade frequencies are binned and interpolated.
DistributionSpec calibrate_scorer(const DistributionSpec& spec, const ScorerSpec& scorer,
                                  std::uint64_t calibration_n, std::uint32_t bins,
                                  std::uint64_t seed);

struct ClickQuery {
  std::string query_id;
  std::vector<std::string> doc_ids;
  std::vector<std::int64_t> timestamps;
  std::vector<double> grades;
  std::vector<std::vector<double>> scores;  // [score column][item]
};

struct ClickLog {
  std::vector<std::string> score_names;
  std::vector<ClickQuery> queries;  // first-appearance order
  GradeSet grade_set{{2.0, 1.0, 0.0}, Gain::Identity};

  Dataset dataset(std::size_t query, std::size_t scorer) const;
};

// CSV columns: query_id,doc_id,timestamp,clicks,score_1[,score_2,...].
// Grade 2 for clicks > hi, 1 for clicks in [lo, hi], else 0. Items are ordered
// by timestamp within each query. columns selects score columns by name;
// empty means all.
ClickLog ingest_click_log(const std::string& path, std::uint64_t hi = 1000,
                          std::uint64_t lo = 100,
                          const std::vector<std::string>& columns = {});

}  // namespace ndcglab
