#include "datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "errors.hpp"

namespace ndcglab {
namespace {

constexpr int kValidationGrid = 10'000;  // checks run on i/1e4, i = 0..1e4
constexpr double kSumTol = 1e-12;

std::string fmt_line(const std::string& path, std::size_t line, const std::string& what) {
  return path + ":" + std::to_string(line) + ": " + what;
}

}  // namespace

DistributionSpec::DistributionSpec(GradeSet grade_set, std::vector<Curve> curves,
                                   std::optional<double> holder_alpha,
                                   std::optional<double> holder_c, std::optional<double> delta)
    : grade_set_(std::move(grade_set)),
      curves_(std::move(curves)),
      holder_alpha_(holder_alpha),
      holder_c_(holder_c),
      delta_(delta) {
  require(curves_.size() == grade_set_.size(), Errc::config,
          "need one conditional curve per grade");
  require(holder_alpha_.has_value() == holder_c_.has_value(), Errc::config,
          "Holder constants come as a pair");
  if (holder_alpha_) {
    require(*holder_alpha_ > 0.0 && *holder_alpha_ <= 1.0, Errc::config,
            "Holder exponent must be in (0,1]");
    require(*holder_c_ >= 0.0, Errc::config, "Holder constant must be nonnegative");
  }
  if (delta_) {
    require(*delta_ > 0.0 && *delta_ <= 1.0 / static_cast<double>(curves_.size()), Errc::config,
            "conditional floor delta must be in (0, 1/|Y|]");
  }

  for (int i = 0; i <= kValidationGrid; ++i) {
    const double s = static_cast<double>(i) / kValidationGrid;
    double sum = 0.0;
    for (const auto& g : curves_) {
      const double v = g(s);
      require(v >= -kSumTol, Errc::config, "conditional probabilities must be nonnegative");
      if (delta_) {
        require(v >= *delta_ - kSumTol, Errc::config,
                "conditional probability falls under the delta floor");
      }
      sum += v;
    }
    require(std::abs(sum - 1.0) <= kSumTol, Errc::config,
            "conditional probabilities must sum to one");
  }

  if (holder_alpha_) {
    // spot check |g(s) - g(s')| <= C |s - s'|^alpha on pinned random pairs
    const std::uint64_t h = derive_stream(0x484f4c444552ull, 0);
    for (std::uint64_t k = 0; k < 256; ++k) {
      const double s = draw_u01(h, k, 0);
      const double t = draw_u01(h, k, 1);
      const double bound = *holder_c_ * std::pow(std::abs(s - t), *holder_alpha_) + 1e-9;
      for (const auto& g : curves_) {
        require(std::abs(g(s) - g(t)) <= bound, Errc::config,
                "curve violates the declared Holder bound");
      }
    }
  }
}

DistributionSpec DistributionSpec::binary(Curve ybar, std::optional<double> holder_alpha,
                                          std::optional<double> holder_c,
                                          std::optional<double> delta) {
  std::vector<Curve> curves;
  curves.push_back(ybar);
  curves.push_back(ybar.complement());
  return DistributionSpec(GradeSet::binary(), std::move(curves), holder_alpha, holder_c, delta);
}

double DistributionSpec::mean_gain(double s) const {
  double m = 0.0;
  for (std::size_t j = 0; j < curves_.size(); ++j) m += grade_set_.gain_at(j) * curves_[j](s);
  return m;
}

std::vector<double> DistributionSpec::marginals() const {
  std::vector<double> p;
  p.reserve(curves_.size());
  for (const auto& g : curves_) p.push_back(g.integral());
  return p;
}

std::vector<double> DistributionSpec::grade_masses() const {
  const auto p = marginals();
  std::vector<double> r(p.size() + 1, 0.0);
  for (std::size_t j = 0; j < p.size(); ++j) r[j + 1] = r[j] + p[j];
  return r;
}

std::size_t DistributionSpec::sample_grade(double s, double u) const {
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < curves_.size(); ++j) {
    acc += std::max(0.0, curves_[j](s));
    if (u < acc) return j;
  }
  return curves_.size() - 1;
}

ScorerSpec ScorerSpec::canonical() {
  ScorerSpec s;
  s.kind = Kind::Canonical;
  return s;
}

ScorerSpec ScorerSpec::monotone_affine(double a, double b) {
  require(a > 0.0 && std::isfinite(a) && std::isfinite(b), Errc::config,
          "affine distortion needs slope > 0");
  ScorerSpec s;
  s.kind = Kind::MonotoneDistort;
  s.phi = Distort::Affine;
  s.a = a;
  s.b = b;
  return s;
}

ScorerSpec ScorerSpec::monotone_exp() {
  ScorerSpec s;
  s.kind = Kind::MonotoneDistort;
  s.phi = Distort::Exp;
  return s;
}

ScorerSpec ScorerSpec::monotone_cube() {
  ScorerSpec s;
  s.kind = Kind::MonotoneDistort;
  s.phi = Distort::Cube;
  return s;
}

ScorerSpec ScorerSpec::partial_corrupt(std::vector<std::pair<double, double>> segments) {
  require(!segments.empty(), Errc::config, "partial corruption needs at least one segment");
  std::sort(segments.begin(), segments.end());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    require(segments[i].first >= 0.0 && segments[i].second <= 1.0 &&
                segments[i].first < segments[i].second,
            Errc::config, "corruption segments must be proper subintervals of [0,1]");
    require(i == 0 || segments[i].first >= segments[i - 1].second, Errc::config,
            "corruption segments must be disjoint");
  }
  ScorerSpec s;
  s.kind = Kind::PartialCorrupt;
  s.segments = std::move(segments);
  return s;
}

ScorerSpec ScorerSpec::independent_noise(double w) {
  require(w >= 0.0 && w <= 1.0, Errc::config, "noise weight must be in [0,1]");
  ScorerSpec s;
  s.kind = Kind::IndependentNoise;
  s.noise_weight = w;
  return s;
}

double ScorerSpec::score(double s, double noise_u) const {
  switch (kind) {
    case Kind::Canonical:
      return s;
    case Kind::MonotoneDistort:
      switch (phi) {
        case Distort::Affine:
          return a * s + b;
        case Distort::Exp:
          return std::exp(s);
        case Distort::Cube:
          return s * s * s;
      }
      return s;
    case Kind::PartialCorrupt:
      for (const auto& [lo, hi] : segments) {
        if (s >= lo && s <= hi) return lo + hi - s;
      }
      return s;
    case Kind::IndependentNoise:
      return (1.0 - noise_weight) * s + noise_weight * noise_u;
  }
  return s;
}

std::string ScorerSpec::label() const {
  if (!name.empty()) return name;
  char buf[64];
  switch (kind) {
    case Kind::Canonical:
      return "canonical";
    case Kind::MonotoneDistort:
      switch (phi) {
        case Distort::Affine:
          std::snprintf(buf, sizeof(buf), "monotone_affine(%g,%g)", a, b);
          return buf;
        case Distort::Exp:
          return "monotone_exp";
        case Distort::Cube:
          return "monotone_cube";
      }
      return "monotone";
    case Kind::PartialCorrupt:
      return "partial_corrupt";
    case Kind::IndependentNoise:
      std::snprintf(buf, sizeof(buf), "noise(%g)", noise_weight);
      return buf;
  }
  return "scorer";
}

std::vector<std::vector<Dataset>> sample_prefixes(const DistributionSpec& spec,
                                                  const std::vector<ScorerSpec>& scorers,
                                                  const SampleStream& stream,
                                                  const std::vector<std::uint64_t>& n_grid) {
  require(!scorers.empty(), Errc::invalid_argument, "need at least one scorer");
  require(!n_grid.empty(), Errc::invalid_argument, "empty n grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    require(n_grid[i] >= 1, Errc::invalid_argument, "n grid entries must be >= 1");
    require(i == 0 || n_grid[i] > n_grid[i - 1], Errc::invalid_argument,
            "n grid must be strictly increasing");
  }
  const std::uint64_t max_n = n_grid.back();
  require(max_n <= kMaxSampleN, Errc::resource, "sample size exceeds the 1e8 cap");

  std::vector<double> grades(max_n);
  for (std::uint64_t i = 0; i < max_n; ++i) {
    grades[i] = spec.grade_set().grades()[stream.grade_index(spec, i)];
  }

  std::vector<std::vector<Dataset>> out(scorers.size());
  for (std::size_t sc = 0; sc < scorers.size(); ++sc) {
    std::vector<double> scores(max_n);
    for (std::uint64_t i = 0; i < max_n; ++i) {
      scores[i] = stream.scorer_score(scorers[sc], sc, i);
    }
    out[sc].reserve(n_grid.size());
    for (const auto n : n_grid) {
      Dataset d;
      d.scores.assign(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(n));
      d.grades.assign(grades.begin(), grades.begin() + static_cast<std::ptrdiff_t>(n));
      out[sc].push_back(std::move(d));
    }
  }
  return out;
}

DistributionSpec calibrate_scorer(const DistributionSpec& spec, const ScorerSpec& scorer,
                                  std::uint64_t calibration_n, std::uint32_t bins,
                                  std::uint64_t seed) {
  require(calibration_n >= 100'000, Errc::invalid_argument,
          "calibration needs at least 1e5 samples");
  require(calibration_n <= kMaxSampleN, Errc::resource, "sample size exceeds the 1e8 cap");
  require(bins >= 50 && bins <= 1000, Errc::invalid_argument, "bins must be in [50, 1000]");

  const SampleStream stream(seed, 0xCA11Bull);
  const std::size_t n = calibration_n;
  std::vector<std::pair<double, std::uint32_t>> order(n);
  std::vector<std::uint8_t> gidx(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = {stream.scorer_score(scorer, 0, i), static_cast<std::uint32_t>(i)};
    gidx[i] = static_cast<std::uint8_t>(stream.grade_index(spec, i));
  }
  std::sort(order.begin(), order.end());

  const std::size_t num_grades = spec.grade_set().size();
  std::vector<std::vector<std::uint64_t>> counts(bins,
                                                 std::vector<std::uint64_t>(num_grades, 0));
  for (std::size_t pos = 0; pos < n; ++pos) {
    // rank/n is exactly uniform, so position-based binning is equal-count
    const std::size_t b = static_cast<std::size_t>((static_cast<std::uint64_t>(pos) * bins) / n);
    ++counts[b][gidx[order[pos].second]];
  }

  std::vector<double> xs;
  xs.reserve(bins + 2);
  xs.push_back(0.0);
  for (std::uint32_t b = 0; b < bins; ++b) xs.push_back((b + 0.5) / bins);
  xs.push_back(1.0);

  std::vector<Curve> curves;
  curves.reserve(num_grades);
  for (std::size_t j = 0; j < num_grades; ++j) {
    std::vector<double> ys;
    ys.reserve(bins + 2);
    for (std::uint32_t b = 0; b < bins; ++b) {
      std::uint64_t total = 0;
      for (const auto c : counts[b]) total += c;
      ys.push_back(static_cast<double>(counts[b][j]) / static_cast<double>(total));
    }
    ys.insert(ys.begin(), ys.front());
    ys.push_back(ys.back());
    curves.push_back(Curve::piecewise_linear(xs, std::move(ys)));
  }
  return DistributionSpec(spec.grade_set(), std::move(curves));
}

Dataset ClickLog::dataset(std::size_t query, std::size_t scorer) const {
  require(query < queries.size(), Errc::invalid_argument, "query index out of range");
  const auto& q = queries[query];
  require(scorer < q.scores.size(), Errc::invalid_argument, "scorer index out of range");
  return Dataset{q.scores[scorer], q.grades};
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::int64_t parse_int(const std::string& field, const std::string& path, std::size_t line,
                       const char* what) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  require(ec == std::errc() && p == field.data() + field.size(), Errc::config,
          fmt_line(path, line, std::string("bad ") + what + " '" + field + "'"));
  return v;
}

double parse_double(const std::string& field, const std::string& path, std::size_t line,
                    const char* what) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  require(ec == std::errc() && p == field.data() + field.size() && std::isfinite(v), Errc::config,
          fmt_line(path, line, std::string("bad ") + what + " '" + field + "'"));
  return v;
}

}  // namespace

ClickLog ingest_click_log(const std::string& path, std::uint64_t hi, std::uint64_t lo,
                          const std::vector<std::string>& columns) {
  require(lo <= hi, Errc::config, "click thresholds out of order");
  std::ifstream in(path);
  require(in.is_open(), Errc::io, "cannot open click log '" + path + "'");

  std::string line;
  std::size_t lineno = 1;
  require(static_cast<bool>(std::getline(in, line)), Errc::config,
          fmt_line(path, 1, "missing header"));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  require(header.size() >= 5 && header[0] == "query_id" && header[1] == "doc_id" &&
              header[2] == "timestamp" && header[3] == "clicks",
          Errc::config,
          fmt_line(path, 1, "header must be query_id,doc_id,timestamp,clicks,score_..."));

  std::vector<std::string> all_names(header.begin() + 4, header.end());
  std::vector<std::size_t> picked;
  ClickLog log;
  if (columns.empty()) {
    log.score_names = all_names;
    for (std::size_t i = 0; i < all_names.size(); ++i) picked.push_back(i);
  } else {
    for (const auto& want : columns) {
      const auto it = std::find(all_names.begin(), all_names.end(), want);
      require(it != all_names.end(), Errc::config, "unknown score column '" + want + "'");
      picked.push_back(static_cast<std::size_t>(it - all_names.begin()));
      log.score_names.push_back(want);
    }
  }

  std::vector<std::string> query_order;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    require(fields.size() == header.size(), Errc::config,
            fmt_line(path, lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                                       std::to_string(fields.size())));
    const auto& qid = fields[0];
    const std::int64_t ts = parse_int(fields[2], path, lineno, "timestamp");
    const std::int64_t clicks = parse_int(fields[3], path, lineno, "click count");
    require(clicks >= 0, Errc::config, fmt_line(path, lineno, "negative click count"));

    auto it = std::find_if(log.queries.begin(), log.queries.end(),
                           [&](const ClickQuery& q) { return q.query_id == qid; });
    if (it == log.queries.end()) {
      ClickQuery q;
      q.query_id = qid;
      q.scores.resize(picked.size());
      log.queries.push_back(std::move(q));
      it = log.queries.end() - 1;
    }
    it->doc_ids.push_back(fields[1]);
    it->timestamps.push_back(ts);
    const auto c = static_cast<std::uint64_t>(clicks);
    it->grades.push_back(c > hi ? 2.0 : (c >= lo ? 1.0 : 0.0));
    for (std::size_t k = 0; k < picked.size(); ++k) {
      it->scores[k].push_back(parse_double(fields[4 + picked[k]], path, lineno, "score"));
    }
  }
  require(!log.queries.empty(), Errc::config, fmt_line(path, lineno, "no data rows"));

  // order each query by timestamp, stable under ties
  for (auto& q : log.queries) {
    std::vector<std::uint32_t> perm(q.doc_ids.size());
    for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::stable_sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) {
      return q.timestamps[a] < q.timestamps[b];
    });
    ClickQuery sorted;
    sorted.query_id = q.query_id;
    sorted.scores.resize(q.scores.size());
    for (const auto i : perm) {
      sorted.doc_ids.push_back(std::move(q.doc_ids[i]));
      sorted.timestamps.push_back(q.timestamps[i]);
      sorted.grades.push_back(q.grades[i]);
      for (std::size_t k = 0; k < q.scores.size(); ++k) sorted.scores[k].push_back(q.scores[k][i]);
    }
    q = std::move(sorted);
  }
  return log;
}

}  // namespace ndcglab
