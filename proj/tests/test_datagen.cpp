#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "datagen.hpp"
#include "errors.hpp"
#include "metrics.hpp"

using namespace ndcglab;

namespace {

Errc thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  REQUIRE(false);
  return Errc::invalid_argument;
}

std::filesystem::path write_fixture(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("curve families evaluate and integrate in closed form") {
  const auto aff = Curve::affine(0.25, 0.5);
  CHECK(aff(0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(aff(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(aff(-3.0) == aff(0.0));  // clamped
  CHECK(aff(7.0) == aff(1.0));
  CHECK(aff.integral() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(aff.integral(0.0, 0.5) == doctest::Approx(0.1875).epsilon(1e-15));

  const auto poly = Curve::polynomial({0.1, 0.0, 0.9});  // 0.1 + 0.9 s^2
  CHECK(poly(0.5) == doctest::Approx(0.325).epsilon(1e-15));
  CHECK(poly.integral() == doctest::Approx(0.4).epsilon(1e-15));
  const auto polyc = poly.complement();
  CHECK(polyc(0.3) == doctest::Approx(1.0 - poly(0.3)).epsilon(1e-15));
  CHECK(polyc.integral() == doctest::Approx(0.6).epsilon(1e-15));

  const auto pl = Curve::piecewise_linear({0.0, 0.25, 1.0}, {0.0, 1.0, 0.5});
  CHECK(pl(0.125) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pl(0.625) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(pl(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pl.integral() == doctest::Approx(0.125 + 0.75 * 0.75).epsilon(1e-15));
  CHECK(pl.complement()(0.125) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(Curve::piecewise_linear({0.0, 1.0}, {0.0}), Error);
  CHECK_THROWS_AS(Curve::piecewise_linear({0.1, 1.0}, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(Curve::piecewise_linear({0.0, 0.9}, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(Curve::piecewise_linear({0.0, 0.5, 0.5, 1.0}, {0.0, 1.0, 1.0, 0.0}), Error);
  CHECK_THROWS_AS(Curve::polynomial({}), Error);
}

TEST_CASE("distribution spec validates conditional curves") {
  CHECK_NOTHROW(DistributionSpec::binary(Curve::affine(0.0, 1.0)));

  // curve count must match the grade alphabet
  CHECK(thrown_code([] {
          DistributionSpec(GradeSet::binary(), {Curve::constant(1.0)});
        }) == Errc::config);
  // probabilities must sum to one
  CHECK(thrown_code([] {
          DistributionSpec(GradeSet::binary(), {Curve::constant(0.4), Curve::constant(0.4)});
        }) == Errc::config);
  // and stay nonnegative
  CHECK(thrown_code([] {
          DistributionSpec(GradeSet::binary(), {Curve::affine(1.2, 0.0), Curve::affine(-0.2, 0.0)});
        }) == Errc::config);

  // delta floor: ybar(s) = s touches zero
  CHECK(thrown_code([] {
          DistributionSpec::binary(Curve::affine(0.0, 1.0), std::nullopt, std::nullopt, 0.05);
        }) == Errc::config);
  CHECK_NOTHROW(
      DistributionSpec::binary(Curve::affine(0.2, 0.6), std::nullopt, std::nullopt, 0.2));
  // delta cannot exceed 1/|Y|
  CHECK(thrown_code([] {
          DistributionSpec::binary(Curve::affine(0.2, 0.6), std::nullopt, std::nullopt, 0.6);
        }) == Errc::config);

  // Holder spot check: slope-1 curve cannot satisfy C = 0.1, alpha = 1
  CHECK(thrown_code([] {
          DistributionSpec::binary(Curve::affine(0.0, 1.0), 1.0, 0.1, std::nullopt);
        }) == Errc::config);
  CHECK_NOTHROW(DistributionSpec::binary(Curve::affine(0.0, 1.0), 1.0, 1.0, std::nullopt));
  CHECK(thrown_code([] {
          DistributionSpec::binary(Curve::affine(0.0, 1.0), 1.0, std::nullopt, std::nullopt);
        }) == Errc::config);
  CHECK(thrown_code([] {
          DistributionSpec::binary(Curve::affine(0.0, 1.0), 1.5, 1.0, std::nullopt);
        }) == Errc::config);
}

TEST_CASE("marginals, masses, and mean gain") {
  const auto spec = DistributionSpec::binary(Curve::affine(0.0, 1.0));
  const auto p = spec.marginals();
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));
  const auto r = spec.grade_masses();
  REQUIRE(r.size() == 3);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spec.mean_gain(0.37) == doctest::Approx(0.37).epsilon(1e-15));

  const GradeSet gs({3.0, 2.0, 1.0, 0.0}, Gain::Exponential2);
  const DistributionSpec four(gs, {Curve::constant(0.25), Curve::constant(0.25),
                                   Curve::constant(0.25), Curve::constant(0.25)});
  CHECK(four.mean_gain(0.5) == doctest::Approx((7.0 + 3.0 + 1.0 + 0.0) / 4.0).epsilon(1e-15));
  const auto r4 = four.grade_masses();
  CHECK(r4[2] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r4[4] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grade draws follow the conditional split") {
  const auto spec = DistributionSpec::binary(Curve::affine(0.0, 1.0));
  CHECK(spec.sample_grade(0.3, 0.29) == 0);
  CHECK(spec.sample_grade(0.3, 0.30) == 1);
  CHECK(spec.sample_grade(0.3, 0.99) == 1);
  CHECK(spec.sample_grade(1.0, 0.999) == 0);
}

TEST_CASE("canonical stream passes a KS uniformity check") {
  const SampleStream stream(2026, 0);
  const std::size_t n = 100'000;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = stream.canonical(i);
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d = std::max(d, (i + 1.0) / n - x[i]);
    d = std::max(d, x[i] - static_cast<double>(i) / n);
  }
  CHECK(d <= 1.628 / std::sqrt(static_cast<double>(n)));  // 1% critical value
}

TEST_CASE("sample prefixes never change when n grows") {
  const auto spec = DistributionSpec::binary(Curve::affine(0.0, 1.0));
  const std::vector<ScorerSpec> scorers = {ScorerSpec::canonical(),
                                           ScorerSpec::independent_noise(0.5)};
  const SampleStream stream(99, 7);
  const auto sets = sample_prefixes(spec, scorers, stream, {100, 1000});
  REQUIRE(sets.size() == 2);
  REQUIRE(sets[0].size() == 2);
  REQUIRE(sets[0][0].scores.size() == 100);
  REQUIRE(sets[0][1].scores.size() == 1000);
  for (std::size_t sc = 0; sc < 2; ++sc) {
    for (std::size_t i = 0; i < 100; ++i) {
      CHECK(sets[sc][0].scores[i] == sets[sc][1].scores[i]);
      CHECK(sets[sc][0].grades[i] == sets[sc][1].grades[i]);
    }
  }
  // grades are shared across scorers, scores are not
  CHECK(sets[0][1].grades == sets[1][1].grades);
  CHECK(sets[0][1].scores != sets[1][1].scores);

  // a fresh stream with the same ids reproduces the draw
  const SampleStream again(99, 7);
  const auto sets2 = sample_prefixes(spec, scorers, again, {1000});
  CHECK(sets2[0][0].scores == sets[0][1].scores);
  // and a different stream id does not
  const SampleStream other(99, 8);
  const auto sets3 = sample_prefixes(spec, scorers, other, {1000});
  CHECK(sets3[0][0].scores != sets[0][1].scores);
}

TEST_CASE("sample prefix validation") {
  const auto spec = DistributionSpec::binary(Curve::affine(0.0, 1.0));
  const std::vector<ScorerSpec> one = {ScorerSpec::canonical()};
  const SampleStream stream(1, 0);
  CHECK(thrown_code([&] { sample_prefixes(spec, {}, stream, {10}); }) == Errc::invalid_argument);
  CHECK(thrown_code([&] { sample_prefixes(spec, one, stream, {}); }) == Errc::invalid_argument);
  CHECK(thrown_code([&] { sample_prefixes(spec, one, stream, {0}); }) == Errc::invalid_argument);
  CHECK(thrown_code([&] { sample_prefixes(spec, one, stream, {10, 10}); }) ==
        Errc::invalid_argument);
  CHECK(thrown_code([&] { sample_prefixes(spec, one, stream, {kMaxSampleN + 1}); }) ==
        Errc::resource);
}

TEST_CASE("grade frequencies converge to the marginal") {
  const auto spec = DistributionSpec::binary(Curve::affine(0.0, 1.0));
  const double p = 0.5;

  int ok = 0;
  const std::size_t n_small = 10'000;
  const double bound_small = 4.0 * std::sqrt(p * (1.0 - p) / n_small);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SampleStream stream(seed, 1);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_small; ++i) hits += stream.grade_index(spec, i) == 0;
    if (std::abs(static_cast<double>(hits) / n_small - p) <= bound_small) ++ok;
  }
  CHECK(ok >= 99);

  const std::size_t n_big = 1'000'000;
  const SampleStream stream(7, 1);
  std::size_t hits = 0;
  double mean = 0.0;
  for (std::size_t i = 0; i < n_big; ++i) {
    const auto j = stream.grade_index(spec, i);
    hits += j == 0;
    mean += spec.grade_set().grades()[j];
  }
  mean /= static_cast<double>(n_big);
  CHECK(std::abs(static_cast<double>(hits) / n_big - p) <= 4.0 * std::sqrt(p * (1.0 - p) / n_big));
  // sample mean of the grade tracks the integral of ybar
  CHECK(std::abs(mean - 0.5) <= 3e-3);
}

TEST_CASE("scorer specs validate and transform") {
  CHECK_THROWS_AS(ScorerSpec::monotone_affine(0.0, 1.0), Error);
  CHECK_THROWS_AS(ScorerSpec::monotone_affine(-2.0, 0.0), Error);
  CHECK_THROWS_AS(ScorerSpec::independent_noise(1.5), Error);
  CHECK_THROWS_AS(ScorerSpec::independent_noise(-0.1), Error);
  CHECK_THROWS_AS(ScorerSpec::partial_corrupt({}), Error);
  CHECK_THROWS_AS(ScorerSpec::partial_corrupt({{0.5, 0.4}}), Error);
  CHECK_THROWS_AS(ScorerSpec::partial_corrupt({{-0.1, 0.4}}), Error);
  CHECK_THROWS_AS(ScorerSpec::partial_corrupt({{0.1, 0.4}, {0.3, 0.6}}), Error);

  const auto aff = ScorerSpec::monotone_affine(2.5, -1.0);
  CHECK(aff.score(0.4, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(aff.order_preserving());
  CHECK(ScorerSpec::monotone_exp().score(0.0, 0.0) == doctest::Approx(1.0));
  CHECK(ScorerSpec::monotone_cube().score(0.5, 0.0) == doctest::Approx(0.125));

  const auto pc = ScorerSpec::partial_corrupt({{0.2, 0.5}, {0.7, 0.9}});
  CHECK_FALSE(pc.order_preserving());
  CHECK(pc.score(0.3, 0.0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(pc.score(0.5, 0.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(pc.score(0.6, 0.0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(pc.score(0.75, 0.0) == doctest::Approx(0.85).epsilon(1e-15));
  CHECK(pc.score(0.05, 0.0) == doctest::Approx(0.05).epsilon(1e-15));

  const auto noisy = ScorerSpec::independent_noise(0.5);
  CHECK_FALSE(noisy.order_preserving());
  CHECK(noisy.score(0.4, 0.8) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(ScorerSpec::independent_noise(0.0).score(0.4, 0.8) == doctest::Approx(0.4));
  CHECK(ScorerSpec::independent_noise(1.0).score(0.4, 0.8) == doctest::Approx(0.8));

  // labels double as CSV keys, so they must be distinct and stable
  CHECK(ScorerSpec::canonical().label() == "canonical");
  CHECK(aff.label() == "monotone_affine(2.5,-1)");
  CHECK(pc.label() == "partial_corrupt");
  CHECK(noisy.label() == "noise(0.5)");
  auto named = ScorerSpec::canonical();
  named.name = "baseline";
  CHECK(named.label() == "baseline");
}

TEST_CASE("calibration recovers the conditional curve") {
  const auto spec = DistributionSpec::binary(Curve::affine(0.0, 1.0));
  const auto cal = calibrate_scorer(spec, ScorerSpec::canonical(), 1'000'000, 200, 12);
  REQUIRE(cal.curves().size() == 2);
  double sup = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double s = i / 2000.0;
    sup = std::max(sup, std::abs(cal.ybar()(s) - s));
  }
  CHECK(sup <= 0.02);
}

TEST_CASE("calibration sees ranks only") {
  const auto spec = DistributionSpec::binary(Curve::affine(0.0, 1.0));
  const auto base = calibrate_scorer(spec, ScorerSpec::canonical(), 200'000, 100, 12);
  for (const auto& scorer :
       {ScorerSpec::monotone_exp(), ScorerSpec::monotone_affine(3.0, -1.0)}) {
    const auto cal = calibrate_scorer(spec, scorer, 200'000, 100, 12);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(cal.curves()[j].knots_x() == base.curves()[j].knots_x());
      CHECK(cal.curves()[j].knots_y() == base.curves()[j].knots_y());
    }
  }
}

TEST_CASE("pure-noise scorer calibrates flat") {
  const auto spec = DistributionSpec::binary(Curve::affine(0.0, 1.0));
  const auto cal = calibrate_scorer(spec, ScorerSpec::independent_noise(1.0), 1'000'000, 50, 12);
  double sup = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    sup = std::max(sup, std::abs(cal.ybar()(i / 2000.0) - 0.5));
  }
  CHECK(sup <= 0.02);
}

TEST_CASE("calibration input validation") {
  const auto spec = DistributionSpec::binary(Curve::affine(0.0, 1.0));
  const auto sc = ScorerSpec::canonical();
  CHECK(thrown_code([&] { calibrate_scorer(spec, sc, 99'999, 200, 1); }) ==
        Errc::invalid_argument);
  CHECK(thrown_code([&] { calibrate_scorer(spec, sc, 200'000, 49, 1); }) ==
        Errc::invalid_argument);
  CHECK(thrown_code([&] { calibrate_scorer(spec, sc, 200'000, 1001, 1); }) ==
        Errc::invalid_argument);
  CHECK(thrown_code([&] { calibrate_scorer(spec, sc, kMaxSampleN + 1, 200, 1); }) ==
        Errc::resource);
}

TEST_CASE("click log ingest orders, grades, and selects columns") {
  const std::string body =
      "query_id,doc_id,timestamp,clicks,score_a,score_b\r\n"
      "q1,d3,30,1500,0.9,0.1\n"
      "q2,e1,5,99,0.5,0.5\n"
      "q1,d1,10,100,0.3,0.7\r\n"
      "q1,d2,20,1000,0.6,0.4\n"
      "q2,e2,4,2000,0.8,0.2\n";
  const auto path = write_fixture("ndcglab_clicks_ok.csv", body);

  const auto log = ingest_click_log(path.string());
  REQUIRE(log.queries.size() == 2);
  REQUIRE(log.score_names == std::vector<std::string>{"score_a", "score_b"});
  CHECK(log.queries[0].query_id == "q1");  // first-appearance order
  CHECK(log.queries[1].query_id == "q2");

  const auto& q1 = log.queries[0];
  CHECK(q1.doc_ids == std::vector<std::string>{"d1", "d2", "d3"});  // by timestamp
  CHECK(q1.timestamps == std::vector<std::int64_t>{10, 20, 30});
  CHECK(q1.grades == std::vector<double>{1.0, 1.0, 2.0});  // 100 -> 1, 1000 -> 1, 1500 -> 2
  CHECK(q1.scores[0] == std::vector<double>{0.3, 0.6, 0.9});
  CHECK(q1.scores[1] == std::vector<double>{0.7, 0.4, 0.1});
  CHECK(log.queries[1].grades == std::vector<double>{2.0, 0.0});  // 2000 -> 2, 99 -> 0

  const auto ds = log.dataset(0, 1);
  CHECK(ds.scores == q1.scores[1]);
  CHECK(ds.grades == q1.grades);
  CHECK(ndcg(ds, Discount::log_inverse(), log.grade_set) > 0.0);

  const auto sel = ingest_click_log(path.string(), 1000, 100, {"score_b"});
  REQUIRE(sel.score_names == std::vector<std::string>{"score_b"});
  CHECK(sel.queries[0].scores[0] == q1.scores[1]);

  // custom thresholds move the grade boundaries
  const auto strict = ingest_click_log(path.string(), 100, 100);
  CHECK(strict.queries[0].grades == std::vector<double>{1.0, 2.0, 2.0});

  std::filesystem::remove(path);
}

TEST_CASE("click log ingest rejects malformed input") {
  CHECK(thrown_code([] { ingest_click_log("/nonexistent/clicks.csv"); }) == Errc::io);

  const auto bad_header =
      write_fixture("ndcglab_clicks_h.csv", "query,doc,ts,clicks,score\nq1,d1,1,5,0.5\n");
  CHECK(thrown_code([&] { ingest_click_log(bad_header.string()); }) == Errc::config);

  const auto no_rows =
      write_fixture("ndcglab_clicks_e.csv", "query_id,doc_id,timestamp,clicks,score_a\n");
  CHECK(thrown_code([&] { ingest_click_log(no_rows.string()); }) == Errc::config);

  const auto short_row = write_fixture(
      "ndcglab_clicks_s.csv",
      "query_id,doc_id,timestamp,clicks,score_a\nq1,d1,1,5,0.5\nq1,d2,2,5\n");
  try {
    ingest_click_log(short_row.string());
    REQUIRE(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config);
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }

  const auto bad_num = write_fixture(
      "ndcglab_clicks_n.csv",
      "query_id,doc_id,timestamp,clicks,score_a\nq1,d1,1,many,0.5\n");
  CHECK(thrown_code([&] { ingest_click_log(bad_num.string()); }) == Errc::config);

  const auto bad_score = write_fixture(
      "ndcglab_clicks_f.csv",
      "query_id,doc_id,timestamp,clicks,score_a\nq1,d1,1,5,zero\n");
  CHECK(thrown_code([&] { ingest_click_log(bad_score.string()); }) == Errc::config);

  const auto neg = write_fixture(
      "ndcglab_clicks_g.csv", "query_id,doc_id,timestamp,clicks,score_a\nq1,d1,1,-2,0.5\n");
  CHECK(thrown_code([&] { ingest_click_log(neg.string()); }) == Errc::config);

  const auto ok = write_fixture(
      "ndcglab_clicks_c.csv", "query_id,doc_id,timestamp,clicks,score_a\nq1,d1,1,5,0.5\n");
  CHECK(thrown_code([&] { ingest_click_log(ok.string(), 1000, 100, {"missing"}); }) ==
        Errc::config);
  CHECK(thrown_code([&] { ingest_click_log(ok.string(), 10, 100); }) == Errc::config);

  for (const auto& p : {bad_header, no_rows, short_row, bad_num, bad_score, neg, ok}) {
    std::filesystem::remove(p);
  }
}
