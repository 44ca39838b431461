#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "errors.hpp"
#include "metrics.hpp"

using namespace ndcglab;

namespace {

GradeSet binary() { return GradeSet::binary(); }
GradeSet ternary_id() { return GradeSet({2.0, 1.0, 0.0}, Gain::Identity); }
GradeSet ternary_exp2() { return GradeSet({2.0, 1.0, 0.0}, Gain::Exponential2); }

}  // namespace

TEST_CASE("grade set validation") {
  CHECK_THROWS_AS(GradeSet({1.0}, Gain::Identity), Error);
  CHECK_THROWS_AS(GradeSet({0.0, 1.0}, Gain::Identity), Error);
  CHECK_THROWS_AS(GradeSet({1.0, 1.0}, Gain::Identity), Error);
  CHECK_THROWS_AS(GradeSet({1.0, -1.0}, Gain::Identity), Error);
  const auto gs = ternary_exp2();
  CHECK(gs.gain_at(0) == doctest::Approx(3.0));
  CHECK(gs.gain_at(1) == doctest::Approx(1.0));
  CHECK(gs.gain_at(2) == doctest::Approx(0.0));
}

TEST_CASE("dcg frozen values") {
  // direct summation oracle: 1/ln2 + 0 + 1/ln4
  const std::vector<double> g1{1.0, 0.0, 1.0};
  CHECK(dcg(g1, Discount::log_inverse(), binary()) ==
        doctest::Approx(2.1640425613334451).epsilon(1e-15));

  // grades [2,1], power(0.5), exp2 gain: 3*1 + 1*2^-0.5
  const std::vector<double> g2{2.0, 1.0};
  CHECK(dcg(g2, Discount::power(0.5), ternary_exp2()) ==
        doctest::Approx(3.7071067811865475).epsilon(1e-15));
}

TEST_CASE("idcg sorts once and matches direct summation") {
  // ideal order of [0,1,1] is [1,1,0]: 1/ln2 + 1/ln3
  const std::vector<double> g{0.0, 1.0, 1.0};
  CHECK(idcg(g, Discount::log_inverse(), binary()) ==
        doctest::Approx(2.3529342675158008).epsilon(1e-15));
  const std::vector<double> sorted{1.0, 1.0, 0.0};
  CHECK(idcg(g, Discount::log_inverse(), binary()) ==
        dcg(sorted, Discount::log_inverse(), binary()));
}

TEST_CASE("ndcg basics") {
  const auto d = Discount::log_inverse();
  Dataset perfect{{0.9, 0.5, 0.1}, {1.0, 1.0, 0.0}};
  CHECK(ndcg(perfect, d, binary()) == doctest::Approx(1.0).epsilon(1e-15));

  Dataset reversed{{0.1, 0.5, 0.9}, {1.0, 1.0, 0.0}};
  CHECK(ndcg(reversed, d, binary()) < 1.0);
  CHECK(ndcg(reversed, d, binary()) > 0.0);

  Dataset degenerate{{0.3, 0.8}, {0.0, 0.0}};
  CHECK_THROWS_AS(ndcg(degenerate, d, binary()), Error);
  try {
    ndcg(degenerate, d, binary());
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_dataset);
  }

  Dataset mismatch{{0.1}, {1.0, 0.0}};
  CHECK_THROWS_AS(ndcg(mismatch, d, binary()), Error);
  Dataset alien{{0.1, 0.2}, {0.5, 1.0}};
  CHECK_THROWS_AS(ndcg(alien, d, binary()), Error);
}

TEST_CASE("tie breaking policies") {
  const auto d = Discount::log_inverse();
  Dataset tied{{0.5, 0.5}, {0.0, 1.0}};
  const double pess = ndcg(tied, d, binary(), TieBreak::Pessimistic);
  const double byidx = ndcg(tied, d, binary(), TieBreak::ByIndex);
  const double opti = ndcg(tied, d, binary(), TieBreak::Optimistic);
  CHECK(opti == doctest::Approx(1.0));
  const double expected_low = (1.0 / std::log(3.0)) / (1.0 / std::log(2.0));
  CHECK(pess == doctest::Approx(expected_low).epsilon(1e-15));
  CHECK(byidx == doctest::Approx(expected_low).epsilon(1e-15));
  CHECK(pess <= byidx);
  CHECK(byidx <= opti);

  const auto perm = rank(tied.scores, tied.grades, binary(), TieBreak::Optimistic);
  CHECK(perm == std::vector<std::uint32_t>{1, 0});
}

TEST_CASE("cutoff semantics") {
  const auto gs = binary();
  const auto d = Discount::zipfian();
  Dataset data{{0.9, 0.7, 0.5, 0.3}, {0.0, 1.0, 1.0, 0.0}};

  // fixed k = n keeps the full measure, identically
  CHECK(ndcg(data, d.with_cutoff(CutoffRule::fixed(4)), gs) == ndcg(data, d, gs));

  // truncated ideal: with k=1 only the best item counts on both sides
  const auto d1 = d.with_cutoff(CutoffRule::fixed(1));
  CHECK(idcg(data.grades, d1, gs) == doctest::Approx(1.0));
  CHECK(ndcg(data, d1, gs) == doctest::Approx(0.0));

  // fewer positives than k: ideal tail adds zero gain
  const std::vector<double> sparse{1.0, 0.0, 0.0, 0.0};
  CHECK(idcg(sparse, d.with_cutoff(CutoffRule::fixed(3)), gs) == doctest::Approx(1.0));
}

TEST_CASE("brute force agrees with sort-based ideal, exactly") {
  const std::vector<Discount> discounts = {Discount::log_inverse(), Discount::power(0.5),
                                           Discount::zipfian(), Discount::exponential(2.0)};
  const auto gs = ternary_id();
  // all grade multisets over {0,1,2} with n <= 6
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<std::size_t> counts(3, 0);
    for (std::size_t c2 = 0; c2 <= n; ++c2) {
      for (std::size_t c1 = 0; c1 + c2 <= n; ++c1) {
        std::vector<double> g;
        g.insert(g.end(), c2, 2.0);
        g.insert(g.end(), c1, 1.0);
        g.insert(g.end(), n - c1 - c2, 0.0);
        for (const auto& d : discounts) {
          CHECK(idcg(g, d, gs) == brute_force_idcg(g, d, gs));
        }
      }
    }
  }
  std::vector<double> too_big(11, 1.0);
  CHECK_THROWS_AS(brute_force_idcg(too_big, Discount::zipfian(), gs), Error);
}

TEST_CASE("order-preserving score transforms leave ndcg unchanged") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> grade_pick(0, 2);
  const auto gs = ternary_id();
  const auto d = Discount::log_inverse();
  for (int rep = 0; rep < 50; ++rep) {
    Dataset data;
    const int n = 2 + rep % 17;
    bool any = false;
    for (int i = 0; i < n; ++i) {
      data.scores.push_back(unif(rng));
      const double g = grade_pick(rng);
      any = any || g > 0;
      data.grades.push_back(g);
    }
    if (!any) data.grades[0] = 2.0;
    const double base = ndcg(data, d, gs);
    Dataset affine = data, expd = data, cubed = data;
    for (int i = 0; i < n; ++i) {
      affine.scores[i] = 2.5 * data.scores[i] + 3.0;
      expd.scores[i] = std::exp(data.scores[i]);
      cubed.scores[i] = std::pow(data.scores[i], 3.0);
    }
    CHECK(ndcg(affine, d, gs) == base);
    CHECK(ndcg(expd, d, gs) == base);
    CHECK(ndcg(cubed, d, gs) == base);
  }
}

TEST_CASE("scaling the discount cancels in ndcg") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto gs = binary();
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 3 + rep;
    std::vector<double> base_table;
    for (int r = 1; r <= n; ++r) base_table.push_back(1.0 / std::log1p(r));
    std::vector<double> scaled = base_table;
    for (auto& v : scaled) v *= 7.25;
    const auto d1 = Discount::custom(base_table, CustomTail::Zero);
    const auto d2 = Discount::custom(scaled, CustomTail::Zero);
    Dataset data;
    for (int i = 0; i < n; ++i) {
      data.scores.push_back(unif(rng));
      data.grades.push_back(unif(rng) < 0.5 ? 1.0 : 0.0);
    }
    data.grades[0] = 1.0;
    const double a = ndcg(data, d1, gs);
    const double b = ndcg(data, d2, gs);
    CHECK(std::abs(a - b) <= 1e-15 * std::max(std::abs(a), 1e-300));
  }
}

TEST_CASE("metric engine matches the plain implementation") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> grade_pick(0, 2);
  const auto gs = ternary_exp2();
  const std::vector<Discount> discounts = {
      Discount::log_inverse(), Discount::power(0.5),
      Discount::zipfian().with_cutoff(CutoffRule::linear_fraction(0.3)),
      Discount::exponential(2.0)};
  for (const auto& d : discounts) {
    MetricEngine engine(d, gs, 256);
    EvalScratch ws;
    for (int rep = 0; rep < 40; ++rep) {
      const std::size_t n = 1 + static_cast<std::size_t>(unif(rng) * 200);
      Dataset data;
      std::vector<std::uint8_t> gidx(n);
      for (std::size_t i = 0; i < n; ++i) {
        data.scores.push_back(unif(rng));
        const int g = grade_pick(rng);
        gidx[i] = static_cast<std::uint8_t>(2 - g);
        data.grades.push_back(g);
      }
      for (const auto tb : {TieBreak::ByIndex, TieBreak::Pessimistic, TieBreak::Optimistic}) {
        const auto fast = engine.ndcg(data.scores, gidx, tb, ws);
        bool degenerate = true;
        for (const double g : data.grades) degenerate = degenerate && g == 0.0;
        if (degenerate) {
          CHECK_FALSE(fast.has_value());
          continue;
        }
        const double slow = ndcg(data, d, gs, tb);
        REQUIRE(fast.has_value());
        CHECK(*fast == doctest::Approx(slow).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("ndcg stays in the unit interval") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  const auto gs = ternary_id();
  const auto d = Discount::power(0.25);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 1 + rep % 12;
    Dataset data;
    bool any = false;
    for (int i = 0; i < n; ++i) {
      data.scores.push_back(unif(rng));
      const double g = static_cast<double>(rep + i) / 3.0 >= 1.0 ? (rep + i) % 3 : 0.0;
      any = any || g > 0;
      data.grades.push_back(g);
    }
    if (!any) continue;
    const double v = ndcg(data, d, gs);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-15);
  }
}
