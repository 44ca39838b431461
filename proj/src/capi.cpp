#include "ndcglab/ndcglab.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "discount.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "runner.hpp"
#include "version.hpp"

struct ndcglab_discount {
  ndcglab::Discount d;
};

namespace {

thread_local std::string g_last_error;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

ndcglab_status status_of(ndcglab::Errc c) {
  switch (c) {
    case ndcglab::Errc::config:
    case ndcglab::Errc::invalid_argument:
    case ndcglab::Errc::resource:
      return NDCGLAB_CONFIG;
    case ndcglab::Errc::assumption_violated:
      return NDCGLAB_ASSUMPTION;
    case ndcglab::Errc::io:
      return NDCGLAB_IO;
    default:
      return NDCGLAB_ERROR;
  }
}

// Runs f, routing any failure into the thread-local diagnostic.
template <class F>
ndcglab_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return NDCGLAB_OK;
  } catch (const ndcglab::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NDCGLAB_ERROR;
  }
}

ndcglab_discount* make_discount(ndcglab::Discount (*factory)(double), double arg) {
  ndcglab_discount* out = nullptr;
  guarded([&] { out = new ndcglab_discount{factory(arg)}; });
  return out;
}

bool check_handle(const ndcglab_discount* d) {
  if (d) return true;
  g_last_error = "null discount handle";
  return false;
}

}  // namespace

extern "C" {

const char* ndcglab_version(void) { return ndcglab::kVersion; }

const char* ndcglab_last_error(void) { return g_last_error.c_str(); }

ndcglab_discount* ndcglab_discount_log(void) {
  return new ndcglab_discount{ndcglab::Discount::log_inverse()};
}

ndcglab_discount* ndcglab_discount_power(double beta) {
  return make_discount(&ndcglab::Discount::power, beta);
}

ndcglab_discount* ndcglab_discount_zipfian(void) {
  return new ndcglab_discount{ndcglab::Discount::zipfian()};
}

ndcglab_discount* ndcglab_discount_exponential(double base) {
  return make_discount(&ndcglab::Discount::exponential, base);
}

ndcglab_discount* ndcglab_discount_custom(const double* table, size_t len, int extend_tail) {
  if (table == nullptr || len == 0) {
    g_last_error = "custom discount needs a non-empty table";
    return nullptr;
  }
  ndcglab_discount* out = nullptr;
  guarded([&] {
    out = new ndcglab_discount{ndcglab::Discount::custom(
        std::vector<double>(table, table + len),
        extend_tail ? ndcglab::CustomTail::Extend : ndcglab::CustomTail::Zero)};
  });
  return out;
}

ndcglab_discount* ndcglab_discount_with_cutoff(const ndcglab_discount* d, int kind,
                                               double value) {
  if (!check_handle(d)) return nullptr;
  ndcglab_discount* out = nullptr;
  guarded([&] {
    ndcglab::CutoffRule rule;
    switch (kind) {
      case NDCGLAB_CUTOFF_FIXED_K: {
        ndcglab::require(value >= 0.0 && value == std::floor(value),
                         ndcglab::Errc::invalid_argument, "fixed cutoff k must be an integer");
        rule = ndcglab::CutoffRule::fixed(static_cast<std::uint64_t>(value));
        break;
      }
      case NDCGLAB_CUTOFF_LINEAR_FRACTION:
        rule = ndcglab::CutoffRule::linear_fraction(value);
        break;
      case NDCGLAB_CUTOFF_SUBLINEAR_POWER:
        rule = ndcglab::CutoffRule::sublinear_power(value);
        break;
      default:
        ndcglab::fail(ndcglab::Errc::invalid_argument, "unknown cutoff kind");
    }
    out = new ndcglab_discount{d->d.with_cutoff(rule)};
  });
  return out;
}

void ndcglab_discount_free(ndcglab_discount* d) { delete d; }

double ndcglab_discount_eval(const ndcglab_discount* d, uint64_t r, uint64_t n) {
  if (!check_handle(d)) return kNan;
  double v = kNan;
  guarded([&] { v = d->d.eval(r, n); });
  return v;
}

double ndcglab_discount_partial_sum(const ndcglab_discount* d, uint64_t k) {
  if (!check_handle(d)) return kNan;
  double v = kNan;
  guarded([&] { v = d->d.partial_sum(k); });
  return v;
}

double ndcglab_discount_antiderivative(const ndcglab_discount* d, double t) {
  if (!check_handle(d)) return kNan;
  double v = kNan;
  guarded([&] { v = d->d.antiderivative(t); });
  return v;
}

int ndcglab_discount_classify(const ndcglab_discount* d, int* ambiguous) {
  if (!check_handle(d)) return -1;
  const ndcglab::Feasibility f = d->d.classify();
  if (ambiguous) *ambiguous = f.ambiguous ? 1 : 0;
  switch (f.value) {
    case ndcglab::FeasibilityClass::Feasible:
      return NDCGLAB_FEASIBLE;
    case ndcglab::FeasibilityClass::Borderline:
      return NDCGLAB_BORDERLINE;
    default:
      return NDCGLAB_INFEASIBLE;
  }
}

double ndcglab_li_offset(double t) {
  double v = kNan;
  guarded([&] { v = ndcglab::li_offset(t); });
  return v;
}

ndcglab_status ndcglab_ndcg(const ndcglab_discount* d, const double* scores,
                            const double* grades, size_t n, int gain, int tie_break,
                            double* out) {
  if (!check_handle(d)) return NDCGLAB_CONFIG;
  if (out == nullptr || scores == nullptr || grades == nullptr || n == 0) {
    g_last_error = "ndcg needs scores, grades, n >= 1, and an output slot";
    return NDCGLAB_CONFIG;
  }
  if (gain != NDCGLAB_GAIN_IDENTITY && gain != NDCGLAB_GAIN_EXP2) {
    g_last_error = "unknown gain kind";
    return NDCGLAB_CONFIG;
  }
  if (tie_break < NDCGLAB_TIES_BY_INDEX || tie_break > NDCGLAB_TIES_OPTIMISTIC) {
    g_last_error = "unknown tie-break policy";
    return NDCGLAB_CONFIG;
  }
  return guarded([&] {
    std::vector<double> alphabet(grades, grades + n);
    std::sort(alphabet.begin(), alphabet.end(), std::greater<>());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    if (alphabet.size() == 1) {  // grade sets need two levels
      if (alphabet[0] > 0.0) alphabet.push_back(0.0);
      else alphabet.insert(alphabet.begin(), alphabet[0] + 1.0);
    }
    const ndcglab::GradeSet gs(std::move(alphabet), gain == NDCGLAB_GAIN_IDENTITY
                                                        ? ndcglab::Gain::Identity
                                                        : ndcglab::Gain::Exponential2);
    ndcglab::Dataset data{std::vector<double>(scores, scores + n),
                          std::vector<double>(grades, grades + n)};
    try {
      *out = ndcglab::ndcg(data, d->d, gs, static_cast<ndcglab::TieBreak>(tie_break));
    } catch (const ndcglab::Error& e) {
      if (e.code() != ndcglab::Errc::degenerate_dataset) throw;
      *out = kNan;
    }
  });
}

int ndcglab_run(const char* command, const char* config_path, const char* out_dir,
                const uint64_t* seed, uint32_t threads) {
  if (command == nullptr || config_path == nullptr || out_dir == nullptr) {
    g_last_error = "command, config_path, and out_dir are required";
    return NDCGLAB_CONFIG;
  }
  std::optional<std::uint64_t> seed_override;
  if (seed) seed_override = *seed;
  return ndcglab::run_command(command, config_path, out_dir, seed_override, threads,
                              std::cerr);
}

}  // extern "C"
