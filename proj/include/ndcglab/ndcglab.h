#ifndef NDCGLAB_H
#define NDCGLAB_H

/* C interface to the NDCG ranking-measure library. Handles are opaque;
 * functions returning a pointer yield NULL on failure and functions
 * returning a status yield a nonzero code, with a diagnostic available from
 * ndcglab_last_error() on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status values match the CLI exit-code contract. */
typedef enum ndcglab_status {
  NDCGLAB_OK = 0,
  NDCGLAB_ERROR = 1,
  NDCGLAB_CONFIG = 2,
  NDCGLAB_ASSUMPTION = 3,
  NDCGLAB_IO = 4
} ndcglab_status;

/* Library version, e.g. "0.1.0". */
const char* ndcglab_version(void);

/* Message from the most recent failure on this thread; "" if none. The
 * pointer stays valid until the next failing call on the same thread. */
const char* ndcglab_last_error(void);

/* ---- Rank discounts ---------------------------------------------------- */

typedef struct ndcglab_discount ndcglab_discount;

ndcglab_discount* ndcglab_discount_log(void);
ndcglab_discount* ndcglab_discount_power(double beta);       /* beta in (0,1) */
ndcglab_discount* ndcglab_discount_zipfian(void);
ndcglab_discount* ndcglab_discount_exponential(double base); /* base > 1 */
/* Tabulated discount; extend_tail nonzero fits a power law past the table,
 * zero truncates to 0. Values must be positive and nonincreasing. */
ndcglab_discount* ndcglab_discount_custom(const double* table, size_t len, int extend_tail);

#define NDCGLAB_CUTOFF_FIXED_K 0         /* value = k, k >= 1            */
#define NDCGLAB_CUTOFF_LINEAR_FRACTION 1 /* value = c, c in (0,1)        */
#define NDCGLAB_CUTOFF_SUBLINEAR_POWER 2 /* value = gamma, gamma in (0,1) */

/* New handle with a top-k truncation rule attached; source is unchanged. */
ndcglab_discount* ndcglab_discount_with_cutoff(const ndcglab_discount* d, int kind,
                                               double value);

void ndcglab_discount_free(ndcglab_discount* d);

/* D at rank r of a length-n list (cutoff-aware). NaN on a bad handle. */
double ndcglab_discount_eval(const ndcglab_discount* d, uint64_t r, uint64_t n);
/* sum of D(1..k), ignoring any cutoff. */
double ndcglab_discount_partial_sum(const ndcglab_discount* d, uint64_t k);
/* F(t) = integral of D over [1, t]. */
double ndcglab_discount_antiderivative(const ndcglab_discount* d, double t);

#define NDCGLAB_FEASIBLE 0
#define NDCGLAB_BORDERLINE 1
#define NDCGLAB_INFEASIBLE 2

/* Feasibility class of the discount; if ambiguous is non-NULL it is set to 1
 * when a tabulated tail sits too close to 1/r to call. -1 on a bad handle. */
int ndcglab_discount_classify(const ndcglab_discount* d, int* ambiguous);

/* Integral of 1/ln(tau) over [2, t]; NaN for t < 2. */
double ndcglab_li_offset(double t);

/* ---- NDCG -------------------------------------------------------------- */

#define NDCGLAB_GAIN_IDENTITY 0
#define NDCGLAB_GAIN_EXP2 1

#define NDCGLAB_TIES_BY_INDEX 0
#define NDCGLAB_TIES_PESSIMISTIC 1
#define NDCGLAB_TIES_OPTIMISTIC 2

/* NDCG of n (score, grade) pairs under the discount. The grade alphabet is
 * the set of distinct values in grades. Writes the value to *out; a list
 * whose ideal DCG is zero yields NaN with status NDCGLAB_OK. */
ndcglab_status ndcglab_ndcg(const ndcglab_discount* d, const double* scores,
                            const double* grades, size_t n, int gain, int tie_break,
                            double* out);

/* ---- Full runs --------------------------------------------------------- */

/* Runs a command exactly as the CLI does: reads the JSON config at
 * config_path (a previous run's manifest.json also works), writes the
 * artifacts plus manifest.json into out_dir, and logs one line per stage to
 * stderr. seed, when non-NULL, overrides the config's seed. Returns the
 * exit-code contract: 0 ok, 2 config error, 3 assumption violation,
 * 4 I/O error, 1 other failure. */
int ndcglab_run(const char* command, const char* config_path, const char* out_dir,
                const uint64_t* seed, uint32_t threads);

#ifdef __cplusplus
}
#endif

#endif /* NDCGLAB_H */
