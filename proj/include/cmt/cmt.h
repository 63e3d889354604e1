/* C interface to the CMT convexity pricing library.
 *
 * Objects are opaque handles created by *_create / *_load_csv / cmt_price and
 * released with the matching *_destroy. Every fallible call returns a
 * cmt_status; on failure cmt_last_error() holds a message for the calling
 * thread until its next failing call. Output pointers are written only on
 * success.
 */
#ifndef CMT_CMT_H
#define CMT_CMT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CMT_BUILDING_LIBRARY)
#    define CMT_API __declspec(dllexport)
#  else
#    define CMT_API __declspec(dllimport)
#  endif
#else
#  define CMT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cmt_status {
    CMT_OK = 0,
    /* validation errors */
    CMT_E_INVALID_ARGUMENT = 1,
    CMT_E_PARSE = 2,
    CMT_E_IO = 3,
    CMT_E_INVALID_DATE_ORDER = 4,
    CMT_E_EXTRAPOLATION = 5,
    CMT_E_INVALID_INTERVAL = 6,
    CMT_E_INVALID_TENOR = 7,
    CMT_E_DOMAIN = 8,
    /* numerical failures */
    CMT_E_NEGATIVE_HAZARD = 20,
    CMT_E_STRIPPING_FAILED = 21,
    CMT_E_INVERSION_RANGE = 22,
    CMT_E_CONVERGENCE = 23,
    CMT_E_DEGENERATE_CURVE = 24,
    CMT_E_DEGENERATE_DENOMINATOR = 25,
    CMT_E_DEGENERATE_BOND = 26,
    CMT_E_DEGENERATE_YIELD = 27,
    CMT_E_INSUFFICIENT_SAMPLES = 28,
    CMT_E_NO_ARBITRAGE = 29,
    CMT_E_INTERNAL = 99
} cmt_status;

CMT_API const char* cmt_version(void);
CMT_API const char* cmt_status_name(cmt_status status);
/* Nonzero for caller-side mistakes (codes below 20). */
CMT_API int cmt_status_is_validation(cmt_status status);
CMT_API const char* cmt_last_error(void);

typedef struct cmt_discount_curve cmt_discount_curve;
typedef struct cmt_hazard_curve cmt_hazard_curve;
typedef struct cmt_quote_set cmt_quote_set;
typedef struct cmt_result cmt_result;

/* ---- discount curves: log-linear in DF, first pillar (0, 1) ---- */
CMT_API cmt_status cmt_discount_curve_create(const double* t, const double* df, size_t n, int allow_extrapolation,
                                             cmt_discount_curve** out);
CMT_API cmt_status cmt_discount_curve_flat(double rate, double horizon, int allow_extrapolation,
                                           cmt_discount_curve** out);
CMT_API cmt_status cmt_discount_curve_load_csv(const char* path, int allow_extrapolation, cmt_discount_curve** out);
CMT_API void cmt_discount_curve_destroy(cmt_discount_curve* curve);
CMT_API cmt_status cmt_discount_curve_df(const cmt_discount_curve* curve, double t, double* out);

/* ---- hazard curves: piecewise-constant intensity ---- */
CMT_API cmt_status cmt_hazard_curve_create(const double* t, const double* lambda, size_t n, int allow_extrapolation,
                                           cmt_hazard_curve** out);
CMT_API cmt_status cmt_hazard_curve_flat(double lambda, double horizon, int allow_extrapolation,
                                         cmt_hazard_curve** out);
CMT_API cmt_status cmt_hazard_curve_load_csv(const char* path, int allow_extrapolation, cmt_hazard_curve** out);
CMT_API void cmt_hazard_curve_destroy(cmt_hazard_curve* curve);
CMT_API cmt_status cmt_hazard_curve_survival(const cmt_hazard_curve* curve, double t, double* out);
CMT_API cmt_status cmt_hazard_curve_rate(const cmt_hazard_curve* curve, double t, double* out);
CMT_API size_t cmt_hazard_curve_size(const cmt_hazard_curve* curve);
/* Copies min(capacity, size) pillars; either array may be NULL. */
CMT_API cmt_status cmt_hazard_curve_pillars(const cmt_hazard_curve* curve, double* t, double* lambda,
                                            size_t capacity);

/* ---- bond quotes and hazard stripping ---- */
typedef struct cmt_bond_quote {
    double maturity;
    double coupon_rate; /* annual */
    int frequency;
    int is_clean;       /* price excludes accrued interest */
    double price;
} cmt_bond_quote;

CMT_API cmt_status cmt_quote_set_create(const cmt_bond_quote* quotes, size_t n, cmt_quote_set** out);
CMT_API cmt_status cmt_quote_set_load_csv(const char* path, cmt_quote_set** out);
CMT_API void cmt_quote_set_destroy(cmt_quote_set* set);
CMT_API size_t cmt_quote_set_size(const cmt_quote_set* set);
CMT_API cmt_status cmt_quote_set_get(const cmt_quote_set* set, size_t index, cmt_bond_quote* out);

/* Sequential bootstrap; the returned curve extrapolates flat beyond the last quote. */
CMT_API cmt_status cmt_strip_hazard(const cmt_quote_set* quotes, const cmt_discount_curve* dc, double recovery,
                                    double quad_step, cmt_hazard_curve** out);
/* Model dirty price of quote `index`, and the dirty target it was quoted at. */
CMT_API cmt_status cmt_bond_price(const cmt_quote_set* quotes, size_t index, const cmt_discount_curve* dc,
                                  const cmt_hazard_curve* hz, double recovery, double quad_step, double* model,
                                  double* target);

/* ---- simulation ---- */
typedef enum cmt_coupon_mode { CMT_COUPON_FIXED = 0, CMT_COUPON_CMT_PAR = 1 } cmt_coupon_mode;
typedef enum cmt_hazard_init { CMT_HAZARD_STABILIZED = 0, CMT_HAZARD_PAPER_EXACT = 1 } cmt_hazard_init;
typedef enum cmt_payoff_kind {
    CMT_PAYOFF_TERMINAL_YIELD = 0,
    CMT_PAYOFF_TERMINAL_CMT = 1,
    CMT_PAYOFF_CAPLET = 2,
    CMT_PAYOFF_FLOORLET = 3,
    CMT_PAYOFF_CAP = 4,
    CMT_PAYOFF_FLOOR = 5
} cmt_payoff_kind;

typedef enum cmt_zero_yield { CMT_ZERO_YIELD_ABSORB = 0, CMT_ZERO_YIELD_FAIL = 1 } cmt_zero_yield;

typedef struct cmt_sim_config {
    double expiry;
    double theta;        /* bond tenor in years */
    int kappa;           /* coupons per year */
    double recovery;
    int coupon_mode;     /* cmt_coupon_mode */
    double fixed_coupon; /* annual rate, FixedCoupon mode */
    double alpha;
    double sigma;
    uint64_t n_paths;
    uint64_t seed;
    double step;         /* years */
    double quad_step;    /* years */
    int hazard_init;     /* cmt_hazard_init */
    int payoff;          /* cmt_payoff_kind */
    int has_strike;      /* 0: at-the-money-forward */
    double strike;
    int pay_frequency;
    double cap_maturity;
    int zero_yield;      /* cmt_zero_yield */
    unsigned workers;    /* 0: hardware concurrency */
} cmt_sim_config;

/* sigma 1%, alpha 10%, R 20%, daily steps, theta 10, kappa 2, 1024 paths. */
CMT_API void cmt_sim_config_default(cmt_sim_config* cfg);

CMT_API cmt_status cmt_initial_forward_yield(const cmt_sim_config* cfg, const cmt_discount_curve* dc,
                                             const cmt_hazard_curve* hz, double* out);

typedef struct cmt_estimate {
    double mean;
    double std_error;
} cmt_estimate;

typedef struct cmt_stats {
    size_t count;
    double min;
    double max;
    double mean;
    double std_dev;
    double skewness;
    double excess_kurtosis;
} cmt_stats;

typedef struct cmt_summary {
    cmt_estimate payoff;
    size_t n_paths;
    double initial_yield;
    double initial_hazard;
    double initial_bond_value;
    cmt_estimate terminal_yield;
    cmt_estimate cmt;
    cmt_estimate bond_value;
    double convexity_adjustment;
    int has_strike;
    double strike;
    size_t clamp_events;
    size_t absorbed_paths;
} cmt_summary;

typedef enum cmt_stats_kind {
    CMT_STATS_PAYOFF = 0,
    CMT_STATS_TERMINAL_YIELD = 1,
    CMT_STATS_YIELD_VOL = 2
} cmt_stats_kind;

typedef struct cmt_path {
    double terminal_yield;
    double cmt;
    double bond_value;
    double yield_vol;
    double payoff;
    int clamp_events;
    int absorbed;
} cmt_path;

CMT_API cmt_status cmt_price(const cmt_sim_config* cfg, const cmt_discount_curve* dc, const cmt_hazard_curve* hz,
                             cmt_result** out);
CMT_API void cmt_result_destroy(cmt_result* result);
CMT_API cmt_status cmt_result_summary(const cmt_result* result, cmt_summary* out);
CMT_API cmt_status cmt_result_stats(const cmt_result* result, cmt_stats_kind kind, cmt_stats* out);
CMT_API size_t cmt_result_path_count(const cmt_result* result);
/* Per-path records of the first fixing, in path order. */
CMT_API cmt_status cmt_result_paths(const cmt_result* result, cmt_path* out, size_t capacity);

CMT_API cmt_status cmt_distribution_stats(const double* samples, size_t n, cmt_stats* out);

/* ---- Black-76 ---- */
CMT_API cmt_status cmt_black_price(double forward, double strike, double vol, double expiry, double df,
                                   double accrual, int is_call, double* out);
CMT_API cmt_status cmt_implied_vol(double price, double forward, double strike, double expiry, double df,
                                   double accrual, int is_call, double* out);

typedef struct cmt_surface_point {
    double expiry;
    double strike;
    double forward;
    double price;
    double std_error;
    double implied_vol;
    int is_call;
    int converged;
} cmt_surface_point;

/* Prices n_expiries * n_strikes caplets (K >= F) or floorlets (K < F) and
 * inverts them; `out` is expiry-major. With relative_strikes nonzero each
 * strike multiplies that expiry's forward. */
CMT_API cmt_status cmt_caplet_surface(const cmt_sim_config* cfg, const cmt_discount_curve* dc,
                                      const cmt_hazard_curve* hz, const double* expiries, size_t n_expiries,
                                      const double* strikes, size_t n_strikes, int relative_strikes,
                                      cmt_surface_point* out);

#ifdef __cplusplus
}
#endif

#endif /* CMT_CMT_H */
