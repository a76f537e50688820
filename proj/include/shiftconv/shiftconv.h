#ifndef SHIFTCONV_H
#define SHIFTCONV_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define SC_API __attribute__((visibility("default")))
#else
#define SC_API
#endif

typedef enum sc_status {
    SC_OK = 0,
    SC_ERR_INVALID_ARGUMENT = 1,
    SC_ERR_CAPACITY = 2,
    SC_ERR_DOMAIN = 3,
    SC_ERR_NONCONVERGENCE = 4,
    SC_ERR_LEMMA_VIOLATION = 5,
    SC_ERR_INTERNAL = 6,
    SC_ERR_IO = 7
} sc_status;

typedef struct sc_divisor_table sc_divisor_table;
typedef struct sc_weight sc_weight;
typedef struct sc_config sc_config;
typedef struct sc_report sc_report;
typedef struct sc_text sc_text;

/* Message for the last failing call on this thread; empty after success. */
SC_API const char* sc_last_error(void);
SC_API const char* sc_version(void);

/* Text results: NUL-terminated, owned by the handle. */
SC_API const char* sc_text_data(const sc_text* t);
SC_API void sc_text_free(sc_text* t);

/* d_k(n) for 0 <= n <= limit (entry 0 is 0). */
SC_API sc_status sc_sieve_dk(int k, uint64_t limit, sc_divisor_table** out);
SC_API sc_status sc_divisor_table_get(const sc_divisor_table* t, uint64_t n, uint64_t* out);
SC_API void sc_divisor_table_free(sc_divisor_table* t);

/* Writes up to cap (prime, exponent) pairs; *count receives the number of distinct primes. */
SC_API sc_status sc_factorize(uint64_t n, uint64_t* primes, int* exponents, size_t cap, size_t* count);
SC_API sc_status sc_ramanujan_sum(uint64_t d, int64_t h, int64_t* out);
SC_API sc_status sc_gcd_infty(uint64_t d1, uint64_t d2, uint64_t* out);

/* shape: "mollifier" or "cos2"; support (lo, hi) inside (0, infinity). */
SC_API sc_status sc_weight_create(const char* shape, double lo, double hi, sc_weight** out);
/* j-th derivative, 0 <= j <= 8. */
SC_API sc_status sc_weight_eval(const sc_weight* w, double t, int j, double* out);
SC_API void sc_weight_free(sc_weight* w);

/* sum_n w(n/x) d_k(n) d(n+h) */
SC_API sc_status sc_direct_sum(int k, int64_t h, double x, const sc_weight* w, int threads, double* out);
/* sum_n w1(r1 n/x) w2(r2 n/x) d(r1 n + h) d(r2 n + h) */
SC_API sc_status sc_certain_sum(uint64_t r1, uint64_t r2, int64_t h, double x, const sc_weight* w1,
                                const sc_weight* w2, double* out);
/* Main term for the same sum as sc_direct_sum; tau <= 0 selects the default. */
SC_API sc_status sc_main_term(int k, int64_t h, double x, const sc_weight* w, double tau, int threads, double* out);

/* Verification entry points. *passed is 1 or 0; the report is a human-readable summary. */
SC_API sc_status sc_verify_detmat(uint64_t r1, uint64_t r2, int64_t h, uint64_t x, int* passed, sc_text** report);
SC_API sc_status sc_verify_cosets(uint64_t qmax, int* passed, sc_text** report);
SC_API sc_status sc_verify_ksum(uint64_t rmax, double bmax, int samples, uint64_t seed, int* passed,
                                sc_text** report);
/* delta as a rational string such as "1/16". */
SC_API sc_status sc_verify_partition(int resolution, int kmax, const char* delta, int* passed, sc_text** report);
SC_API sc_status sc_verify_all(uint64_t seed, int* passed, sc_text** report);

/* Exponent table; arguments are rational strings ("7/64", "0.5", "0"). */
SC_API sc_status sc_exponents(const char* delta, const char* theta, const char* h_exp, sc_text** report);

/* Experiment configuration in key = value form. */
SC_API sc_status sc_config_create(sc_config** out);
SC_API sc_status sc_config_load(const char* path, sc_config** out);
SC_API sc_status sc_config_set(sc_config* cfg, const char* key, const char* value);
SC_API void sc_config_free(sc_config* cfg);

SC_API sc_status sc_run_experiment(const sc_config* cfg, sc_report** out);
SC_API sc_status sc_report_write_csv(const sc_report* r, const char* path);
SC_API sc_status sc_report_csv(const sc_report* r, sc_text** out);
SC_API size_t sc_report_row_count(const sc_report* r);
/* row: x, S, M, R, |R| */
SC_API sc_status sc_report_get_row(const sc_report* r, size_t i, double row[5]);
/* *has_slope is 0 when fewer than two points survive the noise floor. */
SC_API sc_status sc_report_slope(const sc_report* r, int* has_slope, double* slope);
SC_API sc_status sc_report_summary(const sc_report* r, sc_text** out);
SC_API void sc_report_free(sc_report* r);

#ifdef __cplusplus
}
#endif

#endif
