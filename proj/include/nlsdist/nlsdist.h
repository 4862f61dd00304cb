#ifndef NLSDIST_NLSDIST_H
#define NLSDIST_NLSDIST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NLSDIST_API __declspec(dllexport)
#else
#define NLSDIST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlsdist_status {
    NLSDIST_OK = 0,
    NLSDIST_ERR_INVALID_ARGUMENT = 1,
    NLSDIST_ERR_IO = 2,
    NLSDIST_ERR_CONVERGENCE = 3,
    NLSDIST_ERR_HYPOTHESIS = 4,
    NLSDIST_ERR_VERIFICATION = 5,
    NLSDIST_ERR_INTERNAL = 6
} nlsdist_status;

typedef enum nlsdist_family {
    NLSDIST_GAUSSIAN = 0,
    NLSDIST_SECH2 = 1,
    NLSDIST_SQUARE = 2
} nlsdist_family;

typedef struct nlsdist_potential nlsdist_potential;
typedef struct nlsdist_scattering nlsdist_scattering;
typedef struct nlsdist_basis nlsdist_basis;

typedef void (*nlsdist_log_fn)(const char* line, void* user);

/* Library version string, static storage. */
NLSDIST_API const char* nlsdist_version(void);

/* Message of the last failed call on this thread; "" if none. Valid until the next call. */
NLSDIST_API const char* nlsdist_last_error(void);

/* Process exit code for a status: 0 ok, 2 hypothesis, 3 verification, 1 otherwise. */
NLSDIST_API int nlsdist_exit_code(nlsdist_status s);

NLSDIST_API void nlsdist_string_free(char* s);

/* ---- potentials ---- */

/* Closed-form family sampled on [x_min, x_max] with n nodes. width is the half-width for the square barrier. */
NLSDIST_API nlsdist_status nlsdist_potential_create(nlsdist_family family, double amplitude, double width,
                                                    double x_min, double x_max, size_t n,
                                                    nlsdist_potential** out);
/* Linear interpolation of n samples on [x_min, x_max]. */
NLSDIST_API nlsdist_status nlsdist_potential_from_samples(const double* samples, size_t n, double x_min,
                                                          double x_max, nlsdist_potential** out);
/* Potential section of a JSON config text ({"family":..., "params":{...}, ...}). */
NLSDIST_API nlsdist_status nlsdist_potential_from_json(const char* json_text, nlsdist_potential** out);
NLSDIST_API void nlsdist_potential_free(nlsdist_potential* p);

NLSDIST_API nlsdist_status nlsdist_potential_eval(const nlsdist_potential* p, double x, double* out);
/* Hypothesis report as JSON; release with nlsdist_string_free. */
NLSDIST_API nlsdist_status nlsdist_potential_hypotheses(const nlsdist_potential* p, char** json_out);

/* ---- scattering data ---- */

/* T, R_+, R_- on the given positive k values. */
NLSDIST_API nlsdist_status nlsdist_scattering_compute(const nlsdist_potential* p, const double* k, size_t nk,
                                                      nlsdist_scattering** out);
NLSDIST_API void nlsdist_scattering_free(nlsdist_scattering* s);
NLSDIST_API size_t nlsdist_scattering_size(const nlsdist_scattering* s);
/* Entry j as interleaved (re, im): T, R_plus, R_minus; any output pointer may be NULL. */
NLSDIST_API nlsdist_status nlsdist_scattering_get(const nlsdist_scattering* s, size_t j, double* k, double T[2],
                                                  double R_plus[2], double R_minus[2]);
/* Interpolated coefficients at any real k (negative k by conjugation). */
NLSDIST_API nlsdist_status nlsdist_scattering_at(const nlsdist_scattering* s, double k, double T[2],
                                                 double R_plus[2], double R_minus[2]);
NLSDIST_API double nlsdist_scattering_max_unitarity_defect(const nlsdist_scattering* s);
/* Low-energy genericity report as JSON; release with nlsdist_string_free. */
NLSDIST_API nlsdist_status nlsdist_scattering_genericity(const nlsdist_scattering* s, char** json_out);

/* ---- distorted Fourier basis on a propagation grid ---- */

/* k_cut <= 0 means no cut. */
NLSDIST_API nlsdist_status nlsdist_basis_create(const nlsdist_potential* p, double x_min, double x_max, size_t n,
                                                double oversample, double k_cut, nlsdist_basis** out);
NLSDIST_API void nlsdist_basis_free(nlsdist_basis* b);
NLSDIST_API size_t nlsdist_basis_nx(const nlsdist_basis* b);
NLSDIST_API size_t nlsdist_basis_nk(const nlsdist_basis* b);
/* k grid values, nk entries, increasing. */
NLSDIST_API nlsdist_status nlsdist_basis_k(const nlsdist_basis* b, double* k_out);
/* Complex arrays are interleaved (re, im). f has nx entries, out has nk entries. */
NLSDIST_API nlsdist_status nlsdist_basis_forward(const nlsdist_basis* b, const double* f, double* out);
NLSDIST_API nlsdist_status nlsdist_basis_inverse(const nlsdist_basis* b, const double* spectrum, double* out);

/* ---- pipeline commands ---- */

typedef struct nlsdist_run_options {
    const char* config_path; /* NULL or "": built-in defaults */
    const char* out_dir;     /* NULL: "out" */
    const char* filter;      /* verify only; NULL or "": all criteria */
    int strict;
    int has_seed;
    uint64_t seed;
    int threads; /* <= 0: keep the config value */
    const char* command_line;
    nlsdist_log_fn log;
    void* log_user;
} nlsdist_run_options;

NLSDIST_API void nlsdist_run_options_init(nlsdist_run_options* opt);

/* command: scatter | basis | evolve | asymptotics | verify */
NLSDIST_API nlsdist_status nlsdist_run(const char* command, const nlsdist_run_options* opt);

/* Checks the hashes recorded in out_dir/manifest.json; *n_bad receives the number of mismatches. */
NLSDIST_API nlsdist_status nlsdist_check_manifest(const char* out_dir, size_t* n_bad);

/* Acceptance criteria: count, id and name by position. */
NLSDIST_API size_t nlsdist_criteria_count(void);
NLSDIST_API int nlsdist_criterion_id(size_t i);
NLSDIST_API const char* nlsdist_criterion_name(size_t i);

#ifdef __cplusplus
}
#endif

#endif
