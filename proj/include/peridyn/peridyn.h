#ifndef PERIDYN_PERIDYN_H
#define PERIDYN_PERIDYN_H

/* C interface to the peridyn library. All handles are opaque; every call
 * returns a pd_status and leaves a message in pd_last_error() on failure.
 * Error messages are thread-local. Strings returned by a handle stay valid
 * until that handle is destroyed. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(PERIDYN_BUILDING)
#    define PD_API __declspec(dllexport)
#  else
#    define PD_API __declspec(dllimport)
#  endif
#else
#  define PD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pd_status {
    PD_OK = 0,
    PD_ERR_INVALID_ARGUMENT = 1,
    PD_ERR_DOMAIN = 2,
    PD_ERR_NON_FINITE = 3,
    PD_ERR_CONFIG = 4,
    PD_ERR_IO = 5,
    PD_ERR_SINGULAR = 6,
    PD_ERR_INTERNAL = 7
} pd_status;

typedef enum pd_operator {
    PD_OP_L = 0,
    PD_OP_LS = 1,
    PD_OP_LD = 2,
    PD_OP_L1 = 3,
    PD_OP_L2 = 4,
    PD_OP_L_GAMMA = 5,
    PD_OP_L_STAR = 6
} pd_operator;

typedef struct pd_case pd_case;
typedef struct pd_study pd_study;

PD_API const char* pd_version(void);
PD_API const char* pd_status_name(pd_status s);
/* Message of the last failed call on this thread, "" if none. */
PD_API const char* pd_last_error(void);

/* Manufactured field/material pair. The interface passes through origin with
 * unit normal; either pointer may be NULL for the defaults (0,0,0) and e3. */
PD_API pd_status pd_case_create(const char* field_name, const double origin[3], const double normal[3], pd_case** out);
/* Replaces the material by a two-phase one on the case interface. */
PD_API pd_status pd_case_set_two_phase(pd_case* c, double lambda_plus, double mu_plus, double lambda_minus,
                                       double mu_minus);
PD_API pd_status pd_case_set_homogeneous(pd_case* c, double lambda, double mu);
PD_API void pd_case_destroy(pd_case* c);

/* Field value at x. */
PD_API pd_status pd_case_value(const pd_case* c, const double x[3], double out[3]);
/* Operator value at x with horizon delta; orders <= 0 select the defaults.
 * PD_OP_L2 uses the case interface normal. */
PD_API pd_status pd_eval(const pd_case* c, pd_operator op, double delta, int radial_order, int angular_order,
                         const double x[3], double out[3]);
/* Local elasticity quantities; x must lie on the interface. */
PD_API pd_status pd_traction_jump(const pd_case* c, const double x[3], double out[3]);
PD_API pd_status pd_natural_limit(const pd_case* c, const double x[3], double out[3]);

/* Runs a study from a JSON configuration (see docs/config.schema.json). */
PD_API pd_status pd_study_run(const char* config_json, pd_study** out);
PD_API void pd_study_destroy(pd_study* s);
/* 1 if every embedded check passed, 0 otherwise. */
PD_API int pd_study_passed(const pd_study* s);
PD_API size_t pd_study_check_count(const pd_study* s);
/* One summary line per check, "PASS name ..." or "FAIL name ...". */
PD_API const char* pd_study_check_line(const pd_study* s, size_t i);
PD_API const char* pd_study_name(const pd_study* s);
PD_API const char* pd_study_csv(const pd_study* s);
PD_API const char* pd_study_json(const pd_study* s);
/* Writes <dir>/<study>.csv and <dir>/<study>.json. */
PD_API pd_status pd_study_write(const pd_study* s, const char* dir);

#ifdef __cplusplus
}
#endif

#endif
