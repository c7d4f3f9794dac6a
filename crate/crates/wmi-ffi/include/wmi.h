/* C interface for the exact weighted model integration engine.
 *
 * All functions return a status code: 0 on success, nonzero on failure.
 * After a failure, wmi_last_error() returns a message valid until the next
 * failing call on the same thread.
 */
#ifndef WMI_H
#define WMI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define WMI_OK 0
#define WMI_ERR_ARGUMENT 1
#define WMI_ERR_PARSE 2
#define WMI_ERR_SOLVE 3
#define WMI_ERR_PANIC 4

typedef struct WmiProblem WmiProblem;

/* Message of the most recent failure on this thread. */
const char *wmi_last_error(void);

/* Parse a problem in the textual dialect into a heap handle. */
int wmi_problem_parse(const char *text, WmiProblem **out);

/* Free a handle from wmi_problem_parse. Null is ignored. */
void wmi_problem_free(WmiProblem *p);

/* Solve with algo one of "bf", "pa", "sa". On success *value_out holds the
 * exact result as a rational string ("203/3"), to be released with
 * wmi_string_free; *n_integrals_out (optional, may be null) receives the
 * number of computed integrals. */
int wmi_solve(const WmiProblem *p, const char *algo, char **value_out,
              uint64_t *n_integrals_out);

/* Free a string returned by this library. Null is ignored. */
void wmi_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif /* WMI_H */
