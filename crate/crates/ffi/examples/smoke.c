/* Runs the converse suite at (2, 3) and prints one line per check.
 *
 *   cargo build --release -p so-converse-ffi
 *   cc examples/smoke.c -Iinclude -L../../target/release -lso_converse_ffi -o smoke
 *   LD_LIBRARY_PATH=../../target/release ./smoke
 */
#include <stdio.h>

#include "so_converse.h"

int main(void) {
    SoConfig *cfg = so_config_new(2, 3);
    SoReport *report = NULL;
    if (so_config_set_suites(cfg, "converse") != SO_STATUS_OK ||
        so_run(cfg, &report) != SO_STATUS_OK) {
        fprintf(stderr, "error: %s\n", so_last_error());
        so_config_free(cfg);
        return 2;
    }
    static const char *labels[] = {"PASS", "FAIL", "SKIP"};
    for (size_t i = 0; i < so_report_len(report); i++) {
        char *name = NULL;
        SoCheckStatus status;
        so_report_check(report, i, &name, &status);
        printf("%s %s\n", labels[status], name);
        so_string_free(name);
    }
    int ok = so_report_passed(report);
    so_report_free(report);
    so_config_free(cfg);
    return ok ? 0 : 1;
}
