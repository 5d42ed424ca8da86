#include <math.h>
#include <stdio.h>
#include "fdsic.h"

int main(void) {
    FdsicParams *p = NULL;
    if (fdsic_params_new(&p) != FDSIC_STATUS_OK) return 1;
    FdsicBudget b;
    if (fdsic_budget(p, 15.0, &b) != FDSIC_STATUS_OK) return 2;
    if (fabs(b.p_soi + 83.9) > 0.5) return 3;
    if (fdsic_params_set(p, FDSIC_PARAM_IRR_TX, -1.0) != FDSIC_STATUS_INVALID_ARGUMENT) return 4;
    if (fdsic_last_error_message() == NULL) return 5;
    fdsic_params_free(p);

    FdsicComplex x[64], y[64], r[64];
    for (int i = 0; i < 64; i++) {
        x[i].re = sin(0.7 * i) + 0.3 * cos(2.1 * i * i);
        x[i].im = cos(1.3 * i) - 0.2 * sin(0.4 * i * i);
        y[i].re = 0.9 * x[i].re + 0.05 * x[i].re;
        y[i].im = 0.9 * x[i].im - 0.05 * x[i].im;
    }
    FdsicEstimate *e = NULL;
    if (fdsic_estimate(x, y, 64, 1, 0, true, &e) != FDSIC_STATUS_OK) return 6;
    if (fdsic_cancel(e, x, y, 64, r) != FDSIC_STATUS_OK) return 7;
    for (int i = 0; i < 64; i++)
        if (hypot(r[i].re, r[i].im) > 1e-10) return 8;
    fdsic_estimate_free(e);
    printf("ok %s\n", fdsic_version());
    return 0;
}
