#include <stdio.h>
#include <stdlib.h>

#include "longwave.h"

int main(void) {
    enum { N = 4096, P = 2 };
    const double d[P] = {0.2, 0.4};
    const double sigma[P * P] = {1.0, 0.6, 0.6, 1.0};
    double *x = malloc(sizeof(double) * N * P);
    if (lw_simulate_arfima(N, P, d, sigma, 11, x, N * P) != LW_STATUS_OK) {
        fprintf(stderr, "simulate: %s\n", lw_last_error());
        return 1;
    }

    LwBank *bank = NULL;
    if (lw_bank_new(LW_VARIANT_CFW_C, 4, 4, &bank) != LW_STATUS_OK) {
        fprintf(stderr, "bank: %s\n", lw_last_error());
        return 1;
    }
    LwFit *fit = NULL;
    if (lw_estimate(bank, x, N, P, 4, 0, &fit) != LW_STATUS_OK) {
        fprintf(stderr, "estimate: %s\n", lw_last_error());
        return 1;
    }
    double dh[P];
    lw_fit_d(fit, dh, P);
    printf("%.6f %.6f\n", dh[0], dh[1]);

    lw_fit_free(fit);
    lw_bank_free(bank);
    free(x);
    return 0;
}
