#include <math.h>
#include <stdio.h>
#include "springnet.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    double v = 0.0;
    CHECK(sn_bessel_j(1, 3.141592653589793, &v) == SN_STATUS_OK);
    CHECK(fabs(v - 0.28461534317975285) < 1e-14);

    SnBifurcation rep;
    CHECK(sn_bifurcation_analyze(0.5, 0.5, 0.5, 0.5, NAN, &rep) == SN_STATUS_OK);
    CHECK(fabs(rep.beta_c - 83.044) < 0.01);
    CHECK(rep.classification == SN_CLASSIFICATION_SUPERCRITICAL);

    CHECK(sn_beta_critical(0.6, 0.5, 0.5, 0.5, &v) == SN_STATUS_PRECONDITION);
    char msg[256];
    CHECK(sn_last_error_message(msg, sizeof msg) > 0);

    SnMicroParams mp = {50, 1.0, 0.05, 0.1, 0.01, 1.0, 1.0, 1.0, 0.01, 0.5, 0.5};
    SnMicroSim *sim = NULL;
    CHECK(sn_micro_new(&mp, 7, &sim) == SN_STATUS_OK);
    CHECK(sn_micro_step(sim, 100) == SN_STATUS_OK);
    CHECK(fabs(sn_micro_time(sim) - 1.0) < 1e-12);
    double pos[100];
    CHECK(sn_micro_positions(sim, pos, 100) == SN_STATUS_OK);
    sn_micro_free(sim);

    SnMacroParams q = {0.0, 1.0, 0.125, 0.25, 0.5, 0.5, 16, 16, 1e-3, 1};
    SnCosineMode m = {1, 0, 1e-4};
    SnMacroSolver *s = NULL;
    CHECK(sn_macro_new(&q, &m, 1, &s) == SN_STATUS_OK);
    CHECK(sn_macro_step(s, 10) == SN_STATUS_OK);
    CHECK(fabs(sn_macro_mass(s) - 1.0) < 1e-12);
    sn_macro_free(s);

    printf("ok %s\n", sn_version());
    return 0;
}
