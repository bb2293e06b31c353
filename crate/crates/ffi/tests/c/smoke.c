#include <stdio.h>
#include <string.h>
#include "resalg.h"

#define CHECK(cond)                                                          \
    do {                                                                     \
        if (!(cond)) {                                                       \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,   \
                    resalg_last_error());                                    \
            return 1;                                                        \
        }                                                                    \
    } while (0)

int main(void) {
    ResalgSpace *space = NULL;
    CHECK(resalg_space_standard(2, &space) == RESALG_STATUS_OK);
    CHECK(resalg_space_dim(space) == 4);
    double defect = -1.0;
    CHECK(resalg_space_basis_defect(space, &defect) == RESALG_STATUS_OK && defect == 0.0);

    /* R(2, e0) - R(2, e0) reduces to zero */
    const char *json =
        "[{\"coeff\":[1,0],\"factors\":[{\"z\":[2,0],\"f\":[1,0,0,0]}]},"
        " {\"coeff\":[-1,0],\"factors\":[{\"z\":[2,0],\"f\":[1,0,0,0]}]}]";
    ResalgPoly *p = NULL, *q = NULL;
    CHECK(resalg_poly_from_json(json, &p) == RESALG_STATUS_OK);
    int zero = 0;
    CHECK(resalg_poly_simplify(space, p, 0, &q, &zero) == RESALG_STATUS_OK && zero == 1);

    ResalgRep *rep = NULL;
    CHECK(resalg_rep_standard(1, 33, &rep) == RESALG_STATUS_OK);
    double f[2] = {1.0, 0.0}, norm = 0.0;
    CHECK(resalg_rep_resolvent_norm(rep, 2.0, f, 2, &norm) == RESALG_STATUS_OK);
    CHECK(norm > 0.4999999 && norm < 0.5000001);
    CHECK(resalg_rep_resolvent_norm(rep, 2.0, f, 1, &norm) == RESALG_STATUS_DIMENSION_MISMATCH);
    CHECK(strlen(resalg_last_error()) > 0);

    int64_t num[9] = {0, 1, 0, -1, 0, 0, 0, 0, 0}, den[9] = {1, 1, 1, 1, 1, 1, 1, 1, 1};
    ResalgSpace *odd = NULL;
    CHECK(resalg_space_from_form(num, den, 3, &odd) != RESALG_STATUS_OK && odd == NULL);

    resalg_rep_free(rep);
    resalg_poly_free(q);
    resalg_poly_free(p);
    resalg_space_free(space);
    printf("ok %s\n", resalg_version());
    return 0;
}
