#include <stdio.h>
#include <string.h>
#include "dendrite_lab.h"

static const char *VICSEK =
    "{\"name\":\"vicsek\",\"dimension\":2,"
    "\"polyhedron\":{\"vertices\":[[0,0],[1,0],[1,1],[0,1]]},"
    "\"maps\":["
    "{\"ratio\":0.3333333333333333,\"orthogonal\":[[1,0],[0,1]],\"translation\":[0,0]},"
    "{\"ratio\":0.3333333333333333,\"orthogonal\":[[1,0],[0,1]],\"translation\":[0.6666666666666666,0]},"
    "{\"ratio\":0.3333333333333333,\"orthogonal\":[[1,0],[0,1]],\"translation\":[0.6666666666666666,0.6666666666666666]},"
    "{\"ratio\":0.3333333333333333,\"orthogonal\":[[1,0],[0,1]],\"translation\":[0,0.6666666666666666]},"
    "{\"ratio\":0.3333333333333333,\"orthogonal\":[[1,0],[0,1]],\"translation\":[0.3333333333333333,0.3333333333333333]}]}";

int main(void) {
    DlSystem *sys = NULL;
    if (dl_system_from_json(VICSEK, &sys) != DL_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", dl_last_error_message());
        return 1;
    }
    int ok = 0;
    char *report = NULL;
    if (dl_validate(sys, &ok, &report) != DL_STATUS_OK || !ok) {
        return 2;
    }
    dl_string_free(report);

    double center[2] = {0.5, 0.5};
    char *order = NULL;
    if (dl_point_order(sys, center, 2, 0, &order) != DL_STATUS_OK) {
        fprintf(stderr, "order: %s\n", dl_last_error_message());
        return 3;
    }
    int found = strstr(order, "\"orderInK\":4") != NULL;
    dl_string_free(order);
    dl_system_free(sys);

    double ratios[2] = {0.5, 0.5};
    double s = 0.0;
    if (dl_moran_dimension(ratios, 2, &s) != DL_STATUS_OK) {
        return 4;
    }
    printf("order=%d dim=%.12f\n", found ? 4 : -1, s);
    return found ? 0 : 5;
}
