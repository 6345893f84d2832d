#include <stdio.h>
#include <string.h>

#include "lsgame.h"

static int fail(const char *what) {
    const char *msg = ls_last_error();
    fprintf(stderr, "%s: %s\n", what, msg ? msg : "(no message)");
    return 1;
}

int main(void) {
    LsSystem *sys = NULL;
    LsGame *game = NULL;
    if (ls_system_magic_square(&sys) != LS_STATUS_OK) return fail("magic square");
    if (ls_game_new(sys, &game) != LS_STATUS_OK) return fail("game");

    int64_t num = 0, den = 0;
    if (ls_game_classical_value(game, &num, &den) != LS_STATUS_OK) return fail("classical");
    double bound = 0.0;
    if (ls_game_npa_bound(game, 1, &bound) != LS_STATUS_OK) return fail("npa");
    uint64_t accepted = 0;
    char *digest = NULL;
    if (ls_pzk_protocol(sys, 100, 7, &accepted, &digest) != LS_STATUS_OK) return fail("protocol");
    printf("classical %lld/%lld npa %.6f accepted %llu digest %s\n", (long long)num, (long long)den, bound,
           (unsigned long long)accepted, digest);
    ls_string_free(digest);

    LsSystem *bad = NULL;
    LsStatus s = ls_system_parse("1 1\n2 | 0\n", &bad);
    printf("bad system -> %d (%s)\n", (int)s, ls_last_error());

    ls_game_free(game);
    ls_system_free(sys);
    return (num == 17 && den == 18 && accepted == 100 && s == LS_STATUS_MALFORMED) ? 0 : 1;
}
