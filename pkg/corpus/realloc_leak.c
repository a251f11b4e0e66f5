#include <stdio.h>
#include <stdlib.h>

typedef struct st {
    int value;
} st;

int main() {
    st *new = malloc(sizeof(st));
    if (new == NULL) {
        return -1;
    }

    new = realloc(new, 2 * sizeof(st));
    free(new);
    return 0;
}
