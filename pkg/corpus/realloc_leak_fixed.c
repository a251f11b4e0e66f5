#include <stdio.h>
#include <stdlib.h>

typedef struct st {
    int value;
} st;

int main() {
    st *tmp;
    st *new = malloc(sizeof(st));
    if (new == NULL) {
        return -1;
    }
    tmp = realloc(new, 2 * sizeof(st));
    if (tmp != NULL) {
        new = tmp;
    }
    free(new);
    return 0;
}
