#include <stdio.h>
#include <stdlib.h>

typedef struct st {
    int *value;
} st;

/* Freeing the struct orphans the heap block
 * still referenced by its field.
 */
int main() {
    st *new = malloc(sizeof(st));
    if (new == NULL) {
        return -1;
    }

    new -> value = malloc(sizeof(int));
    free(new -> value);
    free(new);
    return 0;
}
