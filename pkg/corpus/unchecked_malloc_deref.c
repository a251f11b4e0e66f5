#include <stdio.h>
#include <stdlib.h>

typedef struct st {
    int value;
} st;

/* The allocation result flows into a field write without a null
 * check; on the failure path the write dereferences NULL.
 */
st * create(int value) {
    st *new = malloc(sizeof(st));
    new -> value = value;
    return new;
}

int main() {
    st *new = create(5);
    free(new);
    return 0;
}
