#include <stdio.h>
#include <stdlib.h>

typedef struct st {
    int value;
} st;

/* The allocation is sized from the pointee expression. */
st * create(int value) {
    st *new = malloc(sizeof(*new));
    if (new == NULL) return NULL;
    new -> value = value;
    return new;
}

int main() {
    st *new = create(5);

    printf("Value: %d\n", new -> value);
    return 0;
}
