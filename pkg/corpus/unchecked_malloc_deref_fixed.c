#include <stdio.h>
#include <stdlib.h>

typedef struct st {
    int value;
} st;

st * create(int value) {
    st *new = malloc(sizeof(st));
    if (new == NULL) {
        return NULL;
    }
    new -> value = value;
    return new;
}

int main() {
    st *new = create(5);
    free(new);
    return 0;
}
