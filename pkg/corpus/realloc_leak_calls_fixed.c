#include <stdio.h>
#include <stdlib.h>

typedef struct st {
    int value;
} st;

void announce() {
    printf("growing the buffer\n");
}

int main() {
    st *tmp;
    st *new = malloc(sizeof(st));
    if (new == NULL) {
        return -1;
    }
    announce();
    tmp = realloc(new, 2 * sizeof(st));
    if (tmp != NULL) {
        new = tmp;
    }
    free(new);
    return 0;
}
