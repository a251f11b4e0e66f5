#include <stdio.h>
#include <stdlib.h>

typedef struct st {
    int value;
} st;

void announce() {
    printf("growing the buffer\n");
}

int main() {
    st *new = malloc(sizeof(st));
    if (new == NULL) {
        return -1;
    }
    announce();
    new = realloc(new, 2 * sizeof(st));
    free(new);
    return 0;
}
