#include <stdio.h>
#include <stdlib.h>

/* The allocation never reaches a free. */
int main() {
    int *p = malloc(sizeof(int));
    if (p == NULL) {
        return -1;
    }
    *p = 7;
    printf("%d\n", *p);
    free(p);
    return 0;
}
