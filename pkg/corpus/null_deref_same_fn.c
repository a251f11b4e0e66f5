#include <stdio.h>

/* A pointer set to NULL and dereferenced a line later. */
int main() {
    int *p = NULL;
    *p = 5;
    return 0;
}
