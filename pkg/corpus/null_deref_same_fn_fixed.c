#include <stdio.h>

/* A pointer set to NULL and dereferenced a line later. */
int main() {
    int x = 0;
    int *p = &x;
    *p = 5;
    return 0;
}
