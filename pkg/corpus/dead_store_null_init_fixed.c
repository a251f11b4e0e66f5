#include <stdio.h>

/* The null initialization is overwritten
 * before any read. */
int main() {
    int var = 20;
    int *ptr_a = &var;

    printf("%d\n", *ptr_a);

    return 0;
}
