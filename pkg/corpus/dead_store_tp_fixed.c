#include <stdio.h>

/* The first pointer assignment is overwritten
 * before any read. */
int main() {
    int b = 10;
    int *ptr_a = &b;

    printf("%d\n", *ptr_a);

    return 0;
}
