#include <stdio.h>

/* The first pointer assignment is overwritten
 * before any read. */
int main() {
    int a = 20;
    int b = 10;
    int *ptr_a = &a;

    ptr_a = &b;
    printf("%d\n", *ptr_a);

    return 0;
}
