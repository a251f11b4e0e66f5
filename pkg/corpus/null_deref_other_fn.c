#include <stdio.h>

int *make_ptr() {
    int *p = NULL;
    return p;
}

int main() {
    int *q = make_ptr();
    *q = 5;
    return 0;
}
