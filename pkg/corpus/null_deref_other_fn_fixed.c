#include <stdio.h>

int g = 0;

int *make_ptr() {
    return &g;
}

int main() {
    int *q = make_ptr();
    *q = 5;
    return 0;
}
