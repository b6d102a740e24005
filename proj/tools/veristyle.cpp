#include <cstdio>

int main() {
    std::puts("veristyle: command-line surface under construction");
    return 0;
}
