#include <cstdio>

int main() {
    std::puts("timerewind: subcommands not wired up yet");
    return 0;
}
