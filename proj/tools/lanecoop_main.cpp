#include <cstdio>

int main() {
  std::puts("lanecoop: subcommands not wired up yet");
  return 0;
}
