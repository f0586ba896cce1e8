#include <cstdio>

int main() {
  std::puts("starlab: subcommands not wired up yet");
  return 2;
}
