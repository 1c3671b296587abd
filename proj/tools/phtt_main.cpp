#include <cstdio>

int main() {
  std::puts("phtt: command-line interface not wired up yet");
  return 2;
}
