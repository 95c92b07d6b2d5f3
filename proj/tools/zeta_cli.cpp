// Placeholder main; subcommands land with the harness module.
#include <cstdio>

int main() {
  std::puts("zeta: CLI wiring pending");
  return 0;
}
