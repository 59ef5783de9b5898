#include <cstdio>

int main() {
  std::fprintf(stderr, "wlat: no subcommand given\n");
  return 1;
}
