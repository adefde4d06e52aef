#include <cstdio>

int main() {
  std::puts("leviprobe (work in progress)");
  return 0;
}
