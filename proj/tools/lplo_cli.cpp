#include <cstdio>

int main() {
  std::puts("lplo: placeholder");
  return 0;
}
