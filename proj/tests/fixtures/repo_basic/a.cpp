#include "a.h"

int twice(int v) {
  return v * 2;
}

int clamp_positive(int v) {
  if (v < 0)
    return 0;
  return v;
}

int sum_to(int n) {
  int total = 0;
  for (int i = 1; i <= n; ++i)
    total += i;
  return total;
}
