#include "b.h"

int entry(int v) {
  int step = b_helper(v);
  return c_helper(step);
}
