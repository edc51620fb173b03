#include "../a.h"

int run_checks() {
  int ok = twice(2) == 4;
  return ok ? 0 : 1;
}
