#include "convert.h"
#include <string>
using namespace YAML;
int main() {
  Node n;
  n.SetScalar("v");
  std::string out;
  bool ok = convert::decode(n, out);
  return ok && out == "v" ? 0 : 1;
}
