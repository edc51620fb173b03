#include "convert.h"

#include <string>

namespace YAML {

bool convert::decode(const Node& node, std::string& rhs) {
  if (!node.IsScalar())
    return false;
  rhs = node.Scalar();
  return true;
}

Node convert::encode(const std::string& rhs) {
  Node node;
  node.SetScalar(rhs);
  return node;
}

}  // namespace YAML
