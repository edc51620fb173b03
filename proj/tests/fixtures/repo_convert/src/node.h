#pragma once

#include <string>

namespace YAML {

// Minimal scalar-only node.
class Node {
 public:
  bool IsScalar() const { return has_scalar_; }
  const std::string& Scalar() const { return scalar_; }

  void SetScalar(const std::string& value) {
    scalar_ = value;
    has_scalar_ = true;
  }

 private:
  bool has_scalar_ = false;
  std::string scalar_;
};

}  // namespace YAML
