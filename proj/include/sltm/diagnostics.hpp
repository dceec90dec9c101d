#pragma once

#include <string>
#include <vector>

namespace sltm {

/// Collects numerical-health warnings raised during model evaluation.
/// Passing nullptr anywhere a Diagnostics* is accepted silences collection.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string msg) { warnings.push_back(std::move(msg)); }
  bool empty() const { return warnings.empty(); }
};

inline void warn(Diagnostics* diag, std::string msg) {
  if (diag != nullptr) diag->warn(std::move(msg));
}

}  // namespace sltm
