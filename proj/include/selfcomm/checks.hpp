#pragma once

#include <string>
#include <utility>
#include <vector>

namespace selfcomm {

/// One verified invariant: a measured residual against the tolerance it must
/// stay under. NaN residuals fail.
struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;

  bool pass() const { return residual <= tolerance; }
};

struct CheckList {
  std::vector<Check> checks;

  void add(std::string name, double residual, double tolerance) {
    checks.push_back({std::move(name), residual, tolerance});
  }

  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass()) return false;
    }
    return true;
  }

  const Check* first_failure() const {
    for (const auto& c : checks) {
      if (!c.pass()) return &c;
    }
    return nullptr;
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

}  // namespace selfcomm
