#pragma once

#include <vector>

namespace fedpg {

/// One relay decision: heading and travel distance for the UAV plus a
/// 1-based phase level per RIS element.
struct ActionValue {
  double yaw = 0.0;
  double speed = 0.0;
  std::vector<int> levels;

  friend bool operator==(const ActionValue&, const ActionValue&) = default;
};

}  // namespace fedpg
