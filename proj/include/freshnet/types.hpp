#pragma once

namespace freshnet {

/// Peak and average age, in slots.
struct AgePair {
  double peak = 0.0;
  double average = 0.0;
};

enum class Metric { peak, average };

enum class ArrivalKind { bernoulli, periodic };

}  // namespace freshnet
