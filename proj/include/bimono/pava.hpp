#pragma once

#include "bimono/order_cone.hpp"

namespace bimono {

// Weighted isotonic regression on a chain: minimize sum_i w_i (z_i - x_i)^2
// subject to x_0 <= x_1 <= ... <= x_{m-1}.
struct ChainProblem {
  Vector values;
  Vector weights;
};

// Stack-based pool-adjacent-violators in O(m). Neighbouring pools merge only
// when the left mean is strictly larger.
Vector PavaFit(const ChainProblem& problem);

// Chain of groups that must take a common value, e.g. the level sets of the
// current iterate in increasing order. Each group carries its member values
// and weights; returns one fitted value per group.
struct GroupedChainProblem {
  std::vector<Vector> values;
  std::vector<Vector> weights;
};

Vector PavaFitGrouped(const GroupedChainProblem& problem);

}  // namespace bimono
