#include "bimono/pava.hpp"

#include <cmath>

#include <fmt/format.h>

namespace bimono {

Vector PavaFit(const ChainProblem& problem) {
  const Vector& z = problem.values;
  const Vector& w = problem.weights;
  const Index m = z.size();
  if (m < 1 || w.size() != m) {
    throw std::invalid_argument("PavaFit: values and weights must have equal positive length");
  }
  for (Index i = 0; i < m; ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
      throw std::invalid_argument(fmt::format("PavaFit: weight {} is not positive", i));
    }
  }

  // Pools as (mean, weight, first index); pools[0..top) is the stack.
  std::vector<double> mean(static_cast<std::size_t>(m));
  std::vector<double> weight(static_cast<std::size_t>(m));
  std::vector<Index> start(static_cast<std::size_t>(m));
  std::size_t top = 0;
  for (Index i = 0; i < m; ++i) {
    mean[top] = z[i];
    weight[top] = w[i];
    start[top] = i;
    ++top;
    while (top > 1 && mean[top - 2] > mean[top - 1]) {
      const double total = weight[top - 2] + weight[top - 1];
      mean[top - 2] = (weight[top - 2] * mean[top - 2] + weight[top - 1] * mean[top - 1]) / total;
      weight[top - 2] = total;
      --top;
    }
  }
  Vector fit(m);
  for (std::size_t pool = 0; pool < top; ++pool) {
    const Index end = pool + 1 < top ? start[pool + 1] : m;
    fit.segment(start[pool], end - start[pool]).setConstant(mean[pool]);
  }
  return fit;
}

Vector PavaFitGrouped(const GroupedChainProblem& problem) {
  const std::size_t q = problem.values.size();
  if (q == 0 || problem.weights.size() != q) {
    throw std::invalid_argument("PavaFitGrouped: need a nonempty list of groups");
  }
  ChainProblem chain{Vector(static_cast<Index>(q)), Vector(static_cast<Index>(q))};
  for (std::size_t b = 0; b < q; ++b) {
    const Vector& z = problem.values[b];
    const Vector& w = problem.weights[b];
    if (z.size() == 0 || z.size() != w.size()) {
      throw std::invalid_argument(fmt::format("PavaFitGrouped: group {} is empty or ragged", b));
    }
    const double total = w.sum();
    chain.weights[static_cast<Index>(b)] = total;
    chain.values[static_cast<Index>(b)] = w.dot(z) / total;
  }
  return PavaFit(chain);
}

}  // namespace bimono
