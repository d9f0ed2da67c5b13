#include "bimono/active_set.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "bimono/pava.hpp"

namespace bimono {
namespace {

// Blocking pairs whose step ratio is within this relative distance of the
// minimum are merged together.
constexpr double kTieWindow = 1e-12;

class GroupSets {
 public:
  explicit GroupSets(Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }
  Index Find(Index u) {
    while (parent_[u] != u) {
      parent_[u] = parent_[parent_[u]];
      u = parent_[u];
    }
    return u;
  }
  // Returns the surviving root.
  Index Union(Index a, Index b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[b] = a;
    return a;
  }

 private:
  std::vector<Index> parent_;
};

Vector BlockValues(const Vector& x, const Partition& partition) {
  Vector values(partition.num_blocks());
  for (Index u = x.size() - 1; u >= 0; --u) values[partition.block_of(u)] = x[u];
  return values;
}

// Moves from theta toward x (both constant on the blocks of `partition`) as far
// as the inter-block order constraints allow. The pairs that block the step
// are merged so the result has strictly fewer free blocks; rounding
// violations left over from the convex combination are merged as well, which
// keeps the result exactly feasible.
Vector ClipTowards(const Vector& theta, const Vector& x, const Partition& partition,
                   const std::vector<IndexPair>& block_pairs) {
  const Index nb = partition.num_blocks();
  const Vector tb = BlockValues(theta, partition);
  const Vector xb = BlockValues(x, partition);

  double t = 1.0;
  std::vector<double> ratio(block_pairs.size(), 2.0);
  for (std::size_t n = 0; n < block_pairs.size(); ++n) {
    const auto [lo, hi] = block_pairs[n];
    const double excess = xb[lo] - xb[hi];
    if (excess > 0.0) {
      const double gap = tb[hi] - tb[lo];
      ratio[n] = gap / (gap + excess);
      t = std::min(t, ratio[n]);
    }
  }

  Vector value(nb);
  for (Index b = 0; b < nb; ++b) value[b] = tb[b] + t * (xb[b] - tb[b]);

  GroupSets groups(nb);
  bool merged = false;
  for (std::size_t n = 0; n < block_pairs.size(); ++n) {
    if (ratio[n] <= t * (1.0 + kTieWindow)) {
      groups.Union(block_pairs[n].lower, block_pairs[n].upper);
      merged = true;
    }
  }
  if (!merged) throw SolverError("ClipTowards: no constraint blocks the step");

  // Common value of each merged group: mean of its block values.
  Vector sum = Vector::Zero(nb), count = Vector::Zero(nb);
  for (Index b = 0; b < nb; ++b) {
    sum[groups.Find(b)] += value[b];
    count[groups.Find(b)] += 1.0;
  }
  Vector group_value = Vector::Zero(nb);
  for (Index b = 0; b < nb; ++b) {
    if (count[b] > 0.0) group_value[b] = sum[b] / count[b];
  }

  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [lo, hi] : block_pairs) {
      const Index a = groups.Find(lo), c = groups.Find(hi);
      if (a != c && group_value[a] > group_value[c]) {
        const double v = group_value[a];
        group_value[groups.Union(a, c)] = v;
        changed = true;
      }
    }
  }

  Vector y(theta.size());
  for (Index u = 0; u < theta.size(); ++u) y[u] = group_value[groups.Find(partition.block_of(u))];
  return y;
}

std::vector<IndexPair> InterBlockPairs(const ConstraintSet& constraints,
                                       const Partition& partition) {
  std::vector<IndexPair> pairs;
  for (const IndexPair& pr : constraints.pairs()) {
    const Index a = partition.block_of(pr.lower), b = partition.block_of(pr.upper);
    if (a != b) pairs.push_back({a, b});
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

SubspaceSolveReport CountedSolve(const QuadraticObjective& q, const Partition& partition,
                                 ProcedureStats* stats) {
  SubspaceSolveReport report = MinimizeOverPartition(q, partition);
  if (stats != nullptr) {
    ++stats->subspace_solves;
    stats->used_pseudoinverse = stats->used_pseudoinverse || report.used_pseudoinverse;
  }
  return report;
}

OptimalityCheck SteepestExtremal(const Vector& gradient, const OrderCone& cone) {
  const LinearMinimum best = cone.MinimizeLinear(gradient);
  OptimalityCheck check;
  const double minus_ones_slope = -gradient.sum();
  if (minus_ones_slope < best.value) {
    check.direction = Vector::Constant(gradient.size(), -1.0);
    check.slope = minus_ones_slope;
    check.minus_ones = true;
  } else {
    check.direction = best.extremal;
    check.slope = best.value;
  }
  return check;
}

}  // namespace

OrderCone OrderCone::Generic(ConstraintSet constraints) {
  return OrderCone(Kind::kGeneric, std::move(constraints));
}

OrderCone OrderCone::Bimonotone(GridShape grid) {
  OrderCone cone(Kind::kBimonotone, BimonotoneConstraints(grid));
  cone.quotient_ = QuotientConeSpec(grid, 0, 0);
  return cone;
}

OrderCone OrderCone::Quotient(QuotientConeSpec spec) {
  OrderCone cone(Kind::kQuotient, spec.Constraints());
  cone.quotient_ = spec;
  return cone;
}

LinearMinimum OrderCone::MinimizeLinear(const Vector& coefficients) const {
  if (coefficients.size() != dimension()) {
    throw std::invalid_argument("OrderCone::MinimizeLinear: dimension mismatch");
  }
  if (kind_ == Kind::kGeneric) return BruteMinLinear(coefficients, constraints_);
  const GridShape& grid = quotient_.grid;
  const Matrix a = Unflatten(coefficients, grid);
  const GridLinearMinimum m =
      kind_ == Kind::kBimonotone
          ? DpMinLinear(a)
          : MinLinearQuotient(a, quotient_.collapsed_rows, quotient_.collapsed_cols);
  return {Flatten(m.extremal), m.value};
}

std::string ToString(Strategy s) {
  switch (s) {
    case Strategy::k2a:
      return "2a";
    case Strategy::k2b:
      return "2b";
    case Strategy::k2c:
      return "2c";
  }
  return "?";
}

Strategy StrategyFromString(const std::string& name) {
  if (name == "2a") return Strategy::k2a;
  if (name == "2b") return Strategy::k2b;
  if (name == "2c") return Strategy::k2c;
  throw std::invalid_argument(fmt::format("unknown strategy '{}'", name));
}

OptimalityCheck CheckOptimality(const QuadraticObjective& q, const Vector& theta,
                                const OrderCone& cone, double tol) {
  if (theta.size() != cone.dimension() || q.dimension() != cone.dimension()) {
    throw std::invalid_argument("CheckOptimality: dimension mismatch");
  }
  const Vector g = q.Gradient(theta);
  if (std::abs(g.dot(theta)) > tol || std::abs(g.sum()) > tol) {
    throw std::invalid_argument(fmt::format(
        "CheckOptimality: gradient condition fails (grad'theta = {:.3e}, grad'1 = {:.3e})",
        g.dot(theta), g.sum()));
  }
  return SteepestExtremal(g, cone);
}

Vector ImproveStep(const QuadraticObjective& q, const Vector& theta, const Vector& direction) {
  const double slope = q.Gradient(theta).dot(direction);
  if (!(slope < 0.0)) throw std::invalid_argument("ImproveStep: direction is not a descent direction");
  const double t = LineMinimize(q, theta, direction);
  Vector next = theta;
  for (Index u = 0; u < theta.size(); ++u) {
    if (direction[u] != 0.0) next[u] = theta[u] + t * direction[u];
  }
  return next;
}

Vector Procedure2a(const QuadraticObjective& q, const Vector& theta,
                   const ConstraintSet& constraints, ProcedureStats* stats) {
  Vector current = theta;
  for (Index iter = 0; iter <= theta.size(); ++iter) {
    const Partition partition = ActivePartition(current, constraints);
    Vector x = CountedSolve(q, partition, stats).minimizer;
    if (IsFeasible(x, constraints)) return x;
    current = ClipTowards(current, x, partition, InterBlockPairs(constraints, partition));
  }
  throw SolverError("Procedure2a: active set failed to shrink within p steps");
}

Vector Procedure2b(const QuadraticObjective& q, const Vector& theta, ProcedureStats* stats) {
  Vector current = theta;
  for (Index iter = 0; iter <= theta.size(); ++iter) {
    const Partition levels = LevelPartition(current);
    Vector x = CountedSolve(q, levels, stats).minimizer;
    const Vector xb = BlockValues(x, levels);
    bool ordered = true;
    for (Index b = 1; b < xb.size() && ordered; ++b) ordered = xb[b - 1] <= xb[b];
    if (ordered) return x;
    std::vector<IndexPair> chain;
    for (Index b = 1; b < levels.num_blocks(); ++b) chain.push_back({b - 1, b});
    current = ClipTowards(current, x, levels, chain);
  }
  throw SolverError("Procedure2b: level sets failed to merge within p steps");
}

Vector Procedure2c(const QuadraticObjective& q, const Vector& theta, ProcedureStats* stats) {
  const auto* wls = std::get_if<DiagonalWls>(&q.form());
  if (wls == nullptr) {
    throw std::invalid_argument("Procedure2c: requires a diagonal weighted least squares objective");
  }
  if (theta.size() != wls->weights.size()) throw std::invalid_argument("Procedure2c: size mismatch");
  const Partition levels = LevelPartition(theta);
  const auto blocks = levels.Blocks();

  GroupedChainProblem chain;
  std::vector<Index> fitted_block;  // blocks carrying positive weight, in order
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::vector<double> z, w;
    for (Index u : blocks[b]) {
      if (wls->weights[u] > 0.0) {
        z.push_back(wls->data[u]);
        w.push_back(wls->weights[u]);
      }
    }
    if (w.empty()) continue;
    chain.values.push_back(Eigen::Map<const Vector>(z.data(), static_cast<Index>(z.size())));
    chain.weights.push_back(Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size())));
    fitted_block.push_back(static_cast<Index>(b));
  }
  const Vector fit = PavaFitGrouped(chain);

  // Weightless level sets take the value of the nearest fitted level below
  // (above, when none lies below); any such choice is a minimizer.
  Vector block_value(levels.num_blocks());
  std::size_t next = 0;
  for (Index b = 0; b < levels.num_blocks(); ++b) {
    while (next + 1 < fitted_block.size() && fitted_block[next + 1] <= b) ++next;
    block_value[b] = fit[static_cast<Index>(next)];
  }
  if (stats != nullptr) {
    ++stats->subspace_solves;
    if (static_cast<Index>(fitted_block.size()) < levels.num_blocks()) {
      stats->used_pseudoinverse = true;
    }
  }
  return levels.Expand(block_value);
}

SolveResult Solve(const QuadraticObjective& q, const OrderCone& cone, const SolverConfig& config) {
  const Index p = cone.dimension();
  if (q.dimension() != p) throw std::invalid_argument("Solve: objective and cone dimensions differ");
  if (!(config.certificate_tolerance > 0.0)) {
    throw std::invalid_argument("Solve: certificate tolerance must be positive");
  }
  if (config.strategy == Strategy::k2c && !q.is_diagonal_wls()) {
    throw std::invalid_argument("Solve: strategy 2c requires a diagonal weighted least squares objective");
  }
  const Index max_outer = config.max_outer_iterations > 0 ? config.max_outer_iterations : 10 * p;
  const double tol = config.certificate_tolerance * q.Scale();

  ProcedureStats stats;
  SolveResult result;
  Vector theta = CountedSolve(q, Partition::Single(p), &stats).minimizer;
  result.objective_trace.push_back(q.Value(theta));

  std::vector<double> slopes;
  for (Index outer = 0; outer <= max_outer; ++outer) {
    const Vector g = q.Gradient(theta);
    const OptimalityCheck check = SteepestExtremal(g, cone);
    slopes.push_back(check.slope);
    if (check.slope >= -tol) {
      result.theta = std::move(theta);
      result.certificate = {g.dot(result.theta), g.sum(), check.slope, tol};
      result.outer_iterations = outer;
      result.subspace_solves = stats.subspace_solves;
      result.used_pseudoinverse = stats.used_pseudoinverse;
      result.objective = q.Value(result.theta);
      return result;
    }
    theta = ImproveStep(q, theta, check.direction);
    switch (config.strategy) {
      case Strategy::k2a:
        theta = Procedure2a(q, theta, cone.constraints(), &stats);
        break;
      case Strategy::k2b:
        theta = Procedure2b(q, theta, &stats);
        break;
      case Strategy::k2c:
        theta = Procedure2c(q, theta, &stats);
        break;
    }
    result.objective_trace.push_back(q.Value(theta));
  }

  std::string trail;
  const std::size_t from = slopes.size() > 8 ? slopes.size() - 8 : 0;
  for (std::size_t n = from; n < slopes.size(); ++n) trail += fmt::format(" {:.3e}", slopes[n]);
  throw SolverError(fmt::format(
      "Solve: no certificate after {} outer iterations (tolerance {:.3e}); last slopes:{}",
      max_outer, tol, trail));
}

}  // namespace bimono
