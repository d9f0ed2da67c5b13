#include "bimono/order_cone.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <fmt/format.h>

namespace bimono {
namespace {

void CheckDimension(const Vector& x, Index p, const char* what) {
  if (x.size() != p) {
    throw std::invalid_argument(
        fmt::format("{}: vector has length {}, expected {}", what, x.size(), p));
  }
}

// Union-find with path halving; roots are the smallest index in each set.
class DisjointSets {
 public:
  explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }
  Index Find(Index u) {
    while (parent_[u] != u) {
      parent_[u] = parent_[parent_[u]];
      u = parent_[u];
    }
    return u;
  }
  void Union(Index a, Index b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<Index> parent_;
};

}  // namespace

ConstraintSet::ConstraintSet(Index dimension, std::vector<IndexPair> pairs)
    : dimension_(dimension), pairs_(std::move(pairs)) {
  if (dimension_ < 1) throw std::invalid_argument("ConstraintSet: dimension must be positive");
  for (const IndexPair& pr : pairs_) {
    if (pr.lower < 0 || pr.lower >= dimension_ || pr.upper < 0 || pr.upper >= dimension_) {
      throw std::invalid_argument(fmt::format(
          "ConstraintSet: pair ({}, {}) out of range [0, {})", pr.lower, pr.upper, dimension_));
    }
    if (pr.lower == pr.upper) {
      throw std::invalid_argument(
          fmt::format("ConstraintSet: degenerate pair ({0}, {0})", pr.lower));
    }
  }
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

GridShape::GridShape(Index r, Index s) : rows(r), cols(s) {
  if (r < 1 || s < 1) {
    throw std::invalid_argument(fmt::format("GridShape: invalid shape {}x{}", r, s));
  }
}

ConstraintSet BimonotoneConstraints(const GridShape& grid) {
  std::vector<IndexPair> pairs;
  pairs.reserve(static_cast<std::size_t>(2 * grid.size()));
  for (Index i = 0; i < grid.rows; ++i) {
    for (Index j = 0; j < grid.cols; ++j) {
      if (i + 1 < grid.rows) pairs.push_back({grid.Flat(i, j), grid.Flat(i + 1, j)});
      if (j + 1 < grid.cols) pairs.push_back({grid.Flat(i, j), grid.Flat(i, j + 1)});
    }
  }
  return ConstraintSet(grid.size(), std::move(pairs));
}

Vector Flatten(const Matrix& m) {
  Vector v(m.size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), m.rows(), m.cols()) = m;
  return v;
}

Matrix Unflatten(const Vector& v, const GridShape& grid) {
  CheckDimension(v, grid.size(), "Unflatten");
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), grid.rows, grid.cols);
}

QuotientConeSpec::QuotientConeSpec(GridShape g, Index k, Index l)
    : grid(g), collapsed_rows(k), collapsed_cols(l) {
  if (k < 0 || k >= g.rows || l < 0 || l >= g.cols) {
    throw std::invalid_argument(fmt::format(
        "QuotientConeSpec: need 0 <= k < {} and 0 <= l < {}, got k={}, l={}", g.rows, g.cols, k,
        l));
  }
}

ConstraintSet QuotientConeSpec::Constraints() const {
  const Index r = grid.rows, s = grid.cols, k = collapsed_rows, l = collapsed_cols;
  std::vector<IndexPair> pairs;
  auto equal = [&](Index a, Index b) {
    pairs.push_back({a, b});
    pairs.push_back({b, a});
  };
  // Leading rows: equal within each column j >= l, nondecreasing along j.
  for (Index j = l; j < s; ++j) {
    for (Index i = 1; i < k; ++i) equal(grid.Flat(i - 1, j), grid.Flat(i, j));
    if (k > 0 && j + 1 < s) pairs.push_back({grid.Flat(0, j), grid.Flat(0, j + 1)});
  }
  // Leading columns: equal within each row i >= k, nondecreasing along i.
  for (Index i = k; i < r; ++i) {
    for (Index j = 1; j < l; ++j) equal(grid.Flat(i, j - 1), grid.Flat(i, j));
    if (l > 0 && i + 1 < r) pairs.push_back({grid.Flat(i, 0), grid.Flat(i + 1, 0)});
  }
  // Trailing block is bimonotone.
  for (Index i = k; i < r; ++i) {
    for (Index j = l; j < s; ++j) {
      if (i + 1 < r) pairs.push_back({grid.Flat(i, j), grid.Flat(i + 1, j)});
      if (j + 1 < s) pairs.push_back({grid.Flat(i, j), grid.Flat(i, j + 1)});
    }
  }
  return ConstraintSet(grid.size(), std::move(pairs));
}

bool QuotientConeSpec::Contains(const Matrix& theta, double tol) const {
  if (theta.rows() != grid.rows || theta.cols() != grid.cols) {
    throw std::invalid_argument("QuotientConeSpec::Contains: shape mismatch");
  }
  return IsFeasible(Flatten(theta), Constraints(), tol);
}

Partition Partition::FromLabels(const std::vector<Index>& labels) {
  std::vector<Index> ids(labels.size());
  std::vector<Index> sorted_labels(labels);
  std::sort(sorted_labels.begin(), sorted_labels.end());
  sorted_labels.erase(std::unique(sorted_labels.begin(), sorted_labels.end()),
                      sorted_labels.end());
  std::vector<Index> id_of(sorted_labels.size(), -1);
  Index next = 0;
  for (std::size_t u = 0; u < labels.size(); ++u) {
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(sorted_labels.begin(), sorted_labels.end(), labels[u]) -
        sorted_labels.begin());
    if (id_of[pos] < 0) id_of[pos] = next++;
    ids[u] = id_of[pos];
  }
  return Partition(std::move(ids), next);
}

Partition::Partition(std::vector<Index> block_of, Index num_blocks)
    : block_of_(std::move(block_of)), num_blocks_(num_blocks) {
  std::vector<bool> used(static_cast<std::size_t>(num_blocks_), false);
  for (Index b : block_of_) {
    if (b < 0 || b >= num_blocks_) throw std::invalid_argument("Partition: block id out of range");
    used[static_cast<std::size_t>(b)] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw std::invalid_argument("Partition: block ids are not contiguous");
  }
}

Partition Partition::Singletons(Index p) {
  std::vector<Index> ids(static_cast<std::size_t>(p));
  std::iota(ids.begin(), ids.end(), Index{0});
  return Partition(std::move(ids), p);
}

Partition Partition::Single(Index p) {
  return Partition(std::vector<Index>(static_cast<std::size_t>(p), 0), p > 0 ? 1 : 0);
}

std::vector<std::vector<Index>> Partition::Blocks() const {
  std::vector<std::vector<Index>> blocks(static_cast<std::size_t>(num_blocks_));
  for (std::size_t u = 0; u < block_of_.size(); ++u) {
    blocks[static_cast<std::size_t>(block_of_[u])].push_back(static_cast<Index>(u));
  }
  return blocks;
}

Vector Partition::Expand(const Vector& block_values) const {
  if (block_values.size() != num_blocks_) {
    throw std::invalid_argument("Partition::Expand: wrong number of block values");
  }
  Vector x(dimension());
  for (Index u = 0; u < dimension(); ++u) x[u] = block_values[block_of(u)];
  return x;
}

Vector LevelDecomposition::Reconstruct() const {
  Vector x = Vector::Constant(dimension, base);
  for (const auto& [indicator, weight] : levels) x += weight * indicator;
  return x;
}

bool IsFeasible(const Vector& x, const ConstraintSet& constraints, double tol) {
  CheckDimension(x, constraints.dimension(), "IsFeasible");
  for (const IndexPair& pr : constraints.pairs()) {
    if (!(x[pr.lower] <= x[pr.upper] + tol)) return false;
  }
  return true;
}

std::vector<Vector> ExtremalsBruteForce(const ConstraintSet& constraints) {
  const Index p = constraints.dimension();
  if (p > kBruteForceMaxDimension) {
    throw std::invalid_argument(fmt::format(
        "ExtremalsBruteForce: dimension {} exceeds the enumeration guard {}", p,
        kBruteForceMaxDimension));
  }
  std::vector<Vector> result;
  const std::uint64_t count = std::uint64_t{1} << p;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    // Index 0 is the most significant bit, so increasing masks are lexicographic.
    auto bit = [&](Index u) { return (mask >> (p - 1 - u)) & 1U; };
    bool ok = true;
    for (const IndexPair& pr : constraints.pairs()) {
      if (bit(pr.lower) > bit(pr.upper)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Vector e(p);
    for (Index u = 0; u < p; ++u) e[u] = static_cast<double>(bit(u));
    result.push_back(std::move(e));
  }
  return result;
}

LevelDecomposition DecomposeLevels(const Vector& x, const ConstraintSet& constraints) {
  if (!IsFeasible(x, constraints)) {
    throw std::invalid_argument("DecomposeLevels: input is not in the cone");
  }
  std::vector<double> values(x.data(), x.data() + x.size());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  LevelDecomposition out;
  out.dimension = x.size();
  out.base = values.front();
  for (std::size_t i = 1; i < values.size(); ++i) {
    Vector indicator = (x.array() >= values[i]).cast<double>();
    out.levels.emplace_back(std::move(indicator), values[i] - values[i - 1]);
  }
  return out;
}

Partition ActivePartition(const Vector& theta, const ConstraintSet& constraints, double tol) {
  if (!IsFeasible(theta, constraints, tol)) {
    throw std::invalid_argument("ActivePartition: theta is not in the cone");
  }
  DisjointSets sets(theta.size());
  for (const IndexPair& pr : constraints.pairs()) {
    if (std::abs(theta[pr.upper] - theta[pr.lower]) <= tol) sets.Union(pr.lower, pr.upper);
  }
  std::vector<Index> roots(static_cast<std::size_t>(theta.size()));
  for (Index u = 0; u < theta.size(); ++u) roots[static_cast<std::size_t>(u)] = sets.Find(u);
  return Partition::FromLabels(roots);
}

Partition LevelPartition(const Vector& theta) {
  std::vector<Index> order(static_cast<std::size_t>(theta.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return theta[a] < theta[b]; });
  std::vector<Index> ids(order.size());
  Index block = -1;
  for (std::size_t n = 0; n < order.size(); ++n) {
    if (n == 0 || theta[order[n]] != theta[order[n - 1]]) ++block;
    ids[static_cast<std::size_t>(order[n])] = block;
  }
  return Partition(std::move(ids), block + 1);
}

double StepLength(const Vector& theta, const Vector& x, const ConstraintSet& constraints,
                  double tol) {
  CheckDimension(theta, constraints.dimension(), "StepLength");
  CheckDimension(x, constraints.dimension(), "StepLength");
  if (!IsFeasible(theta, constraints, tol)) {
    throw std::invalid_argument("StepLength: theta is not in the cone");
  }
  double t = 1.0;
  for (const IndexPair& pr : constraints.pairs()) {
    const double gap = theta[pr.upper] - theta[pr.lower];
    const double excess = x[pr.lower] - x[pr.upper];
    if (gap <= tol) {
      if (std::abs(excess) > tol) {
        throw std::invalid_argument(fmt::format(
            "StepLength: x breaks the active constraint ({}, {}) of theta", pr.lower, pr.upper));
      }
      continue;
    }
    if (excess > 0.0) t = std::min(t, gap / (gap + excess));
  }
  return t;
}

double StepLengthComplete(const Vector& theta, const Vector& x, double tol) {
  if (theta.size() != x.size()) throw std::invalid_argument("StepLengthComplete: size mismatch");
  const Partition levels = LevelPartition(theta);
  const Index q = levels.num_blocks();
  Vector theta_level(q), x_level(q);
  std::vector<bool> seen(static_cast<std::size_t>(q), false);
  for (Index u = 0; u < theta.size(); ++u) {
    const Index b = levels.block_of(u);
    if (!seen[static_cast<std::size_t>(b)]) {
      seen[static_cast<std::size_t>(b)] = true;
      theta_level[b] = theta[u];
      x_level[b] = x[u];
    } else if (std::abs(x[u] - x_level[b]) > tol) {
      throw std::invalid_argument("StepLengthComplete: x is not constant on the level sets");
    }
  }
  double t = 1.0;
  for (Index b = 1; b < q; ++b) {
    const double gap = theta_level[b] - theta_level[b - 1];
    const double excess = x_level[b - 1] - x_level[b];
    if (excess > 0.0) t = std::min(t, gap / (gap + excess));
  }
  return t;
}

}  // namespace bimono
