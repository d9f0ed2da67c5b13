#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace bimono {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised when an iterative procedure breaks one of its own invariants or fails
// to certify a result.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A single order constraint theta[lower] <= theta[upper].
struct IndexPair {
  Index lower = 0;
  Index upper = 0;
  auto operator<=>(const IndexPair&) const = default;
};

// Finite collection of order constraints on R^p. Pairs are sorted and
// deduplicated on construction.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  ConstraintSet(Index dimension, std::vector<IndexPair> pairs);

  Index dimension() const { return dimension_; }
  const std::vector<IndexPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

 private:
  Index dimension_ = 0;
  std::vector<IndexPair> pairs_;
};

// r x s grid, identified with R^{rs} through the row-major map (i, j) -> i*s + j.
struct GridShape {
  Index rows = 1;
  Index cols = 1;

  GridShape() = default;
  GridShape(Index r, Index s);

  Index size() const { return rows * cols; }
  Index Flat(Index i, Index j) const { return i * cols + j; }
  Index Row(Index u) const { return u / cols; }
  Index Col(Index u) const { return u % cols; }
};

// The 2rs - r - s neighbour constraints making a matrix nondecreasing along
// rows and columns.
ConstraintSet BimonotoneConstraints(const GridShape& grid);

// Row-major flattening between r x s matrices and vectors of length rs.
Vector Flatten(const Matrix& m);
Matrix Unflatten(const Vector& v, const GridShape& grid);

// The cone of matrices whose first `collapsed_rows` rows coincide and are
// nondecreasing beyond column `collapsed_cols`, whose first `collapsed_cols`
// columns coincide and are nondecreasing beyond row `collapsed_rows`, and whose
// trailing block is bimonotone. The leading collapsed_rows x collapsed_cols
// corner is unconstrained.
struct QuotientConeSpec {
  GridShape grid;
  Index collapsed_rows = 0;
  Index collapsed_cols = 0;

  QuotientConeSpec() = default;
  QuotientConeSpec(GridShape g, Index k, Index l);

  bool Contains(const Matrix& theta, double tol = 0.0) const;
  // Equalities are encoded as pairs in both directions.
  ConstraintSet Constraints() const;
};

// Grouping of {0, ..., p-1} into blocks with contiguous ids 0..q-1.
class Partition {
 public:
  Partition() = default;
  // Relabels arbitrary labels to contiguous ids in order of first appearance.
  static Partition FromLabels(const std::vector<Index>& labels);
  // Takes labels that are already contiguous ids in [0, num_blocks).
  Partition(std::vector<Index> block_of, Index num_blocks);

  static Partition Singletons(Index p);
  static Partition Single(Index p);

  Index dimension() const { return static_cast<Index>(block_of_.size()); }
  Index num_blocks() const { return num_blocks_; }
  Index block_of(Index u) const { return block_of_[static_cast<std::size_t>(u)]; }
  const std::vector<Index>& labels() const { return block_of_; }
  std::vector<std::vector<Index>> Blocks() const;

  // Expands per-block values to a vector constant on blocks.
  Vector Expand(const Vector& block_values) const;

 private:
  std::vector<Index> block_of_;
  Index num_blocks_ = 0;
};

struct LevelDecomposition {
  Index dimension = 0;
  double base = 0.0;
  std::vector<std::pair<Vector, double>> levels;  // (0/1 indicator, weight >= 0)

  Vector Reconstruct() const;
};

bool IsFeasible(const Vector& x, const ConstraintSet& constraints, double tol = 0.0);

// All feasible 0/1 vectors in lexicographic order (index 0 most significant).
std::vector<Vector> ExtremalsBruteForce(const ConstraintSet& constraints);
inline constexpr Index kBruteForceMaxDimension = 22;

LevelDecomposition DecomposeLevels(const Vector& x, const ConstraintSet& constraints);

// Connected components of the graph whose edges are the active constraints
// |theta_u - theta_v| <= tol. Blocks are numbered by their smallest member.
Partition ActivePartition(const Vector& theta, const ConstraintSet& constraints,
                          double tol = 0.0);

// Level sets of theta, numbered by increasing value.
Partition LevelPartition(const Vector& theta);

// Largest t in [0, 1] with (1 - t) theta + t x feasible. x must satisfy every
// constraint that is active at theta as an equality, up to `tol`.
double StepLength(const Vector& theta, const Vector& x, const ConstraintSet& constraints,
                  double tol = 0.0);

// Same for the complete-order cone of theta: consecutive level sets of theta
// must stay ordered. x must be constant on the level sets of theta.
double StepLengthComplete(const Vector& theta, const Vector& x, double tol = 0.0);

}  // namespace bimono
