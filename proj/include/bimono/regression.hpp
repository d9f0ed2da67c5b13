#pragma once

#include <optional>
#include <vector>

#include "bimono/active_set.hpp"

namespace bimono {

struct Observation {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Two-way layout on the grid xs x ys. `means` is meaningful only where
// weights > 0; elsewhere it holds NaN.
struct LayoutData {
  Vector xs;
  Vector ys;
  Matrix weights;
  Matrix means;

  GridShape grid() const { return {xs.size(), ys.size()}; }
  bool complete() const { return (weights.array() > 0.0).all(); }
  Index observed_cells() const { return (weights.array() > 0.0).count(); }
};

// Grid = sorted distinct observed coordinates merged with the extras; cell
// weights count observations and cell means average them.
LayoutData Aggregate(const std::vector<Observation>& observations,
                     const std::vector<double>& extra_xs = {},
                     const std::vector<double>& extra_ys = {});

// Matrix input: NaN entries are missing cells. Design points default to
// 1..r and 1..s. Weights, when given, must be positive exactly on the
// observed cells' support or zero.
LayoutData LayoutFromMatrix(const Matrix& values, const std::optional<Matrix>& weights = {},
                            std::optional<Vector> xs = {}, std::optional<Vector> ys = {});

enum class FitSetting { kComplete, kSimpleEnvelope, kLightRegularization };

const char* ToString(FitSetting setting);

struct FitResult {
  Matrix theta;
  FitSetting setting = FitSetting::kComplete;
  // Simple envelope only.
  std::optional<Matrix> lower;
  std::optional<Matrix> upper;
  // The raw solver output (theta-check for the simple envelope).
  SolveResult solve;
};

inline constexpr double kDefaultLightLambda = 1e-4;

FitResult FitComplete(const LayoutData& data, const SolverConfig& config = {});

FitResult FitIncompleteSimple(const LayoutData& data, const SolverConfig& config = {});

// Strategy 2c is not available for the penalized objective; it is replaced
// by 2a.
FitResult FitIncompleteRegularized(const LayoutData& data, double lambda = kDefaultLightLambda,
                                   SolverConfig config = {});

// Running max over observed cells to the lower left and running min over
// observed cells to the upper right, with the observed extremes as fallback.
struct Envelopes {
  Matrix lower;
  Matrix upper;
};
Envelopes ComputeEnvelopes(const Matrix& theta_check, const Matrix& weights);

double AverageAbsoluteDeviation(const Matrix& estimate, const Matrix& truth);

}  // namespace bimono
