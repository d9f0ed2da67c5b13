#include "bimono/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace bimono {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vector SortedDistinct(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

void RequireIncreasing(const Vector& v, const char* what) {
  for (Index i = 1; i < v.size(); ++i) {
    if (!(v[i - 1] < v[i])) {
      throw std::invalid_argument(fmt::format("{} design points must be strictly increasing", what));
    }
  }
}

Index Locate(const Vector& grid, double value) {
  const double* begin = grid.data();
  const double* it = std::lower_bound(begin, begin + grid.size(), value);
  return static_cast<Index>(it - begin);
}

FitResult SolveWls(const LayoutData& data, const SolverConfig& config) {
  const GridShape grid = data.grid();
  Vector data_flat = Flatten(data.means);
  const Vector w = Flatten(data.weights);
  for (Index u = 0; u < w.size(); ++u) {
    if (w[u] == 0.0) data_flat[u] = 0.0;
  }
  const QuadraticObjective q = QuadraticObjective::Wls(w, data_flat);
  FitResult result;
  result.solve = Solve(q, OrderCone::Bimonotone(grid), config);
  result.theta = Unflatten(result.solve.theta, grid);
  return result;
}

}  // namespace

LayoutData Aggregate(const std::vector<Observation>& observations,
                     const std::vector<double>& extra_xs, const std::vector<double>& extra_ys) {
  if (observations.empty()) throw std::invalid_argument("Aggregate: no observations");
  std::vector<double> xs(extra_xs), ys(extra_ys);
  for (const Observation& o : observations) {
    if (!std::isfinite(o.x) || !std::isfinite(o.y) || !std::isfinite(o.z)) {
      throw std::invalid_argument("Aggregate: non-finite observation");
    }
    xs.push_back(o.x);
    ys.push_back(o.y);
  }
  LayoutData data;
  data.xs = SortedDistinct(std::move(xs));
  data.ys = SortedDistinct(std::move(ys));
  const Index r = data.xs.size(), s = data.ys.size();
  data.weights = Matrix::Zero(r, s);
  Matrix sums = Matrix::Zero(r, s);
  for (const Observation& o : observations) {
    const Index i = Locate(data.xs, o.x), j = Locate(data.ys, o.y);
    data.weights(i, j) += 1.0;
    sums(i, j) += o.z;
  }
  data.means = Matrix::Constant(r, s, kNaN);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < s; ++j) {
      if (data.weights(i, j) > 0.0) data.means(i, j) = sums(i, j) / data.weights(i, j);
    }
  }
  return data;
}

LayoutData LayoutFromMatrix(const Matrix& values, const std::optional<Matrix>& weights,
                            std::optional<Vector> xs, std::optional<Vector> ys) {
  const Index r = values.rows(), s = values.cols();
  if (r < 1 || s < 1) throw std::invalid_argument("LayoutFromMatrix: empty matrix");
  LayoutData data;
  data.xs = xs ? *xs : Vector(Vector::LinSpaced(r, 1.0, static_cast<double>(r)));
  data.ys = ys ? *ys : Vector(Vector::LinSpaced(s, 1.0, static_cast<double>(s)));
  if (data.xs.size() != r || data.ys.size() != s) {
    throw std::invalid_argument("LayoutFromMatrix: design length does not match the matrix");
  }
  RequireIncreasing(data.xs, "row");
  RequireIncreasing(data.ys, "column");
  if (weights && (weights->rows() != r || weights->cols() != s)) {
    throw std::invalid_argument("LayoutFromMatrix: weight matrix shape mismatch");
  }
  data.weights = Matrix::Zero(r, s);
  data.means = Matrix::Constant(r, s, kNaN);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < s; ++j) {
      const double w = weights ? (*weights)(i, j) : 1.0;
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument(fmt::format("LayoutFromMatrix: bad weight at ({}, {})", i + 1, j + 1));
      }
      if (std::isnan(values(i, j)) || w == 0.0) continue;
      if (!std::isfinite(values(i, j))) {
        throw std::invalid_argument(fmt::format("LayoutFromMatrix: non-finite value at ({}, {})", i + 1, j + 1));
      }
      data.weights(i, j) = w;
      data.means(i, j) = values(i, j);
    }
  }
  if (data.observed_cells() == 0) throw std::invalid_argument("LayoutFromMatrix: no observed cells");
  return data;
}

const char* ToString(FitSetting setting) {
  switch (setting) {
    case FitSetting::kComplete:
      return "complete";
    case FitSetting::kSimpleEnvelope:
      return "simple";
    case FitSetting::kLightRegularization:
      return "lightreg";
  }
  return "?";
}

FitResult FitComplete(const LayoutData& data, const SolverConfig& config) {
  if (!data.complete()) throw std::invalid_argument("FitComplete: layout has missing cells");
  FitResult result = SolveWls(data, config);
  result.setting = FitSetting::kComplete;
  return result;
}

Envelopes ComputeEnvelopes(const Matrix& theta_check, const Matrix& weights) {
  const Index r = theta_check.rows(), s = theta_check.cols();
  if (weights.rows() != r || weights.cols() != s) {
    throw std::invalid_argument("ComputeEnvelopes: shape mismatch");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < s; ++j) {
      if (weights(i, j) > 0.0) {
        lo = std::min(lo, theta_check(i, j));
        hi = std::max(hi, theta_check(i, j));
      }
    }
  }
  if (!std::isfinite(lo)) throw std::invalid_argument("ComputeEnvelopes: no observed cells");

  Envelopes env{Matrix(r, s), Matrix(r, s)};
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < s; ++j) {
      double v = weights(i, j) > 0.0 ? std::max(lo, theta_check(i, j)) : lo;
      if (i > 0) v = std::max(v, env.lower(i - 1, j));
      if (j > 0) v = std::max(v, env.lower(i, j - 1));
      env.lower(i, j) = v;
    }
  }
  for (Index i = r - 1; i >= 0; --i) {
    for (Index j = s - 1; j >= 0; --j) {
      double v = weights(i, j) > 0.0 ? std::min(hi, theta_check(i, j)) : hi;
      if (i + 1 < r) v = std::min(v, env.upper(i + 1, j));
      if (j + 1 < s) v = std::min(v, env.upper(i, j + 1));
      env.upper(i, j) = v;
    }
  }
  return env;
}

FitResult FitIncompleteSimple(const LayoutData& data, const SolverConfig& config) {
  if (data.observed_cells() == 0) throw std::invalid_argument("FitIncompleteSimple: no observed cells");
  FitResult result = SolveWls(data, config);
  result.setting = FitSetting::kSimpleEnvelope;
  Envelopes env = ComputeEnvelopes(result.theta, data.weights);
  result.theta = 0.5 * (env.lower + env.upper);
  result.lower = std::move(env.lower);
  result.upper = std::move(env.upper);
  return result;
}

FitResult FitIncompleteRegularized(const LayoutData& data, double lambda, SolverConfig config) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("FitIncompleteRegularized: lambda must be positive");
  }
  if (data.observed_cells() == 0) {
    throw std::invalid_argument("FitIncompleteRegularized: no observed cells");
  }
  if (config.strategy == Strategy::k2c) config.strategy = Strategy::k2a;
  const GridShape grid = data.grid();
  Vector z = Flatten(data.means);
  const Vector w = Flatten(data.weights);
  for (Index u = 0; u < w.size(); ++u) {
    if (w[u] == 0.0) z[u] = 0.0;
  }
  const QuadraticObjective q = QuadraticObjective::Penalized(w, z, lambda, grid);
  FitResult result;
  result.setting = FitSetting::kLightRegularization;
  result.solve = Solve(q, OrderCone::Bimonotone(grid), config);
  result.theta = Unflatten(result.solve.theta, grid);
  return result;
}

double AverageAbsoluteDeviation(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols() || estimate.size() == 0) {
    throw std::invalid_argument("AverageAbsoluteDeviation: shape mismatch");
  }
  return (estimate - truth).cwiseAbs().mean();
}

}  // namespace bimono
