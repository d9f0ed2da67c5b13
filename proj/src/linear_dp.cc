#include "bimono/linear_dp.hpp"

#include <limits>

#include <fmt/format.h>

namespace bimono {
namespace {

void CheckCoefficients(const Matrix& a, const char* what) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw std::invalid_argument(fmt::format("{}: empty coefficient matrix", what));
  }
  if (!a.allFinite()) {
    throw std::invalid_argument(fmt::format("{}: coefficients must be finite", what));
  }
}

// Minimum over nondecreasing 0/1 chains of sum_n c_n e_n: the chain is a
// suffix of ones starting at `start` (start == size means all zeros).
std::pair<Index, double> MinSuffix(const Vector& c) {
  Index best_start = c.size();
  double best = 0.0;
  double running = 0.0;
  for (Index n = c.size() - 1; n >= 0; --n) {
    running += c[n];
    if (running <= best) {
      best = running;
      best_start = n;
    }
  }
  return {best_start, best};
}

}  // namespace

DpTableau BuildDpTableau(const Matrix& a) {
  CheckCoefficients(a, "BuildDpTableau");
  const Index r = a.rows(), s = a.cols();
  DpTableau t;
  t.suffix_sums = Matrix::Zero(r + 2, s + 2);
  t.values = Matrix::Zero(r + 2, s + 2);
  Matrix& b = t.suffix_sums;
  Matrix& h = t.values;
  for (Index k = 1; k <= r; ++k) {
    for (Index l = s; l >= 1; --l) b(k, l) = b(k, l + 1) + a(k - 1, l - 1);
  }
  for (Index k = r; k >= 1; --k) {
    h(k, 1) = h(k + 1, 1) + b(k, 1);
    for (Index l = 1; l <= s; ++l) {
      h(k, l + 1) = std::min(h(k, l), b(k, l + 1) + h(k + 1, l + 1));
    }
  }
  return t;
}

GridLinearMinimum DpMinLinear(const Matrix& a) {
  const DpTableau t = BuildDpTableau(a);
  const Index r = a.rows(), s = a.cols();
  const Matrix& h = t.values;

  GridLinearMinimum out;
  out.extremal = Matrix::Zero(r, s);
  Index k = 1, l = s;
  while (k <= r && l >= 1) {
    if (h(k, l + 1) == h(k, l)) {
      out.extremal.block(k - 1, l - 1, r - k + 1, 1).setOnes();
      --l;
    } else {
      ++k;
    }
  }
  out.value = h(1, s + 1);
  return out;
}

GridLinearMinimum MinLinearQuotient(const Matrix& a, Index k, Index l) {
  CheckCoefficients(a, "MinLinearQuotient");
  const Index r = a.rows(), s = a.cols();
  if (k < 0 || k >= r || l < 0 || l >= s) {
    throw std::invalid_argument(fmt::format(
        "MinLinearQuotient: need 0 <= k < {} and 0 <= l < {}, got k={}, l={}", r, s, k, l));
  }
  GridLinearMinimum out;
  out.extremal = Matrix::Zero(r, s);
  double value = 0.0;

  // Unconstrained corner.
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < l; ++j) {
      if (a(i, j) < 0.0) {
        out.extremal(i, j) = 1.0;
        value += a(i, j);
      }
    }
  }
  // Collapsed leading rows form one chain over columns l..s-1.
  if (k > 0) {
    const Vector c = a.block(0, l, k, s - l).colwise().sum().transpose();
    const auto [start, v] = MinSuffix(c);
    out.extremal.block(0, l + start, k, s - l - start).setOnes();
    value += v;
  }
  // Collapsed leading columns form one chain over rows k..r-1.
  if (l > 0) {
    const Vector d = a.block(k, 0, r - k, l).rowwise().sum();
    const auto [start, v] = MinSuffix(d);
    out.extremal.block(k + start, 0, r - k - start, l).setOnes();
    value += v;
  }
  const GridLinearMinimum trailing = DpMinLinear(a.block(k, l, r - k, s - l));
  out.extremal.block(k, l, r - k, s - l) = trailing.extremal;
  out.value = value + trailing.value;
  return out;
}

LinearMinimum BruteMinLinear(const Vector& coefficients, const ConstraintSet& constraints) {
  if (coefficients.size() != constraints.dimension()) {
    throw std::invalid_argument("BruteMinLinear: dimension mismatch");
  }
  LinearMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  for (Vector& e : ExtremalsBruteForce(constraints)) {
    const double v = coefficients.dot(e);
    if (v < best.value) {
      best.value = v;
      best.extremal = std::move(e);
    }
  }
  return best;
}

}  // namespace bimono
