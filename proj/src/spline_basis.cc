#include "bimono/spline_basis.hpp"

#include <cmath>

#include <Eigen/SVD>
#include <fmt/format.h>

namespace bimono {
namespace {

constexpr double kSignTie = 1e-9;

Vector Standardize(const Vector& design) {
  const Index r = design.size();
  for (Index i = 0; i < r; ++i) {
    if (!std::isfinite(design[i])) throw std::invalid_argument("design points must be finite");
    if (i > 0 && !(design[i - 1] < design[i])) {
      throw std::invalid_argument("design points must be strictly increasing");
    }
  }
  if (r == 1) return Vector::Zero(1);
  const double lo = design[0], hi = design[r - 1];
  return ((design.array() - lo) * (2.0 / (hi - lo)) - 1.0).matrix();
}

void FixSign(Eigen::Ref<Vector> column) {
  Index best = 0;
  double best_abs = -1.0;
  for (Index i = 0; i < column.size(); ++i) {
    const double a = std::abs(column[i]);
    if (a >= best_abs - kSignTie) {
      if (a > best_abs) best_abs = a;
      best = i;
    }
  }
  if (column[best] < 0.0) column = -column;
}

void RequireShape(const Matrix& m, const SplineBasis& basis, const char* what) {
  if (m.rows() != basis.r() || m.cols() != basis.s()) {
    throw std::invalid_argument(fmt::format("{}: expected {}x{} matrix, got {}x{}", what, basis.r(),
                                            basis.s(), m.rows(), m.cols()));
  }
}

}  // namespace

Annihilator BuildAnnihilator(const Vector& design, Index degree) {
  const Index r = design.size();
  if (degree < 1) throw std::invalid_argument("BuildAnnihilator: degree must be at least 1");
  if (r <= degree) {
    throw std::invalid_argument(fmt::format(
        "BuildAnnihilator: need more than {} design points, got {}", degree, r));
  }
  const Vector t = Standardize(design);
  Annihilator a{degree, design, Matrix::Zero(r - degree, r)};
  for (Index i = 0; i + degree < r; ++i) {
    Vector row(degree + 1);
    for (Index m = 0; m <= degree; ++m) {
      double prod = 1.0;
      for (Index n = 0; n <= degree; ++n) {
        if (n != m) prod *= t[i + m] - t[i + n];
      }
      row[m] = 1.0 / prod;
    }
    row /= row.norm();
    if (row[0] < 0.0) row = -row;
    a.rows.block(i, i, 1, degree + 1) = row.transpose();
  }
  return a;
}

BasisFactor BuildBasis(const Annihilator& annihilator) {
  const Index r = annihilator.rows.cols();
  const Index k = annihilator.degree;
  if (annihilator.rows.rows() != r - k || k < 1) {
    throw std::invalid_argument("BuildBasis: malformed annihilator");
  }
  const Vector t = Standardize(annihilator.design);

  BasisFactor f;
  f.degree = k;
  f.basis.resize(r, r);
  f.basis.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(r)));
  Vector power = Vector::Ones(r);
  for (Index e = 1; e < k; ++e) {
    power = power.cwiseProduct(t);
    Vector v = power;
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (Index c = 0; c < e; ++c) v -= f.basis.col(c).dot(v) * f.basis.col(c);
    }
    v /= v.norm();
    FixSign(v);
    f.basis.col(e) = v;
  }

  Eigen::BDCSVD<Matrix> svd(annihilator.rows, Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("BuildBasis: SVD failed");
  const Vector sv = svd.singularValues();  // descending, length r - k
  const Index n = sv.size();
  f.singular_values.resize(n);
  for (Index j = 0; j < n; ++j) {
    const Index src = n - 1 - j;
    f.singular_values[j] = sv[src];
    Vector v = svd.matrixV().col(src);
    FixSign(v);
    f.basis.col(k + j) = v;
  }
  return f;
}

SplineBasis MakeSplineBasis(const Vector& xs, const Vector& ys, Index k, Index l) {
  return {BuildBasis(BuildAnnihilator(xs, k)), BuildBasis(BuildAnnihilator(ys, l))};
}

Matrix Transform(const Matrix& z, const SplineBasis& basis) {
  RequireShape(z, basis, "Transform");
  return basis.U().transpose() * z * basis.V();
}

Matrix InverseTransform(const Matrix& coefficients, const SplineBasis& basis) {
  RequireShape(coefficients, basis, "InverseTransform");
  return basis.U() * coefficients * basis.V().transpose();
}

Decomposition Decompose(const Matrix& coefficients, const SplineBasis& basis,
                        DecompositionKind kind) {
  RequireShape(coefficients, basis, "Decompose");
  const Index r = basis.r(), s = basis.s();
  const Index kr = kind == DecompositionKind::kFirstRowColumn ? 1 : basis.rows.degree;
  const Index kc = kind == DecompositionKind::kFirstRowColumn ? 1 : basis.cols.degree;

  Matrix constant = Matrix::Zero(r, s), additive = Matrix::Zero(r, s);
  constant(0, 0) = coefficients(0, 0);
  additive.topRows(kr) = coefficients.topRows(kr);
  additive.leftCols(kc) = coefficients.leftCols(kc);
  additive(0, 0) = 0.0;
  const Matrix interaction = coefficients - constant - additive;
  return {InverseTransform(constant, basis), InverseTransform(additive, basis),
          InverseTransform(interaction, basis)};
}

}  // namespace bimono
