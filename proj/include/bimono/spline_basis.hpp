#pragma once

#include "bimono/order_cone.hpp"

namespace bimono {

// Banded (r - k) x r matrix with unit rows; row i is supported on columns
// i..i+k and annihilates polynomials of degree < k in the design points.
struct Annihilator {
  Index degree = 0;
  Vector design;
  Matrix rows;
};

// The design is mapped affinely onto [-1, 1] first; row weights are the
// divided-difference coefficients of the local window, normalized, with the
// first nonzero entry positive.
Annihilator BuildAnnihilator(const Vector& design, Index degree);

// One orthonormal factor of the two-way spline basis.
struct BasisFactor {
  Matrix basis;             // columns u_1..u_r
  Vector singular_values;   // a_1 <= ... <= a_{r-k}
  Index degree = 0;
};

// Columns 1..k: Gram-Schmidt on 1, t, t^2, ... of the standardized design,
// starting with r^{-1/2} 1. Remaining columns: right singular vectors of the
// annihilator in ascending singular-value order. Each column except the
// first is signed so that its entry of largest magnitude is positive (ties go
// to the last such entry).
BasisFactor BuildBasis(const Annihilator& annihilator);

struct SplineBasis {
  BasisFactor rows;  // U
  BasisFactor cols;  // V

  Index r() const { return rows.basis.rows(); }
  Index s() const { return cols.basis.rows(); }
  const Matrix& U() const { return rows.basis; }
  const Matrix& V() const { return cols.basis; }
};

SplineBasis MakeSplineBasis(const Vector& xs, const Vector& ys, Index k, Index l);

// U' Z V and its inverse U C V'.
Matrix Transform(const Matrix& z, const SplineBasis& basis);
Matrix InverseTransform(const Matrix& coefficients, const SplineBasis& basis);

// kFirstRowColumn: additive part = first row and first column of the
// coefficients, minus the (1,1) constant. kPolynomialBlocks: additive part =
// first k rows and first l columns, minus the (1,1) constant.
enum class DecompositionKind { kFirstRowColumn, kPolynomialBlocks };

struct Decomposition {
  Matrix constant;
  Matrix additive;
  Matrix interaction;
};

Decomposition Decompose(const Matrix& coefficients, const SplineBasis& basis,
                        DecompositionKind kind = DecompositionKind::kFirstRowColumn);

}  // namespace bimono
