#pragma once

#include "bimono/order_cone.hpp"

namespace bimono {

// Minimizer of L(e) = sum_ij a_ij e_ij over the 0/1 members of a cone.
struct GridLinearMinimum {
  Matrix extremal;
  double value = 0.0;
};

struct LinearMinimum {
  Vector extremal;
  double value = 0.0;
};

// Suffix sums and value table of the lattice dynamic program, 1-based as in
// the recursion: b is (r+2) x (s+2) with b(k, l) = sum_{j >= l} a(k, j), and
// H is (r+2) x (s+2) with H(r+1, .) = 0.
struct DpTableau {
  Matrix suffix_sums;
  Matrix values;
};

DpTableau BuildDpTableau(const Matrix& coefficients);

// Minimizes L over the bimonotone 0/1 matrices in O(rs). Ties resolve toward
// the pointwise-largest minimizer reachable by the backtracking walk.
GridLinearMinimum DpMinLinear(const Matrix& coefficients);

// Minimizes L over the 0/1 members of the quotient cone with k collapsed rows
// and l collapsed columns. The three constraint groups share no variables, so
// each is minimized separately.
GridLinearMinimum MinLinearQuotient(const Matrix& coefficients, Index k, Index l);

// Exhaustive minimum over ExtremalsBruteForce(constraints); ties go to the
// lexicographically smallest extremal.
LinearMinimum BruteMinLinear(const Vector& coefficients, const ConstraintSet& constraints);

}  // namespace bimono
