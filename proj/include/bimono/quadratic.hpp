#pragma once

#include <variant>

#include <Eigen/SparseCore>

#include "bimono/order_cone.hpp"

namespace bimono {

// Q(theta) = sum_u w_u (Z_u - theta_u)^2. Entries of Z with zero weight are
// ignored and may be NaN.
struct DiagonalWls {
  Vector weights;
  Vector data;
};

// DiagonalWls plus lambda * sum over the grid's neighbour pairs of
// (theta_v - theta_u)^2.
struct PenalizedWls {
  Vector weights;
  Vector data;
  double lambda = 0.0;
  GridShape grid;
};

// Q(theta) = 0.5 theta' H theta + g' theta + c.
struct GeneralQuadratic {
  Matrix hessian;
  Vector linear;
  double constant = 0.0;
};

class QuadraticObjective {
 public:
  using Form = std::variant<DiagonalWls, PenalizedWls, GeneralQuadratic>;

  static QuadraticObjective Wls(Vector weights, Vector data);
  static QuadraticObjective Penalized(Vector weights, Vector data, double lambda, GridShape grid);
  static QuadraticObjective General(Matrix hessian, Vector linear, double constant = 0.0);

  const Form& form() const { return form_; }
  Index dimension() const;
  bool is_diagonal_wls() const { return std::holds_alternative<DiagonalWls>(form_); }

  double Value(const Vector& theta) const;
  Vector Gradient(const Vector& theta) const;
  // d' H d, the second derivative of t -> Q(theta + t d).
  double Curvature(const Vector& direction) const;
  // Dense Hessian; intended for small problems and tests.
  Matrix DenseHessian() const;
  // Unit used to make tolerances scale-free: max(1, |Z|_inf |w|_inf) for the
  // least-squares forms and max(1, |g|_inf) for a general quadratic.
  double Scale() const;
  // The same function written as a GeneralQuadratic.
  QuadraticObjective ToGeneral() const;

 private:
  explicit QuadraticObjective(Form form) : form_(std::move(form)) {}
  Form form_;
};

inline double Eval(const QuadraticObjective& q, const Vector& theta) { return q.Value(theta); }
inline Vector Gradient(const QuadraticObjective& q, const Vector& theta) {
  return q.Gradient(theta);
}

struct SubspaceSolveReport {
  Vector minimizer;
  Index reduced_dimension = 0;
  bool used_pseudoinverse = false;
};

// Minimizes Q over the vectors that are constant on every block of the
// partition. Singular reduced systems get the minimum-norm solution.
SubspaceSolveReport MinimizeOverPartition(const QuadraticObjective& q, const Partition& partition);

// argmin_t Q(theta + t direction) in closed form.
double LineMinimize(const QuadraticObjective& q, const Vector& theta, const Vector& direction);

}  // namespace bimono
