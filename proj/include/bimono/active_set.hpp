#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bimono/linear_dp.hpp"
#include "bimono/order_cone.hpp"
#include "bimono/quadratic.hpp"

namespace bimono {

// An order cone together with a way to minimize linear functionals over its
// 0/1 members: the lattice dynamic program for bimonotone grids, the
// decomposed program for quotient cones, exhaustive search otherwise.
class OrderCone {
 public:
  static OrderCone Generic(ConstraintSet constraints);
  static OrderCone Bimonotone(GridShape grid);
  static OrderCone Quotient(QuotientConeSpec spec);

  Index dimension() const { return constraints_.dimension(); }
  const ConstraintSet& constraints() const { return constraints_; }

  LinearMinimum MinimizeLinear(const Vector& coefficients) const;

 private:
  enum class Kind { kGeneric, kBimonotone, kQuotient };
  OrderCone(Kind kind, ConstraintSet constraints) : kind_(kind), constraints_(std::move(constraints)) {}

  Kind kind_;
  ConstraintSet constraints_;
  QuotientConeSpec quotient_;
};

// How the "locally optimal" point is recomputed between optimality checks:
// active-constraint subspaces (2a), level-set subspaces (2b), or a direct PAVA
// solve over the level-set cone (2c, weighted least squares only).
enum class Strategy { k2a, k2b, k2c };

std::string ToString(Strategy s);
Strategy StrategyFromString(const std::string& name);

struct SolverConfig {
  Strategy strategy = Strategy::k2c;
  // Multiplied by QuadraticObjective::Scale().
  double certificate_tolerance = 1e-9;
  // 0 selects 10 * p.
  Index max_outer_iterations = 0;
};

struct Certificate {
  double grad_dot_theta = 0.0;
  double grad_dot_ones = 0.0;
  double min_slope = 0.0;  // min over extremals e of grad' e
  double tolerance = 0.0;  // absolute, after scaling

  bool Holds() const {
    return std::abs(grad_dot_theta) <= tolerance && std::abs(grad_dot_ones) <= tolerance &&
           min_slope >= -tolerance;
  }
};

struct SolveResult {
  Vector theta;
  Certificate certificate;
  Index outer_iterations = 0;
  Index subspace_solves = 0;
  double objective = 0.0;
  // Set when some reduced system was singular; the minimizer is then unique
  // only on the coordinates the objective actually sees.
  bool used_pseudoinverse = false;
  // Objective after each locally optimal point, starting with the constant fit.
  std::vector<double> objective_trace;
};

struct OptimalityCheck {
  Vector direction;  // an extremal, or -1
  double slope = 0.0;
  bool minus_ones = false;
};

// Bookkeeping shared by the procedures.
struct ProcedureStats {
  Index subspace_solves = 0;
  bool used_pseudoinverse = false;
};

// Requires grad' theta = 0 = grad' 1 within `tol` (absolute).
OptimalityCheck CheckOptimality(const QuadraticObjective& q, const Vector& theta,
                                const OrderCone& cone, double tol);

// theta + t_o direction with t_o the exact line minimizer; requires a negative
// slope along the direction.
Vector ImproveStep(const QuadraticObjective& q, const Vector& theta, const Vector& direction);

Vector Procedure2a(const QuadraticObjective& q, const Vector& theta,
                   const ConstraintSet& constraints, ProcedureStats* stats = nullptr);
Vector Procedure2b(const QuadraticObjective& q, const Vector& theta,
                   ProcedureStats* stats = nullptr);
Vector Procedure2c(const QuadraticObjective& q, const Vector& theta,
                   ProcedureStats* stats = nullptr);

// Minimizes q over the cone, starting from the best constant vector and
// alternating optimality checks with the configured procedure until the
// extremal certificate holds.
SolveResult Solve(const QuadraticObjective& q, const OrderCone& cone,
                  const SolverConfig& config = {});

}  // namespace bimono
