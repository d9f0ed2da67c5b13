#include "bimono/quadratic.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

namespace bimono {
namespace {

// Reduced systems up to this size are factored densely.
constexpr Index kDenseReducedLimit = 256;
constexpr double kPseudoInverseThreshold = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void CheckWeights(Vector& weights, Vector& data, const char* what) {
  if (weights.size() != data.size() || weights.size() == 0) {
    throw std::invalid_argument(fmt::format("{}: weights and data must have equal positive length",
                                            what));
  }
  bool any_positive = false;
  for (Index u = 0; u < weights.size(); ++u) {
    if (!std::isfinite(weights[u]) || weights[u] < 0.0) {
      throw std::invalid_argument(fmt::format("{}: weight {} is negative or not finite", what, u));
    }
    if (weights[u] == 0.0) {
      data[u] = 0.0;
    } else {
      any_positive = true;
      if (!std::isfinite(data[u])) {
        throw std::invalid_argument(fmt::format("{}: data value {} is not finite", what, u));
      }
    }
  }
  if (!any_positive) throw std::invalid_argument(fmt::format("{}: all weights are zero", what));
}

template <class Fn>
void ForEachGridEdge(const GridShape& grid, Fn&& fn) {
  for (Index i = 0; i < grid.rows; ++i) {
    for (Index j = 0; j < grid.cols; ++j) {
      const Index u = grid.Flat(i, j);
      if (i + 1 < grid.rows) fn(u, grid.Flat(i + 1, j));
      if (j + 1 < grid.cols) fn(u, grid.Flat(i, j + 1));
    }
  }
}

double WlsValue(const Vector& w, const Vector& z, const Vector& theta) {
  double total = 0.0;
  for (Index u = 0; u < w.size(); ++u) {
    if (w[u] > 0.0) total += w[u] * (z[u] - theta[u]) * (z[u] - theta[u]);
  }
  return total;
}

Vector WlsGradient(const Vector& w, const Vector& z, const Vector& theta) {
  return (-2.0 * w.array() * (z - theta).array()).matrix();
}

// Minimum-norm solution of a symmetric positive semidefinite system.
Vector PseudoInverseSolve(const Matrix& reduced, const Vector& rhs) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced);
  if (eig.info() != Eigen::Success) throw SolverError("reduced system: eigensolver failed");
  const Vector& ev = eig.eigenvalues();
  const double top = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
  const double cutoff = kPseudoInverseThreshold * top;
  if (ev.minCoeff() < -cutoff) {
    throw std::invalid_argument("objective is not convex on the requested subspace");
  }
  const Vector proj = eig.eigenvectors().transpose() * rhs;
  Vector scaled = Vector::Zero(ev.size());
  for (Index n = 0; n < ev.size(); ++n) {
    if (ev[n] > cutoff) scaled[n] = proj[n] / ev[n];
  }
  return eig.eigenvectors() * scaled;
}

// Solves a dense symmetric system, falling back to the pseudo-inverse when the
// LDLT pivots reveal (near) singularity relative to `pivot_ratio`.
Vector SolveDense(const Matrix& reduced, const Vector& rhs, bool* used_pinv,
                  double pivot_ratio = kPseudoInverseThreshold) {
  const Eigen::LDLT<Matrix> ldlt(reduced);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    const Vector d = ldlt.vectorD();
    if (d.minCoeff() > pivot_ratio * d.maxCoeff()) return ldlt.solve(rhs);
  }
  *used_pinv = true;
  return PseudoInverseSolve(reduced, rhs);
}

}  // namespace

QuadraticObjective QuadraticObjective::Wls(Vector weights, Vector data) {
  CheckWeights(weights, data, "Wls");
  return QuadraticObjective(DiagonalWls{std::move(weights), std::move(data)});
}

QuadraticObjective QuadraticObjective::Penalized(Vector weights, Vector data, double lambda,
                                                 GridShape grid) {
  CheckWeights(weights, data, "Penalized");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("Penalized: lambda must be positive");
  }
  if (grid.size() != weights.size()) throw std::invalid_argument("Penalized: grid size mismatch");
  return QuadraticObjective(PenalizedWls{std::move(weights), std::move(data), lambda, grid});
}

QuadraticObjective QuadraticObjective::General(Matrix hessian, Vector linear, double constant) {
  if (hessian.rows() != hessian.cols() || hessian.rows() != linear.size() || linear.size() == 0) {
    throw std::invalid_argument("General: inconsistent dimensions");
  }
  const double scale = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("General: Hessian is not symmetric");
  }
  return QuadraticObjective(GeneralQuadratic{std::move(hessian), std::move(linear), constant});
}

Index QuadraticObjective::dimension() const {
  return std::visit(Overloaded{
                        [](const DiagonalWls& f) { return f.weights.size(); },
                        [](const PenalizedWls& f) { return f.weights.size(); },
                        [](const GeneralQuadratic& f) { return f.linear.size(); },
                    },
                    form_);
}

double QuadraticObjective::Value(const Vector& theta) const {
  if (theta.size() != dimension()) throw std::invalid_argument("Value: dimension mismatch");
  return std::visit(
      Overloaded{
          [&](const DiagonalWls& f) { return WlsValue(f.weights, f.data, theta); },
          [&](const PenalizedWls& f) {
            double penalty = 0.0;
            ForEachGridEdge(f.grid, [&](Index u, Index v) {
              penalty += (theta[v] - theta[u]) * (theta[v] - theta[u]);
            });
            return WlsValue(f.weights, f.data, theta) + f.lambda * penalty;
          },
          [&](const GeneralQuadratic& f) {
            return 0.5 * theta.dot(f.hessian * theta) + f.linear.dot(theta) + f.constant;
          },
      },
      form_);
}

Vector QuadraticObjective::Gradient(const Vector& theta) const {
  if (theta.size() != dimension()) throw std::invalid_argument("Gradient: dimension mismatch");
  return std::visit(Overloaded{
                        [&](const DiagonalWls& f) { return WlsGradient(f.weights, f.data, theta); },
                        [&](const PenalizedWls& f) {
                          Vector g = WlsGradient(f.weights, f.data, theta);
                          ForEachGridEdge(f.grid, [&](Index u, Index v) {
                            const double d = 2.0 * f.lambda * (theta[v] - theta[u]);
                            g[v] += d;
                            g[u] -= d;
                          });
                          return g;
                        },
                        [&](const GeneralQuadratic& f) -> Vector {
                          return f.hessian * theta + f.linear;
                        },
                    },
                    form_);
}

double QuadraticObjective::Curvature(const Vector& d) const {
  if (d.size() != dimension()) throw std::invalid_argument("Curvature: dimension mismatch");
  return std::visit(Overloaded{
                        [&](const DiagonalWls& f) {
                          return 2.0 * f.weights.dot(d.cwiseAbs2());
                        },
                        [&](const PenalizedWls& f) {
                          double penalty = 0.0;
                          ForEachGridEdge(f.grid, [&](Index u, Index v) {
                            penalty += (d[v] - d[u]) * (d[v] - d[u]);
                          });
                          return 2.0 * f.weights.dot(d.cwiseAbs2()) + 2.0 * f.lambda * penalty;
                        },
                        [&](const GeneralQuadratic& f) { return d.dot(f.hessian * d); },
                    },
                    form_);
}

Matrix QuadraticObjective::DenseHessian() const {
  return std::visit(Overloaded{
                        [](const DiagonalWls& f) -> Matrix {
                          return (2.0 * f.weights).asDiagonal();
                        },
                        [](const PenalizedWls& f) -> Matrix {
                          Matrix h = (2.0 * f.weights).asDiagonal();
                          ForEachGridEdge(f.grid, [&](Index u, Index v) {
                            h(u, u) += 2.0 * f.lambda;
                            h(v, v) += 2.0 * f.lambda;
                            h(u, v) -= 2.0 * f.lambda;
                            h(v, u) -= 2.0 * f.lambda;
                          });
                          return h;
                        },
                        [](const GeneralQuadratic& f) -> Matrix { return f.hessian; },
                    },
                    form_);
}

double QuadraticObjective::Scale() const {
  auto wls_scale = [](const Vector& w, const Vector& z) {
    return std::max(1.0, z.cwiseAbs().maxCoeff() * w.cwiseAbs().maxCoeff());
  };
  return std::visit(Overloaded{
                        [&](const DiagonalWls& f) { return wls_scale(f.weights, f.data); },
                        [&](const PenalizedWls& f) { return wls_scale(f.weights, f.data); },
                        [](const GeneralQuadratic& f) {
                          return std::max(1.0, f.linear.cwiseAbs().maxCoeff());
                        },
                    },
                    form_);
}

QuadraticObjective QuadraticObjective::ToGeneral() const {
  return std::visit(
      Overloaded{
          [&](const GeneralQuadratic& f) { return QuadraticObjective(f); },
          [&](const auto& f) {
            const Vector linear = (-2.0 * f.weights.array() * f.data.array()).matrix();
            const double constant = f.weights.dot(f.data.cwiseAbs2());
            return QuadraticObjective(GeneralQuadratic{DenseHessian(), linear, constant});
          },
      },
      form_);
}

SubspaceSolveReport MinimizeOverPartition(const QuadraticObjective& q, const Partition& partition) {
  if (partition.dimension() != q.dimension()) {
    throw std::invalid_argument("MinimizeOverPartition: partition dimension mismatch");
  }
  const Index nb = partition.num_blocks();
  SubspaceSolveReport report;
  report.reduced_dimension = nb;
  Vector beta;

  std::visit(
      Overloaded{
          [&](const DiagonalWls& f) {
            Vector weight = Vector::Zero(nb), sum = Vector::Zero(nb);
            for (Index u = 0; u < f.weights.size(); ++u) {
              const Index b = partition.block_of(u);
              weight[b] += f.weights[u];
              sum[b] += f.weights[u] * f.data[u];
            }
            beta = Vector::Zero(nb);
            for (Index b = 0; b < nb; ++b) {
              if (weight[b] > 0.0) {
                beta[b] = sum[b] / weight[b];
              } else {
                report.used_pseudoinverse = true;
              }
            }
          },
          [&](const PenalizedWls& f) {
            // (diag(W) + lambda L_q) beta = S, L_q the Laplacian of the block graph.
            Vector diag = Vector::Zero(nb), rhs = Vector::Zero(nb);
            for (Index u = 0; u < f.weights.size(); ++u) {
              const Index b = partition.block_of(u);
              diag[b] += f.weights[u];
              rhs[b] += f.weights[u] * f.data[u];
            }
            std::vector<Eigen::Triplet<double>> triplets;
            ForEachGridEdge(f.grid, [&](Index u, Index v) {
              const Index a = partition.block_of(u), b = partition.block_of(v);
              if (a == b) return;
              diag[a] += f.lambda;
              diag[b] += f.lambda;
              triplets.emplace_back(a, b, -f.lambda);
              triplets.emplace_back(b, a, -f.lambda);
            });
            for (Index b = 0; b < nb; ++b) triplets.emplace_back(b, b, diag[b]);
            Eigen::SparseMatrix<double> reduced(nb, nb);
            reduced.setFromTriplets(triplets.begin(), triplets.end());
            // Positive definite whenever some weight is positive: the grid is
            // connected and lambda > 0. Only outright pivot failure falls back.
            if (nb <= kDenseReducedLimit) {
              beta = SolveDense(Matrix(reduced), rhs, &report.used_pseudoinverse, 0.0);
              return;
            }
            const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(reduced);
            const bool ok = ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0;
            if (ok) {
              beta = ldlt.solve(rhs);
            } else {
              report.used_pseudoinverse = true;
              beta = PseudoInverseSolve(Matrix(reduced), rhs);
            }
          },
          [&](const GeneralQuadratic& f) {
            const Index p = f.linear.size();
            Matrix hb = Matrix::Zero(p, nb);
            for (Index u = 0; u < p; ++u) hb.col(partition.block_of(u)) += f.hessian.col(u);
            Matrix reduced = Matrix::Zero(nb, nb);
            Vector rhs = Vector::Zero(nb);
            for (Index u = 0; u < p; ++u) {
              reduced.row(partition.block_of(u)) += hb.row(u);
              rhs[partition.block_of(u)] -= f.linear[u];
            }
            beta = SolveDense(reduced, rhs, &report.used_pseudoinverse);
          },
      },
      q.form());

  report.minimizer = partition.Expand(beta);
  return report;
}

double LineMinimize(const QuadraticObjective& q, const Vector& theta, const Vector& direction) {
  if (direction.size() != q.dimension() || theta.size() != q.dimension()) {
    throw std::invalid_argument("LineMinimize: dimension mismatch");
  }
  if (direction.isZero(0.0)) throw std::invalid_argument("LineMinimize: zero direction");
  const double slope = q.Gradient(theta).dot(direction);
  const double curvature = q.Curvature(direction);
  if (!(curvature > 0.0)) {
    if (slope == 0.0) return 0.0;
    throw SolverError("LineMinimize: objective is unbounded along the direction");
  }
  return -slope / curvature;
}

}  // namespace bimono
