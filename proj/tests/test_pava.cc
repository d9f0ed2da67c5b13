#include <gtest/gtest.h>

#include <random>

#include "bimono/active_set.hpp"
#include "bimono/pava.hpp"
#include "oracles.hpp"

using namespace bimono;

namespace {

Vector V(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index n = 0;
  for (double x : xs) v[n++] = x;
  return v;
}

ChainProblem RandomChain(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> w(0.1, 3.0);
  ChainProblem p{oracle::GaussianVec(rng, m), Vector(m)};
  for (int i = 0; i < m; ++i) p.weights[i] = w(rng);
  return p;
}

}  // namespace

TEST(Pava, Examples) {
  EXPECT_EQ(PavaFit({V({1, 2, 2, 5}), Vector::Ones(4)}), V({1, 2, 2, 5}));
  const Vector a = PavaFit({V({3, 1, 2}), Vector::Ones(3)});
  for (Index i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(a[i], 2.0);
  const Vector b = PavaFit({V({2, 1}), V({1, 3})});
  EXPECT_DOUBLE_EQ(b[0], 1.25);
  EXPECT_DOUBLE_EQ(b[1], 1.25);
  EXPECT_THROW(PavaFit({V({1, 2}), V({1, 0})}), std::invalid_argument);
  EXPECT_THROW(PavaFit({V({1, 2}), V({1})}), std::invalid_argument);
}

TEST(Pava, MatchesMinMaxFormula) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const ChainProblem p = RandomChain(rng, 1 + trial % 12);
    const Vector fit = PavaFit(p);
    const Vector ref = oracle::ChainMinMax(p.values, p.weights);
    EXPECT_LE((fit - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Pava, Properties) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const ChainProblem p = RandomChain(rng, 2 + trial % 20);
    const Vector fit = PavaFit(p);
    for (Index i = 1; i < fit.size(); ++i) EXPECT_LE(fit[i - 1], fit[i]);
    EXPECT_NEAR(p.weights.dot(fit), p.weights.dot(p.values), 1e-10 * (1.0 + p.weights.sum()));
    EXPECT_LE((PavaFit({fit, p.weights}) - fit).cwiseAbs().maxCoeff(), 1e-12);
    const double c = 2.5, d = -1.25;
    const Vector shifted = PavaFit({(c * p.values).array() + d, p.weights});
    EXPECT_LE((shifted - ((c * fit).array() + d).matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PavaGrouped, Examples) {
  GroupedChainProblem one{{V({1, 2, 6})}, {V({1, 1, 2})}};
  EXPECT_DOUBLE_EQ(PavaFitGrouped(one)[0], 15.0 / 4.0);
  std::mt19937_64 rng(3);
  const ChainProblem p = RandomChain(rng, 7);
  GroupedChainProblem singles;
  for (Index i = 0; i < 7; ++i) {
    singles.values.push_back(V({p.values[i]}));
    singles.weights.push_back(V({p.weights[i]}));
  }
  EXPECT_LE((PavaFitGrouped(singles) - PavaFit(p)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(PavaFitGrouped({{Vector()}, {Vector()}}), std::invalid_argument);
}

TEST(PavaGrouped, MatchesActiveSetWithEqualities) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> size(1, 3);
  std::uniform_real_distribution<double> w(0.2, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    GroupedChainProblem g;
    std::vector<IndexPair> pairs;
    Vector z, ws;
    Index offset = 0;
    const int groups = 2 + trial % 5;
    for (int b = 0; b < groups; ++b) {
      const int n = size(rng);
      Vector vals = oracle::GaussianVec(rng, n), wts(n);
      for (int i = 0; i < n; ++i) wts[i] = w(rng);
      g.values.push_back(vals);
      g.weights.push_back(wts);
      z.conservativeResize(offset + n);
      ws.conservativeResize(offset + n);
      z.tail(n) = vals;
      ws.tail(n) = wts;
      for (int i = 0; i + 1 < n; ++i) {
        pairs.push_back({offset + i, offset + i + 1});
        pairs.push_back({offset + i + 1, offset + i});
      }
      if (b > 0) pairs.push_back({offset - 1, offset});
      offset += n;
    }
    const Vector fit = PavaFitGrouped(g);
    SolverConfig cfg;
    cfg.strategy = Strategy::k2a;
    const SolveResult ref = Solve(QuadraticObjective::Wls(ws, z), OrderCone::Generic(ConstraintSet(offset, pairs)), cfg);
    Index u = 0;
    for (int b = 0; b < groups; ++b) {
      for (Index i = 0; i < g.values[b].size(); ++i, ++u) EXPECT_NEAR(fit[b], ref.theta[u], 1e-10);
    }
  }
}
