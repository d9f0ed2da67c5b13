#include <gtest/gtest.h>

#include <random>

#include "bimono/linear_dp.hpp"
#include "oracles.hpp"

using namespace bimono;

TEST(DpTableau, RecursionHolds) {
  std::mt19937_64 rng(1);
  const Matrix a = oracle::Gaussian(rng, 4, 5);
  const DpTableau t = BuildDpTableau(a);
  const Index r = 4, s = 5;
  for (Index k = 1; k <= r; ++k) {
    for (Index l = 1; l <= s; ++l) {
      EXPECT_NEAR(t.suffix_sums(k, l), a.row(k - 1).tail(s - l + 1).sum(), 1e-12);
    }
    for (Index l = 1; l < s; ++l) {
      // H(k, l+1) = min(H(k, l), b(k, l+1) + H(k+1, l+1)).
      EXPECT_NEAR(t.values(k, l + 1), std::min(t.values(k, l), t.suffix_sums(k, l + 1) + t.values(k + 1, l + 1)),
                  1e-12);
    }
  }
}

TEST(DpMinLinear, MatchesBruteForceOnAllSmallGrids) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = 1 + trial % 4, s = 1 + (trial / 4) % 4;
    const Matrix a = oracle::Gaussian(rng, r, s);
    const GridLinearMinimum dp = DpMinLinear(a);
    const double ref = oracle::MinLinear(oracle::RowMajor(a), oracle::Extremals(r * s, oracle::GridPairs(r, s)));
    EXPECT_NEAR(dp.value, ref, 1e-12);
    // The reported value is L at the returned extremal.
    EXPECT_NEAR((a.array() * dp.extremal.array()).sum(), dp.value, 1e-12);
    EXPECT_TRUE(IsFeasible(Flatten(dp.extremal), BimonotoneConstraints(GridShape(r, s))));
    EXPECT_TRUE((dp.extremal.array() == 0.0 || dp.extremal.array() == 1.0).all());
  }
}

TEST(DpMinLinear, ValueNeverPositiveAndBeatsFeasiblePoints) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = oracle::Gaussian(rng, 6, 7);
    const GridLinearMinimum dp = DpMinLinear(a);
    EXPECT_LE(dp.value, 0.0);
    for (int n = 0; n < 100; ++n) {
      // Random extremal: threshold of a random bimonotone matrix.
      const Matrix m = oracle::RandomBimonotone(rng, 6, 7);
      const Matrix e = (m.array() >= m.mean()).cast<double>();
      EXPECT_LE(dp.value, (a.array() * e.array()).sum() + 1e-12);
    }
  }
}

TEST(DpMinLinear, PositiveScaling) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = oracle::Gaussian(rng, 5, 3);
    const double v = DpMinLinear(a).value;
    EXPECT_NEAR(DpMinLinear(3.5 * a).value, 3.5 * v, 1e-12);
  }
}

TEST(DpMinLinear, TrivialCases) {
  EXPECT_EQ(DpMinLinear(Matrix::Constant(1, 1, 5.0)).value, 0.0);
  EXPECT_EQ(DpMinLinear(Matrix::Constant(1, 1, 5.0)).extremal(0, 0), 0.0);
  EXPECT_EQ(DpMinLinear(Matrix::Constant(1, 1, -5.0)).value, -5.0);
  EXPECT_EQ(DpMinLinear(Matrix::Constant(1, 1, -5.0)).extremal(0, 0), 1.0);
  EXPECT_THROW(DpMinLinear(Matrix(0, 0)), std::invalid_argument);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(DpMinLinear(bad), std::invalid_argument);
}

TEST(MinLinearQuotient, MatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const Index r = 2 + trial % 3, s = 2 + (trial / 3) % 3;
    const Index k = trial % r, l = (trial / 2) % s;
    const QuotientConeSpec spec(GridShape(r, s), k, l);
    const Matrix a = oracle::Gaussian(rng, static_cast<int>(r), static_cast<int>(s));
    const GridLinearMinimum got = MinLinearQuotient(a, k, l);
    std::vector<oracle::Pair> pairs;
    const ConstraintSet cons = spec.Constraints();
    for (const auto& pr : cons.pairs()) pairs.emplace_back(pr.lower, pr.upper);
    const double ref = oracle::MinLinear(oracle::RowMajor(a), oracle::Extremals(static_cast<int>(r * s), pairs));
    EXPECT_NEAR(got.value, ref, 1e-12) << r << "x" << s << " k=" << k << " l=" << l;
    EXPECT_TRUE(spec.Contains(got.extremal));
  }
}

TEST(BruteMinLinear, TrivialAndTies) {
  const ConstraintSet none(1, {});
  EXPECT_EQ(BruteMinLinear((Vector(1) << 5).finished(), none).value, 0.0);
  EXPECT_EQ(BruteMinLinear((Vector(1) << -5).finished(), none).value, -5.0);
  // All-zero coefficients: lexicographically smallest is the zero vector.
  EXPECT_EQ(BruteMinLinear(Vector::Zero(3), ConstraintSet(3, {{0, 1}})).extremal, Vector::Zero(3));
}
