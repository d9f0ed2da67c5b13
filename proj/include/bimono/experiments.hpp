#pragma once

#include <cstdint>
#include <vector>

#include "bimono/regression.hpp"
#include "bimono/shrinkage.hpp"

namespace bimono {

// Seed of replicate `index` under a master seed (SplitMix64 of both).
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

// Two observations (2,3,0) and (6,7,1) on the 7 x 10 integer grid.
LayoutData TwoPointLayout();

// ---- Binary regression with 700 of 7000 cells kept ----

struct BinaryExampleConfig {
  Index rows = 70;
  Index cols = 100;
  Index kept = 700;
  double lambda = kDefaultLightLambda;
};

struct BinaryExampleData {
  Vector xs;
  Vector ys;
  Matrix truth;     // P(Z = 1)
  Matrix full;      // all 0/1 draws
  Matrix observed;  // NaN where removed
};

Matrix BinarySignal(const Vector& xs, const Vector& ys);
BinaryExampleData GenerateBinaryExample(const BinaryExampleConfig& config, std::uint64_t seed);

struct BinaryExampleResult {
  BinaryExampleData data;
  FitResult simple;
  FitResult lightreg;
  double aad_simple = 0.0;
  double aad_lightreg = 0.0;
};

BinaryExampleResult RunBinaryExample(const BinaryExampleConfig& config, std::uint64_t seed,
                                     const SolverConfig& solver = {});

// ---- Splash denoising ----

struct SplashConfig {
  Index rows = 60;
  Index cols = 100;
  double sigma = 1.0;
  // Design points are design_scale * (i - 0.5) / r; 1 is the stated setup.
  double design_scale = 1.0;
};

// mu(x, y) = 2 t^{-1/4} sin(t) + 0.05 (x + y), t = sqrt(3x^2 + 2xy + 3y^2) + 1.
double SplashMean(double x, double y);

struct SplashData {
  Vector xs;
  Vector ys;
  Matrix signal;
  Matrix observed;
};

SplashData GenerateSplash(const SplashConfig& config, std::uint64_t seed);

// Average squared loss p^{-1} ||M_hat - M||_F^2.
double NormalizedLoss(const Matrix& estimate, const Matrix& truth);

struct LossCurvePoint {
  double sigma_hat = 0.0;
  double loss = 0.0;
  double estimated_risk = 0.0;  // normalized
};

// Bimonotone-shrinkage loss as a function of sigma-hat; eta is computed once.
std::vector<LossCurvePoint> BimonotoneLossCurve(const Matrix& coefficients, const Matrix& eta,
                                                const SplineBasis& basis, const Matrix& truth,
                                                const std::vector<double>& sigma_hats);

// ---- Monte Carlo comparison of bimonotone shrinkage and thresholding ----

struct McStudyConfig {
  Index replicates = 200;
  std::uint64_t seed = 20100101;
  std::vector<double> taus = {0.5, 0.6, 1.0, 1.5, 2.0};
  Index k = 2;
  Index l = 2;
  double kappa = 1.0;
  SplashConfig splash;
  // 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct McReplicate {
  std::uint64_t seed = 0;
  double sigma_hat = 0.0;
  double bimonotone_loss = 0.0;
  std::vector<double> threshold_losses;  // aligned with config.taus
};

struct LossSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  double se = 0.0;  // standard error of the mean
};

// Compensated sums over replicates in index order.
LossSummary Summarize(const std::vector<double>& values);

struct McStudyResult {
  std::vector<McReplicate> replicates;
  LossSummary bimonotone;
  std::vector<LossSummary> thresholds;
};

McReplicate RunMcReplicate(const McStudyConfig& config, const SplineBasis& basis, std::uint64_t seed);
McStudyResult RunMcStudy(const McStudyConfig& config);

}  // namespace bimono
