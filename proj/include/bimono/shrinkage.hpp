#pragma once

#include <string>
#include <vector>

#include "bimono/active_set.hpp"
#include "bimono/spline_basis.hpp"

namespace bimono {

// Phi^{-1}(3/4).
inline constexpr double kGaussianQuartile = 0.674489750196082;

// U (gamma .* coeffs) V'. Rejects gamma outside [0, 1].
Matrix CandidateEstimate(const Matrix& coefficients, const Matrix& gamma, const SplineBasis& basis);

// sum (1 - gamma)^2 M~^2 + sigma^2 gamma^2.
double TrueRisk(const Matrix& gamma, const Matrix& signal_coefficients, double sigma);

// M~^2 / (M~^2 + sigma^2); 0/0 is taken as 0.
Matrix OracleShrinkage(const Matrix& signal_coefficients, double sigma);

// sum sigma^2 gamma^2 + (1 - gamma)^2 (Z~^2 - sigma^2).
double EstimatedRisk(const Matrix& gamma, const Matrix& coefficients, double sigma_hat);

// max(1 - tau log(p) sigma^2 / Z~^2, 0), with 0 where Z~ = 0.
Matrix ThresholdShrinkage(const Matrix& coefficients, double sigma_hat, double tau);

// Unit-weight least squares projection onto the quotient cone with k
// collapsed rows and l collapsed columns. The leading k x l corner is copied,
// the two collapsed chains are fitted by PAVA on their block means, and the
// trailing block is a bimonotone regression.
Matrix ProjectOntoQuotientCone(const Matrix& y, Index k, Index l, const SolverConfig& config = {});

// eta = -(projection of -Z~^2).
Matrix ShrinkageEta(const Matrix& coefficients, Index k, Index l, const SolverConfig& config = {});

// (1 - sigma^2 / eta)^+, with 0 where eta <= 0.
Matrix GammaFromEta(const Matrix& eta, double sigma_hat);

Matrix GammaBimonotone(const Matrix& coefficients, double sigma_hat, Index k, Index l,
                       const SolverConfig& config = {});

enum class NoiseMethod { kRms, kMedian };

struct NoiseEstimate {
  double sigma = 0.0;
  NoiseMethod method = NoiseMethod::kRms;
  double kappa = 1.0;
  Index cells = 0;
};

// Uses the cells with i/r + j/s >= kappa (1-based i, j).
NoiseEstimate EstimateSigma(const Matrix& coefficients, double kappa, NoiseMethod method);

struct SigmaScanRow {
  double kappa = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

// Kappas with an empty region are skipped.
std::vector<SigmaScanRow> SigmaScan(const Matrix& coefficients, const std::vector<double>& kappas);
std::vector<double> DefaultKappaGrid();

// How sigma-hat is chosen: estimated (rms or median over the kappa region),
// or fixed; the result is then multiplied by `multiplier`.
struct SigmaSpec {
  enum class Kind { kAutoRms, kAutoMedian, kFixed };
  Kind kind = Kind::kAutoRms;
  double kappa = 1.0;
  double value = 1.0;
  double multiplier = 1.0;

  // Parses auto1:K, auto2:K, fixed:V, scale:C (the last is auto1:1 times C).
  static SigmaSpec Parse(const std::string& text);
  std::string ToString() const;
};

enum class ShrinkageMode { kBimonotone, kThreshold };

struct DenoiseConfig {
  Index k = 1;
  Index l = 1;
  SigmaSpec sigma;
  ShrinkageMode mode = ShrinkageMode::kBimonotone;
  double tau = 2.0;
  DecompositionKind decomposition = DecompositionKind::kFirstRowColumn;
  SolverConfig solver;
};

struct DenoiseResult {
  SplineBasis basis;
  Matrix coefficients;
  double sigma_hat = 0.0;
  Matrix eta;  // bimonotone mode only
  Matrix gamma;
  Matrix estimate;
  Decomposition parts;
  double estimated_risk = 0.0;
};

DenoiseResult Denoise(const Matrix& z, const Vector& xs, const Vector& ys, const DenoiseConfig& config);

}  // namespace bimono
