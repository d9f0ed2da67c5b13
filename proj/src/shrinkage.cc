#include "bimono/shrinkage.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bimono/pava.hpp"

namespace bimono {
namespace {

void RequireSameShape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(fmt::format("{}: shape mismatch ({}x{} vs {}x{})", what, a.rows(),
                                            a.cols(), b.rows(), b.cols()));
  }
}

double Median(std::vector<double> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double ParseNumber(const std::string& text, const std::string& full) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument(fmt::format("bad number in sigma spec '{}'", full));
  }
  return v;
}

}  // namespace

Matrix CandidateEstimate(const Matrix& coefficients, const Matrix& gamma, const SplineBasis& basis) {
  RequireSameShape(coefficients, gamma, "CandidateEstimate");
  if (!((gamma.array() >= 0.0).all() && (gamma.array() <= 1.0).all())) {
    throw std::invalid_argument("CandidateEstimate: shrinkage factors must lie in [0, 1]");
  }
  return InverseTransform(gamma.cwiseProduct(coefficients), basis);
}

double TrueRisk(const Matrix& gamma, const Matrix& signal_coefficients, double sigma) {
  RequireSameShape(gamma, signal_coefficients, "TrueRisk");
  if (!(sigma >= 0.0)) throw std::invalid_argument("TrueRisk: sigma must be nonnegative");
  const auto g = gamma.array();
  return ((1.0 - g).square() * signal_coefficients.array().square() + sigma * sigma * g.square()).sum();
}

Matrix OracleShrinkage(const Matrix& signal_coefficients, double sigma) {
  const auto m2 = signal_coefficients.array().square();
  const auto denom = m2 + sigma * sigma;
  return (denom > 0.0).select(m2 / denom, 0.0).matrix();
}

double EstimatedRisk(const Matrix& gamma, const Matrix& coefficients, double sigma_hat) {
  RequireSameShape(gamma, coefficients, "EstimatedRisk");
  const double s2 = sigma_hat * sigma_hat;
  const auto g = gamma.array();
  return (s2 * g.square() + (1.0 - g).square() * (coefficients.array().square() - s2)).sum();
}

Matrix ThresholdShrinkage(const Matrix& coefficients, double sigma_hat, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("ThresholdShrinkage: tau must be positive");
  const double cut = tau * std::log(static_cast<double>(coefficients.size())) * sigma_hat * sigma_hat;
  Matrix gamma(coefficients.rows(), coefficients.cols());
  for (Index j = 0; j < coefficients.cols(); ++j) {
    for (Index i = 0; i < coefficients.rows(); ++i) {
      const double z2 = coefficients(i, j) * coefficients(i, j);
      gamma(i, j) = z2 > 0.0 ? std::max(1.0 - cut / z2, 0.0) : 0.0;
    }
  }
  return gamma;
}

Matrix ProjectOntoQuotientCone(const Matrix& y, Index k, Index l, const SolverConfig& config) {
  const Index r = y.rows(), s = y.cols();
  const QuotientConeSpec spec(GridShape(r, s), k, l);  // validates k, l
  Matrix theta = y;

  if (k > 0) {
    ChainProblem top{Vector(s - l), Vector::Constant(s - l, static_cast<double>(k))};
    for (Index j = l; j < s; ++j) top.values[j - l] = y.block(0, j, k, 1).mean();
    const Vector fit = PavaFit(top);
    for (Index j = l; j < s; ++j) theta.block(0, j, k, 1).setConstant(fit[j - l]);
  }
  if (l > 0) {
    ChainProblem left{Vector(r - k), Vector::Constant(r - k, static_cast<double>(l))};
    for (Index i = k; i < r; ++i) left.values[i - k] = y.block(i, 0, 1, l).mean();
    const Vector fit = PavaFit(left);
    for (Index i = k; i < r; ++i) theta.block(i, 0, 1, l).setConstant(fit[i - k]);
  }

  const GridShape trailing(r - k, s - l);
  const Matrix block = y.bottomRightCorner(r - k, s - l);
  const QuadraticObjective q = QuadraticObjective::Wls(Vector::Ones(trailing.size()), Flatten(block));
  const SolveResult solved = Solve(q, OrderCone::Bimonotone(trailing), config);
  theta.bottomRightCorner(r - k, s - l) = Unflatten(solved.theta, trailing);
  return theta;
}

Matrix ShrinkageEta(const Matrix& coefficients, Index k, Index l, const SolverConfig& config) {
  return -ProjectOntoQuotientCone(-coefficients.array().square().matrix(), k, l, config);
}

Matrix GammaFromEta(const Matrix& eta, double sigma_hat) {
  if (!(sigma_hat >= 0.0)) throw std::invalid_argument("GammaFromEta: sigma must be nonnegative");
  const double s2 = sigma_hat * sigma_hat;
  Matrix gamma(eta.rows(), eta.cols());
  for (Index j = 0; j < eta.cols(); ++j) {
    for (Index i = 0; i < eta.rows(); ++i) {
      gamma(i, j) = eta(i, j) > 0.0 ? std::max(1.0 - s2 / eta(i, j), 0.0) : 0.0;
    }
  }
  return gamma;
}

Matrix GammaBimonotone(const Matrix& coefficients, double sigma_hat, Index k, Index l,
                       const SolverConfig& config) {
  return GammaFromEta(ShrinkageEta(coefficients, k, l, config), sigma_hat);
}

NoiseEstimate EstimateSigma(const Matrix& coefficients, double kappa, NoiseMethod method) {
  if (!(kappa > 0.0 && kappa < 2.0)) throw std::invalid_argument("EstimateSigma: kappa must lie in (0, 2)");
  const Index r = coefficients.rows(), s = coefficients.cols();
  std::vector<double> region;
  for (Index i = 1; i <= r; ++i) {
    for (Index j = 1; j <= s; ++j) {
      if (static_cast<double>(i) / r + static_cast<double>(j) / s >= kappa) {
        region.push_back(coefficients(i - 1, j - 1));
      }
    }
  }
  if (region.empty()) {
    throw std::invalid_argument(fmt::format("EstimateSigma: no cells with i/r + j/s >= {}", kappa));
  }
  NoiseEstimate est{0.0, method, kappa, static_cast<Index>(region.size())};
  if (method == NoiseMethod::kRms) {
    double sum = 0.0;
    for (double v : region) sum += v * v;
    est.sigma = std::sqrt(sum / static_cast<double>(region.size()));
  } else {
    for (double& v : region) v = std::abs(v);
    est.sigma = Median(std::move(region)) / kGaussianQuartile;
  }
  return est;
}

std::vector<SigmaScanRow> SigmaScan(const Matrix& coefficients, const std::vector<double>& kappas) {
  std::vector<SigmaScanRow> rows;
  for (double kappa : kappas) {
    // The cell (r, s) has i/r + j/s = 2, so every kappa in (0, 2) has a region.
    if (!(kappa > 0.0 && kappa < 2.0)) continue;
    rows.push_back({kappa, EstimateSigma(coefficients, kappa, NoiseMethod::kRms).sigma,
                    EstimateSigma(coefficients, kappa, NoiseMethod::kMedian).sigma});
  }
  return rows;
}

std::vector<double> DefaultKappaGrid() {
  std::vector<double> grid;
  for (int n = 1; n < 40; ++n) grid.push_back(0.05 * n);
  return grid;
}

SigmaSpec SigmaSpec::Parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument(fmt::format("bad sigma spec '{}'", text));
  const std::string head = text.substr(0, colon);
  const double v = ParseNumber(text.substr(colon + 1), text);
  SigmaSpec spec;
  if (head == "auto1" || head == "auto2") {
    spec.kind = head == "auto1" ? Kind::kAutoRms : Kind::kAutoMedian;
    if (!(v > 0.0 && v < 2.0)) throw std::invalid_argument(fmt::format("kappa out of (0, 2) in '{}'", text));
    spec.kappa = v;
  } else if (head == "fixed") {
    if (!(v > 0.0)) throw std::invalid_argument(fmt::format("sigma must be positive in '{}'", text));
    spec.kind = Kind::kFixed;
    spec.value = v;
  } else if (head == "scale") {
    if (!(v > 0.0)) throw std::invalid_argument(fmt::format("multiplier must be positive in '{}'", text));
    spec.multiplier = v;
  } else {
    throw std::invalid_argument(fmt::format("unknown sigma method in '{}'", text));
  }
  return spec;
}

std::string SigmaSpec::ToString() const {
  std::string base;
  switch (kind) {
    case Kind::kAutoRms:
      base = fmt::format("auto1:{}", kappa);
      break;
    case Kind::kAutoMedian:
      base = fmt::format("auto2:{}", kappa);
      break;
    case Kind::kFixed:
      base = fmt::format("fixed:{}", value);
      break;
  }
  if (multiplier != 1.0) base += fmt::format(" x{}", multiplier);
  return base;
}

DenoiseResult Denoise(const Matrix& z, const Vector& xs, const Vector& ys, const DenoiseConfig& config) {
  if (!z.allFinite()) throw std::invalid_argument("Denoise: the data matrix must be complete and finite");
  if (xs.size() != z.rows() || ys.size() != z.cols()) {
    throw std::invalid_argument("Denoise: design length does not match the matrix");
  }
  DenoiseResult out;
  out.basis = MakeSplineBasis(xs, ys, config.k, config.l);
  out.coefficients = Transform(z, out.basis);

  double sigma = config.sigma.value;
  if (config.sigma.kind != SigmaSpec::Kind::kFixed) {
    const NoiseMethod method =
        config.sigma.kind == SigmaSpec::Kind::kAutoRms ? NoiseMethod::kRms : NoiseMethod::kMedian;
    sigma = EstimateSigma(out.coefficients, config.sigma.kappa, method).sigma;
  }
  out.sigma_hat = sigma * config.sigma.multiplier;
  if (!(out.sigma_hat > 0.0)) throw std::invalid_argument("Denoise: sigma-hat must be positive");

  if (config.mode == ShrinkageMode::kBimonotone) {
    out.eta = ShrinkageEta(out.coefficients, config.k, config.l, config.solver);
    out.gamma = GammaFromEta(out.eta, out.sigma_hat);
  } else {
    out.gamma = ThresholdShrinkage(out.coefficients, out.sigma_hat, config.tau);
  }
  out.estimate = CandidateEstimate(out.coefficients, out.gamma, out.basis);
  out.parts = Decompose(out.gamma.cwiseProduct(out.coefficients), out.basis, config.decomposition);
  out.estimated_risk = EstimatedRisk(out.gamma, out.coefficients, out.sigma_hat);
  return out;
}

}  // namespace bimono
