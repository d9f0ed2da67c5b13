#include "bimono/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace bimono {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Vector MidpointDesign(Index n, double scale) {
  Vector d(n);
  for (Index i = 0; i < n; ++i) d[i] = scale * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return d;
}

// Neumaier summation.
class CompensatedSum {
 public:
  void Add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) {
  return SplitMix64(SplitMix64(master) ^ SplitMix64(index + 0x632be59bd9b4e019ULL));
}

LayoutData TwoPointLayout() {
  std::vector<double> xs(7), ys(10);
  std::iota(xs.begin(), xs.end(), 1.0);
  std::iota(ys.begin(), ys.end(), 1.0);
  return Aggregate({{2.0, 3.0, 0.0}, {6.0, 7.0, 1.0}}, xs, ys);
}

Matrix BinarySignal(const Vector& xs, const Vector& ys) {
  Matrix theta(xs.size(), ys.size());
  for (Index i = 0; i < xs.size(); ++i) {
    for (Index j = 0; j < ys.size(); ++j) {
      const double jump = ys[j] >= 0.5 + std::cos(M_PI * xs[i]) / 4.0 ? 1.0 : 0.0;
      theta(i, j) = (xs[i] + ys[j]) / 4.0 + jump / 2.0;
    }
  }
  return theta;
}

BinaryExampleData GenerateBinaryExample(const BinaryExampleConfig& config, std::uint64_t seed) {
  const Index r = config.rows, s = config.cols;
  if (r < 1 || s < 1 || config.kept < 1 || config.kept > r * s) {
    throw std::invalid_argument("GenerateBinaryExample: bad sizes");
  }
  BinaryExampleData d;
  d.xs = MidpointDesign(r, 1.0);
  d.ys = MidpointDesign(s, 1.0);
  d.truth = BinarySignal(d.xs, d.ys);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  d.full.resize(r, s);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < s; ++j) d.full(i, j) = unif(rng) < d.truth(i, j) ? 1.0 : 0.0;
  }
  std::vector<Index> cells(static_cast<std::size_t>(r * s));
  std::iota(cells.begin(), cells.end(), Index{0});
  std::shuffle(cells.begin(), cells.end(), rng);
  d.observed = Matrix::Constant(r, s, std::numeric_limits<double>::quiet_NaN());
  for (Index n = 0; n < config.kept; ++n) {
    const Index u = cells[static_cast<std::size_t>(n)];
    d.observed(u / s, u % s) = d.full(u / s, u % s);
  }
  return d;
}

BinaryExampleResult RunBinaryExample(const BinaryExampleConfig& config, std::uint64_t seed,
                                     const SolverConfig& solver) {
  BinaryExampleResult res;
  res.data = GenerateBinaryExample(config, seed);
  const LayoutData layout = LayoutFromMatrix(res.data.observed, std::nullopt, res.data.xs, res.data.ys);
  res.simple = FitIncompleteSimple(layout, solver);
  res.lightreg = FitIncompleteRegularized(layout, config.lambda, solver);
  res.aad_simple = AverageAbsoluteDeviation(res.simple.theta, res.data.truth);
  res.aad_lightreg = AverageAbsoluteDeviation(res.lightreg.theta, res.data.truth);
  return res;
}

double SplashMean(double x, double y) {
  const double t = std::sqrt(3.0 * x * x + 2.0 * x * y + 3.0 * y * y) + 1.0;
  return 2.0 * std::pow(t, -0.25) * std::sin(t) + 0.05 * (x + y);
}

SplashData GenerateSplash(const SplashConfig& config, std::uint64_t seed) {
  if (config.rows < 3 || config.cols < 3 || !(config.sigma >= 0.0) || !(config.design_scale > 0.0)) {
    throw std::invalid_argument("GenerateSplash: bad configuration");
  }
  SplashData d;
  d.xs = MidpointDesign(config.rows, config.design_scale);
  d.ys = MidpointDesign(config.cols, config.design_scale);
  d.signal.resize(config.rows, config.cols);
  for (Index i = 0; i < config.rows; ++i) {
    for (Index j = 0; j < config.cols; ++j) d.signal(i, j) = SplashMean(d.xs[i], d.ys[j]);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  d.observed = d.signal;
  for (Index i = 0; i < config.rows; ++i) {
    for (Index j = 0; j < config.cols; ++j) d.observed(i, j) += config.sigma * noise(rng);
  }
  return d;
}

double NormalizedLoss(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw std::invalid_argument("NormalizedLoss: shape mismatch");
  }
  return (estimate - truth).squaredNorm() / static_cast<double>(truth.size());
}

std::vector<LossCurvePoint> BimonotoneLossCurve(const Matrix& coefficients, const Matrix& eta,
                                                const SplineBasis& basis, const Matrix& truth,
                                                const std::vector<double>& sigma_hats) {
  std::vector<LossCurvePoint> curve;
  const double p = static_cast<double>(coefficients.size());
  for (double sh : sigma_hats) {
    const Matrix gamma = GammaFromEta(eta, sh);
    curve.push_back({sh, NormalizedLoss(CandidateEstimate(coefficients, gamma, basis), truth),
                     EstimatedRisk(gamma, coefficients, sh) / p});
  }
  return curve;
}

LossSummary Summarize(const std::vector<double>& values) {
  LossSummary s;
  const std::size_t n = values.size();
  if (n == 0) return s;
  CompensatedSum sum;
  for (double v : values) sum.Add(v);
  s.mean = sum.value() / static_cast<double>(n);
  if (n > 1) {
    CompensatedSum dev;
    for (double v : values) dev.Add((v - s.mean) * (v - s.mean));
    s.sd = std::sqrt(dev.value() / static_cast<double>(n - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(n));
  }
  return s;
}

McReplicate RunMcReplicate(const McStudyConfig& config, const SplineBasis& basis, std::uint64_t seed) {
  const SplashData d = GenerateSplash(config.splash, seed);
  McReplicate rep;
  rep.seed = seed;
  const Matrix coeffs = Transform(d.observed, basis);
  rep.sigma_hat = EstimateSigma(coeffs, config.kappa, NoiseMethod::kRms).sigma;
  const Matrix gamma = GammaBimonotone(coeffs, rep.sigma_hat, config.k, config.l);
  rep.bimonotone_loss = NormalizedLoss(CandidateEstimate(coeffs, gamma, basis), d.signal);
  for (double tau : config.taus) {
    const Matrix g = ThresholdShrinkage(coeffs, rep.sigma_hat, tau);
    rep.threshold_losses.push_back(NormalizedLoss(CandidateEstimate(coeffs, g, basis), d.signal));
  }
  return rep;
}

McStudyResult RunMcStudy(const McStudyConfig& config) {
  if (config.replicates < 1) throw std::invalid_argument("RunMcStudy: need at least one replicate");
  const SplashData design = GenerateSplash(config.splash, 0);
  const SplineBasis basis = MakeSplineBasis(design.xs, design.ys, config.k, config.l);

  McStudyResult result;
  result.replicates.resize(static_cast<std::size_t>(config.replicates));
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(config.replicates));

  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (Index n = next++; n < config.replicates; n = next++) {
      try {
        result.replicates[static_cast<std::size_t>(n)] =
            RunMcReplicate(config, basis, DeriveSeed(config.seed, static_cast<std::uint64_t>(n)));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.replicates;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<double> losses;
  for (const auto& rep : result.replicates) losses.push_back(rep.bimonotone_loss);
  result.bimonotone = Summarize(losses);
  for (std::size_t t = 0; t < config.taus.size(); ++t) {
    losses.clear();
    for (const auto& rep : result.replicates) losses.push_back(rep.threshold_losses[t]);
    result.thresholds.push_back(Summarize(losses));
  }
  return result;
}

}  // namespace bimono
