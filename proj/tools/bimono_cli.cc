// Command-line front end: fit, denoise, simulate, mc-study.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bimono/experiments.hpp"
#include "bimono/io.hpp"
#include "bimono/regression.hpp"
#include "bimono/shrinkage.hpp"
#include "bimono/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace bimono;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCertificate = 3;

// Raised when a solve finishes without a valid certificate.
class CertificateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string output_dir = "out";
  std::string pgm_range;
  std::string strategy = "2c";
};

struct PgmRange {
  double lo = 0.0;
  double hi = 1.0;
};

PgmRange ParsePgmRange(const std::string& text, PgmRange fallback) {
  if (text.empty()) return fallback;
  const auto colon = text.find(':');
  PgmRange r;
  try {
    if (colon == std::string::npos) throw std::invalid_argument("");
    std::size_t a = 0, b = 0;
    r.lo = std::stod(text.substr(0, colon), &a);
    r.hi = std::stod(text.substr(colon + 1), &b);
    if (a != colon || b != text.size() - colon - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw InputError(fmt::format("--pgm-range: expected lo:hi, got '{}'", text));
  }
  if (!(r.hi > r.lo)) throw InputError("--pgm-range: need lo < hi");
  return r;
}

std::string HexHash(const std::string& s) { return fmt::format("{:016x}", Fnv1a64(s)); }

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  std::string Path(const std::string& name) {
    outputs_.push_back(name);
    return (dir_ / name).string();
  }
  void Matrix(const std::string& name, const bimono::Matrix& m) { WriteMatrixCsv(Path(name), m); }
  void Pgm(const std::string& name, const bimono::Matrix& m, PgmRange range) {
    WritePgm(Path(name), m, range.lo, range.hi);
  }
  void Json(const std::string& name, const json& j) { AtomicWrite(Path(name), j.dump(2) + "\n"); }

  // The manifest echoes the resolved configuration; its hash covers the
  // configuration only, so identical runs give identical manifests.
  void Manifest(const std::string& subcommand, const json& config, std::optional<std::uint64_t> seed,
                const json& extra = json::object()) {
    json m;
    m["tool"] = "bimono";
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["config"] = config;
    m["config_hash"] = HexHash(config.dump());
    if (seed) m["seed"] = *seed;
    for (const auto& [k, v] : extra.items()) m[k] = v;
    m["outputs"] = outputs_;
    AtomicWrite((dir_ / "manifest.json").string(), m.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::vector<std::string> outputs_;
};

json CertificateJson(const SolveResult& s) {
  return {{"grad_dot_theta", s.certificate.grad_dot_theta},
          {"grad_dot_ones", s.certificate.grad_dot_ones},
          {"min_slope", s.certificate.min_slope},
          {"tolerance", s.certificate.tolerance},
          {"holds", s.certificate.Holds()},
          {"outer_iterations", s.outer_iterations},
          {"subspace_solves", s.subspace_solves},
          {"objective", s.objective},
          {"unique_on_observed_only", s.used_pseudoinverse}};
}

void RequireCertificate(const SolveResult& s, const std::string& what) {
  if (!s.certificate.Holds()) {
    throw CertificateFailure(fmt::format("{}: optimality certificate does not hold", what));
  }
}

std::vector<double> ParseList(const std::string& text, const char* flag) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw InputError(fmt::format("{}: cannot parse '{}'", flag, item));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::uint64_t ResolveSeed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

SolverConfig MakeSolverConfig(const Common& c) {
  SolverConfig cfg;
  try {
    cfg.strategy = StrategyFromString(c.strategy);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return cfg;
}

// ---- fit ----

struct FitOptions {
  Common common;
  std::string input;
  std::string weights;
  std::string format = "auto";
  std::string mode = "auto";
  double lambda = kDefaultLightLambda;
  std::string extra_x;
  std::string extra_y;
};

bool LooksLikeMatrixCsv(const std::string& text) {
  const auto nl = text.find('\n');
  const std::string first = text.substr(0, nl);
  if (std::count(first.begin(), first.end(), ',') != 1) return false;
  return first.find_first_not_of("0123456789, \t\r") == std::string::npos;
}

int RunFit(const FitOptions& o) {
  const std::string text = ReadFile(o.input);
  const bool matrix = o.format == "matrix" || (o.format == "auto" && LooksLikeMatrixCsv(text));
  LayoutData data;
  if (matrix) {
    std::optional<bimono::Matrix> w;
    if (!o.weights.empty()) w = ReadMatrixCsv(o.weights);
    try {
      data = LayoutFromMatrix(ParseMatrixCsv(text, o.input), w);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  } else {
    if (!o.weights.empty()) throw InputError("--weights applies to matrix input only");
    data = Aggregate(ParseTriplesCsv(text, o.input), ParseList(o.extra_x, "--extra-x"),
                     ParseList(o.extra_y, "--extra-y"));
  }

  std::string mode = o.mode;
  if (mode == "auto") mode = data.complete() ? "complete" : "simple";
  if (mode == "complete" && !data.complete()) {
    throw InputError("--mode complete needs every cell observed; use simple or lightreg");
  }
  if (mode == "lightreg" && !(o.lambda > 0.0)) throw InputError("--lambda must be positive");

  const SolverConfig solver = MakeSolverConfig(o.common);
  FitResult fit;
  if (mode == "complete") {
    fit = FitComplete(data, solver);
  } else if (mode == "simple") {
    fit = FitIncompleteSimple(data, solver);
  } else {
    fit = FitIncompleteRegularized(data, o.lambda, solver);
  }
  RequireCertificate(fit.solve, "fit");

  OutputDir out(o.common.output_dir);
  out.Matrix("theta.csv", fit.theta);
  if (fit.lower) out.Matrix("theta_lower.csv", *fit.lower);
  if (fit.upper) out.Matrix("theta_upper.csv", *fit.upper);
  out.Matrix("design_x.csv", data.xs);
  out.Matrix("design_y.csv", data.ys);
  out.Json("certificate.json", CertificateJson(fit.solve));
  const PgmRange range = ParsePgmRange(o.common.pgm_range, {0.0, 1.0});
  out.Pgm("theta.pgm", fit.theta, range);

  json config = {{"input", o.input},        {"weights", o.weights},   {"format", matrix ? "matrix" : "triples"},
                 {"mode", mode},            {"lambda", o.lambda},     {"extra_x", o.extra_x},
                 {"extra_y", o.extra_y},    {"strategy", o.common.strategy}};
  out.Manifest("fit", config, std::nullopt, {{"pgm_range", {range.lo, range.hi}}, {"rows", data.xs.size()},
                                             {"cols", data.ys.size()}});
  fmt::print("fit ({}): {}x{} grid, {} observed cells, {} outer iterations, min slope {:.3e}\n", mode,
             data.xs.size(), data.ys.size(), data.observed_cells(), fit.solve.outer_iterations,
             fit.solve.certificate.min_slope);
  return kExitOk;
}

// ---- denoise ----

struct DenoiseOptions {
  Common common;
  std::string input;
  Index k = 1;
  Index l = 1;
  std::string sigma = "auto1:1";
  std::string mode = "bimonotone";
  double tau = 2.0;
  std::string decomposition = "first";
};

DenoiseConfig MakeDenoiseConfig(Index k, Index l, const std::string& sigma, const std::string& mode,
                                double tau, const std::string& decomposition, const Common& common) {
  DenoiseConfig cfg;
  cfg.k = k;
  cfg.l = l;
  try {
    cfg.sigma = SigmaSpec::Parse(sigma);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (mode == "bimonotone") {
    cfg.mode = ShrinkageMode::kBimonotone;
  } else if (mode == "threshold") {
    cfg.mode = ShrinkageMode::kThreshold;
    if (!(tau > 0.0)) throw InputError("--tau must be positive");
  } else {
    throw InputError(fmt::format("unknown shrinkage mode '{}'", mode));
  }
  cfg.tau = tau;
  cfg.decomposition = decomposition == "blocks" ? DecompositionKind::kPolynomialBlocks
                                                : DecompositionKind::kFirstRowColumn;
  cfg.solver = MakeSolverConfig(common);
  return cfg;
}

void WriteSigmaScan(OutputDir& out, const std::string& name, const bimono::Matrix& coefficients) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : SigmaScan(coefficients, DefaultKappaGrid())) {
    rows.push_back({row.kappa, row.sigma1, row.sigma2});
  }
  WriteTableCsv(out.Path(name), {"kappa", "sigma1", "sigma2"}, rows);
}

void WriteDenoiseOutputs(OutputDir& out, const std::string& prefix, const DenoiseResult& d, PgmRange range) {
  out.Matrix(prefix + "estimate.csv", d.estimate);
  out.Matrix(prefix + "gamma.csv", d.gamma);
  out.Matrix(prefix + "constant.csv", d.parts.constant);
  out.Matrix(prefix + "additive.csv", d.parts.additive);
  out.Matrix(prefix + "interaction.csv", d.parts.interaction);
  out.Pgm(prefix + "estimate.pgm", d.estimate, range);
  out.Pgm(prefix + "additive.pgm", d.parts.additive, range);
  out.Pgm(prefix + "interaction.pgm", d.parts.interaction, range);
  out.Pgm(prefix + "gamma.pgm", d.gamma, {0.0, 1.0});
}

int RunDenoise(const DenoiseOptions& o) {
  const bimono::Matrix z = ReadMatrixCsv(o.input);
  if (!z.allFinite()) throw InputError("denoise needs a complete matrix (no empty cells)");
  if (o.k < 1 || o.l < 1 || o.k >= z.rows() || o.l >= z.cols()) {
    throw InputError(fmt::format("need 1 <= k < {} and 1 <= l < {}", z.rows(), z.cols()));
  }
  const DenoiseConfig cfg = MakeDenoiseConfig(o.k, o.l, o.sigma, o.mode, o.tau, o.decomposition, o.common);
  const Vector xs = Vector::LinSpaced(z.rows(), 1.0, static_cast<double>(z.rows()));
  const Vector ys = Vector::LinSpaced(z.cols(), 1.0, static_cast<double>(z.cols()));
  const DenoiseResult d = Denoise(z, xs, ys, cfg);
  if (cfg.mode == ShrinkageMode::kBimonotone &&
      !QuotientConeSpec(GridShape(z.rows(), z.cols()), o.k, o.l).Contains(-d.gamma)) {
    throw CertificateFailure("shrinkage matrix violates the quotient-cone constraints");
  }

  const double span = std::max(std::abs(z.minCoeff()), std::abs(z.maxCoeff()));
  const PgmRange range = ParsePgmRange(o.common.pgm_range, {-span, span});
  OutputDir out(o.common.output_dir);
  WriteDenoiseOutputs(out, "", d, range);
  out.Matrix("coef_sq.csv", d.coefficients.array().square().matrix());
  out.Pgm("data.pgm", z, range);
  const bimono::Matrix c2 = d.coefficients.array().square();
  out.Pgm("coef_sq.pgm", (c2.array() / (1.0 + c2.array())).matrix(), {0.0, 1.0});
  WriteSigmaScan(out, "sigma_scan.csv", d.coefficients);

  json config = {{"input", o.input}, {"k", o.k},         {"l", o.l},
                 {"sigma", o.sigma}, {"mode", o.mode},   {"tau", o.tau},
                 {"decomposition", o.decomposition},     {"strategy", o.common.strategy}};
  const double p = static_cast<double>(z.size());
  out.Manifest("denoise", config, std::nullopt,
               {{"pgm_range", {range.lo, range.hi}},
                {"sigma_hat", d.sigma_hat},
                {"estimated_risk", d.estimated_risk},
                {"estimated_risk_normalized", d.estimated_risk / p}});
  fmt::print("denoise ({}): sigma-hat {:.6g}, normalized estimated risk {:.6g}\n", o.mode, d.sigma_hat,
             d.estimated_risk / p);
  return kExitOk;
}

// ---- simulate ----

struct SimulateOptions {
  Common common;
  std::string example = "binary";
  std::optional<std::uint64_t> seed;
  double lambda = kDefaultLightLambda;
  std::string sigma = "auto1:1";
  std::vector<double> multipliers = {0.5, 1.0, 1.5, 2.0};
  double design_scale = 1.0;
  Index k = 2;
  Index l = 2;
};

int RunSimulateBinary(const SimulateOptions& o, std::uint64_t seed) {
  BinaryExampleConfig cfg;
  cfg.lambda = o.lambda;
  if (!(cfg.lambda > 0.0)) throw InputError("--lambda must be positive");
  const BinaryExampleResult res = RunBinaryExample(cfg, seed, MakeSolverConfig(o.common));
  RequireCertificate(res.simple.solve, "simple fit");
  RequireCertificate(res.lightreg.solve, "light-regularization fit");

  const PgmRange range = ParsePgmRange(o.common.pgm_range, {0.0, 1.0});
  OutputDir out(o.common.output_dir);
  out.Matrix("truth.csv", res.data.truth);
  out.Matrix("data.csv", res.data.observed);
  out.Matrix("fit_simple.csv", res.simple.theta);
  out.Matrix("fit_lightreg.csv", res.lightreg.theta);
  out.Pgm("truth.pgm", res.data.truth, range);
  out.Pgm("data.pgm", res.data.observed, range);
  out.Pgm("fit_simple.pgm", res.simple.theta, range);
  out.Pgm("fit_lightreg.pgm", res.lightreg.theta, range);
  const json report = {{"aad_simple", res.aad_simple}, {"aad_lightreg", res.aad_lightreg}};
  out.Json("report.json", report);
  json config = {{"example", "binary"}, {"lambda", o.lambda}, {"strategy", o.common.strategy}};
  out.Manifest("simulate", config, seed, {{"pgm_range", {range.lo, range.hi}}});
  fmt::print("binary example (seed {}): AAD simple {:.6f}, light regularization {:.6f}\n", seed,
             res.aad_simple, res.aad_lightreg);
  return kExitOk;
}

int RunSimulateSplash(const SimulateOptions& o, std::uint64_t seed) {
  SplashConfig sc;
  sc.design_scale = o.design_scale;
  if (!(sc.design_scale > 0.0)) throw InputError("--design-scale must be positive");
  const SplashData data = GenerateSplash(sc, seed);
  if (o.k < 1 || o.l < 1 || o.k >= sc.rows || o.l >= sc.cols) throw InputError("bad k or l");
  if (o.multipliers.empty()) throw InputError("--scale needs at least one value");
  for (double c : o.multipliers) {
    if (!(c > 0.0)) throw InputError("--scale values must be positive");
  }

  const PgmRange range = ParsePgmRange(o.common.pgm_range, {-7.0, 7.0});
  OutputDir out(o.common.output_dir);
  out.Matrix("truth.csv", data.signal);
  out.Matrix("data.csv", data.observed);
  out.Pgm("truth.pgm", data.signal, range);
  out.Pgm("data.pgm", data.observed, range);

  json fits = json::array();
  DenoiseResult base;
  for (std::size_t n = 0; n < o.multipliers.size(); ++n) {
    DenoiseConfig cfg = MakeDenoiseConfig(o.k, o.l, o.sigma, "bimonotone", 2.0, "first", o.common);
    cfg.sigma.multiplier *= o.multipliers[n];
    const DenoiseResult d = Denoise(data.observed, data.xs, data.ys, cfg);
    const std::string prefix = fmt::format("c{}_", o.multipliers[n]);
    WriteDenoiseOutputs(out, prefix, d, range);
    const double loss = NormalizedLoss(d.estimate, data.signal);
    fits.push_back({{"multiplier", o.multipliers[n]}, {"sigma_hat", d.sigma_hat}, {"loss", loss}});
    fmt::print("splash example c = {}: sigma-hat {:.4f}, normalized loss {:.5f}\n", o.multipliers[n],
               d.sigma_hat, loss);
    if (n == 0) base = d;
  }
  out.Matrix("coef_sq.csv", base.coefficients.array().square().matrix());
  WriteSigmaScan(out, "sigma_scan.csv", base.coefficients);

  std::vector<double> grid;
  for (int n = 1; n <= 60; ++n) grid.push_back(0.05 * n);
  std::vector<std::vector<double>> rows;
  for (const auto& pt : BimonotoneLossCurve(base.coefficients, base.eta, base.basis, data.signal, grid)) {
    rows.push_back({pt.sigma_hat, pt.loss, pt.estimated_risk});
  }
  WriteTableCsv(out.Path("loss_curve.csv"), {"sigma_hat", "loss", "estimated_risk"}, rows);
  out.Json("report.json", {{"fits", fits}});

  json config = {{"example", "splash"}, {"sigma", o.sigma}, {"scales", o.multipliers},
                 {"design_scale", o.design_scale}, {"k", o.k}, {"l", o.l}, {"strategy", o.common.strategy}};
  out.Manifest("simulate", config, seed, {{"pgm_range", {range.lo, range.hi}}});
  return kExitOk;
}

int RunSimulate(const SimulateOptions& o) {
  const std::uint64_t seed = ResolveSeed(o.seed);
  if (o.example == "binary") return RunSimulateBinary(o, seed);
  if (o.example == "splash") return RunSimulateSplash(o, seed);
  throw InputError(fmt::format("unknown example '{}'", o.example));
}

// ---- mc-study ----

struct McOptions {
  Common common;
  Index reps = 200;
  std::optional<std::uint64_t> seed;
  std::vector<double> taus = {0.5, 0.6, 1.0, 1.5, 2.0};
  unsigned threads = 0;
  double design_scale = 1.0;
  Index k = 2;
  Index l = 2;
};

int RunMc(const McOptions& o) {
  if (o.reps < 2) throw InputError("--reps must be at least 2");
  for (double t : o.taus) {
    if (!(t > 0.0)) throw InputError("--tau values must be positive");
  }
  McStudyConfig cfg;
  cfg.replicates = o.reps;
  cfg.seed = ResolveSeed(o.seed);
  cfg.taus = o.taus;
  cfg.threads = o.threads;
  cfg.k = o.k;
  cfg.l = o.l;
  cfg.splash.design_scale = o.design_scale;
  const McStudyResult res = RunMcStudy(cfg);

  OutputDir out(o.common.output_dir);
  std::vector<std::string> header = {"replicate", "seed", "sigma_hat", "bimonotone"};
  for (double t : o.taus) header.push_back(fmt::format("tau_{}", t));
  std::vector<std::vector<double>> rows;
  for (std::size_t n = 0; n < res.replicates.size(); ++n) {
    const auto& rep = res.replicates[n];
    std::vector<double> row = {static_cast<double>(n + 1), static_cast<double>(rep.seed), rep.sigma_hat,
                               rep.bimonotone_loss};
    row.insert(row.end(), rep.threshold_losses.begin(), rep.threshold_losses.end());
    rows.push_back(row);
  }
  WriteTableCsv(out.Path("mc_replicates.csv"), header, rows);

  std::vector<std::string> sum_header = {"statistic", "bimonotone"};
  for (double t : o.taus) sum_header.push_back(fmt::format("tau_{}", t));
  std::string table;
  for (std::size_t c = 0; c < sum_header.size(); ++c) table += (c ? "," : "") + sum_header[c];
  table += '\n';
  auto add_row = [&](const char* name, auto field) {
    table += name;
    table += fmt::format(",{:.17g}", field(res.bimonotone));
    for (const auto& s : res.thresholds) table += fmt::format(",{:.17g}", field(s));
    table += '\n';
  };
  add_row("mean", [](const LossSummary& s) { return s.mean; });
  add_row("sd", [](const LossSummary& s) { return s.sd; });
  add_row("se", [](const LossSummary& s) { return s.se; });
  AtomicWrite(out.Path("mc_summary.csv"), table);

  json config = {{"reps", o.reps}, {"taus", o.taus}, {"k", o.k}, {"l", o.l}, {"design_scale", o.design_scale},
                 {"sigma", "auto1:1"}};
  out.Manifest("mc-study", config, cfg.seed);

  fmt::print("{:>12}", "bimonotone");
  for (double t : o.taus) fmt::print("{:>12}", fmt::format("tau={}", t));
  fmt::print("\n{:>12.4f}", res.bimonotone.mean);
  for (const auto& s : res.thresholds) fmt::print("{:>12.4f}", s.mean);
  fmt::print("\n{:>12}", fmt::format("({:.4f})", res.bimonotone.sd));
  for (const auto& s : res.thresholds) fmt::print("{:>12}", fmt::format("({:.4f})", s.sd));
  fmt::print("\n");
  return kExitOk;
}

void AddCommon(CLI::App* app, Common* c) {
  app->add_option("--output-dir", c->output_dir, "Directory for all outputs")->capture_default_str();
  app->add_option("--pgm-range", c->pgm_range, "Gray-scale range lo:hi for PGM images");
  app->add_option("--strategy", c->strategy, "Locally optimal step: 2a, 2b or 2c")
      ->check(CLI::IsMember({"2a", "2b", "2c"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bimonotone regression and bimonotone shrinkage"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Least squares fit under bimonotonicity");
  AddCommon(fit_cmd, &fit.common);
  fit_cmd->add_option("--input", fit.input, "x,y,z triples CSV or rows,cols matrix CSV")->required();
  fit_cmd->add_option("--weights", fit.weights, "Weight matrix CSV (matrix input)");
  fit_cmd->add_option("--format", fit.format)->check(CLI::IsMember({"auto", "matrix", "triples"}))->capture_default_str();
  fit_cmd->add_option("--mode", fit.mode)
      ->check(CLI::IsMember({"auto", "complete", "simple", "lightreg"}))
      ->capture_default_str();
  fit_cmd->add_option("--lambda", fit.lambda, "Penalty weight for lightreg")->capture_default_str();
  fit_cmd->add_option("--extra-x", fit.extra_x, "Extra row design points, comma separated");
  fit_cmd->add_option("--extra-y", fit.extra_y, "Extra column design points, comma separated");

  DenoiseOptions den;
  CLI::App* den_cmd = app.add_subcommand("denoise", "Shrinkage denoising of a complete matrix");
  AddCommon(den_cmd, &den.common);
  den_cmd->add_option("--input", den.input, "rows,cols matrix CSV")->required();
  den_cmd->add_option("--k", den.k, "Row annihilator degree")->capture_default_str();
  den_cmd->add_option("--l", den.l, "Column annihilator degree")->capture_default_str();
  den_cmd->add_option("--sigma", den.sigma, "auto1:K | auto2:K | fixed:V | scale:C")->capture_default_str();
  den_cmd->add_option("--mode", den.mode)->check(CLI::IsMember({"bimonotone", "threshold"}))->capture_default_str();
  den_cmd->add_option("--tau", den.tau, "Threshold constant")->capture_default_str();
  den_cmd->add_option("--decomposition", den.decomposition)
      ->check(CLI::IsMember({"first", "blocks"}))
      ->capture_default_str();

  SimulateOptions sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run the binary or splash example");
  AddCommon(sim_cmd, &sim.common);
  sim_cmd->add_option("example", sim.example, "binary | splash")
      ->check(CLI::IsMember({"binary", "splash"}))
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "RNG seed (generated and recorded when absent)");
  sim_cmd->add_option("--lambda", sim.lambda)->capture_default_str();
  sim_cmd->add_option("--sigma", sim.sigma, "Base sigma-hat spec for splash")->capture_default_str();
  sim_cmd->add_option("--scale", sim.multipliers, "Sigma-hat multipliers c for splash")->capture_default_str();
  sim_cmd->add_option("--design-scale", sim.design_scale, "Splash design stretch")->capture_default_str();
  sim_cmd->add_option("--k", sim.k)->capture_default_str();
  sim_cmd->add_option("--l", sim.l)->capture_default_str();

  McOptions mc;
  CLI::App* mc_cmd = app.add_subcommand("mc-study", "Monte Carlo risk comparison on the splash example");
  AddCommon(mc_cmd, &mc.common);
  mc_cmd->add_option("--reps", mc.reps)->capture_default_str();
  mc_cmd->add_option("--seed", mc.seed, "Master seed (generated and recorded when absent)");
  mc_cmd->add_option("--tau", mc.taus, "Threshold constants (repeatable)")->capture_default_str();
  mc_cmd->add_option("--threads", mc.threads, "Worker threads, 0 = all cores")->capture_default_str();
  mc_cmd->add_option("--design-scale", mc.design_scale)->capture_default_str();
  mc_cmd->add_option("--k", mc.k)->capture_default_str();
  mc_cmd->add_option("--l", mc.l)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*fit_cmd) return RunFit(fit);
    if (*den_cmd) return RunDenoise(den);
    if (*sim_cmd) return RunSimulate(sim);
    if (*mc_cmd) return RunMc(mc);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const CertificateFailure& e) {
    std::cerr << "certificate failure: " << e.what() << '\n';
    return kExitCertificate;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitCertificate;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
