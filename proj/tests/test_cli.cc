#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "bimono/io.hpp"

using namespace bimono;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("bimono_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  fs::path Path(const std::string& name) const { return dir_ / name; }

  void Put(const std::string& name, const std::string& text) const { std::ofstream(Path(name)) << text; }

  int Run(const std::string& args) const {
    const std::string cmd = std::string(BIMONO_CLI_PATH) + " " + args + " > " + Path("stdout.txt").string() +
                            " 2> " + Path("stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Out(const std::string& sub) const { return "--output-dir " + Path(sub).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, TwoPointTriplesGivePlateau) {
  Put("pts.csv", "x,y,z\n2,3,0\n6,7,1\n");
  ASSERT_EQ(Run("fit --input " + Path("pts.csv").string() +
                " --extra-x 1,2,3,4,5,6,7 --extra-y 1,2,3,4,5,6,7,8,9,10 " + Out("o")),
            0);
  const Matrix theta = ReadMatrixCsv(Path("o/theta.csv").string());
  ASSERT_EQ(theta.rows(), 7);
  ASSERT_EQ(theta.cols(), 10);
  for (Index i = 0; i < 7; ++i) {
    for (Index j = 0; j < 10; ++j) {
      const bool high = i >= 5 && j >= 6;
      const bool low = i <= 1 && j <= 2;
      EXPECT_EQ(theta(i, j), high ? 1.0 : (low ? 0.0 : 0.5)) << i << "," << j;
    }
  }
  const json cert = json::parse(ReadFile(Path("o/certificate.json").string()));
  EXPECT_TRUE(cert.at("holds").get<bool>());
  EXPECT_TRUE(fs::exists(Path("o/theta_lower.csv")));
  EXPECT_TRUE(fs::exists(Path("o/theta.pgm")));
}

TEST_F(Cli, MatrixFitModes) {
  Put("m.csv", "3,3\n3,1,2\n1,,0\n5,4,6\n");
  ASSERT_EQ(Run("fit --input " + Path("m.csv").string() + " --mode lightreg --strategy 2b " + Out("a")), 0);
  const Matrix theta = ReadMatrixCsv(Path("a/theta.csv").string());
  EXPECT_EQ(theta.rows(), 3);
  EXPECT_TRUE(theta.allFinite());
  Put("full.csv", "2,2\n2,1\n0,3\n");
  ASSERT_EQ(Run("fit --input " + Path("full.csv").string() + " " + Out("b")), 0);
  const Matrix full = ReadMatrixCsv(Path("b/theta.csv").string());
  EXPECT_NEAR(full(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(full(1, 1), 3.0, 1e-12);
  EXPECT_NEAR(full(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(full(1, 0), 1.0, 1e-12);
}

TEST_F(Cli, InputErrorsExitWithTwo) {
  EXPECT_EQ(Run("fit --input " + Path("missing.csv").string() + " " + Out("x")), 2);
  Put("bad.csv", "2,2\n1,2\n3,oops\n");
  EXPECT_EQ(Run("fit --input " + Path("bad.csv").string() + " --format matrix " + Out("x")), 2);
  EXPECT_NE(ReadFile(Path("stderr.txt").string()).find("column 2"), std::string::npos);
  EXPECT_EQ(Run("fit --input a.csv --strategy 9z"), 2);
  EXPECT_EQ(Run("no-such-command"), 2);
  EXPECT_EQ(Run(""), 2);
  Put("m.csv", "3,3\n1,2,3\n4,5,6\n7,8,9\n");
  EXPECT_EQ(Run("denoise --input " + Path("m.csv").string() + " --k 3 " + Out("x")), 2);
  EXPECT_EQ(Run("denoise --input " + Path("m.csv").string() + " --sigma auto1:2.5 " + Out("x")), 2);
  EXPECT_EQ(Run("mc-study --reps 1 " + Out("x")), 2);
  EXPECT_EQ(Run("--version"), 0);
}

TEST_F(Cli, DenoiseOutputsAndScanHeader) {
  std::string text = "12,15\n";
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 15; ++j) {
      text += std::to_string(0.1 * i + 0.05 * j + 0.3 * std::sin(i * 7.0 + j * 3.0));
      text += j + 1 < 15 ? "," : "\n";
    }
  }
  Put("z.csv", text);
  ASSERT_EQ(Run("denoise --input " + Path("z.csv").string() + " --k 2 --l 1 --sigma fixed:0.3 " + Out("d")), 0);
  const Matrix est = ReadMatrixCsv(Path("d/estimate.csv").string());
  const Matrix parts = ReadMatrixCsv(Path("d/constant.csv").string()) +
                       ReadMatrixCsv(Path("d/additive.csv").string()) +
                       ReadMatrixCsv(Path("d/interaction.csv").string());
  EXPECT_LE((est - parts).cwiseAbs().maxCoeff(), 1e-12);
  const Matrix gamma = ReadMatrixCsv(Path("d/gamma.csv").string());
  EXPECT_GE(gamma.minCoeff(), 0.0);
  EXPECT_LE(gamma.maxCoeff(), 1.0);
  // The corner is unconstrained, so its factor is the plain positive part.
  const Matrix coef_sq = ReadMatrixCsv(Path("d/coef_sq.csv").string());
  EXPECT_NEAR(gamma(0, 0), std::max(0.0, 1.0 - 0.09 / coef_sq(0, 0)), 1e-15);
  const std::string scan = ReadFile(Path("d/sigma_scan.csv").string());
  EXPECT_EQ(scan.substr(0, scan.find('\n')), "kappa,sigma1,sigma2");
  for (const char* f : {"estimate.pgm", "coef_sq.csv", "data.pgm", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(Path(std::string("d/") + f))) << f;
  }
  ASSERT_EQ(Run("denoise --input " + Path("z.csv").string() + " --k 2 --l 1 --mode threshold --tau 1 --sigma fixed:0.3 " +
                Out("t")),
            0);
  const Matrix tg = ReadMatrixCsv(Path("t/gamma.csv").string());
  const double cut = std::log(180.0) * 0.09;
  for (Index i = 0; i < tg.size(); ++i) {
    EXPECT_NEAR(tg(i), std::max(0.0, 1.0 - cut / coef_sq(i)), 1e-14);
  }
}

TEST_F(Cli, SeededRunsAreByteIdentical) {
  const std::string args = "simulate binary --seed 11 ";
  ASSERT_EQ(Run(args + Out("r1")), 0);
  ASSERT_EQ(Run(args + Out("r2")), 0);
  for (const char* f : {"manifest.json", "fit_simple.csv", "fit_lightreg.csv", "report.json", "data.csv"}) {
    EXPECT_EQ(ReadFile(Path(std::string("r1/") + f).string()), ReadFile(Path(std::string("r2/") + f).string()))
        << f;
  }
  const json m = json::parse(ReadFile(Path("r1/manifest.json").string()));
  EXPECT_EQ(m.at("seed").get<std::uint64_t>(), 11u);
  EXPECT_EQ(m.at("subcommand").get<std::string>(), "simulate");
  EXPECT_TRUE(m.at("config_hash").is_string());
  const json rep = json::parse(ReadFile(Path("r1/report.json").string()));
  EXPECT_GT(rep.at("aad_simple").get<double>(), 0.0);
}

TEST_F(Cli, UnseededRunRecordsItsSeed) {
  ASSERT_EQ(Run("simulate splash --scale 1 " + Out("s")), 0);
  const json m = json::parse(ReadFile(Path("s/manifest.json").string()));
  ASSERT_TRUE(m.at("seed").is_number_unsigned());
  const std::string seed = std::to_string(m.at("seed").get<std::uint64_t>());
  ASSERT_EQ(Run("simulate splash --scale 1 --seed " + seed + " " + Out("t")), 0);
  EXPECT_EQ(ReadFile(Path("s/c1_estimate.csv").string()), ReadFile(Path("t/c1_estimate.csv").string()));
  const std::string curve = ReadFile(Path("s/loss_curve.csv").string());
  EXPECT_EQ(curve.substr(0, curve.find('\n')), "sigma_hat,loss,estimated_risk");
}

TEST_F(Cli, McStudyTable) {
  ASSERT_EQ(Run("mc-study --reps 2 --seed 5 --tau 1 --tau 2 --threads 1 " + Out("mc")), 0);
  const std::string summary = ReadFile(Path("mc/mc_summary.csv").string());
  EXPECT_EQ(summary.find("nan"), std::string::npos);
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 4);
  const std::string reps = ReadFile(Path("mc/mc_replicates.csv").string());
  EXPECT_EQ(std::count(reps.begin(), reps.end(), '\n'), 3);
}
