#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "bimono/io.hpp"
#include "oracles.hpp"

using namespace bimono;
namespace fs = std::filesystem;

namespace {

fs::path TempDir() {
  const fs::path dir = fs::temp_directory_path() / "bimono_io_test";
  fs::create_directories(dir);
  return dir;
}

std::string ErrorOf(const std::string& text) {
  try {
    ParseMatrixCsv(text, "m.csv");
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(MatrixCsv, RoundTripIsExact) {
  std::mt19937_64 rng(1);
  Matrix m = oracle::Gaussian(rng, 7, 5, 1e3);
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = -0.0;
  m(2, 2) = 1e-300;
  m(3, 3) = std::numeric_limits<double>::quiet_NaN();
  const Matrix back = ParseMatrixCsv(FormatMatrixCsv(m));
  for (Index i = 0; i < m.size(); ++i) {
    if (std::isnan(m(i))) {
      EXPECT_TRUE(std::isnan(back(i)));
    } else {
      EXPECT_EQ(back(i), m(i));
    }
  }
  const fs::path p = TempDir() / "round.csv";
  WriteMatrixCsv(p.string(), m.topRows(2));
  EXPECT_EQ(ReadMatrixCsv(p.string()).rows(), 2);
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
}

TEST(MatrixCsv, ErrorsCarryPosition) {
  EXPECT_NE(ErrorOf("").find("empty"), std::string::npos);
  EXPECT_NE(ErrorOf("2\n1\n").find("m.csv:1"), std::string::npos);
  EXPECT_NE(ErrorOf("2,2\n1,2\n3\n").find("m.csv:3"), std::string::npos);
  EXPECT_NE(ErrorOf("2,2\n1,2\n3,x\n").find("column 2"), std::string::npos);
  EXPECT_NE(ErrorOf("2,2\n1,2\n").find("expected 2 data rows"), std::string::npos);
  EXPECT_NE(ErrorOf("1,2\n1,2\n3,4\n").find("more than 1"), std::string::npos);
  EXPECT_THROW(ReadMatrixCsv("/nonexistent/file.csv"), InputError);
}

TEST(MatrixCsv, ToleratesBlankLinesAndCrLf) {
  const Matrix m = ParseMatrixCsv("2,2\r\n1, 2\r\n\r\n3,+4\r\n");
  EXPECT_EQ(m, (Matrix(2, 2) << 1, 2, 3, 4).finished());
}

TEST(TriplesCsv, HeaderCommentsAndErrors) {
  const auto obs = ParseTriplesCsv("x,y,z\n# note\n2,3,0\n\n6,7,1\n");
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(obs[1].x, 6.0);
  EXPECT_EQ(obs[1].z, 1.0);
  EXPECT_EQ(ParseTriplesCsv("1,2,3\n").size(), 1u);
  EXPECT_THROW(ParseTriplesCsv("x,y,z\n1,2\n"), InputError);
  EXPECT_THROW(ParseTriplesCsv("x,y,z\n1,2,q\n"), InputError);
  EXPECT_THROW(ParseTriplesCsv("x,y,z\n"), InputError);
}

TEST(Pgm, HeaderAndMapping) {
  Matrix m(2, 3);
  m << -7, 0, 7, 100, std::numeric_limits<double>::quiet_NaN(), -100;
  const std::string pgm = FormatPgm(m, -7.0, 7.0);
  const std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(pgm.size(), header.size() + 6);
  EXPECT_EQ(pgm.substr(0, header.size()), header);
  const auto* px = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  EXPECT_EQ(px[0], 0);
  EXPECT_EQ(px[1], 128);
  EXPECT_EQ(px[2], 255);
  EXPECT_EQ(px[3], 255);
  EXPECT_EQ(px[4], 128);
  EXPECT_EQ(px[5], 0);
  EXPECT_THROW(FormatPgm(m, 1.0, 1.0), std::invalid_argument);
}

TEST(Table, WritesHeaderAndRows) {
  const fs::path p = TempDir() / "table.csv";
  WriteTableCsv(p.string(), {"a", "b"}, {{1, 0.5}, {2, 0.25}});
  EXPECT_EQ(ReadFile(p.string()), "a,b\n1,0.5\n2,0.25\n");
  EXPECT_THROW(WriteTableCsv(p.string(), {"a"}, {{1, 2}}), std::invalid_argument);
}

TEST(Hash, Fnv1aReferenceValues) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
}
