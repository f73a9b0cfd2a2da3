#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "qnp/io.hpp"
#include "test_support.hpp"

using namespace qnp;
using qnp::testing::Gen;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "qnp_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(FieldCsv, RoundTripIsBitExact) {
  Gen g;
  Field2D f(g.array(5, 7, -1e3, 1e3), 0.0625);
  f(0, 0) = std::numeric_limits<double>::denorm_min();
  f(1, 1) = -0.0;
  f(2, 2) = 1.0 / 3.0;
  std::stringstream ss;
  write_field_csv(ss, f);
  const Field2D back = read_field_csv(ss);
  EXPECT_EQ(back.values, f.values);
  EXPECT_EQ(back.h, f.h);
  const auto path = scratch("f.csv").string();
  write_field_csv(path, f);
  EXPECT_EQ(read_field_csv(path).values, f.values);
}

TEST(FieldCsv, MalformedInputIsRejected) {
  for (const std::string bad : {"", "2,2\n1,2\n3,4\n", "2,2,1\n1,2\n3\n", "2,2,1\n1,2\n", "2,2,1\n1,x\n3,4\n",
                                "2,2,1\n1,2\n3,4\n5,6\n", "0,2,1\n", "2.5,2,1\n1,2\n3,4\n"}) {
    std::istringstream is(bad);
    EXPECT_THROW(read_field_csv(is), InvalidArgument) << bad;
  }
  EXPECT_THROW(read_field_csv(std::string("/nonexistent/qnp.csv")), InvalidArgument);
}

TEST(Pgm, HeaderPixelsAndRange) {
  Field2D f(Array2D{{0.0, 1.0}, {2.0, 4.0}}, 1.0);
  const auto path = scratch("f.pgm").string();
  write_pgm(path, f);
  std::ifstream is(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxv = 0;
  is >> magic >> w >> h >> maxv;
  is.get();
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(w, 2);
  EXPECT_EQ(h, 2);
  EXPECT_EQ(maxv, 255);
  unsigned char px[4];
  is.read(reinterpret_cast<char*>(px), 4);
  // top grid row first
  EXPECT_EQ(px[0], 128);
  EXPECT_EQ(px[1], 255);
  EXPECT_EQ(px[2], 0);
  EXPECT_EQ(px[3], 64);
  std::ifstream range(path + ".range");
  std::string line;
  std::getline(range, line);
  EXPECT_EQ(line, "0,4");
}

TEST(Metrics, UnionHeaderAndDeterminism) {
  const std::vector<std::map<std::string, double>> rows{{{"b", 1.5}, {"a", 2.0}}, {{"c", 0.25}}};
  std::ostringstream a, b;
  write_metrics_csv(a, rows);
  write_metrics_csv(b, rows);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str(), "a,b,c\n2,1.5,\n,,0.25\n");
}

TEST(Config, KeyValues) {
  std::istringstream is("# comment\ncase = poisson\n\nK=8  # trailing\n tol= 1e-9\n");
  const auto kv = parse_key_values(is);
  EXPECT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv.at("case"), "poisson");
  EXPECT_EQ(kv.at("K"), "8");
  EXPECT_EQ(kv.at("tol"), "1e-9");
  std::istringstream bad("novalue\n");
  EXPECT_THROW(parse_key_values(bad), InvalidArgument);
  std::istringstream empty_key("=3\n");
  EXPECT_THROW(parse_key_values(empty_key), InvalidArgument);
}

TEST(Config, GridAndNumbers) {
  EXPECT_EQ(parse_grid("16x32"), (std::pair<int, int>{16, 32}));
  EXPECT_EQ(parse_grid("64X256"), (std::pair<int, int>{64, 256}));
  EXPECT_THROW(parse_grid("16"), InvalidArgument);
  EXPECT_THROW(parse_grid("2x8"), InvalidArgument);
  EXPECT_THROW(parse_grid("4.5x8"), InvalidArgument);
  EXPECT_DOUBLE_EQ(parse_double(" 2.5e-3 "), 2.5e-3);
  EXPECT_THROW(parse_double("1.0abc"), InvalidArgument);
  EXPECT_EQ(parse_double(format_double(0.1)), 0.1);
}
