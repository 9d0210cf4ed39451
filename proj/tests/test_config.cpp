#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "celsim/config.hpp"

using namespace celsim;

TEST(Config, ParsesAllKeysWithCommentsAndBlanks) {
  std::istringstream in(
      "# header\n"
      "\n"
      "A = 2.5\n"
      "  kappa=0.25   # trailing\n"
      "eta = -0.1\n"
      "nbar_a = 1\n"
      "nbar_b = 3e-1\n"
      "t_max = 40\n"
      "dt = 0.5\n");
  const RunConfig c = parse_config(in);
  EXPECT_EQ(c.params.A, 2.5);
  EXPECT_EQ(c.params.kappa, 0.25);
  EXPECT_EQ(c.params.eta, -0.1);
  EXPECT_EQ(c.params.nbar_a, 1.0);
  EXPECT_EQ(c.params.nbar_b, 0.3);
  EXPECT_EQ(c.t_max, 40.0);
  EXPECT_EQ(c.dt, 0.5);
}

TEST(Config, KeepsBaseValuesForMissingKeys) {
  RunConfig base;
  base.params.A = 7.0;
  base.dt = 0.2;
  std::istringstream in("eta = 0\n");
  const RunConfig c = parse_config(in, base);
  EXPECT_EQ(c.params.A, 7.0);
  EXPECT_EQ(c.dt, 0.2);
  EXPECT_EQ(c.params.eta, 0.0);
}

TEST(Config, UnknownKeyReportsLine) {
  std::istringstream in("A = 1\n\ngain = 2\n");
  try {
    parse_config(in);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("gain"), std::string::npos);
  }
}

TEST(Config, MalformedNumber) {
  for (const char* text : {"A = ten\n", "A = 1.5x\n", "A =\n", "A 1\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_config(in), ConfigError) << text;
  }
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/celsim.cfg"), ConfigError);
}

TEST(Config, LoadFromFile) {
  const std::string path = testing::TempDir() + "celsim_config_test.cfg";
  {
    std::ofstream out(path);
    out << "A = 1\nkappa = 0.5\n";
  }
  const RunConfig c = load_config(path);
  EXPECT_EQ(c.params.A, 1.0);
  EXPECT_EQ(c.params.kappa, 0.5);
  std::remove(path.c_str());
}
