#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "prhf/config.hpp"
#include "prhf/report.hpp"

using namespace prhf;

TEST(Config, ParsesKeysCommentsAndEnums) {
  const auto c = parse_config(R"(
# helium
Z = 2
N = 2      # two electrons
alpha = 0.0072973525693
n = 400
r_max = 25
algorithm = roothaan
level_shift = 0.25
initial_guess = shells
occupation = fixed
kinetic = nonrelativistic
shells = 0:0:1, 0:1:1
verify_kato = false
decay_r1 = 8
decay_r2 = 14
seed = 99
)");
  EXPECT_EQ(c.system.Z, 2.0);
  EXPECT_EQ(c.system.N, 2);
  EXPECT_EQ(c.solver.n, 400);
  EXPECT_EQ(c.solver.algorithm, Algorithm::RoothaanLevelShift);
  EXPECT_EQ(c.solver.level_shift, 0.25);
  EXPECT_EQ(c.solver.initial_guess, InitialGuess::ShellSeed);
  EXPECT_EQ(c.solver.occupation_mode, OccupationMode::Fixed);
  EXPECT_EQ(c.solver.kinetic, KineticKind::NonRelativistic);
  ASSERT_EQ(c.solver.shells.size(), 2u);
  EXPECT_EQ(c.solver.shells[1], (ShellSpec{0, 1, 1.0}));
  EXPECT_FALSE(c.verify.kato);
  EXPECT_TRUE(c.verify.greens);
  EXPECT_EQ(*c.decay_r2, 14.0);
  EXPECT_EQ(c.seed, 99u);
}

TEST(Config, Defaults) {
  const auto c = parse_config("Z = 1\nN = 1\n");
  EXPECT_EQ(c.solver.n, 1200);
  EXPECT_EQ(c.solver.r_max, 40.0);
  EXPECT_EQ(c.solver.algorithm, Algorithm::OptimalDamping);
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_FALSE(c.decay_r1.has_value());
}

TEST(Config, RejectsUnknownAndMalformed) {
  try {
    parse_config("Z = 2\ngrid_points = 10\nfoo = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("grid_points"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos);
  }
  EXPECT_THROW(parse_config("Z 2\n"), ConfigError);
  EXPECT_THROW(parse_config("Z = 2\nZ = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("Z = two\n"), ConfigError);
  EXPECT_THROW(parse_config("n = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config("algorithm = newton\n"), ConfigError);
  EXPECT_THROW(parse_config("decay_r1 = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("shells = 0:0\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/prhf.cfg"), ConfigError);
}

TEST(Config, ValidatesPhysics) {
  EXPECT_THROW(parse_config("Z = 88\n"), SubcriticalityViolated);
  EXPECT_THROW(parse_config("N = 0\n"), BadCount);
  EXPECT_THROW(parse_config("n = 4\n"), BadOptions);
  EXPECT_THROW(parse_config("Z = 2\nN = 2\nshells = 0:0:1\n"), BadOptions);
}

TEST(Report, NumberFormatting) {
  EXPECT_EQ(csv_number(1.0), "1.0000000000000000e+00");
  EXPECT_EQ(csv_number(-0.25), "-2.5000000000000000e-01");
  EXPECT_EQ(csv_number(0.1), "1.0000000000000001e-01");
  EXPECT_EQ(orbital_label(1, 0, 2), "P_l1_s0_2");
  const auto ts = utc_timestamp();
  EXPECT_EQ(ts.size(), 20u);
  EXPECT_EQ(ts.back(), 'Z');
}

TEST(Report, EnergyTraceCsv) {
  SCFReport r;
  r.energy_trace.push_back({1.0, -3.0, 0.5, 0.25, -1.75});
  const auto csv = energy_trace_csv(r);
  EXPECT_EQ(csv,
            "iteration,total,kinetic,nuclear,direct,exchange\n"
            "0,-1.7500000000000000e+00,1.0000000000000000e+00,-3.0000000000000000e+00,"
            "5.0000000000000000e-01,2.5000000000000000e-01\n");
}

TEST(Report, JsonRoundTrip) {
  AtomSystem s;
  s.Z = 4;
  s.N = 3;
  const auto j = to_json(s);
  EXPECT_EQ(j["Z"].get<double>(), 4.0);
  EXPECT_EQ(j["N"].get<int>(), 3);
  const auto path = std::filesystem::temp_directory_path() / "prhf_report_test.json";
  write_json(path.string(), j);
  std::ifstream in(path);
  EXPECT_EQ(Json::parse(in), j);
  std::filesystem::remove(path);
}
