#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <shuffle_spectra/ideal.hpp>
#include <shuffle_spectra/kernel_io.hpp>

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(SHUFFLE_SPECTRA_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("shuffle_spectra_cli_" + name);
}

}  // namespace

TEST(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run("").status, 2); }

TEST(Cli, UnknownFlagIsUsageError) { EXPECT_EQ(run("exact --n 3 --bogus").status, 2); }

TEST(Cli, HelpNamesTheQuantity) {
  const auto g = run("gcurve --help");
  EXPECT_EQ(g.status, 0);
  EXPECT_NE(g.out.find("G_b(u)"), std::string::npos);
  const auto e = run("eigen --help");
  EXPECT_NE(e.out.find("second eigenvalue"), std::string::npos);
  const auto c = run("singlecard --help");
  EXPECT_NE(c.out.find("9/n"), std::string::npos);
  for (const char* sub : {"kernel", "simulate", "exact"}) EXPECT_EQ(run(std::string(sub) + " --help").status, 0) << sub;
}

TEST(Cli, GcurveExample) {
  const auto r = run("gcurve --b 0.5 --samples 3");
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[0].rfind("# shuffle-spectra/1", 0), 0u);
  EXPECT_EQ(l[1], "b,u,g");
  EXPECT_EQ(l[2], "0.5,0,0");
  const auto mid = split(l[3]);
  EXPECT_EQ(mid[1], "0.5");
  EXPECT_DOUBLE_EQ(std::stod(mid[2]), shuffle_spectra::g(0.5, 0.5));
  EXPECT_EQ(split(l[4])[1], "1");
  EXPECT_DOUBLE_EQ(std::stod(split(l[4])[2]), 1.0);
}

TEST(Cli, GcurveSmallestBHasSteepestStart) {
  const auto r = run("gcurve --samples 101");
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u + 4 * 101);
  // Second sample of each curve: g(0.01) = e^{1-b} 0.01.
  std::vector<double> slope;
  for (std::size_t c = 0; c < 4; ++c) slope.push_back(std::stod(split(l[2 + c * 101 + 1])[2]) / 0.01);
  EXPECT_NEAR(slope[0], std::exp(0.7), 1e-12);
  for (std::size_t c = 1; c < 4; ++c) EXPECT_LT(slope[c], slope[c - 1]);
}

TEST(Cli, GcurveBadInput) {
  EXPECT_EQ(run("gcurve --b ''").status, 2);
  EXPECT_EQ(run("gcurve --b 1.5").status, 2);
  EXPECT_EQ(run("gcurve --b abc").status, 2);
  EXPECT_EQ(run("gcurve --samples 1").status, 2);
}

TEST(Cli, GcurveSvg) {
  const auto path = temp_path("g.svg");
  ASSERT_EQ(run("gcurve --svg " + path.string()).status, 0);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_NE(ss.str().find("<polyline"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, ExactCcrrFourCardsDecreasing) {
  const auto r = run("exact --kind ccrr --n 4 --rounds 5");
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 7u);
  EXPECT_EQ(l[1], "round,tv,tv_exact");
  double prev = 1.0;
  for (std::size_t t = 1; t <= 5; ++t) {
    const auto cells = split(l[1 + t]);
    EXPECT_EQ(cells[0], std::to_string(t));
    const double tv = std::stod(cells[1]);
    EXPECT_LT(tv, prev);
    prev = tv;
  }
}

TEST(Cli, ExactRejectsLargeDecksAndBadKinds) {
  EXPECT_EQ(run("exact --n 8").status, 2);
  EXPECT_EQ(run("exact --n 4 --kind riffle").status, 2);
}

TEST(Cli, ExactJson) {
  const auto r = run("exact --n 3 --rounds 2 --format json");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"tv_exact\""), std::string::npos);
  EXPECT_NE(r.out.find("\"subcommand\": \"exact\""), std::string::npos);
}

TEST(Cli, SimulateZeroRounds) {
  const auto r = run("simulate --n 50 --rounds 0 --reps 20 --quiet");
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[1], "round,mean_abs_S,mean_S,var_S,reps");
  const auto cells = split(l[2]);
  EXPECT_EQ(cells[0], "0");
  EXPECT_EQ(cells[3], "0");
  EXPECT_GT(std::stod(cells[1]), 0.0);
}

TEST(Cli, SimulateIsByteIdenticalForASeed) {
  const std::string args = "simulate --n 60 --rounds 3 --reps 50 --seed 7 --quiet";
  const auto a = run(args + " --threads 1"), b = run(args + " --threads 3");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(run("simulate --n 60 --rounds 3 --reps 50 --seed 8 --quiet").out, a.out);
  const auto p1 = run("simulate --kind top-to-random --stat positions --n 30 --rounds 2 --reps 40 --seed 1");
  const auto p2 = run("simulate --kind top-to-random --stat positions --n 30 --rounds 2 --reps 40 --seed 1");
  ASSERT_EQ(p1.status, 0);
  EXPECT_EQ(p1.out, p2.out);
}

TEST(Cli, SimulateSummaryAndErrors) {
  const auto path = temp_path("summary.json");
  ASSERT_EQ(run("simulate --n 40 --rounds 2 --reps 30 --quiet --summary " + path.string()).status, 0);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  for (const char* key : {"\"r_hat\"", "\"lambda\"", "\"tau\"", "\"separation\""})
    EXPECT_NE(ss.str().find(key), std::string::npos) << key;
  std::filesystem::remove(path);
  EXPECT_EQ(run("simulate --n 40 --kind ccr --stat S").status, 2);
  EXPECT_EQ(run("simulate --n 40 --reps 0").status, 2);
  EXPECT_EQ(run("simulate --rounds 2").status, 2);
}

TEST(Cli, EigenJson) {
  const auto r = run("eigen --n 200 --operator S");
  ASSERT_EQ(r.status, 0);
  for (const char* key : {"\"operator\": \"S\"", "\"value_re\"", "\"value_im\"", "\"residual\"", "\"norm_convention\"",
                          "\"iterations\"", "\"converged\": true", "\"config\""})
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  EXPECT_EQ(run("eigen --n 200 --operator X").status, 2);
  EXPECT_EQ(run("eigen --n 1").status, 2);
  EXPECT_EQ(run("eigen --n 50 --operator B --matrix-free").status, 2);
}

TEST(Cli, KernelCsvRoundTrips) {
  const auto path = temp_path("k.csv");
  ASSERT_EQ(run("kernel --n 20 --out " + path.string()).status, 0);
  std::ifstream f(path);
  const auto k = shuffle_spectra::read_kernel_csv(f);
  EXPECT_EQ(k.size(), 20u);
  const auto direct = shuffle_spectra::build_kernel(20);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j) EXPECT_EQ(k(i, j), direct(i, j));
  std::filesystem::remove(path);
  EXPECT_EQ(run("kernel --n 20 --format binary").status, 2);
}

TEST(Cli, SingleCard) {
  const auto r = run("singlecard --n 100 --a 0.5 --reps 2000 --buckets 5 --seed 2 --quiet");
  ASSERT_EQ(r.status, 0);
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 7u);
  EXPECT_EQ(split(l[1]).size(), 11u);
  EXPECT_EQ(run("singlecard --n 100 --a 0.5 --reps 2000 --buckets 5 --seed 2 --quiet").out, r.out);
  EXPECT_EQ(run("singlecard --n 100 --card 101").status, 2);
  EXPECT_EQ(run("singlecard --n 100 --a 1.5").status, 2);
}
