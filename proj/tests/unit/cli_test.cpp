#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "cdmkit/text_io.hpp"
#include "oracles.hpp"
#include "reference_data.hpp"

namespace {

namespace fs = std::filesystem;
using namespace cdmkit;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "cdmkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("cdmkit_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  static std::string poly(const std::vector<double>& c) { return format_polynomial(Polynomial(c)); }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"indices", file("one.poly", "3\n")}).code, 2);
  // Omega root at +1: s = +-i, no stable square root.
  const Result bad = run({"sqroot", file("pos.poly", "-1 1\n")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_FALSE(bad.err.empty());
  EXPECT_EQ(run({"indices", "--format", "xml", file("q.poly", "1 2 1\n")}).code, 2);
  EXPECT_EQ(run({"indices", (dir_ / "missing.poly").string()}).code, 2);
}

TEST_F(Cli, IndicesAndTarget) {
  const Result r = run({"indices", file("std.poly", "1562.5 3125 2500 1000 200 20 1\n")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("tau = 2\n"), std::string::npos);
  const Result csv = run({"indices", "--format", "csv", file("std2.poly", "1 3 3 1\n")});
  EXPECT_EQ(csv.code, 0);

  const Result t = run({"target", "--order", "6", "--tau", "2", "--a0", "1562.5"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(parse_polynomial(t.out), Polynomial({1562.5, 3125, 2500, 1000, 200, 20, 1}));
}

TEST_F(Cli, SquareOfLongitudinalDenominator) {
  const Result r = run({"square", file("lon.poly", poly(reference::kLongVerDen))});
  ASSERT_EQ(r.code, 0) << r.err;
  const Polynomial sq = parse_polynomial(r.out);
  for (int i = 0; i <= 5; ++i) {
    EXPECT_LE(oracle::rel_err(sq[i], reference::kLongVerDenSq[static_cast<std::size_t>(i)]), 1e-3) << i;
  }
}

TEST_F(Cli, TargetThenSquareGivesLateralTarget) {
  const Result t = run({"target", "--order", "6", "--tau", "2", "--gamma", "2.5,2,2,2,2", "--a0", "1562.5"});
  ASSERT_EQ(t.code, 0) << t.err;
  const Result sq = run({"square", file("t.poly", t.out)});
  ASSERT_EQ(sq.code, 0) << sq.err;
  EXPECT_EQ(parse_polynomial(sq.out), Polynomial(reference::kLatDirTargetSq));
  const Result back = run({"sqroot", file("tsq.poly", sq.out)});
  ASSERT_EQ(back.code, 0) << back.err;
  EXPECT_LE(max_relative_coefficient_error(parse_polynomial(back.out), parse_polynomial(t.out)), 1e-8);
}

TEST_F(Cli, HoverWeightsAndRegulator) {
  const std::string den = file("den.poly", poly(reference::kLongVerDen));
  const std::string tsq = file("tsq.poly", poly(reference::kLongVerTargetSq));
  const Result w = run({"lq-weights", "--den", den, "--target-sq", tsq});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_NE(w.out.find("q_indefinite = yes"), std::string::npos);
  EXPECT_NE(w.out.find("# warning:"), std::string::npos);
  const Result l = run({"lqr", "--den", den, "--target-sq", tsq});
  ASSERT_EQ(l.code, 0) << l.err;
  EXPECT_NE(l.out.find("residual"), std::string::npos);
  // System mode with an indefinite Q is refused unless allowed.
  const std::string sys = file("s.ss", "1 1 1\n1\n1\n1\n0\n");
  EXPECT_EQ(run({"lqr", "--system", sys, "--q", file("q.m", "3\n"), "--r", file("r.m", "1\n")}).code, 0);
  EXPECT_EQ(run({"lqr", "--system", sys, "--q", file("qn.m", "-1\n"), "--r", file("r2.m", "1\n")}).code, 2);
}

TEST_F(Cli, DesignSimulateSweep) {
  const std::string target = file("speed.poly", poly(reference::kSpeedTarget));
  const Result d = run({"design", "--corpus", "longitudinal_speed", "--target", target});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_NE(d.out.find("k1 = "), std::string::npos);

  const Result s = run({"simulate", "--corpus", "longitudinal_speed", "--target", target, "--signal", "step:u",
                        "--t-end", "5"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(s.out.rfind("time,", 0), 0u);
  EXPECT_EQ(std::count(s.out.begin(), s.out.end(), '\n'), 502);

  const Result w = run({"sweep", "--corpus", "longitudinal_speed", "--target", target, "--perturb", "den[0]=0.3",
                        "--samples", "4", "--t-end", "20", "--threads", "2", "--trace-dir", (dir_ / "tr").string()});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_TRUE(fs::exists(dir_ / "tr" / "sample_003.csv"));
  EXPECT_EQ(run({"sweep", "--corpus", "longitudinal_speed", "--target", target, "--perturb", "den[9]=0.3"}).code, 2);
}

TEST_F(Cli, DiagramAndCorpus) {
  const Result d = run({"diagram", "P=" + file("p.poly", "1 -2\n")});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(d.out, "label,index,coefficient,abs_coefficient,sign\nP,0,1,1,1\nP,1,-2,2,-1\n");

  const Result list = run({"corpus"});
  ASSERT_EQ(list.code, 0);
  for (const auto& name : corpus_names()) EXPECT_NE(list.out.find(name), std::string::npos);
  ASSERT_EQ(run({"corpus", "--export-dir", (dir_ / "corpus").string()}).code, 0);
  for (const auto& name : corpus_names()) {
    const PlantTF p = parse_plant(slurp(dir_ / "corpus" / (name + ".plant")));
    EXPECT_EQ(p.den, corpus_load(name).den) << name;
  }
  EXPECT_EQ(run({"corpus", "nope"}).code, 2);
}

TEST_F(Cli, OutputFileIsDeterministic) {
  const std::string target = file("speed.poly", poly(reference::kSpeedTarget));
  const std::string a = (dir_ / "a.csv").string(), b = (dir_ / "b.csv").string();
  for (const auto& out : {a, b}) {
    ASSERT_EQ(run({"sweep", "--corpus", "longitudinal_speed", "--target", target, "--perturb", "den[1]=0.2",
                   "--samples", "6", "--seed", "5", "--t-end", "10", "--threads", "3", "-o", out})
                  .code,
              0);
  }
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
}

}  // namespace
