#include "bryc/cli.hpp"
#include "bryc/verify.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::vector<const char*> argv{"bryc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = bryc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bryc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

const std::vector<std::string> kGauss{"--rho", "0.5", "--A", "0.16", "--B", "0.32",
                                      "--C", "0.6", "--D", "0"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_F(Cli, ClassifyExample) {
  const auto r = run(with({"classify"}, kGauss));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "ExistsGaussian");
}

TEST_F(Cli, FavardExample) {
  const auto r = run({"favard", "--rho", "0.5", "--q", "4", "--nmax", "100"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "TerminatesAt n=2 (lattice m=1)\n");
}

TEST_F(Cli, UsageErrors) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"nosuchcommand"},
           {"classify", "--rho"},
           {"classify", "--rho", "abc"},
           {"favard", "--rho", "0.5"},
           {"derive", "--rho", "0.5"},
           {"derive", "--rho", "0.5", "--B", "0.1", "--q", "0.2"},
           {"sample", "--rho", "0.5", "--q", "0.3", "--case", "gaussian"},
           {"sample", "--rho", "0.5", "--case", "nonsense"},
       }) {
    const auto r = run(args);
    EXPECT_EQ(r.code, bryc::cli::kUsage) << (args.empty() ? "" : args[0]);
    EXPECT_EQ(r.err.rfind("bryc", 0), 0u) << r.err;
    EXPECT_NE(r.err.find("hint:"), std::string::npos) << r.err;
  }
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, ValidationErrors) {
  EXPECT_EQ(run({"classify", "--rho", "0.5", "--A", "0.1", "--B", "0.1", "--C", "-1", "--D", "0"}).code,
            bryc::cli::kValidation);
  EXPECT_EQ(run({"density", "--q", "1.5", "--out", path("d.csv")}).code, bryc::cli::kValidation);
  EXPECT_EQ(run({"verify", "--in", path("missing.csv"), "--rho", "0.5"}).code, bryc::cli::kValidation);
  // q = 1/rho^2 is the first B3 lattice point, where existence is open
  const auto r = run({"sample", "--rho", "0.5", "--q", "4", "--chains", "2", "--steps", "5",
                      "--out", path("x.csv")});
  EXPECT_EQ(r.code, bryc::cli::kValidation);
  EXPECT_NE(r.err.find("existence open"), std::string::npos) << r.err;
}

TEST_F(Cli, SampleVerifyPass) {
  const std::string csv = path("g.csv"), json = path("g.json");
  ASSERT_EQ(run({"sample", "--rho", "0.5", "--case", "gaussian", "--chains", "100", "--steps", "2000",
                 "--out", csv})
                .code,
            0);
  const auto v = run(with({"verify", "--in", csv, "--report", json}, kGauss));
  EXPECT_EQ(v.code, 0) << v.out << v.err;
  const auto rep = bryc::read_report(slurp(json));
  EXPECT_EQ(rep.n_fail(), 0);
  EXPECT_EQ(rep.meta.n_chains, 100u);
  EXPECT_EQ(rep.meta.n_steps, 2000u);
  EXPECT_EQ(rep.meta.seed, 42u);
}

TEST_F(Cli, CorruptedCsvFailsVerify) {
  const std::string csv = path("g.csv");
  ASSERT_EQ(run({"sample", "--rho", "0.5", "--case", "gaussian", "--chains", "100", "--steps", "2000",
                 "--out", csv})
                .code,
            0);
  // shift every value by 0.2
  std::ifstream in(csv);
  std::ofstream out(path("bad.csv"));
  std::string line;
  std::getline(in, line);
  out << line << "\n";
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out << line.substr(0, cut + 1) << std::stod(line.substr(cut + 1)) + 0.2 << "\n";
  }
  out.close();
  const auto v = run(with({"verify", "--in", path("bad.csv"), "--report", path("bad.json")}, kGauss));
  EXPECT_EQ(v.code, bryc::cli::kVerification);
  const auto rep = bryc::read_report(slurp(path("bad.json")));
  EXPECT_GT(rep.n_fail(), 0);
  const auto ids = rep.failed_ids();
  EXPECT_NE(std::find(ids.begin(), ids.end(), "sym.mean"), ids.end());
  EXPECT_NE(v.out.find("sym.mean"), std::string::npos) << v.out;
}

TEST_F(Cli, SameSeedSameBytes) {
  const std::vector<std::string> base{"sample", "--rho", "0.7", "--q", "0.5", "--chains", "8",
                                      "--steps", "200", "--seed", "5"};
  ASSERT_EQ(run(with(base, {"--threads", "1", "--out", path("a.csv")})).code, 0);
  ASSERT_EQ(run(with(base, {"--threads", "3", "--out", path("b.csv")})).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  ASSERT_EQ(run(with(base, {"--out", "-"})).out, slurp(path("a.csv")));
}

TEST_F(Cli, ConfigFile) {
  {
    std::ofstream cfg(path("cfg.json"));
    cfg << R"({"rho": 0.5, "case": "two-point", "chains": 3, "steps": 10, "seed": 9})";
  }
  ASSERT_EQ(run({"sample", "--config", path("cfg.json"), "--out", path("c.csv")}).code, 0);
  ASSERT_EQ(run({"sample", "--rho", "0.5", "--case", "two-point", "--chains", "3", "--steps", "10",
                 "--seed", "9", "--out", path("d.csv")})
                .code,
            0);
  EXPECT_EQ(slurp(path("c.csv")), slurp(path("d.csv")));
  {
    std::ofstream cfg(path("broken.json"));
    cfg << "{not json";
  }
  EXPECT_EQ(run({"sample", "--config", path("broken.json"), "--out", path("e.csv")}).code,
            bryc::cli::kUsage);
}

// Every --json output parses, and the report reader echoes it unchanged.
TEST_F(Cli, JsonOutputsRoundTrip) {
  const std::string csv = path("s.csv");
  ASSERT_EQ(run({"sample", "--rho", "0.5", "--case", "gaussian", "--chains", "20", "--steps", "300",
                 "--out", csv})
                .code,
            0);
  const std::vector<std::vector<std::string>> commands{
      with({"classify"}, kGauss),
      {"derive", "--rho", "0.5", "--q", "0.3"},
      {"derive", "--rho", "0.5", "--B", "0.2"},
      {"boundary", "--rho", "0.5", "--mmax", "3"},
      with({"coeffs"}, kGauss),
      {"favard", "--rho", "0.5", "--q", "3", "--nmax", "50"},
      {"density", "--q", "0.5", "--points", "11", "--out", path("dens.csv")},
      {"kernel-check", "--rho", "0.5", "--q", "0.3"},
      {"sample", "--rho", "0.5", "--case", "two-point", "--chains", "2", "--steps", "5",
       "--out", path("t.csv")},
      with({"verify", "--in", csv}, kGauss),
  };
  int i = 0;
  for (auto args : commands) {
    args.push_back("--json");
    const auto r = run(args);
    ASSERT_TRUE(r.code == 0 || r.code == bryc::cli::kVerification) << args[0] << ": " << r.err;
    nlohmann::ordered_json doc;
    ASSERT_NO_THROW(doc = nlohmann::ordered_json::parse(r.out)) << args[0] << ": " << r.out;
    ASSERT_TRUE(doc.is_object()) << args[0];
    const std::string file = path("o" + std::to_string(i++) + ".json");
    std::ofstream(file) << r.out;
    const auto back = run({"report", "--in", file, "--json"});
    EXPECT_EQ(back.code, 0) << args[0] << ": " << back.err;
    EXPECT_EQ(nlohmann::ordered_json::parse(back.out), doc) << args[0];
    if (args[0] == "verify") {
      EXPECT_NO_THROW(bryc::read_report(r.out));
      EXPECT_EQ(back.out, r.out);
    }
  }
}

TEST_F(Cli, DensityCsv) {
  ASSERT_EQ(run({"density", "--q", "0", "--points", "5", "--out", path("d.csv")}).code, 0);
  const std::string text = slurp(path("d.csv"));
  EXPECT_EQ(text.rfind("x,density,cdf\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
}
