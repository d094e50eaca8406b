#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mlbm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mlbm::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mlbm_cli_" + std::to_string(::getpid()) + "_" + name);
}

std::vector<std::string> lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, RunPrintsThroughput) {
  const auto r = cli({"run", "--solver", "two-step-prism", "--dims", "16,16,16", "--steps", "4", "--tile", "4"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("MFLUPS"), std::string::npos);
  EXPECT_NE(r.out.find("seconds"), std::string::npos);
}

TEST(Cli, RunWritesArtifacts) {
  const auto dump = temp_path("d.bin"), norms = temp_path("n.txt"), csv = temp_path("r.csv");
  std::filesystem::remove(csv);
  const auto r = cli({"run", "--solver", "fuse", "--dims", "4,5,6", "--steps", "3", "--u-lid", "0.1", "--dump",
                      dump.string(), "--norms", norms.string(), "--csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::filesystem::file_size(dump), mlbm::field_dump_size({4, 5, 6}));
  EXPECT_EQ(lines(norms).size(), 120u);
  const auto rows = lines(csv);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], mlbm::kBenchCsvHeader);
  EXPECT_EQ(rows[1].rfind("fuse,4,5,6,", 0), 0u);
  for (const auto& p : {dump, norms, csv}) std::filesystem::remove(p);
}

TEST(Cli, OddStepsWithTwoStepSolver) {
  const auto r = cli({"run", "--solver", "two-step-prism", "--dims", "8,8,8", "--steps", "7"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("even"), std::string::npos) << r.err;
}

TEST(Cli, IndivisibleWorkers) {
  const auto r = cli({"run", "--solver", "two-step-prism-par", "--dims", "8,8,8", "--steps", "2", "--workers", "3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("divisible"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"run", "--solver", "fuse", "--dims", "8,8", "--steps", "2"}).code, 2);
  EXPECT_EQ(cli({"run", "--solver", "nope", "--dims", "8,8,8", "--steps", "2"}).code, 2);
  EXPECT_EQ(cli({"run", "--solver", "fuse", "--dims", "2,8,8", "--steps", "2"}).code, 2);
  EXPECT_EQ(cli({"run", "--solver", "fuse", "--dims", "8,8,8", "--steps", "2", "--omega", "2.5"}).code, 2);
  EXPECT_EQ(cli({"run", "--solver", "fuse", "--dims", "8,8,8"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, VerifyPasses) {
  const auto r = cli({"verify", "--dims", "8,8,8", "--steps", "8", "--workers", "2"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  for (const char* kind : {"fuse", "fuse-prism", "two-step", "two-step-prism", "two-step-prism-par"})
    EXPECT_NE(r.out.find(kind), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, VerifyWithParallelRow) {
  const auto r = cli({"verify", "--dims", "5,6,7", "--steps", "8", "--workers", "1"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("two-step-prism-par"), std::string::npos);
}

TEST(Cli, VerifyIsDeterministicAndZeroTolPrintsTable) {
  const auto a = cli({"verify", "--dims", "5,6,7", "--steps", "4", "--tol", "0"});
  const auto b = cli({"verify", "--dims", "5,6,7", "--steps", "4", "--tol", "0"});
  EXPECT_TRUE(a.code == 0 || a.code == 1);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("max_abs_dev"), std::string::npos);
}

TEST(Cli, VerifyRejectsOddSteps) {
  EXPECT_EQ(cli({"verify", "--dims", "5,6,7", "--steps", "3"}).code, 2);
}

TEST(Cli, BenchCrossProductAndMeans) {
  const auto csv = temp_path("bench.csv");
  std::filesystem::remove(csv);
  const auto r = cli({"bench", "--dims", "6,6,6", "--steps", "2", "--solvers", "fuse-prism,two-step-prism-par",
                      "--tiles", "8,16,32", "--workers", "1,2", "--repeat", "5", "--csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(csv);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0], "solver,lx,ly,lz,tile,workers,steps,seconds,mflups,rep");

  std::map<std::string, int> records;
  std::map<std::string, std::vector<double>> reps;
  std::map<std::string, double> means;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    std::vector<std::string> f;
    std::stringstream ss(rows[n]);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    ASSERT_EQ(f.size(), 10u);
    const std::string config = f[0] + "/" + f[4] + "/" + f[5];
    if (f[9] == "mean") {
      means[config] = std::stod(f[8]);
    } else {
      ++records[f[0] + "/" + f[5]];
      reps[config].push_back(std::stod(f[8]));
    }
  }
  EXPECT_EQ(records["fuse-prism/1"], 15);
  EXPECT_EQ(records["two-step-prism-par/1"], 15);
  EXPECT_EQ(records["two-step-prism-par/2"], 15);
  EXPECT_EQ(means.size(), 9u);
  for (const auto& [config, values] : reps) {
    double sum = 0.0;
    for (double v : values) sum += v;
    EXPECT_NEAR(means[config], sum / values.size(), 1e-6 * means[config]) << config;
  }
  EXPECT_NE(r.out.find("best tile"), std::string::npos);

  // a second run appends without a second header
  ASSERT_EQ(cli({"bench", "--dims", "6,6,6", "--steps", "2", "--solvers", "fuse", "--repeat", "1", "--csv",
                 csv.string()})
                .code,
            0);
  const auto again = lines(csv);
  EXPECT_EQ(again.size(), rows.size() + 2);
  EXPECT_EQ(std::count(again.begin(), again.end(), rows[0]), 1);
  std::filesystem::remove(csv);
}

TEST(Cli, BenchValidatesBeforeRunning) {
  const auto csv = temp_path("bench_bad.csv");
  std::filesystem::remove(csv);
  const auto r = cli({"bench", "--dims", "8,8,8", "--steps", "3", "--solvers", "fuse,two-step", "--csv", csv.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(std::filesystem::exists(csv));
}
