#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bwalloc_cli/cli.hpp"

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "bwalloc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = bwalloc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string data(const std::string& name) { return std::string(BWALLOC_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  fs::path const dir = fs::temp_directory_path() / ("bwalloc_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string example(double c1, double c2, double c3) {
  std::ostringstream s;
  s << R"({"format": "bwalloc.scenario", "version": 1, "total_bandwidth": 1.37,
           "sources": [{"id": 1, "power_budget": 1.1}],
           "users": [{"id": 1, "source": 1, "h_sd": 4, "c_min": )"
    << c1 << R"(},
                     {"id": 2, "source": 1, "h_sd": 5, "c_min": )"
    << c2 << R"(},
                     {"id": 3, "source": 1, "h_sd": 6, "c_min": )"
    << c3 << "}]}";
  return s.str();
}

TEST(Allocate, PowerMinOnTrivialThresholds) {
  auto const dir = scratch("trivial");
  auto const file = write(dir / "s.json", example(0.01, 0.01, 0.01));
  auto const o = run({"allocate", file, "--objective", "powermin"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("total_power:"), std::string::npos);
  EXPECT_NE(o.out.find("feasible: yes"), std::string::npos);
  EXPECT_EQ(o.out.find("met  no"), std::string::npos);
  EXPECT_TRUE(o.err.empty());
}

TEST(Allocate, FormatsAndOutFile) {
  auto const dir = scratch("formats");
  auto const csv = run({"allocate", data("example1.json"), "--format", "csv"});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(csv.out.rfind("key,value\n", 0), 0u);
  auto const json = run({"allocate", data("example1.json"), "--objective", "maxmin",
                         "--format", "json"});
  ASSERT_EQ(json.code, 0) << json.err;
  EXPECT_NE(json.out.find("\"common_capacity\""), std::string::npos);

  auto const path = (dir / "alloc.txt").string();
  auto const to_file = run({"allocate", data("example1.json"), "--out", path});
  ASSERT_EQ(to_file.code, 0);
  EXPECT_TRUE(to_file.out.empty());
  EXPECT_EQ(slurp(path), run({"allocate", data("example1.json")}).out);
}

TEST(Allocate, MalformedFileNamesTheField) {
  auto const dir = scratch("malformed");
  auto const file = write(dir / "s.json", R"({"format": "bwalloc.scenario", "version": 1,
      "sources": [{"id": 1, "power_budget": 1.1}],
      "users": [{"id": 1, "source": 1, "h_sd": 4}]})");
  auto const o = run({"allocate", file});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("total_bandwidth"), std::string::npos) << o.err;
  EXPECT_TRUE(o.out.empty());
}

TEST(Allocate, ImpossibleThresholdsGiveCertificate) {
  auto const dir = scratch("impossible");
  auto const file = write(dir / "s.json", example(3, 3, 3));
  auto const path = (dir / "never.txt").string();
  auto const o = run({"allocate", file, "--objective", "powermin", "--out", path});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("G(N) ="), std::string::npos) << o.err;
  EXPECT_TRUE(o.out.empty());
  EXPECT_FALSE(fs::exists(path));

  // Budget is enough, bandwidth is not: finite certificate.
  auto const tight = write(dir / "t.json", example(1.0, 1.1, 1.2));
  auto const t = run({"allocate", tight, "--objective", "powermin"});
  EXPECT_EQ(t.code, 2);
  EXPECT_NE(t.err.find("G(N) = 3.56"), std::string::npos) << t.err;
}

TEST(Allocate, PowerMinNeedsThresholds) {
  auto const dir = scratch("nothresholds");
  auto const file = write(dir / "s.json", R"({"format": "bwalloc.scenario", "version": 1,
      "total_bandwidth": 1, "sources": [{"id": 1, "power_budget": 1.1}],
      "users": [{"id": 7, "source": 1, "h_sd": 4}]})");
  auto const o = run({"allocate", file, "--objective", "powermin"});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("c_min"), std::string::npos) << o.err;
  EXPECT_EQ(run({"allocate", file}).code, 0);
}

TEST(Allocate, RelayModes) {
  auto const on = run({"allocate", data("relay_small.json")});
  ASSERT_EQ(on.code, 0) << on.err;
  EXPECT_NE(on.out.find("relay: on"), std::string::npos);
  auto const off = run({"allocate", data("relay_small.json"), "--relay", "off"});
  ASSERT_EQ(off.code, 0) << off.err;
  EXPECT_NE(off.out.find("relay: off"), std::string::npos);
  EXPECT_EQ(run({"allocate", data("example1.json"), "--relay", "on"}).code, 1);
}

TEST(Allocate, BadFlagsAreInputErrors) {
  EXPECT_EQ(run({"allocate", data("example1.json"), "--objective", "fastest"}).code, 1);
  EXPECT_EQ(run({"allocate"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"allocate", "/nonexistent/file.json"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Admit, ExampleOneAtWideBandwidthIsOptimal) {
  auto const o = run({"admit", data("example1.json"), "--algorithm", "both"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("greedy\n  admitted: {2,3}"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("exhaustive\n  admitted: {2,3}"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("comparison: optimal"), std::string::npos);
  EXPECT_NE(o.out.find("t*: 1"), std::string::npos);
  EXPECT_NE(o.out.find("C1 best_sets"), std::string::npos);
}

TEST(Admit, ExampleOneAtNarrowBandwidthIsSuboptimal) {
  auto const o = run({"admit", data("example1.json"), "--both", "--bandwidth", "1.0", "--trace"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("greedy\n  admitted: {2}"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("exhaustive\n  admitted: {1}"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("comparison: suboptimal"), std::string::npos);
  EXPECT_NE(o.out.find("removal trace"), std::string::npos);
  EXPECT_NE(o.out.find("C1 best_sets: no"), std::string::npos) << o.out;
}

TEST(Admit, ExhaustiveTooLarge) {
  auto const dir = scratch("toolarge");
  std::string users;
  for (int i = 1; i <= 20; ++i) {
    users += (i > 1 ? "," : "") + std::string(R"({"id": )") + std::to_string(i) +
             R"(, "source": 1, "h_sd": 2, "c_min": 0.1})";
  }
  auto const file = write(dir / "s.json", R"({"format": "bwalloc.scenario", "version": 1,
      "total_bandwidth": 1, "sources": [{"id": 1, "power_budget": 5}], "users": [)" +
                                             users + "]}");
  auto const o = run({"admit", file, "--algorithm", "exhaustive"});
  EXPECT_EQ(o.code, 3);
  EXPECT_NE(o.err.find("too large"), std::string::npos);
  EXPECT_TRUE(o.out.empty());
  EXPECT_EQ(run({"admit", file}).code, 0);
}

TEST(Admit, RelayPipeline) {
  auto const o = run({"admit", data("relay_small.json"), "--both", "--format", "json"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("\"d_prime\""), std::string::npos);
  EXPECT_NE(o.out.find("\"optimal\""), std::string::npos);
}

TEST(Simulate, IdenticalFilesForAnyWorkerCount) {
  auto const dir = scratch("workers");
  auto const a = (dir / "a").string(), b = (dir / "b").string();
  auto const one = run({"simulate", data("default.json"), "--sweep", "P_R=10:10:80", "--runs", "1",
                        "--workers", "1", "--out", a});
  auto const eight = run({"simulate", data("default.json"), "--sweep", "P_R=10:10:80", "--runs",
                          "1", "--workers", "8", "--out", b});
  ASSERT_EQ(one.code, 0) << one.err;
  ASSERT_EQ(eight.code, 0) << eight.err;
  EXPECT_EQ(one.out, eight.out);
  for (const char* name : {"results.csv", "improvements.csv", "per_run.csv", "manifest.json"}) {
    ASSERT_TRUE(fs::exists(fs::path(a) / name)) << name;
    EXPECT_EQ(slurp(fs::path(a) / name), slurp(fs::path(b) / name)) << name;
  }
  EXPECT_FALSE(fs::exists(fs::path(a) / "timing.json"));
  auto const results = slurp(fs::path(a) / "results.csv");
  EXPECT_EQ(results.rfind("parameter,value,objective,scheme,mean,stderr,n,", 0), 0u);
  EXPECT_NE(results.find("P_R,80,sum,obpa"), std::string::npos) << results;
  auto const manifest = slurp(fs::path(a) / "manifest.json");
  EXPECT_NE(manifest.find("\"seed\": 1"), std::string::npos);
  EXPECT_NE(manifest.find("\"versions\""), std::string::npos);
}

TEST(Simulate, GreedyBenchmarkConfig) {
  auto const dir = scratch("greedy");
  auto const o = run({"simulate", data("setup3.json"), "--runs", "2", "--sweep", "c=1,4",
                      "--timing", "--out", dir.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  auto const table = slurp(dir / "greedy.csv");
  EXPECT_EQ(table.rfind("c0,", 0), 0u) << table;
  EXPECT_TRUE(fs::exists(dir / "timing.json"));
  EXPECT_EQ(table.find("time_ratio"), std::string::npos);
}

TEST(Simulate, AdmissionExperiment) {
  auto const o = run({"simulate", data("default.json"), "--experiment", "admission", "--sweep",
                      "c=0.5,1", "--runs", "3"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("obpa"), std::string::npos);
}

TEST(Simulate, ConfigErrors) {
  auto const dir = scratch("config");
  auto const bad = write(dir / "bad.json", R"({"preset": "default", "fading_mean": -1})");
  auto const o = run({"simulate", bad, "--sweep", "W=10"});
  EXPECT_EQ(o.code, 1);
  EXPECT_FALSE(o.err.empty());
  EXPECT_EQ(run({"simulate", data("default.json"), "--sweep", "Q=1"}).code, 1);
  EXPECT_EQ(run({"simulate", data("setup3.json"), "--sweep", "W=10"}).code, 1);
}

}  // namespace
