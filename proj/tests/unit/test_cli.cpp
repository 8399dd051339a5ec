#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = polygon_gpt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json json_of(const Result &r) { return nlohmann::json::parse(r.out); }

std::string temp_file(const std::string &name, const std::string &content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

} // namespace

TEST(Cli, EnumeratePentagonWithCheck) {
  const Result r = run({"enumerate", "--n", "5", "--check"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["total_vertices"], 135);
  EXPECT_EQ(j["product_count"], 25);
  std::vector<std::size_t> sizes;
  for (const auto &c : j["classes"]) sizes.push_back(c["size"].get<std::size_t>());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{10, 100}));
  EXPECT_TRUE(j.contains("check"));
}

TEST(Cli, EnumerateCsvDump) {
  const Result r = run({"enumerate", "--n", "4", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("index,kind,class,", 0), 0U);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 25);
}

TEST(Cli, OrbitsHexagon) {
  const Result r = run({"orbits", "--n", "6", "--check"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["orbit_count"], 213962);
  EXPECT_EQ(j["group_order"], 144);
}

TEST(Cli, Fig5Csv) {
  const Result r = run({"fig5", "--max-n", "20", "--workers", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "n,hardy_success,hardy_quantum_max");
  int rows = 0;
  while (std::getline(lines, line)) {
    int n = 0;
    double s = 0, q = 0;
    ASSERT_EQ(std::sscanf(line.c_str(), "%d,%lf,%lf", &n, &s, &q), 3) << line;
    EXPECT_EQ(n, 4 + 2 * rows);
    EXPECT_NEAR(s, std::pow(std::sin(M_PI / n), 2), 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 9);
}

TEST(Cli, HardyTupleFromTable) {
  const Result r = run({"hardy", "--n", "6", "--state", "VI", "--tuple", "2-5,1-4,2-5,1-4", "--check"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.125"), std::string::npos);
}

TEST(Cli, WernerPentagon) {
  const Result r = run({"werner", "--n", "5", "--check"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json_of(r);
  EXPECT_NEAR(j["p_nl"].get<double>(), 0.747454, 1e-6);
  EXPECT_EQ(j["gap_exists"], true);
}

TEST(Cli, HardyMixedPentagon) {
  const Result r = run({"hardy-mixed", "--n", "5", "--epsilon", "0.5", "--product", "5,3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.0527864"), std::string::npos);
}

TEST(Cli, InvalidInputsExitOne) {
  EXPECT_EQ(run({"orbits", "--n", "3"}).code, 1);
  EXPECT_EQ(run({"orbits", "--n", "abc"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"chsh", "--n", "5", "--state", "[1,2,3"}).code, 1);
  EXPECT_EQ(run({"chsh", "--n", "5", "--state", "[1,2,3]"}).code, 1);
  EXPECT_EQ(run({"hardy", "--n", "5", "--state", "XIV"}).code, 1);
  EXPECT_EQ(run({"hardy", "--n", "5", "--tuple", "1,9,1,2"}).code, 1);
  EXPECT_EQ(run({"hardy-mixed", "--n", "5", "--epsilon", "0", "--product", "3,4"}).code, 1);
  EXPECT_EQ(run({"hardy-mixed", "--n", "5", "--product", "1,1"}).code, 1);
  EXPECT_EQ(run({"model", "--n", "5", "--check", "--golden", "/nonexistent/golden.json"}).code, 1);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, GoldenMismatchExitsTwo) {
  const std::string path = temp_file("polygon_gpt_bad_golden.json",
                                     R"({"tolerance": 1e-9, "orbits": {"4": {"orbit_count": 284}}})");
  const Result r = run({"orbits", "--n", "4", "--check", "--golden", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("golden mismatch"), std::string::npos);
}

TEST(Cli, MalformedGoldenExitsOne) {
  const std::string path = temp_file("polygon_gpt_broken_golden.json", "{not json");
  EXPECT_EQ(run({"orbits", "--n", "4", "--check", "--golden", path}).code, 1);
}

TEST(Cli, Deterministic) {
  for (const auto &args : std::vector<std::vector<std::string>>{
           {"chsh", "--n", "6", "--state", "II"}, {"classify", "--n", "5"}, {"model", "--n", "7"}}) {
    const Result a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
  auto one = run({"hardy", "--n", "6", "--state", "III", "--workers", "1"});
  auto four = run({"hardy", "--n", "6", "--state", "III", "--workers", "4"});
  EXPECT_EQ(one.out, four.out);
}
