#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

using namespace hpm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("hpm_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
  fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

int run_config(const fs::path& dir, const json& j, std::string* errors = nullptr) {
  cli::Invocation inv;
  inv.config_path = write_config(dir, j).string();
  inv.out_dir = (dir / "out").string();
  std::ostringstream log, err;
  int code = cli::run(inv, log, err);
  if (errors) *errors = err.str();
  return code;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_stamp(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("generated") == std::string::npos) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("closed-form ball check on the Lewy cubic") {
  auto dir = scratch("closed_form");
  CHECK(run_config(dir, {{"command", "verify-lemma-4-2"}, {"polynomial", "lewy"}}) == cli::kOk);
  auto rep = json::parse(read(dir / "out" / "verify-lemma-4-2.json"));
  CHECK(rep["status"] == "ok");
  CHECK(rep["result"]["max_relative_error"].get<double>() <= 1e-6);
  CHECK(rep["result"]["rows"].size() == 3);
}

TEST_CASE("doubling scan csv carries both exponents") {
  auto dir = scratch("doubling");
  CHECK(run_config(dir, {{"command", "doubling-scan"}, {"polynomial", "x*y + x"}}) == cli::kOk);
  auto rep = json::parse(read(dir / "out" / "doubling-scan.json"));
  CHECK(rep["result"]["classification"]["j"] == 1);
  CHECK(rep["result"]["classification"]["d"] == 2);
  CHECK(std::abs(rep["result"]["exponent_at_zero"].get<double>() - 2) < 0.05);
  CHECK(std::abs(rep["result"]["exponent_at_infinity"].get<double>() - 3) < 0.05);
  auto csv = read(dir / "out" / "doubling_scan.csv");
  CHECK(csv.rfind("# generated ", 0) == 0);
  CHECK(csv.find("r,ratio,local_exponent") != std::string::npos);
}

TEST_CASE("reports repeat byte for byte apart from the timestamp") {
  auto a = scratch("det_a"), b = scratch("det_b");
  json cfg = {{"command", "fr-metric"}, {"polynomial", "x"}, {"seed", 5}, {"fr-metric", {{"grid", 12}, {"other", "x*y"}}}};
  REQUIRE(run_config(a, cfg) == cli::kOk);
  REQUIRE(run_config(b, cfg) == cli::kOk);
  for (auto name : {"fr-metric.json", "mu.csv", "nu.csv"}) {
    auto x = read(a / "out" / name), y = read(b / "out" / name);
    CHECK(without_stamp(x) == without_stamp(y));
    // the stamp sits on a line of its own
    int stamped = 0;
    std::istringstream in(x);
    for (std::string line; std::getline(in, line);)
      if (line.find("generated") != std::string::npos) ++stamped;
    CHECK(stamped == 1);
  }
}

TEST_CASE("polynomial from a file") {
  auto dir = scratch("file");
  std::ofstream(dir / "p.json") << to_json(lewy_polynomial()).dump();
  CHECK(run_config(dir, {{"command", "verify-lemma-4-2"}, {"polynomial", {{"file", "p.json"}}}, {"radii", {1.0}}}) ==
        cli::kOk);
  std::string err;
  CHECK(run_config(dir, {{"command", "verify-lemma-4-2"}, {"polynomial", {{"file", "missing.json"}}}}, &err) ==
        cli::kSchemaError);
  CHECK(err.find("missing.json") != std::string::npos);
}

TEST_CASE("schema errors exit with code 2") {
  auto dir = scratch("schema");
  std::string err;
  CHECK(run_config(dir, {{"command", "blowup"}, {"radii", {1.0, -2.0}}, {"bogus", 1}}, &err) == cli::kSchemaError);
  CHECK(err.find("bogus") != std::string::npos);
  CHECK(err.find("radii") != std::string::npos);
  CHECK(run_config(dir, {{"command", "nope"}}) == cli::kSchemaError);
  CHECK(run_config(dir, json::object()) == cli::kSchemaError);
  CHECK(run_config(dir, {{"command", "blowup"}, {"blowup", {{"grid", "fine"}}}}) == cli::kSchemaError);
  CHECK(run_config(dir, {{"command", "blowup"}, {"lewy-demo", json::object()}}) == cli::kSchemaError);
  CHECK(run_config(dir, {{"command", "doubling-scan"}, {"polynomial", "x^2"}}) == cli::kSchemaError);
  CHECK(run_config(dir, {{"command", "doubling-scan"}, {"radii", {{"min", 2.0}, {"max", 1.0}, {"steps", 4}}}}) ==
        cli::kSchemaError);
  // stochastic commands need a seed
  CHECK(run_config(dir, {{"command", "cone-distance"}}, &err) == cli::kSchemaError);
  CHECK(err.find("seed") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{not json";
  cli::Invocation inv;
  inv.config_path = (dir / "broken.json").string();
  std::ostringstream log, e2;
  CHECK(cli::run(inv, log, e2) == cli::kSchemaError);
}

TEST_CASE("command line front end") {
  auto dir = scratch("argv");
  std::string out = (dir / "o").string();
  std::vector<std::string> args = {"hpm", "verify-lemma-4-2", "--out", out, "--seed", "3", "--threads", "2"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  CHECK(cli::main_entry(static_cast<int>(argv.size()), argv.data()) == cli::kOk);
  auto rep = json::parse(read(dir / "o" / "verify-lemma-4-2.json"));
  CHECK(rep["seed"] == 3);
  CHECK(rep["threads"] == 2);

  std::vector<std::string> bad = {"hpm", "verify-lemma-4-2", "--threads", "many"};
  std::vector<char*> bargv;
  for (auto& a : bad) bargv.push_back(a.data());
  CHECK(cli::main_entry(static_cast<int>(bargv.size()), bargv.data()) == cli::kSchemaError);
}

TEST_CASE("lewy demo") {
  auto dir = scratch("lewy");
  CHECK(run_config(dir, {{"command", "lewy-demo"}, {"lewy-demo", {{"dump_level", 2}}}}) == cli::kOk);
  auto rep = json::parse(read(dir / "out" / "lewy-demo.json"));
  CHECK(rep["result"]["nodal_components"] == 2);
  CHECK(rep["result"]["laplacian_is_zero"] == true);
  CHECK(fs::exists(dir / "out" / "nodal.csv"));
}
