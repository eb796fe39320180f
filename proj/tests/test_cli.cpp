#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccc/cli.hpp"

namespace {

using namespace ccc;
using ccc::cli::RunConfig;

const std::string kDemo = std::string(CCC_EXAMPLES_DIR) + "/demo_classical.json";
const std::string kQuantum = std::string(CCC_EXAMPLES_DIR) + "/demo_quantum.json";
const std::string kSinglet = std::string(CCC_EXAMPLES_DIR) + "/singlet.json";

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "ccc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::parse_args(static_cast<int>(argv.size()), argv.data());
}

int usage_status(std::vector<std::string> args) {
  try {
    parse(std::move(args));
  } catch (const cli::UsageError& e) {
    return e.status();
  }
  return -1;
}

cli::RunResult run(std::vector<std::string> args) { return cli::run(parse(std::move(args))); }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ccc_test_" + std::to_string(::getpid()) + "_" + name);
}

int shell(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

TEST(ParseArgs, RejectsMalformedCommandLines) {
  EXPECT_EQ(usage_status({}), 2);
  EXPECT_EQ(usage_status({"analyze", kDemo, "--bogus"}), 2);
  EXPECT_EQ(usage_status({"complete", kDemo, "--pair", "A,B", "--t", "1", "--type", "1,1,1,1,1"}), 2);
  EXPECT_EQ(usage_status({"complete", kDemo}), 2);
  EXPECT_EQ(usage_status({"bell", kDemo, "A", "B"}), 2);
  EXPECT_EQ(usage_status({"--version"}), 0);
}

TEST(ParseArgs, CollectsRepeatedOptions) {
  const RunConfig c = parse({"complete", kDemo, "--pair", "A,B", "--pair", "B,A", "--t", "1",
                             "--s", "3/5", "--limit", "12", "-o", "out.json"});
  EXPECT_EQ(c.subcommand, "complete");
  EXPECT_EQ(c.pairs.size(), 2U);
  EXPECT_EQ(c.s_values, std::vector<std::string>{"3/5"});
  EXPECT_EQ(c.limit, 12U);
  EXPECT_EQ(c.output_path, "out.json");
}

TEST(Run, AnalyzeDemo) {
  const auto r = run({"analyze", kDemo});
  ASSERT_EQ(r.exit_code, 0) << r.report.dump();
  EXPECT_EQ(r.report["tool"]["version"], cli::kVersion);
  EXPECT_EQ(r.report["tolerances"]["eq"], 1e-9);
  EXPECT_EQ(r.report["completeness"], "incomplete");
  ASSERT_EQ(r.report["correlated_pairs"].size(), 1U);
  const auto& p = r.report["correlated_pairs"][0];
  EXPECT_EQ(p["pair"], json({"A", "B"}));
  EXPECT_EQ(p["correlation"], "1/20");
  EXPECT_FALSE(p["has_proper_common_cause"].get<bool>());
}

TEST(Run, CompleteDemoAndRoundTrip) {
  const auto r = run({"complete", kDemo, "--pair", "A,B", "--t", "1", "--s", "1"});
  ASSERT_EQ(r.exit_code, 0) << r.report.dump();
  EXPECT_EQ(r.report["atoms"].size(), 8U);
  const auto& cause = r.report["common_causes"][0];
  EXPECT_EQ(cause["event"], "C1");
  EXPECT_EQ(cause["type"]["r_c"], "1/6");
  EXPECT_TRUE(cause["type_matches"].get<bool>());
  EXPECT_EQ(cause["verdict"]["classification"], json({"Proper", "GenuinelyProbabilistic"}));
  EXPECT_TRUE(r.report["verification"]["ok"].get<bool>());

  const auto path = temp_file("complete.json");
  std::ofstream(path) << cli::render(r.report);
  const auto again = run({"analyze", path.string()});
  ASSERT_EQ(again.exit_code, 0) << again.report.dump();
  bool found = false;
  for (const auto& p : again.report["correlated_pairs"]) {
    if (p["pair"] != json({"A", "B"})) continue;
    for (const auto& c : p["common_causes"]) {
      const auto names = c["names"].get<std::vector<std::string>>();
      const auto cls = c["verdict"]["classification"].get<std::vector<std::string>>();
      if (std::find(names.begin(), names.end(), "C1") != names.end() &&
          std::find(cls.begin(), cls.end(), "Proper") != cls.end()) {
        found = true;
      }
    }
  }
  EXPECT_TRUE(found);
  std::filesystem::remove(path);
}

TEST(Run, ExplicitTypeIsValidated) {
  const auto ok = run({"complete", kDemo, "--pair", "A,B", "--type", "1/6,1,1,2/5,2/5"});
  EXPECT_EQ(ok.exit_code, 0) << ok.report.dump();
  const auto bad = run({"complete", kDemo, "--pair", "A,B", "--type", "1/2,1,1,0,0"});
  EXPECT_EQ(bad.exit_code, 1);
  EXPECT_EQ(bad.report["error"]["name"], "NotAdmissible");
  const auto oob = run({"complete", kDemo, "--pair", "A,B", "--t", "1/2"});
  EXPECT_EQ(oob.exit_code, 1);
  EXPECT_EQ(oob.report["error"]["name"], "OutOfBounds");
}

TEST(Run, InputErrorsExitTwo) {
  const auto missing = run({"analyze", "/nonexistent/space.json"});
  EXPECT_EQ(missing.exit_code, 2);
  EXPECT_EQ(missing.report["error"]["name"], "ParseError");
  const auto name = run({"bell", kSinglet, "A1", "A2", "B1", "X"});
  EXPECT_EQ(name.exit_code, 2);
  EXPECT_NE(name.report["error"]["message"].get<std::string>().find("'X'"), std::string::npos);
  const auto pair = run({"complete", kDemo, "--pair", "A"});
  EXPECT_EQ(pair.exit_code, 2);
  const auto kind = run({"closed", kQuantum});
  EXPECT_EQ(kind.exit_code, 2);
}

TEST(Run, ClosedDemo) {
  const auto r = run({"closed", kDemo});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_FALSE(r.report["closed"].get<bool>());
  EXPECT_FALSE(r.report["incomplete_pairs"].empty());
}

TEST(Run, QuantumAnalyzeAndComplete) {
  const auto a = run({"analyze", kQuantum});
  ASSERT_EQ(a.exit_code, 0) << a.report.dump();
  ASSERT_EQ(a.report["correlated_pairs"].size(), 1U);
  EXPECT_NEAR(a.report["correlated_pairs"][0]["correlation"].get<double>(), 0.05, 1e-12);

  const auto c = run({"qcomplete", kQuantum, "--pair", "A,B", "--t", "9/10", "--s", "0.8"});
  ASSERT_EQ(c.exit_code, 0) << c.report.dump();
  EXPECT_EQ(c.report["dim"], 64);
  EXPECT_TRUE(c.report["extension_fidelity"]["ok"].get<bool>());
  const auto& cause = c.report["common_causes"][0];
  EXPECT_TRUE(cause["type_matches"].get<bool>());
  EXPECT_TRUE(cause["verdict"]["is_common_cause"].get<bool>());
  // The report is itself a quantum space file.
  const auto path = temp_file("qcomplete.json");
  std::ofstream(path) << cli::render(c.report);
  const auto again = run({"analyze", path.string()});
  EXPECT_EQ(again.exit_code, 0) << again.report["error"].dump();
  std::filesystem::remove(path);
}

TEST(Run, BellOnSinglet) {
  const auto r = run({"bell", kSinglet, "A1", "A2", "B1", "B2"});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NEAR(r.report["chsh"]["value"].get<double>(), 0.5, 1e-12);
  EXPECT_TRUE(r.report["chsh"]["satisfied"].get<bool>());
}

TEST(Binary, ExitCodesAndOutputFile) {
  const std::string tool = CCC_TOOL_PATH;
  const auto out = temp_file("out.json");
  EXPECT_EQ(shell(tool + " analyze " + kDemo + " -o " + out.string()), 0);
  std::ifstream in(out);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), cli::render(run({"analyze", kDemo}).report));
  EXPECT_EQ(shell(tool + " complete " + kDemo + " --pair A,B --type 1/2,1,1,0,0 >/dev/null 2>&1"), 1);
  EXPECT_EQ(shell(tool + " bell " + kSinglet + " A1 A2 B1 X >/dev/null 2>&1"), 2);
  EXPECT_EQ(shell(tool + " analyze " + kDemo + " --nope >/dev/null 2>&1"), 2);
  std::filesystem::remove(out);
}

TEST(Binary, SeedIsReported) {
  const auto r = [] {
    ::setenv("CCC_SEED", "42", 1);
    auto cfg = parse({"analyze", kDemo});
    ::unsetenv("CCC_SEED");
    return cfg;
  }();
  EXPECT_EQ(r.seed, 42U);
  ::setenv("CCC_SEED", "x1", 1);
  EXPECT_EQ(usage_status({"analyze", kDemo}), 2);
  ::unsetenv("CCC_SEED");
}

}  // namespace
