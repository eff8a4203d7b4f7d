#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is discarded unless merged.
CliResult run(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(CLI_BIN) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  CliResult r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string names = std::string(DATA_DIR) + "/names.csv";
const std::string demo = DEMO_DIR;
const std::string mock = "--transport mock --mock-script " + demo + "/_replay.json";

}  // namespace

TEST(Cli, Version) {
  CliResult r = run("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, ProfileNames) {
  CliResult r = run("profile --table " + names);
  ASSERT_EQ(r.code, 0);
  json doc = json::parse(r.out);
  EXPECT_EQ(doc["columns"][0]["clusters"].size(), 4u);
  CliResult text = run("profile --table " + names + " --format text");
  ASSERT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("e.g."), std::string::npos);
}

TEST(Cli, SelectRepresentative) {
  CliResult r = run("select --table " + names + " --strategy representative --n 4");
  ASSERT_EQ(r.code, 0);
  json doc = json::parse(r.out);
  EXPECT_EQ(doc["rows"].size(), 4u);
  EXPECT_EQ(doc["strategy"], "representative");
}

TEST(Cli, RandomSelectionIsSeeded) {
  const std::string args = "select --table " + names + " --strategy random --n 3 --seed 7";
  CliResult a = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, run(args).out);
  EXPECT_EQ(json::parse(a.out)["rows"].size(), 3u);
}

TEST(Cli, PromptFromTask) {
  CliResult r = run("prompt --task " + demo + "/dep-usernames.json --strategy first --n 2 --format text");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("import pandas as pd\n", 0), 0u);
  EXPECT_NE(r.out.find("[rows=2 chars="), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("select --table " + names + " --strategy random").code, 2);
  EXPECT_EQ(run("select --table " + names + " --strategy random --n 2").code, 2);
  EXPECT_EQ(run("select --table " + names + " --strategy first --seed 3").code, 2);
  EXPECT_EQ(run("select --table " + names + " --strategy none --n 3").code, 2);
  EXPECT_EQ(run("profile").code, 2);
  EXPECT_EQ(run("profile --table " + names + " --task x.json").code, 2);
  EXPECT_EQ(run("prompt --table " + names).code, 2);
  EXPECT_EQ(run("eval --suite /nonexistent/dir").code, 2);
  EXPECT_EQ(run("infer --table " + names + " --query q --k 1,2 " + mock).code, 2);
  EXPECT_EQ(run("infer --table " + names + " --query q --transport mock").code, 2);
  CliResult help = run("select --strategy bogus --table " + names, true);
  EXPECT_EQ(help.code, 2);
  EXPECT_NE(help.out.find("error"), std::string::npos);
}

TEST(Cli, ToolErrorsExitOne) {
  CliResult r = run("profile --table /nonexistent/names.csv", true);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("/nonexistent/names.csv"), std::string::npos);
  EXPECT_EQ(run("select --table " + names + " --strategy first --n 99").code, 1);
}

TEST(Cli, InferWithReplay) {
  CliResult r = run("infer --task " + demo + "/ind-phone-digits.json --k 2 " + mock);
  ASSERT_EQ(r.code, 0);
  json doc = json::parse(r.out);
  EXPECT_EQ(doc["completions"].size(), 2u);
}

TEST(Cli, EvalIsByteIdentical) {
  const std::string args = "eval --suite " + demo +
                           " --strategy representative --n 5 --k 1,5 --m-factor 4 " + mock;
  CliResult a = run(args);
  CliResult b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  json doc = json::parse(a.out);
  EXPECT_EQ(doc["tasks"].size(), 4u);
  CliResult text = run(args + " --format text");
  ASSERT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("pass@5"), std::string::npos);
}
