#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "svgr/error.h"
#include "svgr/json_io.h"
#include "test_util.h"

using namespace svgr;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "svgreward");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (testutil::data_dir() / "cli" / name).string(); }

std::string slurp(const fs::path& p) {
  REQUIRE(fs::exists(p));
  return testutil::read_file(p);
}

}  // namespace

TEST_CASE("eval: outputs and exit codes") {
  auto dir = testutil::fresh_dir("cli_eval");
  auto r = run_cli({"eval", fixture("candidates.jsonl"), "--mock", "--out-dir", dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  auto report = Json::parse(slurp(dir / "report.json"));
  CHECK(report["n_candidates"] == 3);
  CHECK(report["fid"].is_null());
  CHECK(report["validity_rate_pct"].get<double>() == doctest::Approx(200.0 / 3.0));
  std::istringstream lines(slurp(dir / "breakdowns.jsonl"));
  std::string line;
  std::vector<std::string> ids;
  while (std::getline(lines, line)) ids.push_back(Json::parse(line)["id"]);
  CHECK(ids == std::vector<std::string>{"full", "broken_svg", "plain"});

  CHECK(run_cli({"eval", "/nonexistent/file.jsonl", "--mock"}).code == cli::kExitInput);
  CHECK(run_cli({"eval", fixture("candidates.jsonl"), "--scorer-url", "http://127.0.0.1:1", "--out-dir",
                 dir.string()})
            .code == cli::kExitScorer);
  CHECK(run_cli({"eval", fixture("candidates.jsonl"), "--weights-think", "-1", "--out-dir", dir.string()}).code ==
        cli::kExitInput);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitInput);
}

TEST_CASE("eval and filter are byte-identical across runs and job counts") {
  auto once = [](const char* cmd, const char* input, const std::string& jobs, const char* tag) {
    auto dir = testutil::fresh_dir(std::string("det_") + cmd + tag);
    auto r = run_cli({cmd, fixture(input), "--mock", "--jobs", jobs, "--out-dir", dir.string()});
    REQUIRE(r.code == cli::kExitOk);
    std::string all = r.out;
    for (const auto& e : fs::directory_iterator(dir)) all += e.path().filename().string() + "\n" + slurp(e.path());
    return all;
  };
  for (const char* cmd : {"eval", "filter"}) {
    const char* input = std::string(cmd) == "eval" ? "candidates.jsonl" : "triplets.jsonl";
    auto a = once(cmd, input, "1", "a");
    auto b = once(cmd, input, "1", "b");
    auto c = once(cmd, input, "8", "c");
    CHECK(a == b);
    CHECK(a == c);
  }
}

TEST_CASE("filter: fixture accepts one triplet") {
  auto dir = testutil::fresh_dir("cli_filter");
  auto r = run_cli({"filter", fixture("triplets.jsonl"), "--out-dir", dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  auto stats = Json::parse(slurp(dir / "stats.json"));
  CHECK(stats["n"] == 3);
  CHECK(stats["accepted"] == 1);
  auto accepted = read_jsonl(dir / "accepted.jsonl");
  REQUIRE(accepted.size() == 1);
  CHECK(accepted[0]["id"] == "good");
  auto verdicts = read_jsonl(dir / "verdicts.jsonl");
  REQUIRE(verdicts.size() == 3);
  CHECK(verdicts[0]["rejected_at"] == "SyntaxStage");
  CHECK(verdicts[1]["rejected_at"] == "RenderStage");
  CHECK(verdicts[2]["accepted"] == true);
  CHECK(verdicts[2]["consistency_score"].get<double>() == doctest::Approx(937.0 / 999.0).epsilon(1e-9));

  r = run_cli({"filter", fixture("triplets.jsonl"), "--threshold", "1.01", "--out-dir", dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(Json::parse(slurp(dir / "stats.json"))["accepted"] == 0);

  auto sdir = testutil::fresh_dir("cli_stats");
  r = run_cli({"stats", fixture("triplets.jsonl"), "--out-dir", sdir.string()});
  REQUIRE(r.code == cli::kExitOk);
  auto s = Json::parse(r.out);
  CHECK(s["n"] == 3);
  CHECK(s["domain_histogram"]["Diagram"] == 1);
  CHECK(s["domain_histogram"]["LogoEmoji"] == 1);
  CHECK(s["domain_histogram"]["Unspecified"] == 1);
}

TEST_CASE("grpo-sim") {
  auto r = run_cli({"grpo-sim", fixture("groups.jsonl")});
  REQUIRE(r.code == cli::kExitOk);
  std::istringstream in(r.out);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  auto summary = Json::parse(last);
  CHECK(summary["n_groups"] == 1);
  CHECK(summary["mean_objective"].get<double>() == 0.0);

  CHECK(run_cli({"grpo-sim", fixture("groups_mismatch.jsonl")}).code == cli::kExitInput);
  CHECK(run_cli({"grpo-sim", fixture("groups.jsonl"), "--grpo-group-size", "4"}).code == cli::kExitInput);
}

TEST_CASE("config file, environment and flag precedence") {
  cli::CliConfig c;
  cli::load_config_file(fixture("config.toml"), c);
  CHECK(c.raster_size == 128);
  CHECK(c.weights.semantic == 0.6);
  CHECK(c.scorer_mode == ScorerMode::kMock);
  CHECK_FALSE(c.group_size_pinned);

  auto dir = testutil::fresh_dir("cli_cfg");
  auto cfg = dir / "partial.ini";
  std::ofstream(cfg) << "[think]\nmode = partial\n[grpo]\ngroup_size = 4\n";
  cli::CliConfig p;
  cli::load_config_file(cfg, p);
  CHECK(p.think.mode == ThinkRewardMode::kPartial);
  CHECK(p.grpo.group_size == 4);
  CHECK(p.group_size_pinned);

  std::ofstream(dir / "bad.ini") << "[think]\nmode = sometimes\n";
  cli::CliConfig q;
  CHECK_THROWS_AS(cli::load_config_file(dir / "bad.ini", q), Error);
  CHECK(run_cli({"eval", fixture("candidates.jsonl"), "--config", (dir / "bad.ini").string(), "--out-dir",
                 dir.string()})
            .code == cli::kExitInput);
  CHECK(run_cli({"eval", fixture("candidates.jsonl"), "--config", fixture("config.toml"), "--out-dir",
                 dir.string()})
            .code == cli::kExitOk);

  ::setenv(cli::kScorerUrlEnv, "http://127.0.0.1:1", 1);
  auto env_only = run_cli({"eval", fixture("candidates.jsonl"), "--out-dir", dir.string()});
  auto env_mock = run_cli({"eval", fixture("candidates.jsonl"), "--mock", "--out-dir", dir.string()});
  ::unsetenv(cli::kScorerUrlEnv);
  CHECK(env_only.code == cli::kExitScorer);
  CHECK(env_mock.code == cli::kExitOk);
}

TEST_CASE("render") {
  auto dir = testutil::fresh_dir("cli_render");
  auto svg = dir / "c.svg";
  std::ofstream(svg) << R"(<svg viewBox="0 0 10 10"><circle cx="5" cy="5" r="4" fill="red"/></svg>)";
  auto png = dir / "c.png";
  auto r = run_cli({"render", svg.string(), "--png", png.string()});
  REQUIRE(r.code == cli::kExitOk);
  auto bytes = slurp(png);
  CHECK(bytes.substr(1, 3) == "PNG");

  std::ofstream(dir / "flat.svg") << R"(<svg viewBox="0 0 10 10"><rect width="10" height="10"/></svg>)";
  r = run_cli({"render", (dir / "flat.svg").string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("EmptyCanvas") != std::string::npos);
}
