#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "celerlog/model.hpp"
#include "cli.hpp"
#include "support.hpp"

using testing::read_file;
using testing::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "celerlog");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = celerlog::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

TEST_CASE("parse writes three files") {
  TempDir dir;
  auto r = run_cli({"parse", "--input", CELERLOG_SAMPLES_DIR "/sample.log", "--output",
                    (dir / "out").string(), "--backend", "mock"});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir / "out" / "structured.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "templates.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "run.json"));
}

TEST_CASE("invalid values exit with 2") {
  TempDir dir;
  auto r = run_cli({"parse", "--input", CELERLOG_SAMPLES_DIR "/sample.log", "--output",
                    (dir / "out").string(), "--alpha", "1.5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("alpha") != std::string::npos);

  CHECK(run_cli({"parse", "--input", "x", "--output", "y", "--bogus"}).code == 2);
  CHECK(run_cli({"parse", "--output", "y"}).code == 2);
  CHECK(run_cli({"parse", "--input", "x", "--output", "y", "--format", "xml"}).code == 2);
  CHECK(run_cli({"parse", "--input", "x", "--output", "y", "--jobs", "many"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"parse", "--input", (dir / "missing.log").string(), "--output",
                 (dir / "out").string()})
            .code == 2);
  CHECK(run_cli({"parse", "--input", CELERLOG_SAMPLES_DIR "/sample.log", "--output",
                 (dir / "out").string(), "--header-pattern", "(no group)"})
            .code == 2);
  CHECK(run_cli({"parse", "--input", CELERLOG_SAMPLES_DIR "/sample.log", "--output",
                 (dir / "out").string(), "--backend", "http"})
            .code == 2);
}

TEST_CASE("eval on a perfect toy corpus") {
  TempDir dir;
  testing::write_file(dir / "toy.log", "open 1\nopen 2\nclose now\n");
  testing::write_file(dir / "truth.csv", "LineId,EventTemplate\n0,open <*>\n1,open <*>\n2,close now\n");
  REQUIRE(run_cli({"parse", "--input", (dir / "toy.log").string(), "--output", (dir / "out").string()})
              .code == 0);
  auto r = run_cli({"eval", "--structured", (dir / "out" / "structured.csv").string(),
                    "--ground-truth", (dir / "truth.csv").string(), "--report",
                    (dir / "report.json").string()});
  CHECK(r.code == 0);
  auto doc = nlohmann::json::parse(read_file(dir / "report.json"));
  for (const char* k : {"GA", "PA", "FGA", "FTA"}) CHECK(doc[k] == 1.0);
  CHECK(doc["cost"].contains("llm_invocations"));

  testing::write_file(dir / "empty.csv", "LineId,EventTemplate\n");
  testing::write_file(dir / "empty_pred.csv", "LineId,Content,EventTemplate,Parameters\n");
  CHECK(run_cli({"eval", "--structured", (dir / "empty_pred.csv").string(), "--ground-truth",
                 (dir / "empty.csv").string(), "--report", (dir / "r2.json").string()})
            .code == 2);
}

TEST_CASE("version and help") {
  auto v = run_cli({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out == std::string("celerlog ") + CELERLOG_VERSION + "\n");

  auto top = run_cli({"--help"});
  CHECK(top.code == 0);
  CHECK(top.out == read_file(CELERLOG_GOLDEN_DIR "/help.txt"));
  auto parse = run_cli({"parse", "--help"});
  CHECK(parse.code == 0);
  CHECK(parse.out == read_file(CELERLOG_GOLDEN_DIR "/help_parse.txt"));
  auto eval = run_cli({"eval", "--help"});
  CHECK(eval.out == read_file(CELERLOG_GOLDEN_DIR "/help_eval.txt"));
}

TEST_CASE("flag defaults equal the router defaults") {
  const celerlog::RouterConfig d;
  auto help = run_cli({"parse", "--help"}).out;
  auto shows = [&](const std::string& flag, const std::string& value) {
    auto at = help.find(flag + " ");
    REQUIRE(at != std::string::npos);
    auto line_end = help.find('\n', at);
    return help.substr(at, line_end - at).find("[" + value + "]") != std::string::npos;
  };
  CHECK(shows("--alpha", fmt(d.alpha)));
  CHECK(shows("--p-quantile", fmt(d.p_quantile)));
  CHECK(shows("--tau-step", fmt(d.tau_step)));
  CHECK(shows("--bypass-length", std::to_string(d.bypass_length)));
  CHECK(shows("--bypass-groups", std::to_string(d.bypass_group_count)));
  CHECK(shows("--jobs", std::to_string(d.jobs)));
  CHECK(shows("--batch-size", std::to_string(d.llm_batch_size)));
}
