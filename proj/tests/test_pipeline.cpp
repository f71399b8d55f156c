#include <doctest.h>

#include <sstream>

#include "celerlog/csv.hpp"
#include "celerlog/pipeline.hpp"
#include "celerlog/synth.hpp"
#include "support.hpp"

using namespace celerlog;
using testing::read_file;
using testing::TempDir;
using testing::write_file;
using testing::write_lines;

namespace {

RunConfig config_for(const std::filesystem::path& input, const std::filesystem::path& out,
                     std::size_t jobs = 8) {
  RunConfig c;
  c.input = input;
  c.output_dir = out;
  c.router.jobs = jobs;
  c.initial_backoff = std::chrono::milliseconds(1);
  return c;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  CsvReader reader(in);
  std::vector<std::vector<std::string>> rows;
  while (auto row = reader.next()) rows.push_back(*row);
  return rows;
}

}  // namespace

TEST_CASE("ingest raw lines") {
  TempDir dir;
  write_file(dir / "a.log", "first line\n\n  \nsecond line\r\nthird line");
  auto r = ingest(dir / "a.log", InputFormat::raw);
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[0].line_id == 0);
  CHECK(r.records[2].line_id == 2);
  CHECK(r.records[1].content == "second line");
  CHECK(r.stats.lines_read == 5);
  CHECK(r.stats.blank_lines == 2);

  HeaderPattern header(R"(^\d+ (?<content>.*)$)");
  write_file(dir / "b.log", "1 hello\n2 world\nplain\n");
  auto h = ingest(dir / "b.log", InputFormat::raw, &header);
  REQUIRE(h.records.size() == 3);
  CHECK(h.records[0].content == "hello");
  CHECK(h.records[2].content == "plain");

  CHECK_THROWS_AS(ingest(dir / "missing.log", InputFormat::raw), IoError);
}

TEST_CASE("ingest replaces invalid UTF-8") {
  TempDir dir;
  write_file(dir / "bad.log", std::string("ok \xff\xfe bytes\n\xc3\xa9t\xc3\xa9\n"));
  auto r = ingest(dir / "bad.log", InputFormat::raw);
  REQUIRE(r.records.size() == 2);
  CHECK(r.stats.invalid_utf8_bytes == 2);
  CHECK(r.records[0].content == "ok \xef\xbf\xbd\xef\xbf\xbd bytes");
  CHECK(r.records[1].content == "\xc3\xa9t\xc3\xa9");

  std::string truncated = "end \xe2\x82";
  CHECK(sanitize_utf8(truncated) == 2);
}

TEST_CASE("ingest csv") {
  TempDir dir;
  write_file(dir / "s.csv",
             "LineId,Level,Content\n1,I,a 1\n2,I,\"b, 2\"\n3,W,\"multi\nline\"\n4,I,c\n5,E,d 5\n");
  auto r = ingest(dir / "s.csv", InputFormat::csv);
  REQUIRE(r.records.size() == 5);
  CHECK(r.records[1].content == "b, 2");
  CHECK(r.records[4].line_id == 4);

  write_file(dir / "nocol.csv", "LineId,Message\n1,x\n");
  CHECK_THROWS_AS(ingest(dir / "nocol.csv", InputFormat::csv), IoError);
}

TEST_CASE("snapshot corpus end to end") {
  TempDir dir;
  write_lines(dir / "in.log", synth::snapshot_corpus());
  MockBackend mock;
  auto out = run(config_for(dir / "in.log", dir / "out"), mock);
  REQUIRE(out.catalog.size() == 1);
  CHECK(out.catalog[0] == CatalogEntry{"Snapshotting: <*> to <*>", 5});
  CHECK(read_file(dir / "out" / "templates.csv") ==
        "EventTemplate,Occurrences\nSnapshotting: <*> to <*>,5\n");
  auto rows = read_csv(dir / "out" / "structured.csv");
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"LineId", "Content", "EventTemplate", "Parameters"});
  CHECK(rows[1][3] == "0x0|/data/version-2/snapshot.0");
  CHECK(std::filesystem::exists(dir / "out" / "run.json"));
}

TEST_CASE("empty corpus") {
  TempDir dir;
  write_file(dir / "empty.log", "");
  MockBackend mock;
  auto out = run(config_for(dir / "empty.log", dir / "out"), mock);
  CHECK(out.records.empty());
  CHECK(out.cost.llm_invocations == 0);
  CHECK(out.cost.tokens_consumed == 0);
  CHECK(out.cost.dense_record_count + out.cost.sparse_record_count == 0);
  CHECK(read_file(dir / "out" / "structured.csv") == "LineId,Content,EventTemplate,Parameters\n");
  CHECK(read_file(dir / "out" / "templates.csv") == "EventTemplate,Occurrences\n");
}

TEST_CASE("parameters containing a pipe are escaped") {
  ParseOutput out;
  out.records.emplace_back(0, "value a|b seen");
  out.results.push_back({"value <*> seen", {"a|b"}, TemplateSource::statistical});
  TempDir dir;
  write_structured_csv(out, dir / "s.csv");
  CHECK(read_file(dir / "s.csv") ==
        "LineId,Content,EventTemplate,Parameters\n0,value a|b seen,value <*> seen,a\\|b\n");
  CHECK(split_parameters("a\\|b|c") == std::vector<std::string>{"a|b", "c"});
  CHECK(join_parameters(std::vector<std::string>{"x", "y|z"}) == "x|y\\|z");
  CHECK(csv_escape("say \"hi\", ok") == "\"say \"\"hi\"\", ok\"");
}

TEST_CASE("unwritable output directory") {
  TempDir dir;
  write_lines(dir / "in.log", {"a 1"});
  write_file(dir / "blocker", "not a directory");
  MockBackend mock;
  CHECK_THROWS_AS(run(config_for(dir / "in.log", dir / "blocker" / "out"), mock), IoError);
}

TEST_CASE("mixed corpus: conservation, round trip and determinism") {
  auto corpus = synth::make_corpus({.template_count = 30, .templated_lines = 3000, .isolated_lines = 40});
  TempDir dir;
  write_lines(dir / "in.log", corpus.lines);

  MockBackend m1, m8;
  auto one = run(config_for(dir / "in.log", dir / "one", 1), m1);
  auto eight = run(config_for(dir / "in.log", dir / "eight", 8), m8);
  CHECK(one.cost.dense_record_count + one.cost.sparse_record_count == corpus.lines.size());
  CHECK(read_file(dir / "one" / "structured.csv") == read_file(dir / "eight" / "structured.csv"));
  CHECK(read_file(dir / "one" / "templates.csv") == read_file(dir / "eight" / "templates.csv"));
  CHECK(one.cost.llm_invocations == eight.cost.llm_invocations);
  CHECK(one.cost.tokens_consumed == eight.cost.tokens_consumed);

  auto rows = read_csv(dir / "one" / "structured.csv");
  CHECK(rows.size() == corpus.lines.size() + 1);
  std::size_t total = 0;
  for (const auto& e : one.catalog) total += e.occurrences;
  CHECK(total == corpus.lines.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    TemplateResult r{rows[i][2], split_parameters(rows[i][3]), TemplateSource::statistical};
    if (r.parameters.empty() && r.template_text == rows[i][1]) continue;
    INFO(rows[i][1]);
    CHECK(round_trips(r, split_tokens(rows[i][1])));
  }
}

TEST_CASE("parallel_map_buckets") {
  std::vector<LogBucket> none;
  CHECK(parallel_map_buckets(none, 4, [](const LogBucket& b) { return b.length; }).empty());

  std::vector<LogBucket> buckets;
  for (std::size_t len = 1; len <= 10; ++len) buckets.push_back({len, {}});
  auto seq = parallel_map_buckets(buckets, 1, [](const LogBucket& b) { return b.length * 2; });
  auto par = parallel_map_buckets(buckets, 8, [](const LogBucket& b) { return b.length * 2; });
  CHECK(seq == par);
  CHECK(seq.front() == 2);
  CHECK_THROWS_AS(parallel_map_buckets(buckets, 0, [](const LogBucket& b) { return b.length; }),
                  ConfigError);
  try {
    parallel_map_buckets(buckets, 4, [](const LogBucket& b) -> int {
      if (b.length == 7) throw std::runtime_error("boom");
      return 0;
    });
    FAIL("expected a failure");
  } catch (const WorkUnitError& e) {
    CHECK(e.unit() == "bucket of length 7");
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
  }
}
