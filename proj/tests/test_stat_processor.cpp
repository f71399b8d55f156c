#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "celerlog/router.hpp"
#include "celerlog/stat_processor.hpp"
#include "celerlog/synth.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace celerlog;
using testing::records_of;

namespace {

DenseGroup dense_of(const std::vector<std::string>& lines) {
  DenseGroup d;
  for (auto& g : group_by_skeleton(records_of(lines))) d.member_groups.push_back(std::move(g));
  return d;
}

const TemplateResult& result_for(const StatExtraction& x, const std::string& content) {
  auto it = std::find_if(x.by_content.begin(), x.by_content.end(),
                         [&](const auto& p) { return p.first == content; });
  REQUIRE(it != x.by_content.end());
  return it->second;
}

}  // namespace

TEST_CASE("five snapshot messages") {
  auto lines = synth::snapshot_corpus();
  auto x = extract_template(dense_of(lines));
  REQUIRE(x.templates.size() == 1);
  CHECK(x.templates.at(4) == "Snapshotting: <*> to <*>");
  REQUIRE(x.by_content.size() == 5);
  auto& first = result_for(x, "Snapshotting: 0x0 to /data/version-2/snapshot.0");
  CHECK(first.template_text == "Snapshotting: <*> to <*>");
  CHECK(first.parameters == std::vector<std::string>{"0x0", "/data/version-2/snapshot.0"});
  CHECK(first.source == TemplateSource::statistical);
}

TEST_CASE("constant groups and simple variance") {
  auto x = extract_template(dense_of({"shutdown complete"}));
  CHECK(x.templates.at(2) == "shutdown complete");
  CHECK(x.by_content[0].second.parameters.empty());

  auto y = extract_template(dense_of({"a 1 b", "a 2 b"}));
  CHECK(y.templates.at(3) == "a <*> b");
  CHECK(result_for(y, "a 2 b").parameters == std::vector<std::string>{"2"});
}

TEST_CASE("mask positions are forced even with one distinct message") {
  auto x = extract_template(dense_of({"worker 17 ready"}));
  CHECK(x.templates.at(3) == "worker <*> ready");
}

TEST_CASE("adjacent parameters merge") {
  auto x = extract_template(dense_of({"user alice logged in from x", "user bob left now from y"}));
  CHECK(x.templates.at(6) == "user <*> from <*>");
  CHECK(result_for(x, "user bob left now from y").parameters ==
        std::vector<std::string>{"bob left now", "y"});
}

TEST_CASE("post_process") {
  CHECK(post_process("connect to <*>:<*>") == "connect to <*>");
  CHECK(post_process("ok done") == "ok done");
  CHECK(post_process("took 37 ms") == "took <*> ms");
  CHECK(post_process("a <*> <*> b") == "a <*> b");
  CHECK(post_process("path /var/log/x.log opened") == "path <*> opened");
  CHECK(post_process("status OK") == "status OK");
  CHECK(post_process("<*>=<*> <*>") == "<*>");
  CHECK(post_process("key <*>/<*>") == "key <*>");
  CHECK(post_process("list <*>,<*>") == "list <*>,<*>");
}

TEST_CASE("column_variance and forced_positions") {
  std::vector<std::vector<std::string>> rows{{"a", "1", "b"}, {"a", "2", "b"}, {"a", "2", "c"}};
  CHECK(column_variance(rows) == std::vector<bool>{false, true, true});
  std::vector<std::vector<std::string>> keys{{"a", "<NUM>", "b"}, {"x", "y", "(<CL>)"}};
  CHECK(forced_positions(keys, 3) == std::vector<bool>{false, true, true});
}

TEST_CASE("refine keeps the round trip") {
  std::vector<std::string> tokens{"took", "37", "ms", "on", "node-7"};
  auto r = refine(tokens, {false, false, false, false, false}, TemplateSource::statistical);
  CHECK(r.template_text == "took <*> ms on <*>");
  CHECK(round_trips(r, tokens));
  auto literal = refine({"got", "<*>", "here"}, {false, false, false}, TemplateSource::statistical);
  CHECK(literal.template_text == "got <*> here");
  CHECK(literal.parameters == std::vector<std::string>{"<*>"});
}

TEST_CASE("extraction matches the brute-force column oracle") {
  std::mt19937 rng(2024);
  const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "17", "0x2a", "node3",
                                          "/a/b", "OK", "delta", "x"};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t width = 1 + rng() % 12;
    const std::size_t count = 1 + rng() % 50;
    std::vector<std::string> columns_base(width);
    for (auto& c : columns_base) c = vocab[rng() % vocab.size()];
    std::set<std::string> lines;
    for (std::size_t i = 0; i < count; ++i) {
      std::string line;
      for (std::size_t p = 0; p < width; ++p) {
        if (p) line += ' ';
        line += (rng() % 3 == 0) ? vocab[rng() % vocab.size()] : columns_base[p];
      }
      lines.insert(line);
    }
    std::vector<std::string> distinct(lines.begin(), lines.end());
    auto group = dense_of(distinct);

    std::vector<std::vector<std::string>> rows, keys;
    for (const auto& l : distinct) rows.push_back(oracle::words(l));
    for (const auto& g : group.member_groups) keys.push_back(g.key_tokens);
    auto expected = oracle::parameter_columns(rows, keys);

    auto variance = column_variance(rows);
    auto forced = forced_positions(keys, width);
    std::vector<bool> got(width);
    for (std::size_t p = 0; p < width; ++p) got[p] = variance[p] || forced[p];
    CHECK(got == expected);

    auto x = extract_template(group);
    REQUIRE(x.by_content.size() == distinct.size());
    for (const auto& [content, result] : x.by_content) {
      auto tokens = oracle::words(content);
      CHECK(result == refine(tokens, expected, TemplateSource::statistical));
      CHECK(round_trips(result, tokens));
    }

    // member order does not matter
    std::shuffle(group.member_groups.begin(), group.member_groups.end(), rng);
    CHECK(extract_template(group).by_content == x.by_content);
  }
}
