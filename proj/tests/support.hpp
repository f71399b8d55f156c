#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "celerlog/llm_processor.hpp"
#include "celerlog/model.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("celerlog-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& l : lines) out << l << '\n';
}

inline std::vector<celerlog::LogRecord> records_of(const std::vector<std::string>& lines) {
  std::vector<celerlog::LogRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) out.emplace_back(i, lines[i]);
  return out;
}

// Misbehaves on chosen messages: a message starting with "timeout" never gets
// an answer, "garbled" gets prose instead of a variable block, and
// "phantom" gets variables that do not occur in it. Everything else is
// answered like the mock backend.
class FaultyBackend : public celerlog::InferenceBackend {
 public:
  celerlog::InferenceReply infer(const celerlog::PromptEnvelope& envelope) override {
    calls.fetch_add(1);
    auto messages = celerlog::payload_messages(envelope);
    for (const auto& m : messages)
      if (m.rfind("timeout", 0) == 0) throw celerlog::TransportError("request timed out");
    for (const auto& m : messages)
      if (m.rfind("garbled", 0) == 0) return {"Sure! Here are the variables you asked for.", 10, 10};
    std::vector<std::vector<std::string>> lists;
    for (const auto& m : messages) {
      if (m.rfind("phantom", 0) == 0) lists.push_back({"ghost-value-42", "  "});
      else lists.push_back(mock_.variables_for(m));
    }
    return {celerlog::format_response(lists), 10, 10};
  }
  std::string name() const override { return "faulty"; }

  std::atomic<int> calls{0};

 private:
  celerlog::MockBackend mock_;
};

}  // namespace testing
