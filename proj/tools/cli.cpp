#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "celerlog/evalkit.hpp"
#include "celerlog/http_backend.hpp"
#include "celerlog/llm_processor.hpp"
#include "celerlog/pipeline.hpp"

namespace celerlog::cli {

namespace {

constexpr int kFatal = 2;

struct ParseArgs {
  std::string input;
  std::string format = "raw";
  std::optional<std::string> header_pattern;
  std::string output;
  RouterConfig router;
  std::string backend = "mock";
  std::string endpoint;
  std::string model;
  std::string mask_rules;
  std::string verbs;
  std::string prompt;
};

struct EvalArgs {
  std::string structured;
  std::string ground_truth;
  std::string report;
};

void add_parse_options(CLI::App& cmd, ParseArgs& a) {
  cmd.add_option("--input", a.input, "Log file to parse")->required();
  cmd.add_option("--format", a.format, "Input format")
      ->check(CLI::IsMember({"raw", "csv"}))
      ->capture_default_str();
  cmd.add_option("--header-pattern", a.header_pattern,
                 "Regex with a named group 'content' that isolates the message body");
  cmd.add_option("--output", a.output, "Output directory")->required();
  cmd.add_option("--alpha", a.router.alpha, "Fraction of skeleton groups a bucket may mark dense")
      ->capture_default_str();
  cmd.add_option("--p-quantile", a.router.p_quantile, "Singleton ratio that stops the threshold sweep")
      ->capture_default_str();
  cmd.add_option("--tau-step", a.router.tau_step, "Threshold sweep step")->capture_default_str();
  cmd.add_option("--bypass-length", a.router.bypass_length,
                 "Buckets with at most this many tokens skip merging")
      ->capture_default_str();
  cmd.add_option("--bypass-groups", a.router.bypass_group_count,
                 "Buckets with at most this many groups skip merging")
      ->capture_default_str();
  cmd.add_option("--jobs", a.router.jobs, "Worker threads and in-flight requests")
      ->capture_default_str();
  cmd.add_option("--batch-size", a.router.llm_batch_size, "Messages per backend request")
      ->capture_default_str();
  cmd.add_option("--backend", a.backend, "Inference backend")
      ->check(CLI::IsMember({"mock", "http"}))
      ->capture_default_str();
  cmd.add_option("--endpoint", a.endpoint, "Chat-completions URL (http backend)");
  cmd.add_option("--model", a.model, "Model name (http backend)");
  cmd.add_option("--mask-rules", a.mask_rules, "Replacement mask rule table");
  cmd.add_option("--verbs", a.verbs, "Replacement verb lexicon");
  cmd.add_option("--prompt", a.prompt, "Replacement prompt fixture");
}

int run_parse(const ParseArgs& a, std::ostream& out) {
  RunConfig config;
  config.router = a.router;
  config.router.validate();
  config.input = a.input;
  config.format = a.format == "csv" ? InputFormat::csv : InputFormat::raw;
  config.header_pattern = a.header_pattern;
  config.output_dir = a.output;

  std::optional<MaskRuleSet> rules;
  std::optional<VerbLexicon> verbs;
  std::optional<PromptTemplate> prompt;
  Resources resources;
  if (!a.mask_rules.empty()) resources.rules = &rules.emplace(MaskRuleSet::load(a.mask_rules));
  if (!a.verbs.empty()) resources.verbs = &verbs.emplace(VerbLexicon::load(a.verbs));
  if (!a.prompt.empty()) resources.prompt = &prompt.emplace(PromptTemplate::load(a.prompt));

  std::unique_ptr<InferenceBackend> backend;
  if (a.backend == "http") {
    backend = std::make_unique<HttpBackend>(
        HttpBackendOptions{a.endpoint, a.model, api_key_from_env(), std::chrono::seconds(60)});
  } else {
    backend = std::make_unique<MockBackend>(*resources.rules);
  }

  auto result = run(config, *backend, resources);
  out << "records " << result.records.size() << ", templates " << result.catalog.size()
      << ", dense " << result.cost.dense_record_count << ", sparse "
      << result.cost.sparse_record_count << ", invocations " << result.cost.llm_invocations
      << ", wall " << result.cost.wall_time_seconds << " s\n";
  return 0;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  auto aligned = align(load_templates(a.structured), load_templates(a.ground_truth));
  auto metrics = evaluate(aligned.predicted, aligned.truth);
  std::filesystem::path run_json = std::filesystem::path(a.structured).parent_path() / "run.json";
  report(metrics, a.report, run_json, out);
  return 0;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid log parser: statistical templates for dense groups, model queries for the rest",
               "celerlog"};
  app.set_version_flag("--version", std::string("celerlog ") + CELERLOG_VERSION);
  app.require_subcommand(1);

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "Parse a log file into templates");
  add_parse_options(*parse, parse_args);
  parse->footer(std::string("The http backend reads its credential from ") + kApiKeyEnv + ".");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Score a structured output against ground truth");
  eval->add_option("--structured", eval_args.structured, "structured.csv from a parse run")->required();
  eval->add_option("--ground-truth", eval_args.ground_truth, "CSV with LineId,EventTemplate")
      ->required();
  eval->add_option("--report", eval_args.report, "JSON report to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n"
        << "Run with --help for usage.\n";
    return kFatal;
  }

  try {
    if (parse->parsed()) return run_parse(parse_args, out);
    return run_eval(eval_args, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFatal;
  }
}

}  // namespace celerlog::cli
