#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "celerlog/evalkit.hpp"
#include "celerlog/llm_processor.hpp"
#include "celerlog/masker.hpp"
#include "celerlog/pipeline.hpp"
#include "celerlog/router.hpp"
#include "celerlog/stat_processor.hpp"

namespace py = pybind11;
using namespace celerlog;

namespace {

std::vector<LogRecord> to_records(const std::vector<std::string>& lines) {
  std::vector<LogRecord> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) out.emplace_back(i, lines[i]);
  return out;
}

RouterConfig router_config(double alpha, double p_quantile, double tau_step, std::size_t jobs) {
  RouterConfig c;
  c.alpha = alpha;
  c.p_quantile = p_quantile;
  c.tau_step = tau_step;
  c.jobs = jobs;
  return c;
}

py::dict routing_dict(const RoutingStats& s) {
  py::dict d;
  d["record_count"] = s.record_count;
  d["skeleton_group_count"] = s.skeleton_group_count;
  d["bucket_count"] = s.bucket_count;
  d["bypassed_bucket_count"] = s.bypassed_bucket_count;
  d["dense_group_count"] = s.dense_group_count;
  d["sparse_group_count"] = s.sparse_group_count;
  d["dense_record_count"] = s.dense_record_count;
  d["sparse_record_count"] = s.sparse_record_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hybrid log template extraction";
  m.attr("__version__") = CELERLOG_VERSION;

  // Translators run newest first, so the base class goes in before its subclasses.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<EmptyMessage>(m, "EmptyMessage", base.ptr());

  m.def("mask_token", [](const std::string& t) { return mask_token(t); }, py::arg("token"));
  m.def(
      "mask_message",
      [](const std::string& content) { return mask_message(content).skeleton; },
      py::arg("content"));
  m.def("pos_jaccard", &pos_jaccard, py::arg("a"), py::arg("b"));
  m.def(
      "singleton_ratio",
      [](const std::vector<double>& s, double tau) { return singleton_ratio(s, tau); },
      py::arg("similarities"), py::arg("tau"));
  m.def(
      "select_threshold",
      [](const std::vector<double>& s, double p_quantile, double tau_step) {
        RouterConfig c;
        c.p_quantile = p_quantile;
        c.tau_step = tau_step;
        c.validate();
        return select_threshold(s, c);
      },
      py::arg("similarities"), py::arg("p_quantile") = 0.95, py::arg("tau_step") = 0.01);
  m.def("post_process", [](const std::string& t) { return post_process(t); }, py::arg("template"));
  m.def("normalize_template", &normalize_template, py::arg("template"));

  m.def(
      "route",
      [](const std::vector<std::string>& lines, double alpha, double p_quantile, double tau_step,
         std::size_t jobs) {
        auto records = to_records(lines);
        auto r = route(records, router_config(alpha, p_quantile, tau_step, jobs));
        py::list dense, sparse;
        for (const auto& d : r.dense) {
          py::list keys;
          for (const auto& g : d.member_groups) keys.append(g.key);
          dense.append(keys);
        }
        for (const auto& s : r.sparse) sparse.append(s.group.key);
        py::dict out;
        out["dense"] = dense;
        out["sparse"] = sparse;
        out["stats"] = routing_dict(r.stats);
        return out;
      },
      py::arg("lines"), py::arg("alpha") = 0.5, py::arg("p_quantile") = 0.95,
      py::arg("tau_step") = 0.01, py::arg("jobs") = 8);

  m.def(
      "parse",
      [](const std::vector<std::string>& lines, double alpha, double p_quantile, double tau_step,
         std::size_t jobs) {
        RunConfig config;
        config.router = router_config(alpha, p_quantile, tau_step, jobs);
        MockBackend backend;
        ParseOutput out;
        {
          py::gil_scoped_release release;
          out = parse_records(to_records(lines), config, backend);
        }
        py::list results;
        for (const auto& r : out.results)
          results.append(py::make_tuple(r.template_text, r.parameters, std::string(to_string(r.source))));
        py::dict cost;
        cost["tokens_consumed"] = out.cost.tokens_consumed;
        cost["llm_invocations"] = out.cost.llm_invocations;
        cost["dense_record_count"] = out.cost.dense_record_count;
        cost["sparse_record_count"] = out.cost.sparse_record_count;
        py::dict d;
        d["results"] = results;
        d["cost"] = cost;
        d["routing"] = routing_dict(out.routing);
        return d;
      },
      py::arg("lines"), py::arg("alpha") = 0.5, py::arg("p_quantile") = 0.95,
      py::arg("tau_step") = 0.01, py::arg("jobs") = 8,
      "Parses log messages with the offline mock backend.");

  m.def(
      "evaluate",
      [](const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
        auto x = evaluate(predicted, truth);
        py::dict d;
        d["GA"] = x.ga;
        d["PA"] = x.pa;
        d["FGA"] = x.fga;
        d["FTA"] = x.fta;
        return d;
      },
      py::arg("predicted"), py::arg("truth"));
}
