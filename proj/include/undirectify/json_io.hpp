#pragma once

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "undirectify/exact.hpp"
#include "undirectify/graph.hpp"
#include "undirectify/models.hpp"
#include "undirectify/montecarlo.hpp"
#include "undirectify/verify.hpp"

namespace undirectify {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Codes
// ---------------------------------------------------------------------------

inline std::string code_to_hex(std::uint64_t code) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "0x%llx", static_cast<unsigned long long>(code));
  return buffer;
}

inline std::uint64_t hex_to_code(const std::string& text) {
  if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
    throw std::invalid_argument("expected hex code of the form 0x..., got '" + text + "'");
  std::uint64_t value = 0;
  for (std::size_t i = 2; i < text.size(); ++i) {
    const char c = text[i];
    int digit;
    if (c >= '0' && c <= '9')
      digit = c - '0';
    else if (c >= 'a' && c <= 'f')
      digit = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      digit = c - 'A' + 10;
    else
      throw std::invalid_argument("bad hex digit in '" + text + "'");
    if (value >> 60) throw std::invalid_argument("hex code overflows 64 bits: " + text);
    value = (value << 4) | static_cast<std::uint64_t>(digit);
  }
  return value;
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

inline json to_json(const Graph& g) {
  json out;
  out["n"] = g.vertex_count();
  json edges = json::array();
  for (auto [v, w] : g.edges()) edges.push_back(json::array({v, w}));
  out["edges"] = edges;
  return out;
}

inline json to_json(const Digraph& d) {
  json out;
  out["n"] = d.vertex_count();
  json arcs = json::array();
  for (auto [v, w] : d.arcs()) arcs.push_back(json::array({v, w}));
  out["arcs"] = arcs;
  return out;
}

inline Graph graph_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  if (j.contains("code")) return Graph::decode(hex_to_code(j.at("code").get<std::string>()), n);
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return Graph(n, edges);
}

inline Digraph digraph_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  if (j.contains("code")) return Digraph::decode(hex_to_code(j.at("code").get<std::string>()), n);
  std::vector<std::pair<int, int>> arcs;
  for (const auto& a : j.at("arcs")) arcs.emplace_back(a.at(0).get<int>(), a.at(1).get<int>());
  return Digraph(n, arcs);
}

// ---------------------------------------------------------------------------
// Model specs
// ---------------------------------------------------------------------------

inline ModelClass model_class_from_string(const std::string& s) {
  if (s == "IAG") return ModelClass::IAG;
  if (s == "IEG") return ModelClass::IEG;
  if (s == "ASRG") return ModelClass::ASRG;
  if (s == "ESRG") return ModelClass::ESRG;
  throw std::invalid_argument("unknown model class: " + s);
}

inline ModelInstance model_instance_from_string(const std::string& s) {
  for (ModelInstance i :
       {ModelInstance::gilbert, ModelInstance::directed_gilbert, ModelInstance::irg,
        ModelInstance::ird, ModelInstance::girg, ModelInstance::classical_er,
        ModelInstance::directed_classical_er, ModelInstance::cci, ModelInstance::custom})
    if (to_string(i) == s) return i;
  throw std::invalid_argument("unknown model instance: " + s);
}

inline json to_json(const CciParameters& c) {
  return json{{"q", c.q}, {"p", c.p}, {"I", c.I}, {"J", c.J}, {"alpha", c.alpha}};
}

inline CciParameters cci_from_json(const json& j) {
  CciParameters c;
  c.q = j.at("q").get<std::vector<double>>();
  c.p = j.at("p").get<std::vector<std::vector<double>>>();
  c.I = j.at("I").get<std::vector<std::vector<int>>>();
  c.J = j.at("J").get<std::vector<std::vector<int>>>();
  c.alpha = j.at("alpha").get<double>();
  c.tau = static_cast<int>(c.q.size());
  c.l = static_cast<int>(c.p.size());
  c.r = c.p.empty() ? 0 : static_cast<int>(c.p.front().size());
  return c;
}

inline json params_to_json(const ModelSpec& spec) {
  json out;
  if (const auto* g = std::get_if<GilbertParams>(&spec.params)) {
    out["p"] = g->p;
  } else if (const auto* p = std::get_if<IrgParams>(&spec.params)) {
    out["type_pmf"] = p->type_pmf;
    out["kernel"] = p->kernel;
  } else if (const auto* g = std::get_if<GirgParams>(&spec.params)) {
    out["alpha"] = g->alpha;
    out["lambda"] = g->lambda;
    out["dim"] = g->dim;
    out["weights"] = {
        {"law", g->weights.kind == GirgWeightLaw::Kind::constant ? "constant" : "pareto"},
        {"param", g->weights.param}};
  } else if (const auto* s = std::get_if<SelectionCountParams>(&spec.params)) {
    out["m"] = s->m;
  } else if (const auto* c = std::get_if<CustomProbabilityParams>(&spec.params)) {
    out["pi"] = c->pi;
  } else if (const auto* c = std::get_if<CustomMassParams>(&spec.params)) {
    out["mu"] = c->mu;
    out["m"] = c->m;
  } else if (const auto* c = std::get_if<CciParameters>(&spec.params)) {
    out = to_json(*c);
  }
  return out;
}

inline json to_json(const ModelSpec& spec) {
  return json{{"class", to_string(spec.model_class)},
              {"instance", to_string(spec.instance)},
              {"n", spec.n},
              {"params", params_to_json(spec)}};
}

inline ModelSpec model_spec_from_json(const json& j) {
  ModelSpec spec;
  spec.model_class = model_class_from_string(j.at("class").get<std::string>());
  spec.instance = model_instance_from_string(j.at("instance").get<std::string>());
  spec.n = j.at("n").get<int>();
  const json params = j.value("params", json::object());
  switch (spec.instance) {
    case ModelInstance::gilbert:
    case ModelInstance::directed_gilbert:
      spec.params = GilbertParams{params.at("p").get<double>()};
      break;
    case ModelInstance::irg:
    case ModelInstance::ird:
      spec.params = IrgParams{params.at("type_pmf").get<std::vector<double>>(),
                              params.at("kernel").get<std::vector<std::vector<double>>>()};
      break;
    case ModelInstance::girg: {
      GirgParams g;
      g.alpha = params.at("alpha").get<double>();
      g.lambda = params.at("lambda").get<double>();
      g.dim = params.at("dim").get<int>();
      if (params.contains("weights")) {
        const std::string law = params.at("weights").at("law").get<std::string>();
        if (law == "constant")
          g.weights.kind = GirgWeightLaw::Kind::constant;
        else if (law == "pareto")
          g.weights.kind = GirgWeightLaw::Kind::pareto;
        else
          throw std::invalid_argument("unknown girg weight law: " + law);
        g.weights.param = params.at("weights").at("param").get<double>();
      }
      spec.params = g;
      break;
    }
    case ModelInstance::classical_er:
    case ModelInstance::directed_classical_er:
      spec.params = SelectionCountParams{params.at("m").get<int>()};
      break;
    case ModelInstance::cci:
      spec.params = cci_from_json(params);
      break;
    case ModelInstance::custom:
      if (spec.independent()) {
        spec.params =
            CustomProbabilityParams{params.at("pi").get<std::vector<std::vector<double>>>()};
      } else {
        spec.params = CustomMassParams{params.at("mu").get<std::vector<std::vector<double>>>(),
                                       params.at("m").get<int>()};
      }
      break;
  }
  spec.validate();
  return spec;
}

struct SpecFile {
  ModelSpec spec;
  std::optional<std::uint64_t> seed;
};

inline SpecFile spec_file_from_json(const json& j) {
  SpecFile file{model_spec_from_json(j), std::nullopt};
  if (j.contains("seed")) file.seed = j.at("seed").get<std::uint64_t>();
  return file;
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

inline RateSchedule rate_schedule_from_json(const json& j) {
  RateSchedule schedule;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "log-n")
    schedule.kind = RateSchedule::Kind::log_n;
  else if (kind == "sqrt-n")
    schedule.kind = RateSchedule::Kind::sqrt_n;
  else if (kind == "constant")
    schedule.kind = RateSchedule::Kind::constant;
  else if (kind == "power")
    schedule.kind = RateSchedule::Kind::power;
  else
    throw std::invalid_argument("unknown rate schedule kind: " + kind);
  schedule.param = j.value("param", 1.0);
  return schedule;
}

inline json to_json(const RateSchedule& schedule) {
  return json{{"kind", schedule.name()}, {"param", schedule.param}};
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig config;
  for (const auto& s : j.at("specs")) config.specs.push_back(model_spec_from_json(s));
  config.replicates = j.value("replicates", 1L);
  config.base_seed = j.value("base_seed", kDefaultSeed);
  if (j.contains("n_grid")) config.n_grid = j.at("n_grid").get<std::vector<int>>();
  if (j.contains("rate")) config.rate = rate_schedule_from_json(j.at("rate"));
  if (j.contains("slack")) config.slack = rate_schedule_from_json(j.at("slack"));
  config.validate();
  return config;
}

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

inline json to_json(const GraphDistribution& dist,
                    const std::vector<int>* conditioned_types = nullptr) {
  json pmf = json::object();
  for (std::uint64_t code = 0; code < dist.size(); ++code)
    if (dist.pmf()[code] != 0.0) pmf[code_to_hex(code)] = dist.pmf()[code];
  json out{{"n", dist.n()}, {"kind", to_string(dist.kind())}, {"pmf", pmf}};
  if (conditioned_types) {
    out["conditional"] = true;
    out["types"] = *conditioned_types;
  }
  return out;
}

inline GraphDistribution distribution_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  const std::string kind_text = j.at("kind").get<std::string>();
  GraphKind kind;
  if (kind_text == "graph")
    kind = GraphKind::graph;
  else if (kind_text == "digraph")
    kind = GraphKind::digraph;
  else
    throw std::invalid_argument("unknown distribution kind: " + kind_text);
  GraphDistribution dist(n, kind);
  for (const auto& [key, value] : j.at("pmf").items())
    dist.set_mass(hex_to_code(key), value.get<double>());
  dist.validate();
  return dist;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json to_json(const VerdictReport& v) {
  json details = json::object();
  for (const auto& [key, value] : v.details) details[key] = value;
  return json{{"statistic", v.statistic},
              {"estimate", v.estimate},
              {"se", v.se},
              {"bound", v.bound},
              {"slack", v.slack},
              {"pass", v.pass},
              {"informational", v.informational},
              {"replicates", v.replicates},
              {"seed", v.seed},
              {"details", details}};
}

inline json to_json(const SuiteCheck& c) {
  return json{{"name", c.name},         {"pass", c.pass},   {"informational", c.informational},
              {"value", c.value},       {"bound", c.bound}, {"detail", c.detail}};
}

inline json to_json(const SuiteResult& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return json{{"suite", r.suite},
              {"seed", r.seed},
              {"pass", r.all_hard_pass()},
              {"hard_failures", r.hard_failures()},
              {"checks", checks}};
}

inline json to_json(const CouplingRunReport& r) {
  json checks = json::array();
  for (const auto& v : r.bound_checks) checks.push_back(to_json(v));
  json out{{"pair", r.pair},
           {"replicates", r.replicates},
           {"seed", r.seed},
           {"n", r.n},
           {"aggregates",
            {{"mean_xi1", r.mean_xi1},
             {"mean_xi2", r.mean_xi2},
             {"max_xi1", r.max_xi1},
             {"max_xi2", r.max_xi2},
             {"mean_psi_m", r.mean_psi_m},
             {"rule_counts", r.rule_counts},
             {"degenerate", r.degenerate},
             {"recount_mismatches", r.recount_mismatches}}},
           {"bound_checks", checks}};
  if (r.conditioned_on_types) {
    out["conditional"] = true;
    out["types"] = r.types;
  }
  if (!r.kept.empty()) {
    json rows = json::array();
    for (const auto& row : r.kept)
      rows.push_back(json{{"xi1", row[0]}, {"xi2", row[1]}, {"psi_m", row[2]}});
    out["replicate_sample"] = rows;
  }
  return out;
}

inline json to_json(const PipelineReport& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back(json{{"n", p.n},
                          {"replicates", p.replicates},
                          {"p_iag", p.p_iag},
                          {"p_asrg", p.p_asrg},
                          {"p_ieg", p.p_ieg},
                          {"p_esrg", p.p_esrg},
                          {"se_iag", p.se_iag},
                          {"se_asrg", p.se_asrg},
                          {"se_ieg", p.se_ieg},
                          {"se_esrg", p.se_esrg},
                          {"directed_gap", p.directed_gap},
                          {"undirected_gap", p.undirected_gap},
                          {"allowance_iag_ieg", p.allowance_iag_ieg},
                          {"allowance_asrg_esrg", p.allowance_asrg_esrg},
                          {"gap_within_allowance", p.gap_within_allowance},
                          {"skipped", p.skipped}});
  }
  return json{{"event", r.event}, {"seed", r.seed}, {"points", points}};
}

inline json to_json(const InsensitivityReport& r) {
  json strategies = json::array();
  for (const auto& s : r.strategies)
    strategies.push_back(json{{"name", s.name}, {"delta", s.delta}, {"se", s.se}});
  json out{{"event", r.event},
           {"rate", r.rate},
           {"replicates", r.replicates},
           {"base_probability", r.base_probability},
           {"base_se", r.base_se},
           {"strategies", strategies},
           {"max_abs_delta", r.max_abs_delta}};
  if (r.exact_available) {
    out["exact"] = {{"base", r.exact_base},
                    {"max_delta", r.exact_max_delta},
                    {"min_delta", r.exact_min_delta}};
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV series
// ---------------------------------------------------------------------------

// Flattens a report into plot-ready rows: one per (n, statistic) with
// estimate, interval and bound columns.
struct CsvRow {
  std::string group;
  std::string statistic;
  double n = 0.0;
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double bound = 0.0;
  int pass = 1;
};

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::vector<CsvRow> emit_series(const json& report) {
  std::vector<CsvRow> rows;
  if (report.contains("points")) {  // pipeline report
    for (const auto& p : report.at("points")) {
      const double n = p.at("n").get<double>();
      for (const char* stat : {"p_iag", "p_asrg", "p_ieg", "p_esrg"}) {
        CsvRow row;
        row.group = report.value("event", "");
        row.statistic = stat;
        row.n = n;
        row.estimate = p.at(stat).get<double>();
        const std::string se_key = std::string("se_") + (stat + 2);
        const double se = p.at(se_key).get<double>();
        row.lo = row.estimate - 3.0 * se;
        row.hi = row.estimate + 3.0 * se;
        rows.push_back(row);
      }
      CsvRow gap;
      gap.group = report.value("event", "");
      gap.statistic = "undirected_gap";
      gap.n = n;
      gap.estimate = p.at("undirected_gap").get<double>();
      gap.bound = p.at("directed_gap").get<double>() +
                  p.at("allowance_iag_ieg").get<double>() +
                  p.at("allowance_asrg_esrg").get<double>();
      gap.pass = p.at("gap_within_allowance").get<bool>() ? 1 : 0;
      rows.push_back(gap);
    }
    return rows;
  }
  if (report.contains("checks")) {  // suite result
    for (const auto& c : report.at("checks")) {
      CsvRow row;
      row.group = report.value("suite", "");
      row.statistic = c.at("name").get<std::string>();
      row.estimate = c.at("value").get<double>();
      row.bound = c.at("bound").get<double>();
      row.pass = c.at("pass").get<bool>() ? 1 : 0;
      rows.push_back(row);
    }
    return rows;
  }
  if (report.contains("bound_checks")) {  // coupling report
    for (const auto& c : report.at("bound_checks")) {
      CsvRow row;
      row.group = report.value("pair", "");
      row.statistic = c.at("statistic").get<std::string>();
      row.n = report.value("n", 0);
      row.estimate = c.at("estimate").get<double>();
      const double se = c.at("se").get<double>();
      row.lo = row.estimate - 3.0 * se;
      row.hi = row.estimate + 3.0 * se;
      row.bound = c.at("bound").get<double>();
      row.pass = c.at("pass").get<bool>() ? 1 : 0;
      rows.push_back(row);
    }
    return rows;
  }
  return rows;
}

inline std::string csv_to_string(const std::vector<CsvRow>& rows) {
  std::ostringstream out;
  out << "group,statistic,n,estimate,lo,hi,bound,pass\n";
  char buffer[64];
  for (const auto& row : rows) {
    out << csv_escape(row.group) << ',' << csv_escape(row.statistic) << ',';
    const double numbers[] = {row.n, row.estimate, row.lo, row.hi, row.bound};
    for (double x : numbers) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", x);
      out << buffer << ',';
    }
    out << row.pass << '\n';
  }
  return out.str();
}

inline std::vector<CsvRow> parse_csv_series(const std::string& text) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    // split respecting simple quoting
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(field);
        field.clear();
      } else {
        field += c;
      }
    }
    fields.push_back(field);
    if (fields.size() != 8) throw std::invalid_argument("csv row with wrong column count");
    CsvRow row;
    row.group = fields[0];
    row.statistic = fields[1];
    row.n = std::stod(fields[2]);
    row.estimate = std::stod(fields[3]);
    row.lo = std::stod(fields[4]);
    row.hi = std::stod(fields[5]);
    row.bound = std::stod(fields[6]);
    row.pass = std::stoi(fields[7]);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Atomic file output
// ---------------------------------------------------------------------------

// Writes through a temp file in the destination directory and renames, so an
// interrupted run never leaves a partial artifact at the destination.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("failed writing " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("failed to move " + tmp + " to " + path);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace undirectify
