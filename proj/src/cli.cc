#include "sectionview/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "sectionview/formula.h"
#include "sectionview/http_server.h"
#include "sectionview/layout.h"
#include "sectionview/section.h"
#include "sectionview/service.h"
#include "sectionview/snapshot.h"

#ifndef SECTIONVIEW_DEFAULT_ASSETS
#define SECTIONVIEW_DEFAULT_ASSETS ""
#endif

namespace sectionview {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || v <= 0) {
    throw UsageError("option '" + key + "' needs a positive integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

void reject_unknown(const ModelFlag& f, std::set<std::string> allowed) {
  for (const auto& [k, _] : f.options) {
    if (!allowed.count(k)) {
      throw UsageError("unknown option '" + k + "' for " + f.kind + " model");
    }
  }
}

ModelPtr build_one(const Dataset& d, const ModelFlag& f,
                   const std::string& default_response) {
  if (f.kind == "lm") {
    reject_unknown(f, {"name"});
    return std::make_shared<LinearModel>(
        fit_linear(d, expand_dot(parse_formula(f.formula), d)));
  }
  if (f.kind == "knn") {
    reject_unknown(f, {"name", "k"});
    const FormulaSpec spec = expand_dot(parse_formula(f.formula), d);
    std::vector<std::string> predictors;
    for (const auto& t : spec.terms) {
      const auto* main = std::get_if<MainTerm>(&t);
      if (main == nullptr) {
        throw UsageError("knn formulas take plain predictors only, got '" +
                         render(t) + "'");
      }
      predictors.push_back(main->var);
    }
    const auto it = f.options.find("k");
    const std::size_t k = it == f.options.end() ? 5 : parse_count("k", it->second);
    return std::make_shared<KnnModel>(fit_knn(d, spec.response, predictors, k));
  }
  if (f.kind == "ext") {
    reject_unknown(f, {"name", "url", "response", "predictors", "timeout_ms"});
    const auto url = f.options.find("url");
    if (url == f.options.end()) throw UsageError("ext model needs url=...");
    const auto resp = f.options.find("response");
    const Column& rc =
        d.column(resp != f.options.end() ? resp->second : default_response);
    ResponseInfo info;
    info.name = rc.name();
    info.type = rc.is_categorical() ? ResponseType::kClass : ResponseType::kNumeric;
    if (rc.is_categorical()) info.levels = rc.levels();

    std::vector<std::string> predictors;
    if (const auto p = f.options.find("predictors"); p != f.options.end()) {
      predictors = split(p->second, ',');
      for (const auto& name : predictors) d.column(name);
    } else {
      for (const auto& name : d.names()) {
        if (name != info.name) predictors.push_back(name);
      }
    }
    if (predictors.empty()) throw UsageError("ext model has no predictors");
    std::chrono::milliseconds timeout = kExternalTimeout;
    if (const auto t = f.options.find("timeout_ms"); t != f.options.end()) {
      timeout = std::chrono::milliseconds(parse_count("timeout_ms", t->second));
    }
    return std::make_shared<ExternalModel>(url->second, std::move(predictors),
                                           std::move(info), timeout);
  }
  throw UsageError("unknown model kind '" + f.kind + "' (expected lm, knn or ext)");
}

struct CommonFlags {
  std::string data;
  std::vector<std::string> models;
  std::vector<std::string> categorical;
  std::vector<std::string> continuous;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool models_required) {
  cmd->add_option("--data", flags.data, "CSV data file")->required();
  auto* m = cmd->add_option("--model", flags.models,
                            "Model as kind:spec[;opt=val]* (repeatable)");
  if (models_required) m->required();
  cmd->add_option("--categorical", flags.categorical,
                  "Columns forced categorical")->delimiter(',');
  cmd->add_option("--continuous", flags.continuous,
                  "Columns forced continuous")->delimiter(',');
}

Dataset load(const CommonFlags& flags) {
  TypeHints hints;
  for (const auto& c : flags.categorical) hints[c] = ColumnKind::kCategorical;
  for (const auto& c : flags.continuous) {
    if (hints.count(c)) {
      throw UsageError("column '" + c + "' is forced both categorical and continuous");
    }
    hints[c] = ColumnKind::kContinuous;
  }
  return load_csv_file(flags.data, hints);
}

std::string dataset_name(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

std::vector<std::string> minus(const std::vector<std::string>& all,
                               const std::vector<std::string>& drop) {
  std::vector<std::string> out;
  for (const auto& v : all) {
    if (std::find(drop.begin(), drop.end(), v) == drop.end()) out.push_back(v);
  }
  return out;
}

}  // namespace

ModelFlag parse_model_flag(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw UsageError("model flag '" + std::string(text) + "' lacks a kind: prefix");
  }
  ModelFlag f;
  f.kind = std::string(trim(text.substr(0, colon)));
  auto parts = split(text.substr(colon + 1), ';');
  std::size_t first_option = 0;
  if (f.kind != "ext") {
    if (parts.empty() || parts[0].empty()) {
      throw UsageError(f.kind + " model needs a formula");
    }
    f.formula = parts[0];
    first_option = 1;
  }
  for (std::size_t i = first_option; i < parts.size(); ++i) {
    if (parts[i].empty()) continue;
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("model option '" + parts[i] + "' is not key=value");
    }
    const std::string key(trim(std::string_view(parts[i]).substr(0, eq)));
    if (!f.options.emplace(key, std::string(trim(std::string_view(parts[i]).substr(eq + 1)))).second) {
      throw UsageError("model option '" + key + "' given twice");
    }
  }
  return f;
}

std::vector<NamedModel> build_models(const Dataset& d,
                                     const std::vector<std::string>& flags) {
  std::vector<NamedModel> out;
  std::map<std::string, int> seen;
  for (const auto& text : flags) {
    const ModelFlag f = parse_model_flag(text);
    // External models without response= share the response of the models
    // flagged before them, or else predict the last column.
    const std::string default_response =
        out.empty() ? d.names().back() : out.front().model->response().name;
    ModelPtr model = build_one(d, f, default_response);
    std::string name;
    if (const auto it = f.options.find("name"); it != f.options.end()) {
      name = it->second;
      if (name.empty()) throw UsageError("model name must not be empty");
    } else {
      const int n = ++seen[f.kind];
      name = n == 1 ? f.kind : f.kind + "_" + std::to_string(n);
    }
    for (const auto& m : out) {
      if (m.name == name) throw UsageError("model name '" + name + "' used twice");
    }
    out.push_back({name, std::move(model)});
  }
  return out;
}

ConditionPoint parse_condition(const Dataset& d, std::string_view text) {
  ConditionPoint point;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("condition entry '" + item + "' is not var=value");
    }
    const std::string var(trim(std::string_view(item).substr(0, eq)));
    if (!d.has(var)) throw UsageError("unknown variable '" + var + "' in --at");
    Value v;
    try {
      v = parse_value(d.column(var), std::string_view(item).substr(eq + 1));
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
    if (!point.emplace(var, std::move(v)).second) {
      throw UsageError("variable '" + var + "' given twice in --at");
    }
  }
  return point;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"sectionview: explore fitted models through conditional sections"};
  app.require_subcommand(1);

  CommonFlags serve_flags;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string assets = SECTIONVIEW_DEFAULT_ASSETS;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  add_common(serve, serve_flags, true);
  serve->add_option("--port", port, "Listen port (0 picks one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--assets", assets, "Directory of UI assets served at /");

  CommonFlags section_flags;
  std::string section_vars, at, out_path = "-", norm = "euclidean";
  std::optional<double> sigma;
  double lambda = 1.0;
  bool factor_exact = false;
  int resolution = kDefaultResolution;
  std::optional<std::string> timestamp;
  auto* section = app.add_subcommand("section", "Evaluate one section and write its snapshot");
  add_common(section, section_flags, true);
  section->add_option("--section", section_vars, "Section variable(s): var[,var2]")->required();
  section->add_option("--at", at, "Condition point: var=value,...");
  section->add_option("--sigma", sigma, "Visibility threshold");
  section->add_option("--lambda", lambda, "Weight of a categorical mismatch");
  section->add_option("--norm", norm, "euclidean or maxnorm")
      ->check(CLI::IsMember({"euclidean", "maxnorm"}));
  section->add_flag("--factor-exact", factor_exact,
                    "Show only observations matching every categorical condition");
  section->add_option("--resolution", resolution, "Grid points per continuous axis");
  section->add_option("--out", out_path, "Snapshot file ('-' for stdout)");
  section->add_option("--timestamp", timestamp, "Timestamp recorded in the snapshot");

  CommonFlags layout_flags;
  std::optional<std::string> layout_vars, order;
  std::string layout_section;
  double min_gain = kDefaultPairingGain;
  auto* layout = app.add_subcommand("layout", "Print the condition selector layout");
  add_common(layout, layout_flags, false);
  layout->add_option("--vars", layout_vars, "Conditioning variables: a,b,...");
  layout->add_option("--section", layout_section, "Section variable(s) left out of the layout");
  layout->add_option("--order", order, "Univariate selector order: a,b,...");
  layout->add_option("--min-gain", min_gain, "Pairing threshold on 1 - ratio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (serve->parsed()) {
      auto data = std::make_shared<const Dataset>(load(serve_flags));
      auto models = build_models(*data, serve_flags.models);
      ServiceOptions options;
      options.dataset_name = dataset_name(serve_flags.data);
      auto service = std::make_shared<Service>(data, std::move(models), options);
      HttpServer server(service, HttpServerOptions{host, port, assets});
      const int bound = server.bind();
      out << "serving on http://" << host << ":" << bound << std::endl;
      server.listen();
      return kExitOk;
    }

    if (section->parsed()) {
      const Dataset data = load(section_flags);
      const auto models = build_models(data, section_flags.models);
      SectionSpec spec;
      spec.section_vars = split(section_vars, ',');
      if (spec.section_vars.empty() || spec.section_vars.size() > 2) {
        throw UsageError("--section takes one or two variables");
      }
      const auto predictors = predictor_union(models);
      for (const auto& v : spec.section_vars) {
        if (std::find(predictors.begin(), predictors.end(), v) == predictors.end()) {
          throw UsageError("section variable '" + v + "' is not a model predictor");
        }
      }
      spec.condition = parse_condition(data, at);
      const auto needed = minus(predictors, spec.section_vars);
      std::vector<std::string> missing;
      for (const auto& v : needed) {
        if (!spec.condition.count(v)) missing.push_back(v);
      }
      if (!missing.empty()) {
        throw UsageError("missing condition variables: " + join(missing, ", "));
      }
      for (const auto& [v, _] : spec.condition) {
        if (std::find(needed.begin(), needed.end(), v) == needed.end()) {
          throw UsageError("'" + v + "' is not a conditioning variable");
        }
      }
      spec.resolution = resolution;
      spec.distance.norm = parse_norm(norm);
      spec.distance.lambda = lambda;
      if (factor_exact && sigma) {
        throw UsageError("--factor-exact and --sigma are mutually exclusive");
      }
      if (factor_exact) {
        spec.distance.sigma.reset();
      } else if (sigma) {
        spec.distance.sigma = *sigma;
      }
      try {
        spec.distance.validate();
      } catch (const ValidationError& e) {
        throw UsageError(e.what());
      }

      const SectionResult result = evaluate_section(models, data, spec);
      const SnapshotMeta meta{dataset_name(section_flags.data), timestamp};
      if (out_path == "-") {
        out << snapshot_export(result, meta);
      } else {
        write_snapshot_file(out_path, result, meta);
      }
      return kExitOk;
    }

    // layout
    const Dataset data = load(layout_flags);
    std::vector<std::string> vars;
    if (layout_vars) {
      vars = split(*layout_vars, ',');
      for (const auto& v : vars) data.column(v);
    } else if (!layout_flags.models.empty()) {
      vars = minus(predictor_union(build_models(data, layout_flags.models)),
                   split(layout_section, ','));
    } else {
      vars = minus(data.names(), split(layout_section, ','));
    }
    std::optional<std::vector<std::string>> user_order;
    if (order) user_order = split(*order, ',');
    const SelectorLayout plan = plan_selectors(data, vars, user_order, min_gain);
    out << "selectors: " << plan.selectors.size() << "\n";
    for (const auto& s : plan.selectors) {
      out << "  " << to_string(s.kind) << " " << join(s.vars, ",") << "\n";
    }
    if (!plan.pair_scores.empty()) {
      out << "pairs: " << plan.pair_scores.size() << "\n";
      char buf[128];
      for (const auto& p : plan.pair_scores) {
        std::snprintf(buf, sizeof buf, " ratio=%.4f gain=%.4f", p.ratio, p.gain);
        out << "  " << p.a << "," << p.b << buf << "\n";
      }
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormulaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << e.code() << "): " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace sectionview
