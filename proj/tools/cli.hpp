#pragma once

// Command-line front end: `sim`, `bench` and `synth` subcommands.
// Exit codes: 0 success, 1 usage error, 2 runtime or domain error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bregman/classify.hpp"
#include "bregman/data.hpp"
#include "bregman/similarity.hpp"

namespace bregman::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

struct RunConfig {
  std::string command;

  std::vector<std::string> measures;
  MeasureOptions measure_options;

  // sim
  std::string x, y, pair_file;

  // bench
  std::string preset;
  std::string data_path, test_path;
  std::string label_column = "label";
  std::vector<std::string> feature_columns, drop_columns;
  bool no_header = false;
  char delimiter = ',';
  std::vector<std::string> keep_classes;
  std::size_t first_classes = 0;
  double scale = 1.0;
  std::string protocol = "loo";
  unsigned jobs = 1;

  // synth
  std::string shape = "circle";
  std::size_t count = 16;
  double radius = 1.0;
  std::string center = "2,2", direction = "1,1";
  double step = 0.5;
  std::size_t reference_index = 0;

  std::string output;
  std::string format = "json";
};

/// Thrown for problems the user should fix on the command line.
class UsageError : public Error {
public:
  using Error::Error;
};

namespace detail {

inline FeatureVector parse_vector(const std::string& text, const std::string& what) {
  FeatureVector v;
  for (const auto& cell : bregman::detail::split_row(text, ',')) {
    const auto d = bregman::detail::parse_double(cell);
    if (!d) throw UsageError(what + ": '" + cell + "' is not a number");
    v.push_back(*d);
  }
  return v;
}

inline std::vector<Measure> build_measures(const RunConfig& cfg) {
  std::vector<Measure> out;
  for (const auto& name : cfg.measures) {
    try {
      out.push_back(make_measure(name, cfg.measure_options));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

inline std::string format_number(double v) {
  std::ostringstream os;
  bregman::detail::write_number(os, v);
  return os.str();
}

inline ColumnRef column_ref(const std::string& s, bool has_header) {
  if (!has_header)
    if (auto v = bregman::detail::parse_double(s); v && *v >= 0) return static_cast<std::size_t>(*v);
  return s;
}

// Destination for reports: --output, else $BREGMAN_OUTPUT_DIR/<default_name>,
// else stdout.
inline std::optional<std::string> output_path(const RunConfig& cfg, const std::string& default_name) {
  if (!cfg.output.empty()) return cfg.output;
  if (const char* dir = std::getenv("BREGMAN_OUTPUT_DIR"); dir && *dir)
    return (std::filesystem::path(dir) / default_name).string();
  return std::nullopt;
}

inline void emit(const RunConfig& cfg, const std::string& default_name, const std::string& body,
                 std::ostream& out) {
  if (auto path = output_path(cfg, default_name)) {
    std::ofstream f(*path, std::ios::binary);
    if (!f) throw Error("cannot write '" + *path + "'");
    f << body;
  } else {
    out << body;
  }
}

inline json measure_options_json(const RunConfig& cfg) {
  return {{"max_cosine_subgradient", cfg.measure_options.max_cosine_subgradient},
          {"paper_literal", cfg.measure_options.paper_literal},
          {"sign_zero", cfg.measure_options.sign_zero}};
}

} // namespace detail

inline int cmd_sim(const RunConfig& cfg, std::ostream& out) {
  FeatureVector a, b;
  if (!cfg.pair_file.empty()) {
    std::ifstream in(cfg.pair_file);
    if (!in) throw UsageError("cannot open '" + cfg.pair_file + "'");
    std::vector<FeatureVector> rows;
    std::string line;
    while (std::getline(in, line))
      if (!bregman::detail::trim(line).empty()) rows.push_back(detail::parse_vector(line, cfg.pair_file));
    if (rows.size() != 2) throw UsageError(cfg.pair_file + ": expected exactly two rows");
    a = std::move(rows[0]);
    b = std::move(rows[1]);
  } else {
    if (cfg.x.empty() || cfg.y.empty()) throw UsageError("sim needs --x and --y, or --pair-file");
    a = detail::parse_vector(cfg.x, "--x");
    b = detail::parse_vector(cfg.y, "--y");
  }

  json result = json::object();
  for (const auto& m : detail::build_measures(cfg)) {
    try {
      result[m.name()] = m(a, b);
    } catch (const Error& e) {
      throw Error(m.name() + ": " + e.what());
    }
  }
  if (!cfg.output.empty()) {
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) throw Error("cannot write '" + cfg.output + "'");
    f << result.dump(2) << '\n';
  } else {
    out << result.dump(2) << '\n';
  }
  return kOk;
}

/// Applies the gesture-phase benchmark preset to every setting the user
/// left at its default.
inline void apply_preset(RunConfig& cfg, const CLI::App& bench) {
  if (cfg.preset.empty()) return;
  if (cfg.preset != "gesture") throw UsageError("unknown preset '" + cfg.preset + "'");
  if (bench.get_option("--label-col")->count() == 0) cfg.label_column = "phase";
  if (bench.get_option("--drop-col")->count() == 0 && bench.get_option("--feature-cols")->count() == 0)
    cfg.drop_columns = {"timestamp"};
  if (bench.get_option("--keep-classes")->count() == 0 && bench.get_option("--first-classes")->count() == 0)
    cfg.first_classes = 2;
  if (bench.get_option("--scale")->count() == 0) cfg.scale = 1e7;
  if (bench.get_option("--protocol")->count() == 0) cfg.protocol = "loo";
  if (bench.get_option("--measure")->count() == 0)
    cfg.measures = {"cosine", "bregman-angle-entropy", "bregman-angle-tv"};
}

inline json report_json(const EvaluationReport& r) {
  json rows = json::array();
  for (const auto& p : r.per_instance)
    rows.push_back({{"index", p.index}, {"predicted", p.predicted}, {"actual", p.actual}});
  return {{"measure", r.measure_name},
          {"protocol", to_string(r.protocol)},
          {"correct", r.correct},
          {"total", r.total},
          {"accuracy", r.accuracy},
          {"per_instance", std::move(rows)}};
}

inline int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  if (cfg.protocol != "loo" && cfg.protocol != "split")
    throw UsageError("--protocol must be 'loo' or 'split'");
  if (cfg.protocol == "split" && cfg.test_path.empty()) throw UsageError("split protocol needs --test");
  if (cfg.format != "json" && cfg.format != "csv") throw UsageError("--format must be json or csv");
  const auto measures = detail::build_measures(cfg);

  CsvSchema schema;
  schema.has_header = !cfg.no_header;
  schema.delimiter = cfg.delimiter;
  schema.label_column = detail::column_ref(cfg.label_column, schema.has_header);
  for (const auto& c : cfg.feature_columns) schema.feature_columns.push_back(detail::column_ref(c, schema.has_header));
  for (const auto& c : cfg.drop_columns) schema.drop_columns.push_back(detail::column_ref(c, schema.has_header));

  auto prepare = [&](LabeledDataset d, const std::vector<std::string>& classes) {
    if (!classes.empty()) d = filter_classes(d, classes);
    return scale_features(std::move(d), cfg.scale);
  };

  LabeledDataset raw = load_csv(cfg.data_path, schema);
  std::vector<std::string> classes = cfg.keep_classes;
  if (classes.empty() && cfg.first_classes > 0) classes = first_classes(raw, cfg.first_classes);
  const LabeledDataset data = prepare(std::move(raw), classes);
  if (data.distinct_labels() < 2)
    throw Error("dataset '" + data.name + "' needs at least 2 distinct labels after filtering");
  std::optional<LabeledDataset> test;
  if (cfg.protocol == "split") test = prepare(load_csv(cfg.test_path, schema), classes);

  std::vector<EvaluationReport> reports;
  for (const auto& m : measures)
    reports.push_back(test ? train_test_evaluate(data, *test, m, cfg.jobs)
                           : leave_one_out(data, m, cfg.jobs));

  std::string body;
  if (cfg.format == "json") {
    json config = {{"command", "bench"},
                   {"preset", cfg.preset},
                   {"data", cfg.data_path},
                   {"test", cfg.test_path},
                   {"label_column", cfg.label_column},
                   {"feature_columns", cfg.feature_columns},
                   {"drop_columns", cfg.drop_columns},
                   {"has_header", schema.has_header},
                   {"delimiter", std::string(1, cfg.delimiter)},
                   {"classes", classes},
                   {"scale", cfg.scale},
                   {"protocol", cfg.protocol},
                   {"k", 1},
                   {"measures", cfg.measures},
                   {"measure_options", detail::measure_options_json(cfg)}};
    json results = json::array();
    for (const auto& r : reports) results.push_back(report_json(r));
    json doc = {{"config", std::move(config)},
                {"dataset",
                 {{"name", data.name},
                  {"instances", data.size()},
                  {"dimension", data.dimension()},
                  {"applied_scale", data.applied_scale},
                  {"test_instances", test ? test->size() : 0}}},
                {"results", std::move(results)}};
    body = doc.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "measure,index,predicted,actual,correct\n";
    for (const auto& r : reports)
      for (const auto& p : r.per_instance)
        os << r.measure_name << ',' << p.index << ',' << p.predicted << ',' << p.actual << ','
           << (p.predicted == p.actual ? 1 : 0) << '\n';
    body = os.str();
  }
  detail::emit(cfg, cfg.format == "json" ? "bench_report.json" : "bench_report.csv", body, out);
  return kOk;
}

inline int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  SyntheticSpec spec;
  if (cfg.shape == "circle") spec.shape = Shape::Circle;
  else if (cfg.shape == "line") spec.shape = Shape::Line;
  else throw UsageError("--shape must be circle or line");
  spec.count = cfg.count;
  spec.radius = cfg.radius;
  spec.center = detail::parse_vector(cfg.center, "--center");
  spec.direction = detail::parse_vector(cfg.direction, "--direction");
  spec.step = cfg.step;
  spec.reference_index = cfg.reference_index;
  const auto measures = detail::build_measures(cfg);
  const SyntheticSet set = generate(spec);

  std::ostringstream os;
  os << "index";
  for (std::size_t c = 0; c < set.reference.size(); ++c) os << ",x" << c;
  for (const auto& m : measures) os << ',' << m.name();
  os << '\n';
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    os << i;
    for (double v : set.samples.vectors[i]) os << ',' << detail::format_number(v);
    for (const auto& m : measures) {
      try {
        os << ',' << detail::format_number(m(set.samples.vectors[i], set.reference));
      } catch (const Error& e) {
        throw Error(m.name() + ": sample " + std::to_string(i) + ": " + e.what());
      }
    }
    os << '\n';
  }
  detail::emit(cfg, "synth_" + cfg.shape + ".csv", os.str(), out);
  return kOk;
}

/// Parses `argv` and runs the selected subcommand. Diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Bregman-angle similarity measures and 1-NN benchmarks"};
  app.require_subcommand(1);

  std::vector<std::string> sim_measures{"cosine"};
  std::vector<std::string> bench_measures{"cosine"};
  std::vector<std::string> synth_measures{"euclidean", "cosine", "bregman-angle-entropy",
                                          "bregman-angle-modentropy", "bregman-angle-tv",
                                          "bregman-angle-l2"};
  auto add_measure_flags = [&](CLI::App* sub, std::vector<std::string>& measures) {
    sub->add_option("--measure,-m", measures, "Measure name (repeatable): " +
                                                  CLI::detail::join(measure_names(), ", "))
        ->delimiter(',');
    sub->add_flag("--paper-literal", cfg.measure_options.paper_literal,
                  "Use +sign(x2 - x1) as the first TV gradient component");
    sub->add_option("--sign-zero", cfg.measure_options.sign_zero, "Value of sign(0) for TV")
        ->check(CLI::Range(-1.0, 1.0));
    sub->add_flag("--max-cosine-subgradient", cfg.measure_options.max_cosine_subgradient,
                  "At TV kinks, pick the subgradient closest to the other normal");
  };

  auto* sim = app.add_subcommand("sim", "Compare two vectors");
  sim->add_option("--x", cfg.x, "First vector, comma separated");
  sim->add_option("--y", cfg.y, "Second vector, comma separated");
  sim->add_option("--pair-file", cfg.pair_file, "File with two comma-separated rows")
      ->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "1-NN evaluation on a CSV dataset");
  bench->add_option("--preset", cfg.preset, "Named configuration (gesture)");
  bench->add_option("--data", cfg.data_path, "Training (or LOO) dataset")->required()->check(CLI::ExistingFile);
  bench->add_option("--test", cfg.test_path, "Test dataset for the split protocol")->check(CLI::ExistingFile);
  bench->add_option("--label-col", cfg.label_column, "Label column name or index");
  bench->add_option("--feature-cols", cfg.feature_columns, "Feature columns (default: all others)")->delimiter(',');
  bench->add_option("--drop-col", cfg.drop_columns, "Columns to ignore")->delimiter(',');
  bench->add_flag("--no-header", cfg.no_header, "The file has no header row");
  bench->add_option("--delimiter", cfg.delimiter, "Field delimiter");
  bench->add_option("--keep-classes", cfg.keep_classes, "Keep only these labels")->delimiter(',');
  bench->add_option("--first-classes", cfg.first_classes, "Keep the first K labels in file order");
  bench->add_option("--scale", cfg.scale, "Multiply every feature by this factor")
      ->check(CLI::PositiveNumber);
  bench->add_option("--protocol", cfg.protocol, "loo or split")->check(CLI::IsMember({"loo", "split"}));
  bench->add_option("--jobs,-j", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* synth = app.add_subcommand("synth", "Measures versus a reference on circle/line samples");
  synth->add_option("--shape", cfg.shape, "circle or line")->check(CLI::IsMember({"circle", "line"}));
  synth->add_option("--count", cfg.count, "Number of samples");
  synth->add_option("--radius", cfg.radius, "Circle radius");
  synth->add_option("--center", cfg.center, "Circle center, comma separated");
  synth->add_option("--direction", cfg.direction, "Line direction, comma separated");
  synth->add_option("--step", cfg.step, "Line spacing");
  synth->add_option("--reference-index", cfg.reference_index, "Line sample used as reference");

  for (auto* sub : {sim, bench, synth})
    sub->add_option("--output,-o", cfg.output, "Output file (default: $BREGMAN_OUTPUT_DIR or stdout)");

  add_measure_flags(sim, sim_measures);
  add_measure_flags(bench, bench_measures);
  add_measure_flags(synth, synth_measures);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) {
      cfg.command = "sim";
      cfg.measures = sim_measures;
      return cmd_sim(cfg, out);
    }
    if (bench->parsed()) {
      cfg.command = "bench";
      cfg.measures = bench_measures;
      apply_preset(cfg, *bench);
      return cmd_bench(cfg, out);
    }
    cfg.command = "synth";
    cfg.measures = synth_measures;
    return cmd_synth(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

} // namespace bregman::cli
