// Command line front end for the sysgraph library. Subcommands mirror the
// pipeline stages: graph, metrics, featurize, evaluate, rank, powerlaw, synth.
//
// Exit codes: 0 success, 1 I/O or input-format problems, 2 domain errors
// (inputs that parse but cannot be processed, e.g. a trace that never touches
// the dictionary).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sysgraph/dictionary.hpp"
#include "sysgraph/errors.hpp"
#include "sysgraph/evaluate.hpp"
#include "sysgraph/features.hpp"
#include "sysgraph/graph.hpp"
#include "sysgraph/metrics.hpp"
#include "sysgraph/powerlaw.hpp"
#include "sysgraph/synth.hpp"
#include "sysgraph/trace.hpp"
#include "sysgraph/util.hpp"

namespace fs = std::filesystem;
using namespace sysgraph;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Empty path means stdout. File output always ends with one newline.
void write_output(const std::string& path, std::string_view content) {
  std::string text{content};
  if (!text.empty() && text.back() != '\n') text += '\n';
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("writing '" + path + "' failed");
}

// Shared --dict / --dict-file pair. Returns nullopt when neither was given.
struct DictChoice {
  std::string builtin;
  std::string file;

  void attach(CLI::App* cmd, bool required) {
    auto* name = cmd->add_option("--dict", builtin, "built-in dictionary: adware, trojan or worm");
    auto* path = cmd->add_option("--dict-file", file, "dictionary JSON file")
                     ->check(CLI::ExistingFile);
    name->excludes(path);
    path->excludes(name);
    if (required) {
      // CLI11 handles one-of-two grouping poorly; validated in resolve().
      cmd->callback([] {});
    }
  }

  std::optional<SyscallDictionary> resolve() const {
    if (!file.empty()) return load_dictionary(file);
    if (!builtin.empty()) return builtin_dictionary(malware_class_from_string(builtin));
    return std::nullopt;
  }

  SyscallDictionary require() const {
    auto dict = resolve();
    if (!dict) throw DomainError("this input needs --dict or --dict-file");
    return *std::move(dict);
  }
};

enum class InputKind { trace, edge_list, gexf };

InputKind detect_input(const fs::path& path, const std::string& forced) {
  if (forced == "trace") return InputKind::trace;
  if (forced == "edge-list") return InputKind::edge_list;
  if (forced == "gexf") return InputKind::gexf;
  const std::string ext = path.extension().string();
  if (ext == ".gexf") return InputKind::gexf;
  if (ext == ".edges" || ext == ".edgelist") return InputKind::edge_list;
  return InputKind::trace;
}

SystemCallGraph load_graph_input(const fs::path& path, const std::string& forced,
                                 const DictChoice& dict_choice) {
  switch (detect_input(path, forced)) {
    case InputKind::trace:
      return build_graph(parse_trace_file(path), dict_choice.require());
    case InputKind::edge_list: {
      const auto dict = dict_choice.resolve();
      return import_graph(read_file(path), GraphFormat::edge_list,
                          dict ? &*dict : nullptr);
    }
    case InputKind::gexf:
      return import_graph(read_file(path), GraphFormat::gexf);
  }
  throw DomainError("unreachable input kind");
}

int run(int argc, char** argv) {
  CLI::App app{"malware classification from system-call graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sysgraph 1.0.0");

  // ---- graph ----
  struct {
    std::string input, format = "edge-list", out, sample_id;
    DictChoice dict;
    bool strict = false;
  } g;
  auto* graph_cmd = app.add_subcommand("graph", "build the call graph of one trace");
  graph_cmd->add_option("trace", g.input, "trace file")->required()->check(CLI::ExistingFile);
  g.dict.attach(graph_cmd, true);
  graph_cmd->add_option("--format", g.format, "edge-list, dot or gexf")
      ->check(CLI::IsMember({"edge-list", "dot", "gexf"}));
  graph_cmd->add_option("--out", g.out, "output file (default stdout)");
  graph_cmd->add_option("--sample-id", g.sample_id, "sample id (default: file stem)");
  graph_cmd->add_flag("--strict", g.strict, "fail on malformed call lines");
  graph_cmd->callback([&] {
    const auto seq = parse_trace_file(g.input, g.sample_id, {.strict = g.strict});
    const auto graph = build_graph(seq, g.dict.require());
    write_output(g.out, export_graph(graph, graph_format_from_string(g.format)));
  });

  // ---- metrics ----
  struct {
    std::string input, forced, format = "json", out, sample_id;
    DictChoice dict;
  } m;
  auto* metrics_cmd = app.add_subcommand("metrics", "analyze one trace or graph file");
  metrics_cmd->add_option("input", m.input, "trace, .edges or .gexf file")
      ->required()
      ->check(CLI::ExistingFile);
  m.dict.attach(metrics_cmd, false);
  metrics_cmd->add_option("--as", m.forced, "force input kind: trace, edge-list or gexf")
      ->check(CLI::IsMember({"trace", "edge-list", "gexf"}));
  metrics_cmd->add_option("--format", m.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  metrics_cmd->add_option("--out", m.out, "output file (default stdout)");
  metrics_cmd->add_option("--sample-id", m.sample_id, "sample id (default: file stem)");
  metrics_cmd->callback([&] {
    const auto graph = load_graph_input(m.input, m.forced, m.dict);
    const std::string id = m.sample_id.empty() ? fs::path(m.input).stem().string() : m.sample_id;
    const auto report = compute_metrics(graph, id);
    if (m.format == "csv")
      write_output(m.out, metric_csv_header() + "\n" + to_csv_row(report));
    else
      write_output(m.out, to_json(report).dump(2));
  });

  // ---- featurize ----
  struct {
    std::string manifest, format = "csv", out;
    DictChoice dict;
    unsigned jobs = 1;
  } f;
  auto* feat_cmd = app.add_subcommand("featurize", "turn a trace manifest into a dataset");
  feat_cmd->add_option("manifest", f.manifest, "CSV manifest: sample_id,trace_path,label")
      ->required()
      ->check(CLI::ExistingFile);
  f.dict.attach(feat_cmd, true);
  feat_cmd->add_option("--format", f.format, "csv, json or arff")
      ->check(CLI::IsMember({"csv", "json", "arff"}));
  feat_cmd->add_option("--out", f.out, "output file (default stdout)");
  feat_cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  feat_cmd->callback([&] {
    const auto corpus = load_manifest(f.manifest);
    const auto result = build_dataset(corpus, f.dict.require(), f.jobs);
    for (const auto& d : result.dropped)
      std::cerr << "dropped " << d.sample_id << ": " << d.reason << '\n';
    if (f.format == "json")
      write_output(f.out, to_json(result.dataset).dump(2));
    else if (f.format == "arff")
      write_output(f.out, to_arff(result.dataset));
    else
      write_output(f.out, to_csv(result.dataset));
  });

  // ---- evaluate ----
  struct {
    std::string dataset, format = "table", out;
    std::vector<std::string> classifiers;
    std::size_t folds = 5, repeats = 5;
    std::uint64_t seed = 10;
    unsigned jobs = 1;
  } e;
  auto* eval_cmd = app.add_subcommand("evaluate", "cross-validate classifiers on a dataset");
  eval_cmd->add_option("dataset", e.dataset, "dataset CSV from featurize")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--classifier", e.classifiers,
                       "classifier names (repeatable; default: all)")
      ->check(CLI::IsMember(known_classifier_names()));
  eval_cmd->add_option("--folds", e.folds, "folds per repeat")->check(CLI::Range(2u, 1000000u));
  eval_cmd->add_option("--repeats", e.repeats, "shuffle repeats")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", e.seed, "random seed");
  eval_cmd->add_option("--jobs", e.jobs, "worker threads")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--format", e.format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));
  eval_cmd->add_option("--out", e.out, "output file (default stdout)");
  eval_cmd->callback([&] {
    const auto ds = load_dataset_csv(e.dataset);
    const auto& names = e.classifiers.empty() ? known_classifier_names() : e.classifiers;
    std::vector<EvaluationReport> reports;
    for (const auto& name : names)
      reports.push_back(
          cross_validate(ds, make_classifier_spec(name), e.folds, e.repeats, e.seed, e.jobs));
    if (e.format == "json") {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : reports) j.push_back(to_json(r));
      write_output(e.out, j.dump(2));
    } else {
      write_output(e.out, format_table(reports));
    }
  });

  // ---- rank ----
  struct {
    std::string dataset, format = "table", out;
    std::size_t bins = 10;
  } r;
  auto* rank_cmd = app.add_subcommand("rank", "rank features by information gain");
  rank_cmd->add_option("dataset", r.dataset, "dataset CSV from featurize")
      ->required()
      ->check(CLI::ExistingFile);
  rank_cmd->add_option("--bins", r.bins, "equal-frequency bins")->check(CLI::PositiveNumber);
  rank_cmd->add_option("--format", r.format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));
  rank_cmd->add_option("--out", r.out, "output file (default stdout)");
  rank_cmd->callback([&] {
    const auto ds = load_dataset_csv(r.dataset);
    const auto ranking = rank_features(ds, r.bins);
    if (r.format == "json") {
      write_output(r.out, to_json(ranking, ds, r.bins).dump(2));
    } else {
      std::string table = "rank  feature  gain                    name\n";
      for (std::size_t i = 0; i < ranking.size(); ++i) {
        char line[160];
        std::snprintf(line, sizeof(line), "%4zu  f%zu       %-22s  %s\n", i + 1,
                      ranking[i].feature + 1, format_double(ranking[i].gain).c_str(),
                      FeatureVector::names()[ranking[i].feature].c_str());
        table += line;
      }
      write_output(r.out, table);
    }
  });

  // ---- powerlaw ----
  struct {
    std::string input, forced, direction = "in", out;
    DictChoice dict;
    bool weighted = false;
    std::size_t bootstrap = 0;
    std::uint64_t seed = 10;
    unsigned jobs = 1;
  } p;
  auto* pl_cmd = app.add_subcommand("powerlaw", "fit a power law to a degree sequence");
  pl_cmd->add_option("input", p.input, "trace, .edges or .gexf file")
      ->required()
      ->check(CLI::ExistingFile);
  p.dict.attach(pl_cmd, false);
  pl_cmd->add_option("--as", p.forced, "force input kind: trace, edge-list or gexf")
      ->check(CLI::IsMember({"trace", "edge-list", "gexf"}));
  pl_cmd->add_option("--direction", p.direction, "in or out degrees")
      ->check(CLI::IsMember({"in", "out"}));
  pl_cmd->add_flag("--weighted", p.weighted, "use multiplicity-weighted degrees");
  pl_cmd->add_option("--bootstrap", p.bootstrap,
                     "goodness-of-fit replicates (0 = skip, otherwise >= 100)")
      ->check(CLI::Validator(
          [](std::string& v) {
            const auto n = std::stoull(v);
            return (n == 0 || n >= 100) ? std::string{}
                                        : std::string{"must be 0 or at least 100"};
          },
          "REPLICATES"));
  pl_cmd->add_option("--seed", p.seed, "bootstrap seed");
  pl_cmd->add_option("--jobs", p.jobs, "worker threads")->check(CLI::PositiveNumber);
  pl_cmd->add_option("--out", p.out, "output file (default stdout)");
  pl_cmd->callback([&] {
    const auto graph = load_graph_input(p.input, p.forced, p.dict);
    const auto dir = p.direction == "out" ? Direction::out : Direction::in;
    std::vector<std::uint64_t> sample;
    for (const auto d : degrees(graph, dir, p.weighted))
      if (d > 0) sample.push_back(d);  // zero degrees are outside the support
    const auto fit = fit_power_law(sample);
    std::optional<GoodnessOfFit> gof;
    if (p.bootstrap > 0) gof = goodness_of_fit(fit, sample, p.bootstrap, p.seed, p.jobs);
    auto j = to_json(fit, gof);
    j["direction"] = p.direction;
    j["weighted"] = p.weighted;
    write_output(p.out, j.dump(2));
  });

  // ---- synth ----
  struct {
    std::string profiles, out_dir;
    bool benchmark = false;
    std::size_t per_family = 100;
    std::uint64_t seed = 10;
  } s;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic trace corpus");
  auto* prof_opt = synth_cmd->add_option("--profiles", s.profiles,
                                         "JSON array of family profiles with counts")
                       ->check(CLI::ExistingFile);
  auto* bench_opt =
      synth_cmd->add_flag("--benchmark", s.benchmark, "use the built-in four-family plan");
  prof_opt->excludes(bench_opt);
  bench_opt->excludes(prof_opt);
  synth_cmd->add_option("--per-family", s.per_family, "samples per family for --benchmark")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", s.seed, "corpus seed");
  synth_cmd->add_option("--out-dir", s.out_dir, "output directory")->required();
  synth_cmd->callback([&] {
    std::vector<CorpusPlan> plans;
    if (s.benchmark) {
      plans = benchmark_corpus_plan(s.per_family);
    } else if (!s.profiles.empty()) {
      try {
        plans = corpus_plan_from_json(nlohmann::json::parse(read_file(s.profiles)));
      } catch (const nlohmann::json::exception& ex) {
        throw ParseError("profiles '" + s.profiles + "': " + ex.what());
      }
    } else {
      throw DomainError("synth needs --profiles or --benchmark");
    }
    const auto corpus = generate_corpus(plans, s.seed);
    std::error_code ec;
    fs::create_directories(s.out_dir, ec);
    if (ec) throw IoError("cannot create '" + s.out_dir + "': " + ec.message());
    std::string manifest = "sample_id,trace_path,label\n";
    for (const auto& item : corpus) {
      const std::string file = item.sequence.sample_id + ".trace";
      write_output((fs::path(s.out_dir) / file).string(), to_trace_text(item.sequence));
      manifest += item.sequence.sample_id + ',' + file + ',' + item.label + '\n';
    }
    write_output((fs::path(s.out_dir) / "manifest.csv").string(), manifest);
    std::cout << "wrote " << corpus.size() << " traces and manifest.csv to " << s.out_dir
              << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const DomainError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  } catch (const Error& ex) {  // parse and I/O problems
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}
