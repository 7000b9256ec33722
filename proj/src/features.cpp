#include "sysgraph/features.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sysgraph/errors.hpp"
#include "sysgraph/graph.hpp"
#include "sysgraph/util.hpp"

namespace sysgraph {

double FeatureVector::operator[](std::size_t i) const {
  switch (i) {
    case 0: return avg_in_degree_centrality;
    case 1: return avg_weighted_in_degree_centrality;
    case 2: return portion_in_degree_1;
    case 3: return portion_out_degree_1;
    case 4: return portion_weighted_in_degree_1;
    case 5: return portion_weighted_out_degree_1;
    case 6: return average_distance;
  }
  throw std::out_of_range("feature index out of range");
}

std::array<double, FeatureVector::kCount> FeatureVector::values() const {
  return {avg_in_degree_centrality,    avg_weighted_in_degree_centrality,
          portion_in_degree_1,         portion_out_degree_1,
          portion_weighted_in_degree_1, portion_weighted_out_degree_1,
          average_distance};
}

const std::array<std::string, FeatureVector::kCount>& FeatureVector::names() {
  static const std::array<std::string, kCount> kNames = {
      "avg_in_degree_centrality",    "avg_weighted_in_degree_centrality",
      "portion_in_degree_1",         "portion_out_degree_1",
      "portion_weighted_in_degree_1", "portion_weighted_out_degree_1",
      "average_distance"};
  return kNames;
}

FeatureVector featurize(const MetricReport& report) {
  if (!report.average_distance)
    throw MissingMetricError("sample '" + report.sample_id +
                             "': average distance undefined (no reachable pair)");
  FeatureVector f;
  f.avg_in_degree_centrality = report.avg_in_degree_centrality;
  f.avg_weighted_in_degree_centrality = report.avg_weighted_in_degree_centrality;
  f.portion_in_degree_1 = report.portion_in_degree_1;
  f.portion_out_degree_1 = report.portion_out_degree_1;
  f.portion_weighted_in_degree_1 = report.portion_weighted_in_degree_1;
  f.portion_weighted_out_degree_1 = report.portion_weighted_out_degree_1;
  f.average_distance = *report.average_distance;
  return f;
}

LabeledDataset::LabeledDataset(std::vector<std::string> label_set)
    : label_set_(std::move(label_set)) {
  for (std::size_t i = 0; i < label_set_.size(); ++i) {
    if (!label_index_.emplace(label_set_[i], i).second)
      throw DatasetError("duplicate label in label set: '" + label_set_[i] + "'");
  }
  if (label_set_.empty()) throw DatasetError("label set is empty");
}

void LabeledDataset::add_row(DatasetRow row) {
  if (!label_index_.contains(row.label))
    throw DatasetError("row '" + row.sample_id + "' has label '" + row.label +
                       "' outside the label set");
  if (!id_index_.emplace(row.sample_id, rows_.size()).second)
    throw DatasetError("duplicate sample_id: '" + row.sample_id + "'");
  rows_.push_back(std::move(row));
}

std::size_t LabeledDataset::label_index(std::string_view label) const {
  const auto it = label_index_.find(std::string(label));
  if (it == label_index_.end())
    throw DatasetError("unknown label: '" + std::string(label) + "'");
  return it->second;
}

std::vector<CorpusEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<CorpusEntry> entries;
  const auto base = path.parent_path();
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (line_no == 1 && line.starts_with("sample_id,")) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3)
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": expected 'sample_id,trace_path,label'");
    std::filesystem::path trace{std::string(trim(fields[1]))};
    if (trace.is_relative()) trace = base / trace;
    entries.push_back({std::string(trim(fields[0])), std::move(trace),
                       std::string(trim(fields[2]))});
  }
  if (entries.empty()) throw ParseError("manifest has no entries: " + path.string());
  return entries;
}

namespace {

struct RowOutcome {
  bool ok = false;
  DatasetRow row;
  std::string reason;
};

DatasetBuildResult assemble(std::vector<RowOutcome> outcomes,
                            const std::vector<std::string>& ids) {
  std::vector<std::string> labels;
  for (const auto& o : outcomes)
    if (o.ok && std::find(labels.begin(), labels.end(), o.row.label) == labels.end())
      labels.push_back(o.row.label);

  DatasetBuildResult result;
  if (labels.empty()) {
    std::string detail = "all samples dropped";
    if (!outcomes.empty()) detail += "; first: " + outcomes.front().reason;
    throw AllSamplesDroppedError(detail);
  }
  result.dataset = LabeledDataset(labels);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    if (o.ok)
      result.dataset.add_row(std::move(o.row));
    else
      result.dropped.push_back({ids[i], o.reason});
  }
  return result;
}

}  // namespace

DatasetBuildResult build_dataset(const std::vector<CorpusEntry>& corpus,
                                 const SyscallDictionary& dict, unsigned jobs) {
  const std::function<RowOutcome(std::size_t)> one = [&](std::size_t i) -> RowOutcome {
    const auto& entry = corpus[i];
    try {
      const auto seq = parse_trace_file(entry.trace_path, entry.sample_id);
      const auto graph = build_graph(seq, dict);
      const auto report = compute_metrics(graph, entry.sample_id);
      return {true, {entry.sample_id, featurize(report), entry.label}, {}};
    } catch (const Error& e) {
      return {false, {}, e.what()};
    }
  };
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& e : corpus) ids.push_back(e.sample_id);
  return assemble(parallel_map<RowOutcome>(corpus.size(), jobs, one), ids);
}

DatasetBuildResult build_dataset(const std::vector<LabeledTrace>& corpus,
                                 const SyscallDictionary& dict, unsigned jobs) {
  const std::function<RowOutcome(std::size_t)> one = [&](std::size_t i) -> RowOutcome {
    const auto& entry = corpus[i];
    try {
      const auto graph = build_graph(entry.sequence, dict);
      const auto report = compute_metrics(graph, entry.sequence.sample_id);
      return {true, {entry.sequence.sample_id, featurize(report), entry.label}, {}};
    } catch (const Error& e) {
      return {false, {}, e.what()};
    }
  };
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& e : corpus) ids.push_back(e.sequence.sample_id);
  return assemble(parallel_map<RowOutcome>(corpus.size(), jobs, one), ids);
}

static constexpr std::string_view kCsvHeader = "sample_id,f1,f2,f3,f4,f5,f6,f7,label";

std::string to_csv(const LabeledDataset& ds) {
  std::string out{kCsvHeader};
  out += '\n';
  for (const auto& row : ds.rows()) {
    out += row.sample_id;
    for (const double v : row.features.values()) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    out += row.label;
    out += '\n';
  }
  return out;
}

LabeledDataset dataset_from_csv(std::string_view text) {
  std::vector<DatasetRow> rows;
  std::vector<std::string> labels;
  std::size_t line_no = 0;
  bool saw_header = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (!saw_header) {
      if (trim(line) != kCsvHeader)
        throw ParseError("dataset CSV must start with '" + std::string(kCsvHeader) + "'");
      saw_header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 9)
      throw ParseError("dataset CSV line " + std::to_string(line_no) +
                       ": expected 9 fields");
    DatasetRow row;
    row.sample_id = std::string(trim(fields[0]));
    double values[7];
    for (std::size_t i = 0; i < 7; ++i) {
      const auto f = trim(fields[i + 1]);
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[i]);
      if (ec != std::errc{} || ptr != f.data() + f.size())
        throw ParseError("dataset CSV line " + std::to_string(line_no) +
                         ": bad number '" + std::string(f) + "'");
    }
    row.features.avg_in_degree_centrality = values[0];
    row.features.avg_weighted_in_degree_centrality = values[1];
    row.features.portion_in_degree_1 = values[2];
    row.features.portion_out_degree_1 = values[3];
    row.features.portion_weighted_in_degree_1 = values[4];
    row.features.portion_weighted_out_degree_1 = values[5];
    row.features.average_distance = values[6];
    row.label = std::string(trim(fields[8]));
    if (std::find(labels.begin(), labels.end(), row.label) == labels.end())
      labels.push_back(row.label);
    rows.push_back(std::move(row));
  }
  if (!saw_header) throw ParseError("dataset CSV is empty");
  if (rows.empty()) throw ParseError("dataset CSV has no rows");
  LabeledDataset ds(labels);
  for (auto& row : rows) ds.add_row(std::move(row));
  return ds;
}

LabeledDataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return dataset_from_csv(buf.str());
}

std::string to_arff(const LabeledDataset& ds, std::string_view relation) {
  std::string out = "@RELATION ";
  out += relation;
  out += "\n\n";
  for (const auto& name : FeatureVector::names())
    out += "@ATTRIBUTE " + name + " NUMERIC\n";
  out += "@ATTRIBUTE class {";
  for (std::size_t i = 0; i < ds.label_set().size(); ++i) {
    if (i) out += ',';
    out += ds.label_set()[i];
  }
  out += "}\n\n@DATA\n";
  for (const auto& row : ds.rows()) {
    for (const double v : row.features.values()) {
      out += format_double(v);
      out += ',';
    }
    out += row.label;
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const LabeledDataset& ds) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : ds.rows()) {
    nlohmann::json features = nlohmann::json::object();
    for (std::size_t i = 0; i < FeatureVector::kCount; ++i)
      features[FeatureVector::names()[i]] = row.features[i];
    rows.push_back({{"sample_id", row.sample_id},
                    {"features", std::move(features)},
                    {"label", row.label}});
  }
  return {{"label_set", ds.label_set()}, {"rows", std::move(rows)}};
}

}  // namespace sysgraph
