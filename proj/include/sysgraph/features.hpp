#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "sysgraph/dictionary.hpp"
#include "sysgraph/metrics.hpp"
#include "sysgraph/trace.hpp"

namespace sysgraph {

// The seven graph features a sample is classified on. Order is fixed and
// matches the f1..f7 column names in the dataset CSV.
struct FeatureVector {
  double avg_in_degree_centrality = 0.0;           // f1
  double avg_weighted_in_degree_centrality = 0.0;  // f2
  double portion_in_degree_1 = 0.0;                // f3
  double portion_out_degree_1 = 0.0;               // f4
  double portion_weighted_in_degree_1 = 0.0;       // f5
  double portion_weighted_out_degree_1 = 0.0;      // f6
  double average_distance = 0.0;                   // f7

  static constexpr std::size_t kCount = 7;
  double operator[](std::size_t i) const;
  std::array<double, kCount> values() const;
  static const std::array<std::string, kCount>& names();

  bool operator==(const FeatureVector&) const = default;
};

// Throws MissingMetricError when the report lacks average_distance (graph
// with no reachable pair), since f7 would be undefined.
FeatureVector featurize(const MetricReport& report);

struct DatasetRow {
  std::string sample_id;
  FeatureVector features;
  std::string label;
};

class LabeledDataset {
 public:
  LabeledDataset() = default;
  explicit LabeledDataset(std::vector<std::string> label_set);

  // Throws DatasetError on a duplicate sample_id or a label outside the set.
  void add_row(DatasetRow row);

  const std::vector<DatasetRow>& rows() const { return rows_; }
  const std::vector<std::string>& label_set() const { return label_set_; }
  std::size_t size() const { return rows_.size(); }
  std::size_t label_index(std::string_view label) const;

 private:
  std::vector<std::string> label_set_;
  std::vector<DatasetRow> rows_;
  std::unordered_map<std::string, std::size_t> label_index_;
  std::unordered_map<std::string, std::size_t> id_index_;
};

struct CorpusEntry {
  std::string sample_id;
  std::filesystem::path trace_path;
  std::string label;
};

// `sample_id,trace_path,label` per line; optional literal header; relative
// paths resolve against the manifest's directory.
std::vector<CorpusEntry> load_manifest(const std::filesystem::path& path);

struct DroppedSample {
  std::string sample_id;
  std::string reason;
};

struct DatasetBuildResult {
  LabeledDataset dataset;
  std::vector<DroppedSample> dropped;
};

// Runs the full front end (parse, graph, metrics, featurize) per entry.
// Samples that fail any stage are dropped with the failure reason; the label
// set is the first-appearance order over surviving rows. Throws
// AllSamplesDroppedError when nothing survives.
DatasetBuildResult build_dataset(const std::vector<CorpusEntry>& corpus,
                                 const SyscallDictionary& dict, unsigned jobs = 1);
DatasetBuildResult build_dataset(const std::vector<LabeledTrace>& corpus,
                                 const SyscallDictionary& dict, unsigned jobs = 1);

// Header is exactly `sample_id,f1,f2,f3,f4,f5,f6,f7,label`.
std::string to_csv(const LabeledDataset& ds);
LabeledDataset dataset_from_csv(std::string_view text);
LabeledDataset load_dataset_csv(const std::filesystem::path& path);

std::string to_arff(const LabeledDataset& ds,
                    std::string_view relation = "syscall_graph_features");
nlohmann::json to_json(const LabeledDataset& ds);

}  // namespace sysgraph
