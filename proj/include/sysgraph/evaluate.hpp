#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sysgraph/classifiers.hpp"

namespace sysgraph {

// A named training recipe, so evaluation code stays classifier-agnostic.
struct ClassifierSpec {
  std::string name;
  std::function<std::unique_ptr<Classifier>(const Samples&)> train;
};

// Known names: nb, nb-kernel, knn, c45, boost-nb, boost-c45, boost-knn.
ClassifierSpec make_classifier_spec(std::string_view name);
const std::vector<std::string>& known_classifier_names();

struct AucReport {
  double macro = 0.0;  // mean over classes that have both positives and negatives
  std::vector<std::optional<double>> per_class;
};

// One-vs-rest AUC from the rank statistic (tied scores credit 0.5). Classes
// lacking positives or negatives are skipped; if every class is skipped,
// NoValidClassError.
AucReport roc_auc(const std::vector<std::vector<double>>& scores,
                  const std::vector<std::size_t>& labels, std::size_t n_classes);

// Mutual information (base 2) between the class and the feature discretized
// into equal-frequency bins (degenerate bins merge away).
double information_gain(const LabeledDataset& ds, std::size_t feature, std::size_t bins = 10);

struct RankedFeature {
  std::size_t feature = 0;
  double gain = 0.0;
};
// Descending information gain; exact ties keep ascending feature order.
std::vector<RankedFeature> rank_features(const LabeledDataset& ds, std::size_t bins = 10);

struct FoldOutcome {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  double accuracy = 0.0;
  std::optional<double> auc;
};

struct EvaluationReport {
  std::string classifier;
  std::size_t folds = 0;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> label_set;
  std::vector<std::vector<std::size_t>> confusion;  // [truth][prediction], pooled
  double accuracy = 0.0;                            // trace / total of `confusion`
  std::optional<double> mean_auc;                   // mean of per-fold AUCs
  std::vector<FoldOutcome> fold_outcomes;
};

// Stratified k-fold cross-validation repeated `repeats` times with
// seed-derived shuffles. Every class needs at least `folds` rows; the one
// exception is folds == |rows|, which degenerates to leave-one-out.
EvaluationReport cross_validate(const LabeledDataset& ds, const ClassifierSpec& spec,
                                std::size_t folds = 5, std::size_t repeats = 5,
                                std::uint64_t seed = 10, unsigned jobs = 1);

nlohmann::json to_json(const EvaluationReport& report);

// Fixed-width accuracy/AUC table over several evaluation runs.
std::string format_table(const std::vector<EvaluationReport>& reports);

nlohmann::json to_json(const std::vector<RankedFeature>& ranking,
                       const LabeledDataset& ds, std::size_t bins);

}  // namespace sysgraph
