#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "sysgraph/features.hpp"

namespace sysgraph {

// Training matrix shared by all learners. `weight` is optional (empty means
// uniform) and lets the boosting wrapper reweight instances without
// resampling.
struct Samples {
  std::vector<FeatureVector> x;
  std::vector<std::size_t> y;  // indices into label_set
  std::vector<std::string> label_set;
  std::vector<double> weight;

  static Samples from(const LabeledDataset& ds);
  Samples subset(const std::vector<std::size_t>& indices) const;
  std::size_t size() const { return x.size(); }
  double weight_of(std::size_t i) const { return weight.empty() ? 1.0 : weight[i]; }
};

class Classifier {
 public:
  virtual ~Classifier() = default;

  // Non-negative per-class scores aligned with label_set(), summing to 1.
  virtual std::vector<double> score(const FeatureVector& f) const = 0;
  virtual std::string kind() const = 0;
  virtual nlohmann::json to_json() const = 0;

  const std::vector<std::string>& label_set() const { return label_set_; }
  // Argmax of score(); ties resolve to the lowest class index.
  std::size_t predict(const FeatureVector& f) const;

 protected:
  explicit Classifier(std::vector<std::string> label_set)
      : label_set_(std::move(label_set)) {}

  std::vector<std::string> label_set_;
};

// Gaussian class-conditional densities, or per-feature kernel density
// estimates (Gaussian kernels, Silverman bandwidth) when kernel is true.
// Variances are floored at 1e-9. Every class needs at least two rows
// (DegenerateClassError otherwise).
std::unique_ptr<Classifier> train_naive_bayes(const Samples& data, bool kernel = true);

struct KnnOptions {
  std::size_t k = 3;
  bool inverse_distance = true;  // vote weight 1/d; an exact hit wins outright
};
// Lazy learner; throws DomainError when k exceeds the number of rows.
std::unique_ptr<Classifier> train_knn(const Samples& data, const KnnOptions& options = {});

struct C45Options {
  std::uint64_t seed = 10;     // consumed only to break exact gain-ratio ties
  std::size_t max_depth = 25;
};
// Binary-threshold decision tree: candidate thresholds are midpoints between
// consecutive distinct feature values, each branch must keep at least two
// rows, and the winner is the best gain ratio among candidates whose
// information gain reaches the candidate mean.
std::unique_ptr<Classifier> train_c45(const Samples& data, const C45Options& options = {});

enum class BaseLearner { naive_bayes, c45, knn };
BaseLearner base_learner_from_string(std::string_view name);
std::string_view to_string(BaseLearner base);

struct BoostOptions {
  std::size_t rounds = 10;
  bool resample = true;  // weight-proportional bootstrap per round
  std::uint64_t seed = 10;
  bool nb_kernel = true;  // forwarded to the chosen base learner
  KnnOptions knn{};
  C45Options c45{};
};
// Multiclass AdaBoost: round weight ln((1-err)/err) + ln(K-1); rounds with
// err >= (K-1)/K are discarded and the instance weights reset; a perfect
// round stops training early. Throws AllRoundsDiscardedError when no round
// survives.
std::unique_ptr<Classifier> boost(BaseLearner base, const Samples& data,
                                  const BoostOptions& options = {});

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);
std::unique_ptr<Classifier> load_classifier(const std::filesystem::path& path);
void save_classifier(const Classifier& model, const std::filesystem::path& path);

}  // namespace sysgraph
