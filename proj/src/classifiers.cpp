#include "sysgraph/classifiers.hpp"

#include <fstream>

#include "learn_detail.hpp"
#include "sysgraph/errors.hpp"

namespace sysgraph {

Samples Samples::from(const LabeledDataset& ds) {
  Samples s;
  s.label_set = ds.label_set();
  s.x.reserve(ds.size());
  s.y.reserve(ds.size());
  for (const auto& row : ds.rows()) {
    s.x.push_back(row.features);
    s.y.push_back(ds.label_index(row.label));
  }
  return s;
}

Samples Samples::subset(const std::vector<std::size_t>& indices) const {
  Samples s;
  s.label_set = label_set;
  s.x.reserve(indices.size());
  s.y.reserve(indices.size());
  if (!weight.empty()) s.weight.reserve(indices.size());
  for (const std::size_t i : indices) {
    s.x.push_back(x[i]);
    s.y.push_back(y[i]);
    if (!weight.empty()) s.weight.push_back(weight[i]);
  }
  return s;
}

std::size_t Classifier::predict(const FeatureVector& f) const {
  const auto scores = score(f);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

BaseLearner base_learner_from_string(std::string_view name) {
  if (name == "nb" || name == "naive-bayes") return BaseLearner::naive_bayes;
  if (name == "c45") return BaseLearner::c45;
  if (name == "knn") return BaseLearner::knn;
  throw DomainError("unknown base learner: '" + std::string(name) + "'");
}

std::string_view to_string(BaseLearner base) {
  switch (base) {
    case BaseLearner::naive_bayes: return "nb";
    case BaseLearner::c45: return "c45";
    case BaseLearner::knn: return "knn";
  }
  return "nb";
}

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j) {
  std::string kind;
  try {
    kind = j.at("kind").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model JSON without 'kind': ") + e.what());
  }
  try {
    if (kind == "naive_bayes") return detail::naive_bayes_from_json(j);
    if (kind == "knn") return detail::knn_from_json(j);
    if (kind == "c45") return detail::c45_from_json(j);
    if (kind == "adaboost") return detail::boost_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed '" + kind + "' model: " + e.what());
  }
  throw ParseError("unknown model kind: '" + kind + "'");
}

std::unique_ptr<Classifier> load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid model JSON in " + path.string() + ": " + e.what());
  }
  return classifier_from_json(j);
}

void save_classifier(const Classifier& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file: " + path.string());
  out << model.to_json().dump(2) << '\n';
}

}  // namespace sysgraph
