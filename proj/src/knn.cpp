#include <algorithm>
#include <cmath>

#include "learn_detail.hpp"
#include "sysgraph/classifiers.hpp"
#include "sysgraph/errors.hpp"

namespace sysgraph {
namespace {

class KnnModel final : public Classifier {
 public:
  KnnModel(std::vector<std::string> label_set, KnnOptions options)
      : Classifier(std::move(label_set)), options_(options) {}

  std::vector<double> score(const FeatureVector& f) const override {
    const std::size_t n = x_.size();
    std::vector<std::pair<double, std::size_t>> dist(n);  // (distance, row)
    for (std::size_t i = 0; i < n; ++i) {
      double sq = 0.0;
      for (std::size_t j = 0; j < FeatureVector::kCount; ++j) {
        const double d = f[j] - x_[i][j];
        sq += d * d;
      }
      dist[i] = {std::sqrt(sq), i};
      // An exact feature match decides the query outright (the first such
      // row in storage order when several coincide).
      if (sq == 0.0) {
        std::vector<double> scores(label_set_.size(), 0.0);
        scores[y_[i]] = 1.0;
        return scores;
      }
    }
    std::partial_sort(dist.begin(), dist.begin() + options_.k, dist.end());
    std::vector<double> votes(label_set_.size(), 0.0);
    for (std::size_t r = 0; r < options_.k; ++r) {
      const auto& [d, i] = dist[r];
      const double vote = options_.inverse_distance ? 1.0 / d : 1.0;
      votes[y_[i]] += instance_weight(i) * vote;
    }
    double total = 0.0;
    for (const double v : votes) total += v;
    for (auto& v : votes) v /= total;
    return votes;
  }

  std::string kind() const override { return "knn"; }

  nlohmann::json to_json() const override {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < x_.size(); ++i) {
      nlohmann::json row{{"x", x_[i].values()}, {"y", y_[i]}};
      if (!weight_.empty()) row["w"] = weight_[i];
      rows.push_back(std::move(row));
    }
    return {{"kind", "knn"},
            {"label_set", label_set_},
            {"k", options_.k},
            {"inverse_distance", options_.inverse_distance},
            {"rows", std::move(rows)}};
  }

  double instance_weight(std::size_t i) const {
    return weight_.empty() ? 1.0 : weight_[i];
  }

  KnnOptions options_;
  std::vector<FeatureVector> x_;
  std::vector<std::size_t> y_;
  std::vector<double> weight_;
};

FeatureVector feature_vector_from_array(const std::array<double, FeatureVector::kCount>& a) {
  FeatureVector f;
  f.avg_in_degree_centrality = a[0];
  f.avg_weighted_in_degree_centrality = a[1];
  f.portion_in_degree_1 = a[2];
  f.portion_out_degree_1 = a[3];
  f.portion_weighted_in_degree_1 = a[4];
  f.portion_weighted_out_degree_1 = a[5];
  f.average_distance = a[6];
  return f;
}

}  // namespace

std::unique_ptr<Classifier> train_knn(const Samples& data, const KnnOptions& options) {
  if (options.k == 0 || options.k > data.size())
    throw DomainError("k = " + std::to_string(options.k) + " outside [1, " +
                      std::to_string(data.size()) + "]");
  auto model = std::make_unique<KnnModel>(data.label_set, options);
  model->x_ = data.x;
  model->y_ = data.y;
  model->weight_ = data.weight;
  return model;
}

namespace detail {

std::unique_ptr<Classifier> knn_from_json(const nlohmann::json& j) {
  KnnOptions options;
  options.k = j.at("k").get<std::size_t>();
  options.inverse_distance = j.at("inverse_distance").get<bool>();
  auto model = std::make_unique<KnnModel>(
      j.at("label_set").get<std::vector<std::string>>(), options);
  for (const auto& row : j.at("rows")) {
    model->x_.push_back(feature_vector_from_array(
        row.at("x").get<std::array<double, FeatureVector::kCount>>()));
    model->y_.push_back(row.at("y").get<std::size_t>());
    if (row.contains("w")) model->weight_.push_back(row.at("w").get<double>());
  }
  return model;
}

}  // namespace detail
}  // namespace sysgraph
