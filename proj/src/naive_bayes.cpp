#include <algorithm>
#include <cmath>
#include <limits>

#include "learn_detail.hpp"
#include "sysgraph/classifiers.hpp"
#include "sysgraph/errors.hpp"

namespace sysgraph {
namespace {

constexpr double kVarianceFloor = 1e-9;
constexpr double kBandwidthFloor = 1e-9;
constexpr double kLog2Pi = 1.8378770664093453;

struct Gaussian {
  double mean = 0.0;
  double var = kVarianceFloor;
};

// One-dimensional Gaussian-kernel density over the training values.
struct Kde {
  std::vector<double> points;
  std::vector<double> weights;  // same length as points, sum total_weight
  double total_weight = 0.0;
  double bandwidth = kBandwidthFloor;

  double log_density(double x) const {
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
      const double z = (x - points[j]) / bandwidth;
      terms[j] = std::log(weights[j]) - 0.5 * z * z;
      max_term = std::max(max_term, terms[j]);
    }
    double sum = 0.0;
    for (const double t : terms) sum += std::exp(t - max_term);
    return max_term + std::log(sum) - std::log(total_weight) - std::log(bandwidth) -
           0.5 * kLog2Pi;
  }
};

double weighted_quantile(const std::vector<std::pair<double, double>>& sorted_vw,
                         double total, double q) {
  double cum = 0.0;
  for (const auto& [v, w] : sorted_vw) {
    cum += w;
    if (cum >= q * total) return v;
  }
  return sorted_vw.back().first;
}

class NaiveBayesModel final : public Classifier {
 public:
  NaiveBayesModel(std::vector<std::string> label_set, bool kernel)
      : Classifier(std::move(label_set)), kernel_(kernel) {}

  std::vector<double> score(const FeatureVector& f) const override {
    const std::size_t n_classes = label_set_.size();
    std::vector<double> log_post(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
      double lp = std::log(priors_[c]);
      for (std::size_t i = 0; i < FeatureVector::kCount; ++i) {
        const double x = f[i];
        if (kernel_) {
          lp += kde_[c][i].log_density(x);
        } else {
          const auto& g = gaussian_[c][i];
          lp += -0.5 * (kLog2Pi + std::log(g.var)) - (x - g.mean) * (x - g.mean) / (2.0 * g.var);
        }
      }
      log_post[c] = lp;
    }
    const double m = *std::max_element(log_post.begin(), log_post.end());
    std::vector<double> scores(n_classes);
    double total = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      scores[c] = std::exp(log_post[c] - m);
      total += scores[c];
    }
    for (auto& s : scores) s /= total;
    return scores;
  }

  std::string kind() const override { return "naive_bayes"; }

  nlohmann::json to_json() const override {
    nlohmann::json j{{"kind", "naive_bayes"},
                     {"kernel", kernel_},
                     {"label_set", label_set_},
                     {"priors", priors_}};
    if (kernel_) {
      nlohmann::json classes = nlohmann::json::array();
      for (const auto& per_feature : kde_) {
        nlohmann::json features = nlohmann::json::array();
        for (const auto& kde : per_feature)
          features.push_back({{"points", kde.points},
                              {"weights", kde.weights},
                              {"bandwidth", kde.bandwidth}});
        classes.push_back(std::move(features));
      }
      j["kde"] = std::move(classes);
    } else {
      nlohmann::json classes = nlohmann::json::array();
      for (const auto& per_feature : gaussian_) {
        nlohmann::json features = nlohmann::json::array();
        for (const auto& g : per_feature)
          features.push_back({{"mean", g.mean}, {"var", g.var}});
        classes.push_back(std::move(features));
      }
      j["gaussian"] = std::move(classes);
    }
    return j;
  }

  bool kernel_;
  std::vector<double> priors_;
  std::vector<std::array<Gaussian, FeatureVector::kCount>> gaussian_;
  std::vector<std::array<Kde, FeatureVector::kCount>> kde_;
};

}  // namespace

std::unique_ptr<Classifier> train_naive_bayes(const Samples& data, bool kernel) {
  const std::size_t n_classes = data.label_set.size();
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data.y[i]].push_back(i);
  for (std::size_t c = 0; c < n_classes; ++c)
    if (by_class[c].size() < 2)
      throw DegenerateClassError("class '" + data.label_set[c] + "' has " +
                                 std::to_string(by_class[c].size()) +
                                 " training rows, needs at least 2");

  auto model = std::make_unique<NaiveBayesModel>(data.label_set, kernel);
  double total_weight = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) total_weight += data.weight_of(i);

  model->priors_.resize(n_classes);
  if (kernel)
    model->kde_.resize(n_classes);
  else
    model->gaussian_.resize(n_classes);

  for (std::size_t c = 0; c < n_classes; ++c) {
    const auto& rows = by_class[c];
    double class_weight = 0.0;
    for (const std::size_t i : rows) class_weight += data.weight_of(i);
    model->priors_[c] = class_weight / total_weight;

    for (std::size_t f = 0; f < FeatureVector::kCount; ++f) {
      double mean = 0.0;
      for (const std::size_t i : rows) mean += data.weight_of(i) * data.x[i][f];
      mean /= class_weight;
      double var = 0.0;
      for (const std::size_t i : rows) {
        const double d = data.x[i][f] - mean;
        var += data.weight_of(i) * d * d;
      }
      var = std::max(var / class_weight, kVarianceFloor);

      if (!kernel) {
        model->gaussian_[c][f] = {mean, var};
        continue;
      }

      Kde kde;
      kde.points.reserve(rows.size());
      kde.weights.reserve(rows.size());
      double sum_sq_weight = 0.0;
      for (const std::size_t i : rows) {
        kde.points.push_back(data.x[i][f]);
        kde.weights.push_back(data.weight_of(i));
        sum_sq_weight += data.weight_of(i) * data.weight_of(i);
      }
      kde.total_weight = class_weight;

      std::vector<std::pair<double, double>> sorted_vw;
      sorted_vw.reserve(rows.size());
      for (std::size_t j = 0; j < kde.points.size(); ++j)
        sorted_vw.emplace_back(kde.points[j], kde.weights[j]);
      std::sort(sorted_vw.begin(), sorted_vw.end());
      const double iqr = weighted_quantile(sorted_vw, class_weight, 0.75) -
                         weighted_quantile(sorted_vw, class_weight, 0.25);
      const double sigma = std::sqrt(var);
      // Silverman's rule with the Kish effective sample size.
      const double m_eff = class_weight * class_weight / sum_sq_weight;
      double spread = sigma;
      if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
      kde.bandwidth =
          std::max(0.9 * spread * std::pow(m_eff, -0.2), kBandwidthFloor);
      model->kde_[c][f] = std::move(kde);
    }
  }
  return model;
}

namespace detail {

std::unique_ptr<Classifier> naive_bayes_from_json(const nlohmann::json& j) {
  auto model = std::make_unique<NaiveBayesModel>(
      j.at("label_set").get<std::vector<std::string>>(), j.at("kernel").get<bool>());
  model->priors_ = j.at("priors").get<std::vector<double>>();
  const std::size_t n_classes = model->label_set().size();
  if (model->kernel_) {
    model->kde_.resize(n_classes);
    const auto& classes = j.at("kde");
    for (std::size_t c = 0; c < n_classes; ++c)
      for (std::size_t f = 0; f < FeatureVector::kCount; ++f) {
        const auto& kj = classes.at(c).at(f);
        Kde kde;
        kde.points = kj.at("points").get<std::vector<double>>();
        kde.weights = kj.at("weights").get<std::vector<double>>();
        kde.bandwidth = kj.at("bandwidth").get<double>();
        for (const double w : kde.weights) kde.total_weight += w;
        model->kde_[c][f] = std::move(kde);
      }
  } else {
    model->gaussian_.resize(n_classes);
    const auto& classes = j.at("gaussian");
    for (std::size_t c = 0; c < n_classes; ++c)
      for (std::size_t f = 0; f < FeatureVector::kCount; ++f) {
        const auto& gj = classes.at(c).at(f);
        model->gaussian_[c][f] = {gj.at("mean").get<double>(), gj.at("var").get<double>()};
      }
  }
  return model;
}

}  // namespace detail
}  // namespace sysgraph
