#include <algorithm>
#include <cmath>

#include "learn_detail.hpp"
#include "sysgraph/classifiers.hpp"
#include "sysgraph/errors.hpp"
#include "sysgraph/random.hpp"

namespace sysgraph {
namespace {

class AdaBoostModel final : public Classifier {
 public:
  AdaBoostModel(std::vector<std::string> label_set, BaseLearner base)
      : Classifier(std::move(label_set)), base_(base) {}

  std::vector<double> score(const FeatureVector& f) const override {
    std::vector<double> scores(label_set_.size(), 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < models_.size(); ++t) {
      scores[models_[t]->predict(f)] += alphas_[t];
      total += alphas_[t];
    }
    for (auto& s : scores) s /= total;
    return scores;
  }

  std::string kind() const override { return "adaboost"; }

  nlohmann::json to_json() const override {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : models_) models.push_back(m->to_json());
    return {{"kind", "adaboost"},
            {"base", std::string(to_string(base_))},
            {"label_set", label_set_},
            {"alphas", alphas_},
            {"round_errors", round_errors_},
            {"discarded_rounds", discarded_rounds_},
            {"models", std::move(models)}};
  }

  BaseLearner base_;
  std::vector<std::unique_ptr<Classifier>> models_;
  std::vector<double> alphas_;
  std::vector<double> round_errors_;  // weighted error of each kept round
  std::size_t discarded_rounds_ = 0;
};

std::unique_ptr<Classifier> train_base(BaseLearner base, const Samples& data,
                                       const BoostOptions& options) {
  switch (base) {
    case BaseLearner::naive_bayes: return train_naive_bayes(data, options.nb_kernel);
    case BaseLearner::c45: return train_c45(data, options.c45);
    case BaseLearner::knn: return train_knn(data, options.knn);
  }
  throw DomainError("unknown base learner");
}

// n draws proportional to `weights` via inverse-CDF, ascending row bias-free.
std::vector<std::size_t> bootstrap_indices(const std::vector<double>& weights,
                                           std::mt19937_64& rng) {
  std::vector<double> cumulative(weights.size());
  double run = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    run += weights[i];
    cumulative[i] = run;
  }
  std::vector<std::size_t> picks(weights.size());
  for (auto& p : picks) {
    const double u = uniform01(rng) * run;
    p = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    if (p >= weights.size()) p = weights.size() - 1;
  }
  return picks;
}

}  // namespace

std::unique_ptr<Classifier> boost(BaseLearner base, const Samples& data,
                                  const BoostOptions& options) {
  const std::size_t n = data.size();
  if (n == 0) throw DegenerateClassError("cannot boost on no rows");
  const std::size_t k = data.label_set.size();
  const double discard_threshold =
      static_cast<double>(k - 1) / static_cast<double>(std::max<std::size_t>(k, 2));
  const double log_k_minus_1 = std::log(static_cast<double>(std::max<std::size_t>(k - 1, 1)));

  auto model = std::make_unique<AdaBoostModel>(data.label_set, base);
  auto rng = make_rng(options.seed);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));

  for (std::size_t round = 0; round < options.rounds; ++round) {
    std::unique_ptr<Classifier> learner;
    if (options.resample) {
      // A bootstrap draw can starve a class below what the base learner
      // accepts (Naive Bayes wants two rows per class); redraw a few times
      // before giving the round up.
      constexpr int kDrawAttempts = 10;
      for (int attempt = 0; attempt < kDrawAttempts; ++attempt) {
        Samples sample = data.subset(bootstrap_indices(w, rng));
        sample.weight.clear();
        try {
          learner = train_base(base, sample, options);
          break;
        } catch (const DegenerateClassError&) {
          if (attempt + 1 == kDrawAttempts) break;
        }
      }
      if (!learner) {  // treated like an over-threshold round
        ++model->discarded_rounds_;
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
        continue;
      }
    } else {
      Samples weighted = data;
      weighted.weight = w;
      learner = train_base(base, weighted, options);
    }

    // Weighted training error on the full (unsampled) data.
    std::vector<bool> miss(n);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = learner->predict(data.x[i]) != data.y[i];
      if (miss[i]) err += w[i];
    }

    if (err == 0.0) {
      constexpr double kEpsilon = 1e-12;
      model->models_.push_back(std::move(learner));
      model->alphas_.push_back(std::log((1.0 - kEpsilon) / kEpsilon) + log_k_minus_1);
      model->round_errors_.push_back(0.0);
      break;  // a perfect round ends training
    }
    if (err >= discard_threshold) {
      ++model->discarded_rounds_;
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
      continue;
    }

    const double alpha = std::log((1.0 - err) / err) + log_k_minus_1;
    model->models_.push_back(std::move(learner));
    model->alphas_.push_back(alpha);
    model->round_errors_.push_back(err);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= std::exp(alpha);
      total += w[i];
    }
    for (auto& wi : w) wi /= total;
  }

  if (model->models_.empty())
    throw AllRoundsDiscardedError("every boosting round exceeded the error threshold");
  return model;
}

namespace detail {

std::unique_ptr<Classifier> boost_from_json(const nlohmann::json& j) {
  auto model = std::make_unique<AdaBoostModel>(
      j.at("label_set").get<std::vector<std::string>>(),
      base_learner_from_string(j.at("base").get<std::string>()));
  model->alphas_ = j.at("alphas").get<std::vector<double>>();
  model->round_errors_ = j.at("round_errors").get<std::vector<double>>();
  model->discarded_rounds_ = j.at("discarded_rounds").get<std::size_t>();
  for (const auto& mj : j.at("models"))
    model->models_.push_back(classifier_from_json(mj));
  return model;
}

}  // namespace detail
}  // namespace sysgraph
