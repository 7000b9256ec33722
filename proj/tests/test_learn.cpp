#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "sysgraph/classifiers.hpp"
#include "sysgraph/errors.hpp"
#include "sysgraph/evaluate.hpp"
#include "sysgraph/random.hpp"

using namespace sysgraph;

namespace {

// Rows are (f1, label); the other six features default to the given filler.
LabeledDataset axis_dataset(const std::vector<std::string>& labels,
                            const std::vector<std::pair<double, std::string>>& rows,
                            double filler = 0.0) {
  LabeledDataset ds(labels);
  std::size_t i = 0;
  for (const auto& [x, label] : rows) {
    FeatureVector f{x, filler, filler, filler, filler, filler, filler};
    ds.add_row({"r" + std::to_string(i++), f, label});
  }
  return ds;
}

FeatureVector probe(double x) { return {x, 0, 0, 0, 0, 0, 0}; }

// Two interleaved blobs on f1/f2 that overlap enough to keep stumps honest.
LabeledDataset overlapping_blobs(std::size_t per_class, std::uint64_t seed) {
  LabeledDataset ds({"a", "b"});
  auto rng = make_rng(seed);
  for (std::size_t i = 0; i < per_class * 2; ++i) {
    const bool second = i >= per_class;
    const double center = second ? 1.0 : 0.0;
    FeatureVector f{center + 1.2 * (uniform01(rng) - 0.5),
                    center + 1.2 * (uniform01(rng) - 0.5), 0, 0, 0, 0, 0};
    ds.add_row({"r" + std::to_string(i), f, second ? "b" : "a"});
  }
  return ds;
}

}  // namespace

TEST_CASE("plain naive bayes reproduces the closed-form posterior") {
  const auto ds = axis_dataset({"a", "b"}, {{-1, "a"}, {1, "a"}, {9, "b"}, {11, "b"}});
  const auto model = train_naive_bayes(Samples::from(ds), false);
  const auto s = model->score(probe(2.0));
  const double expected = 1.0 / (1.0 + std::exp(-30.0));
  CHECK(std::abs(s[0] - expected) < 1e-9);
  CHECK(std::abs(s[0] + s[1] - 1.0) < 1e-12);
  CHECK(model->predict(probe(2.0)) == 0);
  CHECK(model->predict(probe(8.0)) == 1);
}

TEST_CASE("naive bayes priors follow the class frequencies") {
  // identical feature mass in both classes, 2:1 class ratio
  const auto ds = axis_dataset({"a", "b"},
                               {{5, "a"}, {5, "a"}, {5, "a"}, {5, "a"}, {5, "b"}, {5, "b"}});
  // with plain gaussians the floored variances cancel, leaving the priors
  const auto gauss = train_naive_bayes(Samples::from(ds), false);
  CHECK(gauss->score(probe(5.0))[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  // kernel densities do not cancel here (the bigger class gets a narrower
  // bandwidth), so check the fitted priors themselves in both modes
  for (const bool kernel : {false, true}) {
    const auto model = train_naive_bayes(Samples::from(ds), kernel);
    const auto priors = model->to_json().at("priors").get<std::vector<double>>();
    REQUIRE(priors.size() == 2);
    CHECK(priors[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(priors[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("naive bayes insists on two rows per class") {
  const auto ds = axis_dataset({"a", "b"}, {{0, "a"}, {1, "a"}, {5, "b"}});
  CHECK_THROWS_AS(train_naive_bayes(Samples::from(ds), true), DegenerateClassError);
}

TEST_CASE("kernel naive bayes matches a hand-rolled density estimate") {
  // two points per class keep the bandwidth arithmetic checkable by hand:
  // sigma = 1, IQR / 1.34 > 1, so h = 0.9 * 1 * 2^(-1/5) for both classes
  const auto ds = axis_dataset({"a", "b"}, {{0, "a"}, {2, "a"}, {10, "b"}, {12, "b"}});
  const auto model = train_naive_bayes(Samples::from(ds), true);

  const double h = 0.9 * std::pow(2.0, -0.2);
  const auto kde = [&](double x, double p1, double p2) {
    const auto kernel = [&](double t) {
      return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::acos(-1.0));
    };
    return (kernel((x - p1) / h) + kernel((x - p2) / h)) / (2.0 * h);
  };
  for (const double x : {1.0, 3.0, 6.0, 9.5}) {
    const double da = kde(x, 0, 2), db = kde(x, 10, 12);
    const auto s = model->score(probe(x));
    CHECK(s[0] == doctest::Approx(da / (da + db)).epsilon(1e-9));
  }
}

TEST_CASE("knn scores by inverse distance with exact-hit shortcut") {
  const auto ds = axis_dataset({"a", "b"}, {{0, "a"}, {1, "b"}, {3, "b"}});
  const auto model = train_knn(Samples::from(ds), {.k = 3, .inverse_distance = true});

  const auto hit = model->score(probe(1.0));
  CHECK(hit[0] == 0.0);
  CHECK(hit[1] == 1.0);

  // d = (0.5, 0.5, 2.5) so the votes are a: 2, b: 2 + 0.4
  const auto s = model->score(probe(0.5));
  CHECK(s[0] == doctest::Approx(2.0 / 4.4).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(2.4 / 4.4).epsilon(1e-12));

  const auto uniform_model = train_knn(Samples::from(ds), {.k = 3, .inverse_distance = false});
  const auto u = uniform_model->score(probe(0.5));
  CHECK(u[0] == doctest::Approx(1.0 / 3.0));
  CHECK(u[1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("knn neighbor count is bounded by the training set") {
  const auto ds = axis_dataset({"a", "b"}, {{0, "a"}, {1, "b"}});
  CHECK_THROWS_AS(train_knn(Samples::from(ds), {.k = 3}), DomainError);
  CHECK_THROWS_AS(train_knn(Samples::from(ds), {.k = 0}), DomainError);
  const auto one = train_knn(Samples::from(ds), {.k = 1});
  CHECK(one->predict(probe(0.4)) == 0);
  CHECK(one->predict(probe(0.6)) == 1);
}

TEST_CASE("c45 learns xor exactly") {
  LabeledDataset ds({"a", "b"});
  int i = 0;
  for (const int rep : {0, 1}) {
    (void)rep;
    for (const auto& [x, y, label] :
         std::vector<std::tuple<double, double, const char*>>{
             {0, 0, "a"}, {1, 1, "a"}, {0, 1, "b"}, {1, 0, "b"}}) {
      ds.add_row({"r" + std::to_string(i++), {x, y, 0, 0, 0, 0, 0}, label});
    }
  }
  const auto model = train_c45(Samples::from(ds));
  for (const auto& row : ds.rows())
    CHECK(model->predict(row.features) == ds.label_index(row.label));
}

TEST_CASE("c45 respects purity, depth and branch-size limits") {
  // all one class: a single leaf
  const auto pure = axis_dataset({"a", "b"}, {{0, "a"}, {1, "a"}, {2, "a"}, {3, "a"}});
  const auto leaf = train_c45(Samples::from(pure));
  CHECK(leaf->score(probe(100.0))[0] == 1.0);

  // three rows cannot split (both branches need two)
  const auto tiny = axis_dataset({"a", "b"}, {{0, "a"}, {1, "a"}, {10, "b"}});
  const auto majority = train_c45(Samples::from(tiny));
  CHECK(majority->predict(probe(10.0)) == 0);  // 2/3 majority wins everywhere

  // a depth-one stump separates linearly separable data
  const auto sep = axis_dataset({"a", "b"}, {{0, "a"}, {1, "a"}, {5, "b"}, {6, "b"}});
  const auto stump = train_c45(Samples::from(sep), {.max_depth = 1});
  CHECK(stump->predict(probe(0.5)) == 0);
  CHECK(stump->predict(probe(5.5)) == 1);
}

TEST_CASE("c45 training is reproducible") {
  const auto ds = overlapping_blobs(30, 99);
  const auto m1 = train_c45(Samples::from(ds), {.seed = 10});
  const auto m2 = train_c45(Samples::from(ds), {.seed = 10});
  CHECK(m1->to_json() == m2->to_json());
}

TEST_CASE("every classifier survives a json round trip") {
  const auto ds = overlapping_blobs(12, 4);
  const auto data = Samples::from(ds);
  std::vector<std::unique_ptr<Classifier>> models;
  models.push_back(train_naive_bayes(data, false));
  models.push_back(train_naive_bayes(data, true));
  models.push_back(train_knn(data, {.k = 3}));
  models.push_back(train_c45(data, {}));
  models.push_back(boost(BaseLearner::c45, data, {.rounds = 5}));
  models.push_back(boost(BaseLearner::naive_bayes, data, {.rounds = 3, .resample = false}));

  for (const auto& model : models) {
    const auto copy = classifier_from_json(model->to_json());
    CHECK(copy->kind() == model->kind());
    CHECK(copy->label_set() == model->label_set());
    for (const double x : {-0.3, 0.2, 0.5, 0.9, 1.4}) {
      const auto a = model->score({x, 1.0 - x, 0, 0, 0, 0, 0});
      const auto b = copy->score({x, 1.0 - x, 0, 0, 0, 0, 0});
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(classifier_from_json(nlohmann::json{{"kind", "svm"}}), ParseError);
}

TEST_CASE("boosting stops early on a perfect round and records it") {
  const auto ds = axis_dataset({"a", "b"}, {{0, "a"}, {1, "a"}, {10, "b"}, {11, "b"}});
  // without resampling the first round sees the full separable set
  const auto model = boost(BaseLearner::c45, Samples::from(ds), {.rounds = 10, .resample = false});
  const auto j = model->to_json();
  CHECK(j.at("round_errors").size() == 1);
  CHECK(j.at("round_errors")[0] == 0.0);
  CHECK(j.at("discarded_rounds") == 0);
  CHECK(model->predict(probe(0.5)) == 0);
  CHECK(model->predict(probe(10.5)) == 1);
}

TEST_CASE("boosting gives up when every round is hopeless") {
  // both classes share one identical point, so no base learner can do
  // better than the 50% threshold
  const auto ds = axis_dataset({"a", "b"}, {{1, "a"}, {1, "a"}, {1, "b"}, {1, "b"}});
  CHECK_THROWS_AS(boost(BaseLearner::naive_bayes, Samples::from(ds), {.resample = false}),
                  AllRoundsDiscardedError);
}

TEST_CASE("weighted boosting honors the binary training-error bound") {
  const auto ds = overlapping_blobs(40, 12);
  const auto data = Samples::from(ds);
  const auto model =
      boost(BaseLearner::c45, data, {.rounds = 12, .resample = false, .c45 = {.max_depth = 1}});
  const auto j = model->to_json();

  double bound = 1.0;
  bool had_error = false;
  for (const auto& e : j.at("round_errors")) {
    const double err = e.get<double>();
    if (err > 0.0) had_error = true;
    bound *= 2.0 * std::sqrt(err * (1.0 - err));
  }
  REQUIRE(had_error);  // otherwise the bound degenerates to 0 and proves nothing

  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (model->predict(data.x[i]) != data.y[i]) ++wrong;
  const double train_error = static_cast<double>(wrong) / static_cast<double>(data.size());
  CHECK(train_error <= bound + 1e-12);
}

TEST_CASE("resampled boosting is deterministic in the seed") {
  const auto ds = overlapping_blobs(25, 77);
  const auto a = boost(BaseLearner::c45, Samples::from(ds), {.rounds = 6, .seed = 3});
  const auto b = boost(BaseLearner::c45, Samples::from(ds), {.rounds = 6, .seed = 3});
  CHECK(a->to_json() == b->to_json());
}

TEST_CASE("classifier specs cover the advertised names") {
  CHECK(known_classifier_names().size() == 7);
  const auto ds = overlapping_blobs(10, 5);
  for (const auto& name : known_classifier_names()) {
    const auto spec = make_classifier_spec(name);
    CHECK(spec.name == name);
    const auto model = spec.train(Samples::from(ds));
    const auto s = model->score(probe(0.5));
    CHECK(s.size() == 2);
    CHECK(std::abs(s[0] + s[1] - 1.0) < 1e-9);
  }
  CHECK_THROWS_AS(make_classifier_spec("svm"), DomainError);
}

TEST_CASE("rank auc agrees with trapezoid integration") {
  auto rng = make_rng(314159);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n_classes = 2 + uniform_below(rng, 3);
    const std::size_t n = 5 + uniform_below(rng, 40);
    std::vector<std::vector<double>> scores(n, std::vector<double>(n_classes));
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = uniform_below(rng, n_classes);
      for (auto& v : scores[i]) {
        v = uniform01(rng);
        if (uniform01(rng) < 0.3) v = 0.5;  // force plenty of ties
      }
    }
    const auto expected = oracle::macro_auc(scores, labels, n_classes);
    if (!expected) {
      CHECK_THROWS_AS(roc_auc(scores, labels, n_classes), NoValidClassError);
      continue;
    }
    const auto got = roc_auc(scores, labels, n_classes);
    CHECK(std::abs(got.macro - *expected) < 1e-9);
  }
}

TEST_CASE("information gain of a perfect feature is the class entropy") {
  LabeledDataset ds({"a", "b", "c"});
  int i = 0;
  for (int cls = 0; cls < 3; ++cls)
    for (int r = 0; r < 12; ++r)
      ds.add_row({"r" + std::to_string(i++),
                  {0.5, 0, 0, static_cast<double>(cls), 0, 0, 0},
                  std::string(1, static_cast<char>('a' + cls))});
  CHECK(information_gain(ds, 3) == doctest::Approx(std::log2(3.0)).epsilon(1e-9));
  CHECK(information_gain(ds, 0) == doctest::Approx(0.0));  // constant feature

  const auto ranking = rank_features(ds);
  REQUIRE(ranking.size() == FeatureVector::kCount);
  CHECK(ranking[0].feature == 3);
  // all the zero-gain features keep ascending order
  CHECK(ranking[1].feature < ranking[2].feature);
  CHECK(ranking[5].feature < ranking[6].feature);
}

TEST_CASE("cross validation separates an easy dataset perfectly") {
  LabeledDataset ds({"a", "b"});
  auto rng = make_rng(8);
  for (int i = 0; i < 40; ++i) {
    const bool second = i % 2 == 1;
    ds.add_row({"r" + std::to_string(i),
                {(second ? 10.0 : 0.0) + uniform01(rng), uniform01(rng), 0, 0, 0, 0, 0},
                second ? "b" : "a"});
  }
  const auto report = cross_validate(ds, make_classifier_spec("knn"), 5, 5, 10);
  CHECK(report.accuracy == 1.0);
  REQUIRE(report.mean_auc);
  CHECK(*report.mean_auc == 1.0);
  CHECK(report.fold_outcomes.size() == 25);
  CHECK(report.confusion[0][1] == 0);
  CHECK(report.confusion[1][0] == 0);
  CHECK(report.confusion[0][0] + report.confusion[1][1] == 40 * 5);
}

TEST_CASE("cross validation is independent of the thread count") {
  const auto ds = overlapping_blobs(20, 21);
  const auto serial = cross_validate(ds, make_classifier_spec("c45"), 4, 3, 10, 1);
  const auto parallel = cross_validate(ds, make_classifier_spec("c45"), 4, 3, 10, 4);
  CHECK(to_json(serial) == to_json(parallel));
}

TEST_CASE("cross validation guards its fold arithmetic") {
  const auto ds = overlapping_blobs(10, 2);
  CHECK_THROWS_AS(cross_validate(ds, make_classifier_spec("knn"), 1, 1, 10),
                  std::invalid_argument);

  // a class smaller than the fold count cannot be stratified
  LabeledDataset skewed({"a", "b"});
  auto rng = make_rng(5);
  for (int i = 0; i < 10; ++i)
    skewed.add_row({"a" + std::to_string(i), {uniform01(rng), 0, 0, 0, 0, 0, 0}, "a"});
  for (int i = 0; i < 3; ++i)
    skewed.add_row({"b" + std::to_string(i), {uniform01(rng), 0, 0, 0, 0, 0, 0}, "b"});
  CHECK_THROWS_AS(cross_validate(skewed, make_classifier_spec("knn"), 5, 1, 10),
                  ClassTooSmallError);
}

TEST_CASE("leave-one-out is the allowed stratification exception") {
  LabeledDataset ds({"a", "b"});
  auto rng = make_rng(30);
  for (int i = 0; i < 6; ++i) {
    const bool second = i >= 3;
    ds.add_row({"r" + std::to_string(i),
                {(second ? 5.0 : 0.0) + uniform01(rng), 0, 0, 0, 0, 0, 0},
                second ? "b" : "a"});
  }
  const auto report = cross_validate(ds, make_classifier_spec("knn"), 6, 1, 10);
  CHECK(report.folds == 6);
  CHECK(report.accuracy == 1.0);
  // one test row per fold leaves no class with both kinds, so no fold AUC
  CHECK_FALSE(report.mean_auc);
}

TEST_CASE("evaluation reports serialize and tabulate") {
  const auto ds = overlapping_blobs(10, 44);
  std::vector<EvaluationReport> reports;
  reports.push_back(cross_validate(ds, make_classifier_spec("nb"), 2, 1, 10));
  reports.push_back(cross_validate(ds, make_classifier_spec("knn"), 2, 1, 10));

  const auto j = to_json(reports[0]);
  CHECK(j.at("classifier") == "nb");
  CHECK(j.at("folds") == 2);
  CHECK(j.at("fold_outcomes").size() == 2);
  CHECK(j.at("confusion").size() == 2);

  const auto table = format_table(reports);
  CHECK(table.find("classifier") != std::string::npos);
  CHECK(table.find("nb") != std::string::npos);
  CHECK(table.find("knn") != std::string::npos);
}
