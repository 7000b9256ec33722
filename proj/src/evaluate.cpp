#include "sysgraph/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "sysgraph/errors.hpp"
#include "sysgraph/random.hpp"
#include "sysgraph/util.hpp"

namespace sysgraph {

ClassifierSpec make_classifier_spec(std::string_view name) {
  const std::string n(name);
  if (n == "nb")
    return {n, [](const Samples& s) { return train_naive_bayes(s, false); }};
  if (n == "nb-kernel")
    return {n, [](const Samples& s) { return train_naive_bayes(s, true); }};
  if (n == "knn")
    return {n, [](const Samples& s) { return train_knn(s); }};
  if (n == "c45")
    return {n, [](const Samples& s) { return train_c45(s); }};
  if (n == "boost-nb")
    return {n, [](const Samples& s) { return boost(BaseLearner::naive_bayes, s); }};
  if (n == "boost-c45")
    return {n, [](const Samples& s) { return boost(BaseLearner::c45, s); }};
  if (n == "boost-knn")
    return {n, [](const Samples& s) { return boost(BaseLearner::knn, s); }};
  std::string known;
  for (const auto& k : known_classifier_names()) known += (known.empty() ? "" : ", ") + k;
  throw DomainError("unknown classifier '" + n + "' (known: " + known + ")");
}

const std::vector<std::string>& known_classifier_names() {
  static const std::vector<std::string> kNames = {
      "nb", "nb-kernel", "knn", "c45", "boost-nb", "boost-c45", "boost-knn"};
  return kNames;
}

AucReport roc_auc(const std::vector<std::vector<double>>& scores,
                  const std::vector<std::size_t>& labels, std::size_t n_classes) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("scores and labels length mismatch");
  const std::size_t n = scores.size();
  AucReport report;
  report.per_class.assign(n_classes, std::nullopt);

  double sum = 0.0;
  std::size_t valid = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::size_t n_pos = 0;
    for (const auto y : labels)
      if (y == c) ++n_pos;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) continue;

    // Average ranks of the class-c score column, ties sharing their midrank.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scores[a][c] < scores[b][c];
    });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j < n && scores[order[j]][c] == scores[order[i]][c]) ++j;
      const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
      for (std::size_t t = i; t < j; ++t)
        if (labels[order[t]] == c) rank_sum_pos += mid_rank;
      i = j;
    }
    const double auc =
        (rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0) /
        (static_cast<double>(n_pos) * static_cast<double>(n_neg));
    report.per_class[c] = auc;
    sum += auc;
    ++valid;
  }
  if (valid == 0)
    throw NoValidClassError("no class has both positive and negative examples");
  report.macro = sum / static_cast<double>(valid);
  return report;
}

namespace {

double entropy_of_counts(const std::vector<std::size_t>& counts, std::size_t total) {
  double h = 0.0;
  for (const auto c : counts)
    if (c > 0) {
      const double p = static_cast<double>(c) / static_cast<double>(total);
      h -= p * std::log2(p);
    }
  return h;
}

}  // namespace

double information_gain(const LabeledDataset& ds, std::size_t feature, std::size_t bins) {
  if (feature >= FeatureVector::kCount)
    throw std::out_of_range("feature index out of range");
  if (bins < 2) throw std::invalid_argument("need at least 2 bins");
  const std::size_t n = ds.size();
  if (n == 0) throw DatasetError("information gain of an empty dataset");

  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = ds.rows()[i].features[feature];
  std::sort(sorted.begin(), sorted.end());

  // Equal-frequency cut points; duplicates collapse (degenerate bins merge).
  std::vector<double> edges;
  for (std::size_t q = 1; q < bins; ++q) {
    const double edge = sorted[q * n / bins];
    if (edges.empty() || edge != edges.back()) edges.push_back(edge);
  }

  const std::size_t n_classes = ds.label_set().size();
  const std::size_t n_bins = edges.size() + 1;
  std::vector<std::vector<std::size_t>> counts(n_bins,
                                               std::vector<std::size_t>(n_classes, 0));
  std::vector<std::size_t> bin_totals(n_bins, 0);
  std::vector<std::size_t> class_totals(n_classes, 0);
  for (const auto& row : ds.rows()) {
    const double v = row.features[feature];
    const std::size_t b =
        std::lower_bound(edges.begin(), edges.end(), v) - edges.begin();
    const std::size_t c = ds.label_index(row.label);
    ++counts[b][c];
    ++bin_totals[b];
    ++class_totals[c];
  }

  double conditional = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b)
    if (bin_totals[b] > 0)
      conditional += static_cast<double>(bin_totals[b]) / static_cast<double>(n) *
                     entropy_of_counts(counts[b], bin_totals[b]);
  return entropy_of_counts(class_totals, n) - conditional;
}

std::vector<RankedFeature> rank_features(const LabeledDataset& ds, std::size_t bins) {
  std::vector<RankedFeature> ranking;
  ranking.reserve(FeatureVector::kCount);
  for (std::size_t f = 0; f < FeatureVector::kCount; ++f)
    ranking.push_back({f, information_gain(ds, f, bins)});
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const RankedFeature& a, const RankedFeature& b) {
                     return a.gain > b.gain;
                   });
  return ranking;
}

namespace {

struct FoldSlice {
  double accuracy = 0.0;
  std::optional<double> auc;
  std::vector<std::vector<std::size_t>> confusion;
};

}  // namespace

EvaluationReport cross_validate(const LabeledDataset& ds, const ClassifierSpec& spec,
                                std::size_t folds, std::size_t repeats,
                                std::uint64_t seed, unsigned jobs) {
  if (folds < 2) throw std::invalid_argument("need at least 2 folds");
  if (repeats < 1) throw std::invalid_argument("need at least 1 repeat");
  const std::size_t n = ds.size();
  const std::size_t n_classes = ds.label_set().size();
  if (n < folds)
    throw ClassTooSmallError("dataset has " + std::to_string(n) + " rows for " +
                             std::to_string(folds) + " folds");

  const Samples samples = Samples::from(ds);
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < n; ++i) by_class[samples.y[i]].push_back(i);
  // Stratification needs every class in every fold; the lone exception is
  // leave-one-out (folds == n), where folds hold a single row apiece.
  if (folds != n) {
    for (std::size_t c = 0; c < n_classes; ++c)
      if (by_class[c].size() < folds)
        throw ClassTooSmallError("class '" + ds.label_set()[c] + "' has " +
                                 std::to_string(by_class[c].size()) + " rows for " +
                                 std::to_string(folds) + " folds");
  }

  std::vector<std::vector<std::size_t>> fold_of(repeats,
                                                std::vector<std::size_t>(n, 0));
  for (std::size_t r = 0; r < repeats; ++r) {
    auto rng = make_rng(seed, r);
    if (folds == n) {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      shuffle_in_place(order, rng);
      for (std::size_t pos = 0; pos < n; ++pos) fold_of[r][order[pos]] = pos;
    } else {
      for (std::size_t c = 0; c < n_classes; ++c) {
        auto rows = by_class[c];
        shuffle_in_place(rows, rng);
        for (std::size_t pos = 0; pos < rows.size(); ++pos)
          fold_of[r][rows[pos]] = pos % folds;
      }
    }
  }

  const std::size_t tasks = repeats * folds;
  const std::function<FoldSlice(std::size_t)> run_fold = [&](std::size_t task) {
    const std::size_t r = task / folds;
    const std::size_t f = task % folds;
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < n; ++i)
      (fold_of[r][i] == f ? test_idx : train_idx).push_back(i);

    const auto model = spec.train(samples.subset(train_idx));

    FoldSlice slice;
    slice.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
    std::vector<std::vector<double>> scores;
    std::vector<std::size_t> truth;
    scores.reserve(test_idx.size());
    std::size_t hits = 0;
    for (const std::size_t i : test_idx) {
      auto s = model->score(samples.x[i]);
      std::size_t pred = 0;
      for (std::size_t c = 1; c < s.size(); ++c)
        if (s[c] > s[pred]) pred = c;
      if (pred == samples.y[i]) ++hits;
      ++slice.confusion[samples.y[i]][pred];
      scores.push_back(std::move(s));
      truth.push_back(samples.y[i]);
    }
    slice.accuracy = static_cast<double>(hits) / static_cast<double>(test_idx.size());
    try {
      slice.auc = roc_auc(scores, truth, n_classes).macro;
    } catch (const NoValidClassError&) {
    }
    return slice;
  };
  const auto slices = parallel_map<FoldSlice>(tasks, jobs, run_fold);

  EvaluationReport report;
  report.classifier = spec.name;
  report.folds = folds;
  report.repeats = repeats;
  report.seed = seed;
  report.label_set = ds.label_set();
  report.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));

  double auc_sum = 0.0;
  std::size_t auc_count = 0;
  for (std::size_t task = 0; task < tasks; ++task) {
    const auto& slice = slices[task];
    report.fold_outcomes.push_back(
        {task / folds, task % folds, slice.accuracy, slice.auc});
    for (std::size_t a = 0; a < n_classes; ++a)
      for (std::size_t b = 0; b < n_classes; ++b)
        report.confusion[a][b] += slice.confusion[a][b];
    if (slice.auc) {
      auc_sum += *slice.auc;
      ++auc_count;
    }
  }
  std::size_t correct = 0, total = 0;
  for (std::size_t a = 0; a < n_classes; ++a)
    for (std::size_t b = 0; b < n_classes; ++b) {
      total += report.confusion[a][b];
      if (a == b) correct += report.confusion[a][b];
    }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  if (auc_count > 0) report.mean_auc = auc_sum / static_cast<double>(auc_count);
  return report;
}

nlohmann::json to_json(const EvaluationReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& fo : report.fold_outcomes)
    folds.push_back({{"repeat", fo.repeat},
                     {"fold", fo.fold},
                     {"accuracy", fo.accuracy},
                     {"auc", fo.auc ? nlohmann::json(*fo.auc) : nlohmann::json(nullptr)}});
  return {{"classifier", report.classifier},
          {"folds", report.folds},
          {"repeats", report.repeats},
          {"seed", report.seed},
          {"label_set", report.label_set},
          {"confusion", report.confusion},
          {"accuracy", report.accuracy},
          {"auc", report.mean_auc ? nlohmann::json(*report.mean_auc) : nlohmann::json(nullptr)},
          {"fold_outcomes", std::move(folds)}};
}

std::string format_table(const std::vector<EvaluationReport>& reports) {
  std::size_t width = 10;
  for (const auto& r : reports) width = std::max(width, r.classifier.size());
  char line[160];
  std::snprintf(line, sizeof(line), "%-*s  %8s  %8s\n", static_cast<int>(width),
                "classifier", "accuracy", "auc");
  std::string out = line;
  out += std::string(width + 20, '-') + "\n";
  for (const auto& r : reports) {
    if (r.mean_auc)
      std::snprintf(line, sizeof(line), "%-*s  %8.4f  %8.4f\n", static_cast<int>(width),
                    r.classifier.c_str(), r.accuracy, *r.mean_auc);
    else
      std::snprintf(line, sizeof(line), "%-*s  %8.4f  %8s\n", static_cast<int>(width),
                    r.classifier.c_str(), r.accuracy, "n/a");
    out += line;
  }
  return out;
}

nlohmann::json to_json(const std::vector<RankedFeature>& ranking,
                       const LabeledDataset& ds, std::size_t bins) {
  nlohmann::json ranked = nlohmann::json::array();
  for (const auto& rf : ranking)
    ranked.push_back({{"feature", FeatureVector::names()[rf.feature]},
                      {"index", rf.feature},
                      {"information_gain", rf.gain}});
  return {{"bins", bins}, {"rows", ds.size()}, {"ranking", std::move(ranked)}};
}

}  // namespace sysgraph
