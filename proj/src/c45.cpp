#include <algorithm>
#include <cmath>
#include <numeric>

#include "learn_detail.hpp"
#include "sysgraph/classifiers.hpp"
#include "sysgraph/errors.hpp"
#include "sysgraph/random.hpp"

namespace sysgraph {
namespace {

constexpr double kTieTolerance = 1e-12;

double entropy(const std::vector<double>& class_weights, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (const double w : class_weights)
    if (w > 0.0) {
      const double p = w / total;
      h -= p * std::log2(p);
    }
  return h;
}

struct Node {
  bool leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::unique_ptr<Node> left, right;
  std::vector<double> dist;  // leaf class probabilities
};

struct Candidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  double gain_ratio = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Samples& data, const C45Options& options)
      : data_(data), options_(options), rng_(make_rng(options.seed)) {}

  std::unique_ptr<Node> build(const std::vector<std::size_t>& rows, std::size_t depth) {
    const std::size_t n_classes = data_.label_set.size();
    std::vector<double> class_weights(n_classes, 0.0);
    double total = 0.0;
    bool pure = true;
    for (const std::size_t i : rows) {
      class_weights[data_.y[i]] += data_.weight_of(i);
      total += data_.weight_of(i);
      pure = pure && data_.y[i] == data_.y[rows.front()];
    }

    if (pure || depth >= options_.max_depth) return make_leaf(class_weights, total);

    const auto candidates = enumerate_candidates(rows, class_weights, total);
    if (candidates.empty()) return make_leaf(class_weights, total);

    double mean_gain = 0.0;
    for (const auto& c : candidates) mean_gain += c.gain;
    mean_gain /= static_cast<double>(candidates.size());

    // Best gain ratio among candidates whose gain reaches the mean; exact
    // ratio ties are settled by one seeded draw.
    double best_ratio = -1.0;
    for (const auto& c : candidates)
      if (c.gain >= mean_gain - kTieTolerance)
        best_ratio = std::max(best_ratio, c.gain_ratio);
    std::vector<const Candidate*> tied;
    for (const auto& c : candidates)
      if (c.gain >= mean_gain - kTieTolerance &&
          std::abs(c.gain_ratio - best_ratio) <= kTieTolerance)
        tied.push_back(&c);
    const Candidate& pick =
        tied.size() == 1 ? *tied.front()
                         : *tied[static_cast<std::size_t>(uniform_below(rng_, tied.size()))];

    std::vector<std::size_t> left_rows, right_rows;
    for (const std::size_t i : rows)
      (data_.x[i][pick.feature] <= pick.threshold ? left_rows : right_rows).push_back(i);

    auto node = std::make_unique<Node>();
    node->leaf = false;
    node->feature = pick.feature;
    node->threshold = pick.threshold;
    node->left = build(left_rows, depth + 1);
    node->right = build(right_rows, depth + 1);
    return node;
  }

 private:
  std::unique_ptr<Node> make_leaf(const std::vector<double>& class_weights, double total) {
    auto node = std::make_unique<Node>();
    node->dist.resize(class_weights.size());
    for (std::size_t c = 0; c < class_weights.size(); ++c)
      node->dist[c] = total > 0.0 ? class_weights[c] / total : 0.0;
    return node;
  }

  // Thresholds are midpoints between consecutive distinct values; a split
  // qualifies only if both branches keep at least two rows.
  std::vector<Candidate> enumerate_candidates(const std::vector<std::size_t>& rows,
                                              const std::vector<double>& class_weights,
                                              double total) const {
    const std::size_t n_classes = data_.label_set.size();
    const double h_parent = entropy(class_weights, total);
    std::vector<Candidate> candidates;

    std::vector<std::size_t> order(rows);
    for (std::size_t f = 0; f < FeatureVector::kCount; ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data_.x[a][f] < data_.x[b][f];
      });
      std::vector<double> left_weights(n_classes, 0.0);
      double left_total = 0.0;
      for (std::size_t pos = 1; pos < order.size(); ++pos) {
        const std::size_t prev = order[pos - 1];
        left_weights[data_.y[prev]] += data_.weight_of(prev);
        left_total += data_.weight_of(prev);
        const double lo = data_.x[prev][f];
        const double hi = data_.x[order[pos]][f];
        if (lo == hi) continue;
        if (pos < 2 || order.size() - pos < 2) continue;

        const double right_total = total - left_total;
        std::vector<double> right_weights(n_classes);
        for (std::size_t c = 0; c < n_classes; ++c)
          right_weights[c] = class_weights[c] - left_weights[c];

        const double pl = left_total / total;
        const double pr = right_total / total;
        if (pl <= 0.0 || pr <= 0.0) continue;  // zero-weight branch
        const double gain = h_parent - pl * entropy(left_weights, left_total) -
                            pr * entropy(right_weights, right_total);
        const double split_info = -pl * std::log2(pl) - pr * std::log2(pr);
        if (split_info <= 0.0) continue;
        candidates.push_back({f, (lo + hi) / 2.0, gain, gain / split_info});
      }
    }
    return candidates;
  }

  const Samples& data_;
  C45Options options_;
  std::mt19937_64 rng_;
};

class C45Model final : public Classifier {
 public:
  explicit C45Model(std::vector<std::string> label_set)
      : Classifier(std::move(label_set)) {}

  std::vector<double> score(const FeatureVector& f) const override {
    const Node* node = root_.get();
    while (!node->leaf)
      node = f[node->feature] <= node->threshold ? node->left.get() : node->right.get();
    return node->dist;
  }

  std::string kind() const override { return "c45"; }

  nlohmann::json to_json() const override {
    return {{"kind", "c45"}, {"label_set", label_set_}, {"tree", node_json(*root_)}};
  }

  std::unique_ptr<Node> root_;

 private:
  static nlohmann::json node_json(const Node& node) {
    if (node.leaf) return {{"leaf", true}, {"dist", node.dist}};
    return {{"leaf", false},
            {"feature", node.feature},
            {"threshold", node.threshold},
            {"left", node_json(*node.left)},
            {"right", node_json(*node.right)}};
  }
};

std::unique_ptr<Node> node_from_json(const nlohmann::json& j) {
  auto node = std::make_unique<Node>();
  node->leaf = j.at("leaf").get<bool>();
  if (node->leaf) {
    node->dist = j.at("dist").get<std::vector<double>>();
    return node;
  }
  node->feature = j.at("feature").get<std::size_t>();
  node->threshold = j.at("threshold").get<double>();
  node->left = node_from_json(j.at("left"));
  node->right = node_from_json(j.at("right"));
  return node;
}

}  // namespace

std::unique_ptr<Classifier> train_c45(const Samples& data, const C45Options& options) {
  if (data.size() == 0) throw DegenerateClassError("cannot train a tree on no rows");
  auto model = std::make_unique<C45Model>(data.label_set);
  TreeBuilder builder(data, options);
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  model->root_ = builder.build(rows, 0);
  return model;
}

namespace detail {

std::unique_ptr<Classifier> c45_from_json(const nlohmann::json& j) {
  auto model = std::make_unique<C45Model>(j.at("label_set").get<std::vector<std::string>>());
  model->root_ = node_from_json(j.at("tree"));
  return model;
}

}  // namespace detail
}  // namespace sysgraph
