#pragma once

#include <memory>

#include "json.hpp"
#include "sysgraph/classifiers.hpp"

// Per-kind model loaders, linked together by classifier_from_json.
namespace sysgraph::detail {

std::unique_ptr<Classifier> naive_bayes_from_json(const nlohmann::json& j);
std::unique_ptr<Classifier> knn_from_json(const nlohmann::json& j);
std::unique_ptr<Classifier> c45_from_json(const nlohmann::json& j);
std::unique_ptr<Classifier> boost_from_json(const nlohmann::json& j);

}  // namespace sysgraph::detail
