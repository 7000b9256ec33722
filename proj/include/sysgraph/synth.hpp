#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "sysgraph/trace.hpp"

namespace sysgraph {

// Trace-generation recipe for one behavioral family. Each emitted call is
// chosen in three layers: repeat the previous call with probability
// self_loop_rate; otherwise emit a neighbor-pool call with probability
// noise_rate; otherwise draw a dictionary call with weight proportional to
// 1 + hub_bias * (times that call was already chosen), so larger hub_bias
// concentrates traffic on a few hub calls.
struct FamilyProfile {
  std::string name;
  std::vector<std::string> dictionary_calls;  // should appear in the dictionary
  std::vector<std::string> neighbor_calls;    // background, off-dictionary
  double hub_bias = 0.0;                      // >= 0
  double self_loop_rate = 0.0;                // [0, 1]
  double noise_rate = 0.0;                    // [0, 1]
  std::size_t min_length = 10;
  std::size_t max_length = 10;

  // Throws DomainError on out-of-range rates, min_length < 2,
  // max_length < min_length, overlapping or missing pools.
  void validate() const;
};

// Deterministic in (profile, seed); sample_id defaults to the profile name
// plus the seed.
CallSequence generate_trace(const FamilyProfile& profile, std::uint64_t seed,
                            std::string sample_id = {});

// `count` traces per profile, labeled with the profile name. Per-sample seeds
// derive from (seed, profile index, sample index), so any subset of the
// corpus is reproducible independently of generation order.
struct CorpusPlan {
  FamilyProfile profile;
  std::size_t count = 0;
};
std::vector<LabeledTrace> generate_corpus(const std::vector<CorpusPlan>& plans,
                                          std::uint64_t seed);

FamilyProfile profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FamilyProfile& profile);

// JSON array of profiles, each with a "count". Used by the CLI.
std::vector<CorpusPlan> corpus_plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<CorpusPlan>& plans);

// The committed four-family benchmark (three malware-like families plus a
// benign-like one) over the adware dictionary. Classifiers should separate
// it near-perfectly; used by tests and handy as a demo corpus.
std::vector<CorpusPlan> benchmark_corpus_plan(std::size_t per_family = 100);

}  // namespace sysgraph
