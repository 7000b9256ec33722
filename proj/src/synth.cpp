#include "sysgraph/synth.hpp"

#include <algorithm>
#include <cstdio>

#include "sysgraph/errors.hpp"
#include "sysgraph/random.hpp"

namespace sysgraph {

void FamilyProfile::validate() const {
  if (name.empty()) throw DomainError("family profile needs a name");
  const auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(self_loop_rate) || !rate_ok(noise_rate))
    throw DomainError("profile '" + name + "': rates must lie in [0, 1]");
  if (hub_bias < 0.0) throw DomainError("profile '" + name + "': hub_bias must be >= 0");
  if (min_length < 2)
    throw DomainError("profile '" + name + "': min_length must be >= 2");
  if (max_length < min_length)
    throw DomainError("profile '" + name + "': max_length below min_length");
  if (noise_rate > 0.0 && neighbor_calls.empty())
    throw DomainError("profile '" + name + "': noise_rate > 0 needs neighbor calls");
  if (noise_rate < 1.0 && dictionary_calls.empty())
    throw DomainError("profile '" + name + "': dictionary pool is empty");
  for (const auto& call : dictionary_calls)
    if (std::find(neighbor_calls.begin(), neighbor_calls.end(), call) !=
        neighbor_calls.end())
      throw DomainError("profile '" + name + "': '" + call +
                        "' is in both the dictionary and neighbor pools");
}

CallSequence generate_trace(const FamilyProfile& profile, std::uint64_t seed,
                            std::string sample_id) {
  profile.validate();
  auto rng = make_rng(seed);
  const std::size_t length =
      profile.min_length +
      static_cast<std::size_t>(
          uniform_below(rng, profile.max_length - profile.min_length + 1));

  CallSequence seq;
  seq.sample_id =
      sample_id.empty() ? profile.name + "-s" + std::to_string(seed) : std::move(sample_id);
  seq.events.reserve(length);

  std::vector<double> pick_weights(profile.dictionary_calls.size(), 1.0);
  const std::string* prev = nullptr;
  for (std::size_t i = 0; i < length; ++i) {
    const std::string* name = nullptr;
    if (prev != nullptr && uniform01(rng) < profile.self_loop_rate) {
      name = prev;
    } else if (profile.noise_rate > 0.0 && uniform01(rng) < profile.noise_rate) {
      name = &profile.neighbor_calls[uniform_below(rng, profile.neighbor_calls.size())];
    } else {
      const std::size_t j = weighted_pick(pick_weights, rng);
      pick_weights[j] += profile.hub_bias;  // reinforcement: hubs attract traffic
      name = &profile.dictionary_calls[j];
    }
    seq.events.push_back({i, *name, {}});
    prev = name;
  }
  return seq;
}

std::vector<LabeledTrace> generate_corpus(const std::vector<CorpusPlan>& plans,
                                          std::uint64_t seed) {
  std::vector<LabeledTrace> corpus;
  for (std::size_t p = 0; p < plans.size(); ++p) {
    const auto& plan = plans[p];
    plan.profile.validate();
    for (std::size_t s = 0; s < plan.count; ++s) {
      const std::uint64_t stream = (static_cast<std::uint64_t>(p) << 32) | s;
      char suffix[16];
      std::snprintf(suffix, sizeof(suffix), "-%04zu", s);
      corpus.push_back({generate_trace(plan.profile, mix_seed(seed, stream),
                                       plan.profile.name + suffix),
                       plan.profile.name});
    }
  }
  return corpus;
}

FamilyProfile profile_from_json(const nlohmann::json& j) {
  FamilyProfile p;
  try {
    p.name = j.at("name").get<std::string>();
    p.dictionary_calls = j.at("dictionary_calls").get<std::vector<std::string>>();
    p.neighbor_calls = j.value("neighbor_calls", std::vector<std::string>{});
    p.hub_bias = j.value("hub_bias", 0.0);
    p.self_loop_rate = j.value("self_loop_rate", 0.0);
    p.noise_rate = j.value("noise_rate", 0.0);
    p.min_length = j.value("min_length", std::size_t{10});
    p.max_length = j.value("max_length", p.min_length);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad family profile: ") + e.what());
  }
  p.validate();
  return p;
}

nlohmann::json to_json(const FamilyProfile& p) {
  return {{"name", p.name},
          {"dictionary_calls", p.dictionary_calls},
          {"neighbor_calls", p.neighbor_calls},
          {"hub_bias", p.hub_bias},
          {"self_loop_rate", p.self_loop_rate},
          {"noise_rate", p.noise_rate},
          {"min_length", p.min_length},
          {"max_length", p.max_length}};
}

std::vector<CorpusPlan> corpus_plan_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw ParseError("corpus plan must be a non-empty JSON array of profiles");
  std::vector<CorpusPlan> plans;
  for (const auto& item : j) {
    CorpusPlan plan;
    plan.profile = profile_from_json(item);
    try {
      plan.count = item.at("count").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("profile without sample count: ") + e.what());
    }
    if (plan.count == 0) throw ParseError("profile '" + plan.profile.name + "': count is 0");
    plans.push_back(std::move(plan));
  }
  return plans;
}

nlohmann::json to_json(const std::vector<CorpusPlan>& plans) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& plan : plans) {
    auto j = to_json(plan.profile);
    j["count"] = plan.count;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<CorpusPlan> benchmark_corpus_plan(std::size_t per_family) {
  // The full adware dictionary as the shared malicious pool.
  const std::vector<std::string> dict_calls = {
      "NtAlpcAcceptConnectPort", "NtAlpcConnectPort",  "NtAlpcCreatePort",
      "NtAlpcSendWaitReceivePort", "NtCreateIoCompletion", "NtClose",
      "NtFindAtom",              "NtResumeThread",     "NtCreateUserProcess",
      "NtCreateWorkerFactory",   "NtCreateKeyedEvent", "NtReleaseMutant",
      "NtSetTimer",              "NtCreateTimer"};
  const std::vector<std::string> neighbors = {
      "NtOpenFile",           "NtReadFile",
      "NtWriteFile",          "NtSetInformationFile",
      "NtFlushBuffersFile",   "NtOpenKey",
      "NtQueryValueKey",      "NtSetValueKey",
      "NtQueryKey",           "NtOpenProcess",
      "NtAllocateVirtualMemory", "NtFreeVirtualMemory",
      "NtProtectVirtualMemory",  "NtQueryVirtualMemory",
      "NtWaitForSingleObject",   "NtDelayExecution",
      "NtYieldExecution",        "NtQueryInformationToken"};

  const auto family = [&](std::string name, double hub_bias, double self_loop,
                          double noise) {
    FamilyProfile p;
    p.name = std::move(name);
    p.dictionary_calls = dict_calls;
    p.neighbor_calls = neighbors;
    p.hub_bias = hub_bias;
    p.self_loop_rate = self_loop;
    p.noise_rate = noise;
    p.min_length = 400;
    p.max_length = 600;
    return p;
  };

  return {{family("hubworm", 8.0, 0.05, 0.10), per_family},
          {family("meshbot", 0.0, 0.00, 0.35), per_family},
          {family("chainware", 2.0, 0.10, 0.65), per_family},
          {family("benign", 0.3, 0.02, 0.88), per_family}};
}

}  // namespace sysgraph
