#include "sysgraph/dictionary.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "sysgraph/errors.hpp"

namespace sysgraph {

std::string_view to_string(MalwareClass cls) {
  switch (cls) {
    case MalwareClass::adware: return "adware";
    case MalwareClass::trojan: return "trojan";
    case MalwareClass::worm: return "worm";
    case MalwareClass::custom: return "custom";
  }
  return "custom";
}

MalwareClass malware_class_from_string(std::string_view name) {
  if (name == "adware") return MalwareClass::adware;
  if (name == "trojan") return MalwareClass::trojan;
  if (name == "worm") return MalwareClass::worm;
  if (name == "custom") return MalwareClass::custom;
  throw UnknownClassError("unknown malware class: '" + std::string(name) + "'");
}

SyscallDictionary::SyscallDictionary(MalwareClass cls,
                                     std::vector<DictionaryEntry> entries)
    : class_(cls) {
  std::unordered_set<std::string> seen;
  for (auto& e : entries)
    if (seen.insert(e.name).second) entries_.push_back(std::move(e));
  if (entries_.empty()) throw EmptyDictionaryError("dictionary has no entries");
  sorted_names_.reserve(entries_.size());
  for (const auto& e : entries_) sorted_names_.push_back(e.name);
  std::sort(sorted_names_.begin(), sorted_names_.end());
}

bool SyscallDictionary::contains(std::string_view call_name) const {
  return std::binary_search(sorted_names_.begin(), sorted_names_.end(), call_name,
                            [](std::string_view a, std::string_view b) { return a < b; });
}

bool SyscallDictionary::operator==(const SyscallDictionary& other) const {
  if (class_ != other.class_ || entries_.size() != other.entries_.size()) return false;
  auto sorted_entries = [](const SyscallDictionary& d) {
    auto v = d.entries_;
    std::sort(v.begin(), v.end(), [](const DictionaryEntry& a, const DictionaryEntry& b) {
      return std::tie(a.name, a.group) < std::tie(b.name, b.group);
    });
    return v;
  };
  return sorted_entries(*this) == sorted_entries(other);
}

namespace {

struct GroupSpec {
  const char* group;
  std::initializer_list<const char*> names;
};

std::vector<DictionaryEntry> expand(std::initializer_list<GroupSpec> groups) {
  std::vector<DictionaryEntry> entries;
  for (const auto& g : groups)
    for (const char* n : g.names) entries.push_back({g.group, n});
  return entries;
}

}  // namespace

SyscallDictionary builtin_dictionary(MalwareClass cls) {
  switch (cls) {
    case MalwareClass::adware:
      return {cls, expand({
                 {"Local procedure call",
                  {"NtAlpcAcceptConnectPort", "NtAlpcConnectPort", "NtAlpcCreatePort",
                   "NtAlpcSendWaitReceivePort"}},
                 {"File & general I/O", {"NtCreateIoCompletion"}},
                 {"Object", {"NtClose"}},
                 {"Atoms", {"NtFindAtom"}},
                 {"Processes & thread",
                  {"NtResumeThread", "NtCreateUserProcess", "NtCreateWorkerFactory"}},
                 {"Synchronization", {"NtCreateKeyedEvent", "NtReleaseMutant"}},
                 {"Timers & system time", {"NtSetTimer", "NtCreateTimer"}},
             })};
    case MalwareClass::trojan:
      return {cls, expand({
                 {"Processor & bus", {"NtFlushInstructionCache"}},
                 {"Local procedure call",
                  {"NtConnectPort", "NtRequestWaitReplyPort", "NtAlpcConnectPort",
                   "NtAlpcSendWaitReceivePort"}},
                 {"Memory", {"NtMapViewOfSection"}},
                 {"File & general I/O",
                  {"NtCreateFile", "NtQueryInformationFile", "NtCreateIoCompletion"}},
                 {"Object", {"NtClose"}},
                 {"Atoms", {"NtAddAtom"}},
                 {"Processes & thread",
                  {"NtCreateThread", "NtResumeThread", "NtCreateProcessEx",
                   "NtQuerySystemInformation", "NtCreateWorkerFactory",
                   "NtQueryInformationProcess"}},
                 {"Synchronization", {"NtCreateKeyedEvent", "NtCreateMutant"}},
                 {"Timers & system time", {"NtCreateTimer"}},
             })};
    case MalwareClass::worm:
      return {cls, expand({
                 {"Processor & bus", {"NtFlushInstructionCache"}},
                 {"Local procedure call",
                  {"NtAlpcCreateSecurityContext", "NtAlpcSetInformation"}},
                 {"Memory", {"NtMapViewOfSection"}},
                 {"Registry", {"NtEnumerateKey", "NtEnumerateValueKey"}},
                 {"Miscellaneous", {"NtQuerySystemInformation"}},
                 {"File & general I/O", {"NtCreateFile", "NtDeviceIoControlFile"}},
                 {"Object", {"NtClose"}},
                 {"Atoms", {"NtAddAtom"}},
                 {"Processes & thread",
                  {"NtCreateThread", "NtResumeThread", "NtCreateProcessEx",
                   "NtQueryInformationProcess"}},
                 {"Synchronization", {"NtReleaseMutant"}},
                 {"Timers & system time", {"NtSetTimer", "NtQueryPerformanceCounter"}},
             })};
    case MalwareClass::custom:
      break;
  }
  throw UnknownClassError("no built-in dictionary for class 'custom'");
}

SyscallDictionary dictionary_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("class") || !j.contains("entries"))
    throw ParseError("dictionary JSON must have 'class' and 'entries'");
  MalwareClass cls;
  try {
    cls = malware_class_from_string(j.at("class").get<std::string>());
  } catch (const UnknownClassError& e) {
    throw ParseError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad dictionary 'class' field: ") + e.what());
  }
  std::vector<DictionaryEntry> entries;
  try {
    for (const auto& item : j.at("entries"))
      entries.push_back({item.at("group").get<std::string>(),
                         item.at("name").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad dictionary entry: ") + e.what());
  }
  return {cls, std::move(entries)};
}

SyscallDictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dictionary file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid dictionary JSON in " + path.string() + ": " + e.what());
  }
  return dictionary_from_json(j);
}

nlohmann::json to_json(const SyscallDictionary& dict) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : dict.entries())
    entries.push_back({{"group", e.group}, {"name", e.name}});
  return {{"class", std::string(to_string(dict.malware_class()))},
          {"entries", std::move(entries)}};
}

}  // namespace sysgraph
