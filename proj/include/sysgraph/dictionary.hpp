#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sysgraph {

enum class MalwareClass { adware, trojan, worm, custom };

std::string_view to_string(MalwareClass cls);
// Throws UnknownClassError for anything but "adware", "trojan", "worm", "custom".
MalwareClass malware_class_from_string(std::string_view name);

struct DictionaryEntry {
  std::string group;  // functionality group, e.g. "Local procedure call"
  std::string name;   // system call, e.g. "NtAlpcConnectPort"

  bool operator==(const DictionaryEntry&) const = default;
};

// The set of system calls considered characteristic of a malware class.
// Only calls listed here (as source or target) produce graph edges.
class SyscallDictionary {
 public:
  // Deduplicates by call name (first entry wins). Throws EmptyDictionaryError
  // when no entries remain.
  SyscallDictionary(MalwareClass cls, std::vector<DictionaryEntry> entries);

  MalwareClass malware_class() const { return class_; }
  const std::vector<DictionaryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(std::string_view call_name) const;

  // Same class and same entry set, order-insensitive.
  bool operator==(const SyscallDictionary& other) const;

 private:
  MalwareClass class_;
  std::vector<DictionaryEntry> entries_;  // original order
  std::vector<std::string> sorted_names_;
};

// The built-in per-class dictionaries. Throws UnknownClassError for custom.
SyscallDictionary builtin_dictionary(MalwareClass cls);

// JSON form: {"class": "...", "entries": [{"group": "...", "name": "..."}]}.
SyscallDictionary dictionary_from_json(const nlohmann::json& j);
SyscallDictionary load_dictionary(const std::filesystem::path& path);
nlohmann::json to_json(const SyscallDictionary& dict);

}  // namespace sysgraph
