#include <set>

#include "doctest.h"
#include "sysgraph/dictionary.hpp"
#include "sysgraph/errors.hpp"

using namespace sysgraph;

TEST_CASE("built-in dictionaries have the expected shape") {
  const auto adware = builtin_dictionary(MalwareClass::adware);
  const auto trojan = builtin_dictionary(MalwareClass::trojan);
  const auto worm = builtin_dictionary(MalwareClass::worm);

  CHECK(adware.size() == 14);
  CHECK(trojan.size() == 20);
  CHECK(worm.size() == 18);

  const auto group_count = [](const SyscallDictionary& d) {
    std::set<std::string> groups;
    for (const auto& e : d.entries()) groups.insert(e.group);
    return groups.size();
  };
  CHECK(group_count(adware) == 7);
  CHECK(group_count(trojan) == 9);
  CHECK(group_count(worm) == 11);
}

TEST_CASE("lookup is by call name") {
  const auto dict = builtin_dictionary(MalwareClass::adware);
  CHECK(dict.contains("NtAlpcConnectPort"));
  CHECK(dict.contains("NtClose"));
  CHECK_FALSE(dict.contains("NtOpenFile"));
  CHECK_FALSE(dict.contains("ntclose"));  // case matters
}

TEST_CASE("class names round trip, unknown ones raise") {
  for (const auto cls : {MalwareClass::adware, MalwareClass::trojan, MalwareClass::worm,
                         MalwareClass::custom})
    CHECK(malware_class_from_string(to_string(cls)) == cls);
  CHECK_THROWS_AS(malware_class_from_string("spyware"), UnknownClassError);
  CHECK_THROWS_AS(builtin_dictionary(MalwareClass::custom), UnknownClassError);
}

TEST_CASE("duplicate names collapse, empty dictionaries raise") {
  const SyscallDictionary dict(MalwareClass::custom,
                               {{"g1", "NtFoo"}, {"g2", "NtFoo"}, {"g1", "NtBar"}});
  CHECK(dict.size() == 2);
  CHECK(dict.entries()[0].group == "g1");  // first entry wins
  CHECK_THROWS_AS(SyscallDictionary(MalwareClass::custom, {}), EmptyDictionaryError);
}

TEST_CASE("equality ignores entry order") {
  const SyscallDictionary a(MalwareClass::custom, {{"g", "NtFoo"}, {"g", "NtBar"}});
  const SyscallDictionary b(MalwareClass::custom, {{"g", "NtBar"}, {"g", "NtFoo"}});
  const SyscallDictionary c(MalwareClass::custom, {{"g", "NtFoo"}});
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("json round trip") {
  const auto dict = builtin_dictionary(MalwareClass::trojan);
  CHECK(dictionary_from_json(to_json(dict)) == dict);
}

TEST_CASE("json rejects bad shapes and bad classes") {
  CHECK_THROWS_AS(dictionary_from_json(nlohmann::json::parse(R"({"entries": []})")),
                  ParseError);
  CHECK_THROWS_AS(dictionary_from_json(nlohmann::json::parse(
                      R"({"class": "nope", "entries": [{"group": "g", "name": "NtX"}]})")),
                  ParseError);
  CHECK_THROWS_AS(dictionary_from_json(nlohmann::json::parse(
                      R"({"class": "adware", "entries": [{"name": "NtX"}]})")),
                  ParseError);
}

TEST_CASE("golden dictionary files match the built-ins") {
  CHECK(load_dictionary(SYSGRAPH_DATA_DIR "/golden/adware.json") ==
        builtin_dictionary(MalwareClass::adware));
  CHECK(load_dictionary(SYSGRAPH_DATA_DIR "/golden/trojan.json") ==
        builtin_dictionary(MalwareClass::trojan));
  CHECK(load_dictionary(SYSGRAPH_DATA_DIR "/golden/worm.json") ==
        builtin_dictionary(MalwareClass::worm));
}

TEST_CASE("load_dictionary reports missing files") {
  CHECK_THROWS_AS(load_dictionary("/nonexistent/dict.json"), IoError);
}
