#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sysgraph/errors.hpp"
#include "sysgraph/trace.hpp"

using namespace sysgraph;

namespace {
const char* kExampleTrace = SYSGRAPH_DATA_DIR "/mapping_snippet.trace";
}

TEST_CASE("figure trace parses into six calls") {
  const auto seq = parse_trace_file(kExampleTrace);
  CHECK(seq.sample_id == "mapping_snippet");
  REQUIRE(seq.events.size() == 6);
  CHECK(seq.events[0].name == "NtCreateFile");
  CHECK(seq.events[1].name == "NtCreateFile");
  CHECK(seq.events[2].name == "NtCreateSection");
  CHECK(seq.events[3].name == "NtMapViewOfSection");
  CHECK(seq.events[4].name == "NtWriteFile");
  CHECK(seq.events[5].name == "NtQueryInformationFile");
  // headers, the module line, the path line and five ellipsis lines
  CHECK(seq.skipped_lines == 8);
  for (std::size_t i = 0; i < seq.events.size(); ++i) CHECK(seq.events[i].index == i);
}

TEST_CASE("argument lists survive nesting, quoting and ellipsis pruning") {
  const auto seq = parse_trace_file(kExampleTrace);
  REQUIRE(seq.events[3].args.size() == 3);
  CHECK(seq.events[3].args[1] == "ProcessHandle = GetCurrentProcess()");
  CHECK(seq.events[0].args[2] == "ObjectAttributes = \"Sample.exe\"");
  // `IoStatusBlock = ...` is a real argument; only a bare `...` is dropped
  REQUIRE(seq.events[5].args.size() == 3);
  CHECK(seq.events[5].args[1] == "IoStatusBlock = ...");
}

TEST_CASE("parse_trace accepts embedded and windows line endings") {
  const auto unix_seq = parse_trace("NtFoo(a)\nNtBar()\n", "s");
  const auto dos_seq = parse_trace("NtFoo(a)\r\nNtBar()\r\n", "s");
  CHECK(unix_seq.events == dos_seq.events);
  REQUIRE(dos_seq.events.size() == 2);
  CHECK(dos_seq.events[0].args == std::vector<std::string>{"a"});
  CHECK(dos_seq.events[1].args.empty());
}

TEST_CASE("indented calls count, lookalike lines do not") {
  const auto seq = parse_trace("  NtAlpha(x)\nntlower(x)\nNt(x)\nNtBeta no parens\n", "s");
  REQUIRE(seq.events.size() == 1);
  CHECK(seq.events[0].name == "NtAlpha");
  CHECK(seq.skipped_lines == 3);
}

TEST_CASE("a trace without any call line is an error") {
  CHECK_THROWS_AS(parse_trace("Process 1 - x.exe\n...\n", "empty"), EmptyTraceError);
  CHECK_THROWS_AS(parse_trace("", "empty"), EmptyTraceError);
}

TEST_CASE("unterminated calls: skipped by default, fatal in strict mode") {
  const std::string text = "NtGood(a, b)\nNtBroken(a, \"unclosed\nNtAlso(c)\n";
  const auto lenient = parse_trace(text, "s");
  CHECK(lenient.events.size() == 2);
  CHECK(lenient.skipped_lines == 1);
  CHECK_THROWS_AS(parse_trace(text, "s", {.strict = true}), MalformedLineError);
  try {
    parse_trace(text, "s", {.strict = true});
  } catch (const MalformedLineError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("NtBroken") != std::string::npos);
  }
}

TEST_CASE("trace text round trip preserves the event list") {
  const auto seq = parse_trace_file(kExampleTrace);
  const auto again = parse_trace(to_trace_text(seq), seq.sample_id);
  CHECK(again.events == seq.events);
  CHECK(again.skipped_lines == 0);
}

TEST_CASE("canonical tsv lists index, name and joined args") {
  const auto seq = parse_trace("NtFoo(a, b)\nNtBar()\n", "s");
  CHECK(to_canonical_tsv(seq) == "0\tNtFoo\ta;b\n1\tNtBar\t\n");
}

TEST_CASE("trace json carries ids and events") {
  const auto seq = parse_trace("NtFoo(a)\n", "sample-7");
  const auto j = to_json(seq);
  CHECK(j["sample_id"] == "sample-7");
  CHECK(j["events"].size() == 1);
  CHECK(j["events"][0]["name"] == "NtFoo");
}

TEST_CASE("parse_trace_file reports unreadable paths") {
  CHECK_THROWS_AS(parse_trace_file("/nonexistent/trace.txt"), IoError);
}

TEST_CASE("istream overload matches the string overload") {
  std::ifstream file(kExampleTrace);
  REQUIRE(file.good());
  const auto from_stream = parse_trace(file, "mapping_snippet");
  CHECK(from_stream == parse_trace_file(kExampleTrace));
}
