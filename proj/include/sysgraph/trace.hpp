#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sysgraph {

// One recognized system call from a trace listing.
struct SyscallEvent {
  std::size_t index = 0;  // position among the recognized calls, 0-based
  std::string name;       // e.g. "NtCreateFile"
  std::vector<std::string> args;  // raw argument text, trimmed, "..." dropped

  bool operator==(const SyscallEvent&) const = default;
};

struct CallSequence {
  std::string sample_id;
  std::vector<SyscallEvent> events;
  std::size_t skipped_lines = 0;  // headers, module lines, ellipses, noise

  bool operator==(const CallSequence&) const = default;
};

// A trace paired with its ground-truth label (synthetic corpora, manifests).
struct LabeledTrace {
  CallSequence sequence;
  std::string label;
};

struct ParseOptions {
  // When true, a line that looks like a call but cannot be decoded raises
  // MalformedLineError instead of being counted as skipped.
  bool strict = false;
};

// Extracts the system-call sequence from a raw trace listing. A call line is
// an optionally indented `Nt<Name>(<args...>)`; everything else is counted in
// skipped_lines. Throws EmptyTraceError when no call line is found.
CallSequence parse_trace(std::string_view text, std::string sample_id,
                         const ParseOptions& opts = {});
CallSequence parse_trace(std::istream& in, std::string sample_id,
                         const ParseOptions& opts = {});

// Reads the file and parses it; sample_id defaults to the file stem.
// Throws IoError when the file cannot be read.
CallSequence parse_trace_file(const std::filesystem::path& path,
                              std::string sample_id = {},
                              const ParseOptions& opts = {});

// One call line per event. Parsing the result yields the same events.
std::string to_trace_text(const CallSequence& seq);

// `<index>\t<name>\t<arg;arg;...>` per event.
std::string to_canonical_tsv(const CallSequence& seq);

nlohmann::json to_json(const CallSequence& seq);

}  // namespace sysgraph
