#include "sysgraph/trace.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "sysgraph/errors.hpp"
#include "sysgraph/util.hpp"

namespace sysgraph {
namespace {

enum class LineKind { other, call, malformed };

bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// A call line is `Nt<Alnum+>(` after optional indentation, with a matching
// close paren. Double quotes hide parens and commas; anything after the
// matching ')' (status codes, timing) is ignored.
LineKind decode_line(std::string_view line, std::string& name,
                     std::vector<std::string>& args) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (line.size() - i < 4 || line[i] != 'N' || line[i + 1] != 't') return LineKind::other;
  std::size_t j = i + 2;
  while (j < line.size() && is_name_char(line[j])) ++j;
  if (j == i + 2 || j >= line.size() || line[j] != '(') return LineKind::other;
  name.assign(line.substr(i, j - i));

  args.clear();
  std::size_t arg_start = j + 1;
  int depth = 1;
  bool quoted = false;
  for (std::size_t k = j + 1; k < line.size(); ++k) {
    const char c = line[k];
    if (c == '"') {
      quoted = !quoted;
      continue;
    }
    if (quoted) continue;
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth == 0) {
        args.emplace_back(trim(line.substr(arg_start, k - arg_start)));
        std::erase_if(args, [](const std::string& a) { return a.empty() || a == "..."; });
        return LineKind::call;
      }
    } else if (c == ',' && depth == 1) {
      args.emplace_back(trim(line.substr(arg_start, k - arg_start)));
      arg_start = k + 1;
    }
  }
  return LineKind::malformed;  // ran out of line before the paren closed
}

}  // namespace

CallSequence parse_trace(std::string_view text, std::string sample_id,
                         const ParseOptions& opts) {
  CallSequence seq;
  seq.sample_id = std::move(sample_id);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::string name;
  std::vector<std::string> args;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    ++line_no;
    if (trim(line).empty()) {
      ++seq.skipped_lines;
      continue;
    }
    switch (decode_line(line, name, args)) {
      case LineKind::call:
        seq.events.push_back({seq.events.size(), name, args});
        break;
      case LineKind::malformed:
        if (opts.strict)
          throw MalformedLineError("line " + std::to_string(line_no) +
                                   ": unterminated call '" + name + "'");
        ++seq.skipped_lines;
        break;
      case LineKind::other:
        ++seq.skipped_lines;
        break;
    }
  }
  if (seq.events.empty())
    throw EmptyTraceError("no system call lines in trace '" + seq.sample_id + "'");
  return seq;
}

CallSequence parse_trace(std::istream& in, std::string sample_id,
                         const ParseOptions& opts) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str(), std::move(sample_id), opts);
}

CallSequence parse_trace_file(const std::filesystem::path& path,
                              std::string sample_id, const ParseOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file: " + path.string());
  if (sample_id.empty()) sample_id = path.stem().string();
  return parse_trace(in, std::move(sample_id), opts);
}

std::string to_trace_text(const CallSequence& seq) {
  std::string out;
  for (const auto& ev : seq.events) {
    out += ev.name;
    out += '(';
    for (std::size_t i = 0; i < ev.args.size(); ++i) {
      if (i) out += ", ";
      out += ev.args[i];
    }
    out += ")\n";
  }
  return out;
}

std::string to_canonical_tsv(const CallSequence& seq) {
  std::string out;
  for (const auto& ev : seq.events) {
    out += std::to_string(ev.index);
    out += '\t';
    out += ev.name;
    out += '\t';
    for (std::size_t i = 0; i < ev.args.size(); ++i) {
      if (i) out += ';';
      out += ev.args[i];
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const CallSequence& seq) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& ev : seq.events)
    events.push_back({{"index", ev.index}, {"name", ev.name}, {"args", ev.args}});
  return {{"sample_id", seq.sample_id},
          {"skipped_lines", seq.skipped_lines},
          {"events", std::move(events)}};
}

}  // namespace sysgraph
