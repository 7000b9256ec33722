#include "sysgraph/graph.hpp"

#include <algorithm>
#include <charconv>

#include "sysgraph/errors.hpp"
#include "sysgraph/util.hpp"

namespace sysgraph {

std::optional<std::size_t> SystemCallGraph::find_node(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t SystemCallGraph::multiplicity(std::size_t from, std::size_t to) const {
  const auto it = edge_index_.find({from, to});
  return it == edge_index_.end() ? 0 : it->second;
}

bool SystemCallGraph::operator==(const SystemCallGraph& other) const {
  if (nodes_.size() != other.nodes_.size() || edges_.size() != other.edges_.size())
    return false;
  std::vector<std::size_t> remap(nodes_.size());
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const auto theirs = other.find_node(nodes_[id].name);
    if (!theirs || other.nodes_[*theirs].in_dictionary != nodes_[id].in_dictionary)
      return false;
    remap[id] = *theirs;
  }
  for (const auto& e : edges_)
    if (other.multiplicity(remap[e.from], remap[e.to]) != e.multiplicity) return false;
  return true;
}

std::size_t GraphBuilder::add_node(std::string_view name, bool in_dictionary) {
  const auto it = graph_.index_.find(std::string(name));
  if (it != graph_.index_.end()) {
    graph_.nodes_[it->second].in_dictionary |= in_dictionary;
    return it->second;
  }
  const std::size_t id = graph_.nodes_.size();
  graph_.nodes_.push_back({std::string(name), in_dictionary});
  graph_.index_.emplace(std::string(name), id);
  return id;
}

void GraphBuilder::add_edge(std::string_view from, std::string_view to,
                            std::uint64_t multiplicity) {
  const std::size_t u = add_node(from, false);
  const std::size_t v = add_node(to, false);
  pending_[{u, v}] += multiplicity;
}

SystemCallGraph GraphBuilder::build() {
  const std::size_t n = graph_.nodes_.size();
  graph_.edges_.reserve(pending_.size());
  graph_.out_.assign(n, {});
  graph_.in_.assign(n, {});
  for (const auto& [key, mult] : pending_) {
    graph_.edges_.push_back({key.first, key.second, mult});
    graph_.out_[key.first].push_back(key.second);
    graph_.in_[key.second].push_back(key.first);
    graph_.total_multiplicity_ += mult;
  }
  graph_.edge_index_ = std::move(pending_);
  // The pending map is ordered by (from, to), so out-lists come out ascending;
  // in-lists need their own sort.
  for (auto& preds : graph_.in_) std::sort(preds.begin(), preds.end());
  SystemCallGraph done = std::move(graph_);
  graph_ = {};
  pending_ = {};
  return done;
}

std::vector<std::pair<std::string, std::string>> refine_sequence(
    const CallSequence& seq, const SyscallDictionary& dict) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i + 1 < seq.events.size(); ++i) {
    const std::string& a = seq.events[i].name;
    const std::string& b = seq.events[i + 1].name;
    if (dict.contains(a) || dict.contains(b)) pairs.emplace_back(a, b);
  }
  return pairs;
}

SystemCallGraph build_graph(const CallSequence& seq, const SyscallDictionary& dict) {
  GraphBuilder builder;
  for (const auto& [a, b] : refine_sequence(seq, dict)) {
    builder.add_node(a, dict.contains(a));
    builder.add_node(b, dict.contains(b));
    builder.add_edge(a, b);
  }
  if (builder.empty())
    throw EmptyGraphError("no dictionary call adjacent to any pair in trace '" +
                          seq.sample_id + "'");
  return builder.build();
}

GraphFormat graph_format_from_string(std::string_view name) {
  if (name == "edge-list" || name == "edgelist") return GraphFormat::edge_list;
  if (name == "dot") return GraphFormat::dot;
  if (name == "gexf") return GraphFormat::gexf;
  throw ParseError("unknown graph format: '" + std::string(name) + "'");
}

std::string_view to_string(GraphFormat format) {
  switch (format) {
    case GraphFormat::edge_list: return "edge-list";
    case GraphFormat::dot: return "dot";
    case GraphFormat::gexf: return "gexf";
  }
  return "edge-list";
}

namespace {

// Node ids sorted by name, for order-independent exports.
std::vector<std::size_t> nodes_by_name(const SystemCallGraph& g) {
  std::vector<std::size_t> ids(g.node_count());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return g.node(a).name < g.node(b).name;
  });
  return ids;
}

std::vector<SystemCallGraph::Edge> edges_by_name(const SystemCallGraph& g) {
  auto edges = g.edges();
  std::sort(edges.begin(), edges.end(),
            [&](const SystemCallGraph::Edge& a, const SystemCallGraph::Edge& b) {
              return std::tie(g.node(a.from).name, g.node(a.to).name) <
                     std::tie(g.node(b.from).name, g.node(b.to).name);
            });
  return edges;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string xml_unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const auto rest = s.substr(i);
    if (rest.starts_with("&amp;")) { out += '&'; i += 4; }
    else if (rest.starts_with("&lt;")) { out += '<'; i += 3; }
    else if (rest.starts_with("&gt;")) { out += '>'; i += 3; }
    else if (rest.starts_with("&quot;")) { out += '"'; i += 5; }
    else if (rest.starts_with("&apos;")) { out += '\''; i += 5; }
    else out += s[i];
  }
  return out;
}

std::string quote_dot(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string export_edge_list(const SystemCallGraph& g) {
  std::string out;
  for (const auto& e : edges_by_name(g)) {
    out += g.node(e.from).name;
    out += '\t';
    out += g.node(e.to).name;
    out += '\t';
    out += std::to_string(e.multiplicity);
    out += '\n';
  }
  return out;
}

std::string export_dot(const SystemCallGraph& g) {
  std::string out = "digraph syscalls {\n";
  for (std::size_t id : nodes_by_name(g)) {
    const auto& node = g.node(id);
    out += "  " + quote_dot(node.name) + " [malicious=" +
           (node.in_dictionary ? "true" : "false") + "];\n";
  }
  for (const auto& e : edges_by_name(g))
    out += "  " + quote_dot(g.node(e.from).name) + " -> " + quote_dot(g.node(e.to).name) +
           " [weight=" + std::to_string(e.multiplicity) + "];\n";
  out += "}\n";
  return out;
}

std::string export_gexf(const SystemCallGraph& g) {
  const auto order = nodes_by_name(g);
  std::vector<std::size_t> gexf_id(g.node_count());
  for (std::size_t i = 0; i < order.size(); ++i) gexf_id[order[i]] = i;

  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n"
      "  <graph defaultedgetype=\"directed\">\n"
      "    <attributes class=\"node\">\n"
      "      <attribute id=\"0\" title=\"malicious\" type=\"boolean\"/>\n"
      "    </attributes>\n"
      "    <nodes>\n";
  for (std::size_t id : order) {
    const auto& node = g.node(id);
    out += "      <node id=\"" + std::to_string(gexf_id[id]) + "\" label=\"" +
           xml_escape(node.name) + "\">\n";
    out += "        <attvalues>\n";
    out += std::string("          <attvalue for=\"0\" value=\"") +
           (node.in_dictionary ? "true" : "false") + "\"/>\n";
    out += "        </attvalues>\n";
    out += "      </node>\n";
  }
  out += "    </nodes>\n    <edges>\n";
  std::size_t edge_id = 0;
  for (const auto& e : edges_by_name(g))
    out += "      <edge id=\"" + std::to_string(edge_id++) + "\" source=\"" +
           std::to_string(gexf_id[e.from]) + "\" target=\"" + std::to_string(gexf_id[e.to]) +
           "\" weight=\"" + std::to_string(e.multiplicity) + "\"/>\n";
  out += "    </edges>\n  </graph>\n</gexf>\n";
  return out;
}

SystemCallGraph import_edge_list(std::string_view data, const SyscallDictionary* dict) {
  GraphBuilder builder;
  std::size_t line_no = 0;
  for (std::string_view line : split(data, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw ParseError("edge-list line " + std::to_string(line_no) +
                       ": expected 'from<TAB>to<TAB>multiplicity'");
    std::uint64_t mult = 0;
    const auto [ptr, ec] =
        std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), mult);
    if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size() || mult == 0)
      throw ParseError("edge-list line " + std::to_string(line_no) +
                       ": bad multiplicity '" + std::string(fields[2]) + "'");
    if (fields[0].empty() || fields[1].empty())
      throw ParseError("edge-list line " + std::to_string(line_no) + ": empty node name");
    builder.add_node(fields[0], dict != nullptr && dict->contains(fields[0]));
    builder.add_node(fields[1], dict != nullptr && dict->contains(fields[1]));
    builder.add_edge(fields[0], fields[1], mult);
  }
  if (builder.empty()) throw ParseError("edge-list has no edges");
  return builder.build();
}

// Pulls `name="value"` out of a single tag's text.
std::optional<std::string_view> tag_attr(std::string_view tag, std::string_view name) {
  const std::string needle = std::string(name) + "=\"";
  const auto pos = tag.find(needle);
  if (pos == std::string_view::npos) return std::nullopt;
  const auto start = pos + needle.size();
  const auto end = tag.find('"', start);
  if (end == std::string_view::npos) return std::nullopt;
  return tag.substr(start, end - start);
}

SystemCallGraph import_gexf(std::string_view data) {
  if (data.find("<gexf") == std::string_view::npos)
    throw ParseError("not a gexf document");
  GraphBuilder builder;
  std::unordered_map<std::string, std::string> label_of;  // gexf id -> call name

  std::size_t pos = 0;
  while ((pos = data.find("<node ", pos)) != std::string_view::npos) {
    const auto header_end = data.find('>', pos);
    if (header_end == std::string_view::npos) throw ParseError("gexf: unterminated <node>");
    const auto header = data.substr(pos, header_end - pos + 1);
    const auto id = tag_attr(header, "id");
    const auto label = tag_attr(header, "label");
    if (!id || !label) throw ParseError("gexf: <node> without id or label");

    bool malicious = false;
    std::size_t body_end = header_end + 1;
    if (header.back() != '/' && !header.ends_with("/>")) {
      body_end = data.find("</node>", header_end);
      if (body_end == std::string_view::npos) throw ParseError("gexf: unterminated <node>");
      const auto body = data.substr(header_end, body_end - header_end);
      std::size_t apos = 0;
      while ((apos = body.find("<attvalue ", apos)) != std::string_view::npos) {
        const auto aend = body.find('>', apos);
        if (aend == std::string_view::npos) break;
        const auto atag = body.substr(apos, aend - apos + 1);
        if (tag_attr(atag, "for") == "0")
          malicious = tag_attr(atag, "value") == "true";
        apos = aend + 1;
      }
    }
    const std::string name = xml_unescape(*label);
    builder.add_node(name, malicious);
    label_of.emplace(std::string(*id), name);
    pos = body_end;
  }

  pos = 0;
  while ((pos = data.find("<edge ", pos)) != std::string_view::npos) {
    const auto end = data.find('>', pos);
    if (end == std::string_view::npos) throw ParseError("gexf: unterminated <edge>");
    const auto tag = data.substr(pos, end - pos + 1);
    const auto source = tag_attr(tag, "source");
    const auto target = tag_attr(tag, "target");
    if (!source || !target) throw ParseError("gexf: <edge> without endpoints");
    const auto src = label_of.find(std::string(*source));
    const auto dst = label_of.find(std::string(*target));
    if (src == label_of.end() || dst == label_of.end())
      throw ParseError("gexf: edge references unknown node id");
    std::uint64_t mult = 1;
    if (const auto w = tag_attr(tag, "weight")) {
      const auto [ptr, ec] = std::from_chars(w->data(), w->data() + w->size(), mult);
      if (ec != std::errc{} || ptr != w->data() + w->size() || mult == 0)
        throw ParseError("gexf: bad edge weight '" + std::string(*w) + "'");
    }
    builder.add_edge(src->second, dst->second, mult);
    pos = end + 1;
  }

  if (builder.empty()) throw ParseError("gexf has no nodes");
  return builder.build();
}

}  // namespace

std::string export_graph(const SystemCallGraph& g, GraphFormat format) {
  switch (format) {
    case GraphFormat::edge_list: return export_edge_list(g);
    case GraphFormat::dot: return export_dot(g);
    case GraphFormat::gexf: return export_gexf(g);
  }
  throw ParseError("unknown graph format");
}

SystemCallGraph import_graph(std::string_view data, GraphFormat format,
                             const SyscallDictionary* dict) {
  switch (format) {
    case GraphFormat::edge_list: return import_edge_list(data, dict);
    case GraphFormat::gexf: return import_gexf(data);
    case GraphFormat::dot:
      throw ParseError("dot is an export-only format");
  }
  throw ParseError("unknown graph format");
}

}  // namespace sysgraph
