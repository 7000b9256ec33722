#include <string>

#include "doctest.h"
#include "sysgraph/errors.hpp"
#include "sysgraph/graph.hpp"
#include "sysgraph/trace.hpp"

using namespace sysgraph;

namespace {

SyscallDictionary section_dict() {
  return {MalwareClass::custom, {{"memory", "NtCreateSection"}}};
}

CallSequence seq_of(std::initializer_list<const char*> names) {
  CallSequence seq;
  seq.sample_id = "test";
  std::size_t i = 0;
  for (const auto* name : names) seq.events.push_back({i++, name, {}});
  return seq;
}

}  // namespace

TEST_CASE("figure trace and a one-call dictionary give the three-node path") {
  const auto seq = parse_trace_file(SYSGRAPH_DATA_DIR "/mapping_snippet.trace");
  const auto g = build_graph(seq, section_dict());

  REQUIRE(g.node_count() == 3);
  REQUIRE(g.edge_count() == 2);
  REQUIRE(g.find_node("NtCreateFile"));
  REQUIRE(g.find_node("NtCreateSection"));
  REQUIRE(g.find_node("NtMapViewOfSection"));
  const auto file = *g.find_node("NtCreateFile");
  const auto section = *g.find_node("NtCreateSection");
  const auto map = *g.find_node("NtMapViewOfSection");
  CHECK(g.multiplicity(file, section) == 1);
  CHECK(g.multiplicity(section, map) == 1);
  CHECK(g.multiplicity(map, section) == 0);
  CHECK(g.node(section).in_dictionary);
  CHECK_FALSE(g.node(file).in_dictionary);
  CHECK_FALSE(g.node(map).in_dictionary);
}

TEST_CASE("refine_sequence keeps pairs touching the dictionary") {
  const auto seq = seq_of({"NtA", "NtB", "NtC", "NtB", "NtA"});
  const SyscallDictionary dict(MalwareClass::custom, {{"g", "NtB"}});
  const auto pairs = refine_sequence(seq, dict);
  REQUIRE(pairs.size() == 4);  // every consecutive pair touches NtB
  CHECK(pairs[0] == std::pair<std::string, std::string>{"NtA", "NtB"});
  CHECK(pairs[3] == std::pair<std::string, std::string>{"NtB", "NtA"});

  const SyscallDictionary narrow(MalwareClass::custom, {{"g", "NtC"}});
  const auto fewer = refine_sequence(seq, narrow);
  REQUIRE(fewer.size() == 2);  // NtB->NtC and NtC->NtB only
}

TEST_CASE("repeated pairs accumulate multiplicity, self-loops included") {
  const auto g = build_graph(seq_of({"NtA", "NtA", "NtA", "NtB", "NtA"}),
                             SyscallDictionary(MalwareClass::custom, {{"g", "NtA"}}));
  const auto a = *g.find_node("NtA");
  const auto b = *g.find_node("NtB");
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 3);
  CHECK(g.multiplicity(a, a) == 2);
  CHECK(g.multiplicity(a, b) == 1);
  CHECK(g.multiplicity(b, a) == 1);
  CHECK(g.total_multiplicity() == 4);
}

TEST_CASE("a trace that never touches the dictionary builds no graph") {
  CHECK_THROWS_AS(build_graph(seq_of({"NtA", "NtB"}),
                              SyscallDictionary(MalwareClass::custom, {{"g", "NtZ"}})),
                  EmptyGraphError);
  // a lone dictionary call with no consecutive pair is empty too
  CHECK_THROWS_AS(build_graph(seq_of({"NtZ"}),
                              SyscallDictionary(MalwareClass::custom, {{"g", "NtZ"}})),
                  EmptyGraphError);
}

TEST_CASE("builder keeps dictionary flags sticky and auto-creates endpoints") {
  GraphBuilder b;
  b.add_edge("NtX", "NtY");
  b.add_node("NtY", true);
  b.add_node("NtY", false);  // cannot clear the flag again
  b.add_edge("NtX", "NtY", 4);
  const auto g = b.build();
  CHECK(g.node_count() == 2);
  CHECK(g.multiplicity(*g.find_node("NtX"), *g.find_node("NtY")) == 5);
  CHECK(g.node(*g.find_node("NtY")).in_dictionary);
  CHECK_FALSE(g.node(*g.find_node("NtX")).in_dictionary);
}

TEST_CASE("adjacency lists are distinct, sorted and loop-inclusive") {
  GraphBuilder b;
  b.add_edge("NtC", "NtA");
  b.add_edge("NtC", "NtC");
  b.add_edge("NtC", "NtB");
  b.add_edge("NtC", "NtA", 2);
  const auto g = b.build();
  const auto c = *g.find_node("NtC");
  const auto& out = g.out_adjacency()[c];
  REQUIRE(out.size() == 3);
  CHECK(std::is_sorted(out.begin(), out.end()));
  const auto& in_c = g.in_adjacency()[c];
  REQUIRE(in_c.size() == 1);  // only the self-loop
  CHECK(in_c[0] == c);
}

TEST_CASE("format names parse and print") {
  CHECK(graph_format_from_string("edge-list") == GraphFormat::edge_list);
  CHECK(graph_format_from_string("edgelist") == GraphFormat::edge_list);
  CHECK(graph_format_from_string("dot") == GraphFormat::dot);
  CHECK(graph_format_from_string("gexf") == GraphFormat::gexf);
  CHECK_THROWS_AS(graph_format_from_string("graphml"), ParseError);
  CHECK(to_string(GraphFormat::dot) == "dot");
}

TEST_CASE("edge list export is sorted by name and round trips") {
  const auto dict = SyscallDictionary(MalwareClass::custom, {{"g", "NtB"}});
  const auto g = build_graph(seq_of({"NtC", "NtB", "NtA", "NtB", "NtB"}), dict);
  const auto text = export_graph(g, GraphFormat::edge_list);
  CHECK(text == "NtA\tNtB\t1\nNtB\tNtA\t1\nNtB\tNtB\t1\nNtC\tNtB\t1\n");

  // with the dictionary the import reproduces the graph exactly
  CHECK(import_graph(text, GraphFormat::edge_list, &dict) == g);
  // without it the flags are lost, so equality must fail
  CHECK_FALSE(import_graph(text, GraphFormat::edge_list) == g);
}

TEST_CASE("edge list import validates its lines") {
  CHECK_THROWS_AS(import_graph("", GraphFormat::edge_list), ParseError);
  CHECK_THROWS_AS(import_graph("NtA\tNtB\n", GraphFormat::edge_list), ParseError);
  CHECK_THROWS_AS(import_graph("NtA\tNtB\tzero\n", GraphFormat::edge_list), ParseError);
  CHECK_THROWS_AS(import_graph("NtA\tNtB\t0\n", GraphFormat::edge_list), ParseError);
  try {
    import_graph("NtA\tNtB\t1\nbroken line\n", GraphFormat::edge_list);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("gexf export round trips including flags and escaping") {
  GraphBuilder b;
  b.add_node("Nt<Fancy>&\"Call\"", true);
  b.add_edge("Nt<Fancy>&\"Call\"", "NtPlain", 3);
  b.add_edge("NtPlain", "NtPlain");
  b.add_node("NtIsolated", false);  // gexf keeps nodes without edges
  const auto g = b.build();
  const auto text = export_graph(g, GraphFormat::gexf);
  CHECK(text.find("<?xml") == 0);
  CHECK(text.find("&lt;Fancy&gt;&amp;&quot;") != std::string::npos);
  const auto back = import_graph(text, GraphFormat::gexf);
  CHECK(back == g);
  CHECK(back.node(*back.find_node("Nt<Fancy>&\"Call\"")).in_dictionary);
}

TEST_CASE("dot export lists nodes with flags and weighted edges") {
  const auto dict = SyscallDictionary(MalwareClass::custom, {{"g", "NtB"}});
  const auto g = build_graph(seq_of({"NtA", "NtB", "NtB"}), dict);
  const auto text = export_graph(g, GraphFormat::dot);
  CHECK(text.find("digraph syscalls {") == 0);
  CHECK(text.find("\"NtB\" [malicious=true];") != std::string::npos);
  CHECK(text.find("\"NtA\" [malicious=false];") != std::string::npos);
  CHECK(text.find("\"NtA\" -> \"NtB\" [weight=1];") != std::string::npos);
  CHECK(text.find("\"NtB\" -> \"NtB\" [weight=1];") != std::string::npos);
  CHECK_THROWS_AS(import_graph(text, GraphFormat::dot), ParseError);
}

TEST_CASE("graph equality is name-keyed, not id-keyed") {
  GraphBuilder b1, b2;
  b1.add_edge("NtA", "NtB");
  b1.add_edge("NtC", "NtA");
  b2.add_edge("NtC", "NtA");  // same structure, different insertion order
  b2.add_edge("NtA", "NtB");
  CHECK(b1.build() == b2.build());
}
