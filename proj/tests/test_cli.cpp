// End-to-end checks of the installed command line tool. Every test shells out
// to the real binary (path injected by the build as SYSGRAPH_CLI_PATH) with a
// scratch directory for inputs and captured output.
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sysgraph/metrics.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("sysgraph-cli-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct RunResult {
  int exit_code = -1;
  std::string out, err;
};

RunResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out_file = scratch / "cli-stdout.txt";
  const fs::path err_file = scratch / "cli-stderr.txt";
  const std::string cmd = std::string(SYSGRAPH_CLI_PATH) + " " + args + " >'" +
                          out_file.string() + "' 2>'" + err_file.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

const std::string kCustomDict = R"({
  "class": "custom",
  "entries": [
    {"group": "files", "name": "NtA"},
    {"group": "files", "name": "NtB"}
  ]
})";

}  // namespace

TEST_CASE("version and help exit cleanly") {
  TempDir tmp;
  auto v = run_cli("--version", tmp.path);
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("sysgraph 1.0.0") != std::string::npos);

  auto h = run_cli("--help", tmp.path);
  CHECK(h.exit_code == 0);
  for (const char* sub : {"graph", "metrics", "featurize", "evaluate", "rank",
                          "powerlaw", "synth"})
    CHECK(h.out.find(sub) != std::string::npos);

  CHECK(run_cli("frobnicate", tmp.path).exit_code != 0);
}

TEST_CASE("graph subcommand emits the exact edge list") {
  TempDir tmp;
  spit(tmp.path / "sample.trace", "NtA(x)\nNtB()\nNtA()\nNtZ()\n");
  spit(tmp.path / "dict.json", kCustomDict);

  const std::string dict = " --dict-file '" + (tmp.path / "dict.json").string() + "'";
  const std::string trace = "'" + (tmp.path / "sample.trace").string() + "'";

  auto r = run_cli("graph " + trace + dict, tmp.path);
  CHECK(r.exit_code == 0);
  CHECK(r.out == "NtA\tNtB\t1\nNtA\tNtZ\t1\nNtB\tNtA\t1\n");

  auto dot = run_cli("graph " + trace + dict + " --format dot", tmp.path);
  CHECK(dot.exit_code == 0);
  CHECK(dot.out.find("digraph syscalls {") != std::string::npos);
  CHECK(dot.out.find("\"NtA\" -> \"NtB\"") != std::string::npos);

  auto gexf = run_cli("graph " + trace + dict + " --format gexf", tmp.path);
  CHECK(gexf.exit_code == 0);
  CHECK(gexf.out.find("<gexf") != std::string::npos);

  const fs::path out_file = tmp.path / "graph.edges";
  auto to_file = run_cli("graph " + trace + dict + " --out '" + out_file.string() + "'",
                         tmp.path);
  CHECK(to_file.exit_code == 0);
  CHECK(slurp(out_file) == "NtA\tNtB\t1\nNtA\tNtZ\t1\nNtB\tNtA\t1\n");

  SUBCASE("a dictionary is mandatory for traces") {
    auto bare = run_cli("graph " + trace, tmp.path);
    CHECK(bare.exit_code == 2);
    CHECK(bare.err.find("--dict") != std::string::npos);
  }

  SUBCASE("builtin and file dictionaries are mutually exclusive") {
    auto both = run_cli("graph " + trace + dict + " --dict adware", tmp.path);
    CHECK(both.exit_code != 0);
  }

  SUBCASE("strict parsing turns sloppy lines into a parse failure") {
    spit(tmp.path / "broken.trace", "NtA(x)\nNtBroken(a, \"unclosed\nNtB()\n");
    const std::string broken = "'" + (tmp.path / "broken.trace").string() + "'";
    CHECK(run_cli("graph " + broken + dict, tmp.path).exit_code == 0);
    auto strict = run_cli("graph " + broken + dict + " --strict", tmp.path);
    CHECK(strict.exit_code == 1);
    CHECK(strict.err.find("NtBroken") != std::string::npos);
  }
}

TEST_CASE("metrics subcommand reads traces and exported graphs") {
  TempDir tmp;
  spit(tmp.path / "chain.edges", "NtA\tNtB\t2\nNtB\tNtC\t1\n");

  auto r = run_cli("metrics '" + (tmp.path / "chain.edges").string() + "'", tmp.path);
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("sample_id") == "chain");
  CHECK(j.at("nodes") == 3);
  CHECK(j.at("edges") == 2);
  CHECK(j.at("average_distance") == doctest::Approx(4.0 / 3.0));

  auto csv = run_cli("metrics '" + (tmp.path / "chain.edges").string() +
                         "' --format csv --sample-id custom",
                     tmp.path);
  CHECK(csv.exit_code == 0);
  const auto header_end = csv.out.find('\n');
  CHECK(csv.out.substr(0, header_end) == sysgraph::metric_csv_header());
  CHECK(csv.out.substr(header_end + 1, 7) == "custom,");
  CHECK(count_lines(csv.out) == 2);

  SUBCASE("--as overrides extension sniffing") {
    spit(tmp.path / "edges.txt", "NtA\tNtB\t1\n");
    auto forced = run_cli(
        "metrics '" + (tmp.path / "edges.txt").string() + "' --as edge-list",
        tmp.path);
    CHECK(forced.exit_code == 0);
    CHECK(nlohmann::json::parse(forced.out).at("nodes") == 2);
  }

  SUBCASE("a trace that never touches the dictionary is a domain error") {
    spit(tmp.path / "offdict.trace", "NtQ()\nNtR()\n");
    spit(tmp.path / "dict.json", kCustomDict);
    auto bad = run_cli("metrics '" + (tmp.path / "offdict.trace").string() +
                           "' --dict-file '" + (tmp.path / "dict.json").string() + "'",
                       tmp.path);
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("error:") != std::string::npos);
  }

  SUBCASE("unreadable inputs are rejected up front") {
    CHECK(run_cli("metrics '" + (tmp.path / "nope.edges").string() + "'", tmp.path)
              .exit_code != 0);
  }

  SUBCASE("a dictionary file that fails to parse exits 1") {
    spit(tmp.path / "bad.json", "{not json");
    spit(tmp.path / "t.trace", "NtA()\nNtB()\n");
    auto bad = run_cli("metrics '" + (tmp.path / "t.trace").string() +
                           "' --dict-file '" + (tmp.path / "bad.json").string() + "'",
                       tmp.path);
    CHECK(bad.exit_code == 1);
  }
}

TEST_CASE("synth, featurize, evaluate and rank form a working pipeline") {
  TempDir tmp;
  const fs::path corpus = tmp.path / "corpus";

  auto synth = run_cli(
      "synth --benchmark --per-family 2 --out-dir '" + corpus.string() + "'",
      tmp.path);
  REQUIRE(synth.exit_code == 0);
  CHECK(synth.out.find("wrote 8 traces") != std::string::npos);
  REQUIRE(fs::exists(corpus / "manifest.csv"));
  CHECK(count_lines(slurp(corpus / "manifest.csv")) == 9);
  CHECK(fs::exists(corpus / "hubworm-0000.trace"));
  CHECK(fs::exists(corpus / "benign-0001.trace"));

  const fs::path dataset = tmp.path / "dataset.csv";
  auto feat = run_cli("featurize '" + (corpus / "manifest.csv").string() +
                          "' --dict adware --out '" + dataset.string() + "'",
                      tmp.path);
  REQUIRE(feat.exit_code == 0);
  CHECK(count_lines(slurp(dataset)) == 9);

  SUBCASE("featurize output is byte for byte reproducible") {
    const fs::path again = tmp.path / "dataset2.csv";
    auto feat2 = run_cli("featurize '" + (corpus / "manifest.csv").string() +
                             "' --dict adware --jobs 4 --out '" + again.string() + "'",
                         tmp.path);
    REQUIRE(feat2.exit_code == 0);
    CHECK(slurp(again) == slurp(dataset));
  }

  SUBCASE("arff output carries the attribute block") {
    auto arff = run_cli("featurize '" + (corpus / "manifest.csv").string() +
                            "' --dict adware --format arff",
                        tmp.path);
    CHECK(arff.exit_code == 0);
    CHECK(arff.out.find("@RELATION syscall_graph_features") != std::string::npos);
    CHECK(arff.out.find("@DATA") != std::string::npos);
  }

  SUBCASE("evaluate reports the requested classifier") {
    auto ev = run_cli("evaluate '" + dataset.string() +
                          "' --classifier knn --folds 2 --repeats 2",
                      tmp.path);
    REQUIRE(ev.exit_code == 0);
    CHECK(ev.out.find("classifier") != std::string::npos);
    CHECK(ev.out.find("knn") != std::string::npos);

    auto js = run_cli("evaluate '" + dataset.string() +
                          "' --classifier knn --folds 2 --repeats 2 --format json",
                      tmp.path);
    REQUIRE(js.exit_code == 0);
    const auto parsed = nlohmann::json::parse(js.out);
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].at("classifier") == "knn");
    CHECK(parsed[0].at("accuracy").is_number());
    CHECK(parsed[0].at("fold_outcomes").size() == 4);

    CHECK(run_cli("evaluate '" + dataset.string() + "' --classifier bogus",
                  tmp.path)
              .exit_code != 0);
  }

  SUBCASE("rank prints one row per feature") {
    auto rank = run_cli("rank '" + dataset.string() + "'", tmp.path);
    REQUIRE(rank.exit_code == 0);
    CHECK(count_lines(rank.out) == 8);  // header plus seven features
    CHECK(rank.out.find("avg_in_degree_centrality") != std::string::npos);

    auto js = run_cli("rank '" + dataset.string() + "' --format json", tmp.path);
    REQUIRE(js.exit_code == 0);
    const auto parsed = nlohmann::json::parse(js.out);
    CHECK(parsed.at("ranking").size() == 7);
    CHECK(parsed.at("rows") == 8);
  }
}

TEST_CASE("synth honors custom profile files") {
  TempDir tmp;
  spit(tmp.path / "profiles.json", R"([{
    "name": "mini",
    "dictionary_calls": ["NtAlpcConnectPort", "NtClose"],
    "min_length": 30,
    "count": 2
  }])");
  const fs::path corpus = tmp.path / "custom";
  auto r = run_cli("synth --profiles '" + (tmp.path / "profiles.json").string() +
                       "' --out-dir '" + corpus.string() + "'",
                   tmp.path);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(corpus / "mini-0000.trace"));
  CHECK(fs::exists(corpus / "mini-0001.trace"));
  const auto manifest = slurp(corpus / "manifest.csv");
  CHECK(manifest.find("mini-0000,mini-0000.trace,mini") != std::string::npos);

  SUBCASE("the two corpus sources are mutually exclusive") {
    CHECK(run_cli("synth --profiles '" + (tmp.path / "profiles.json").string() +
                      "' --benchmark --out-dir '" + corpus.string() + "'",
                  tmp.path)
              .exit_code != 0);
  }

  SUBCASE("a malformed profile file exits 1") {
    spit(tmp.path / "broken.json", "[{\"name\": \"x\"");
    CHECK(run_cli("synth --profiles '" + (tmp.path / "broken.json").string() +
                      "' --out-dir '" + corpus.string() + "'",
                  tmp.path)
              .exit_code == 1);
  }
}

TEST_CASE("powerlaw subcommand fits a planted degree sequence") {
  TempDir tmp;
  // in-degrees: thirty 1s, fifteen 2s, eight 3s, five 4s, three 5s, two 6s,
  // one 8; sources keep in-degree zero and fall out of the sample
  std::string edges;
  int src = 0, tgt = 0;
  const auto add_block = [&](int copies, int degree) {
    for (int c = 0; c < copies; ++c) {
      const std::string t = "T" + std::to_string(tgt++);
      for (int d = 0; d < degree; ++d)
        edges += "S" + std::to_string(src++) + "\t" + t + "\t1\n";
    }
  };
  add_block(30, 1);
  add_block(15, 2);
  add_block(8, 3);
  add_block(5, 4);
  add_block(3, 5);
  add_block(2, 6);
  add_block(1, 8);
  spit(tmp.path / "planted.edges", edges);
  const std::string input = "'" + (tmp.path / "planted.edges").string() + "'";

  auto r = run_cli("powerlaw " + input, tmp.path);
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("alpha").get<double>() > 1.0);
  CHECK(j.at("x_min").get<std::uint64_t>() >= 1);
  CHECK(j.at("tail_size").get<std::size_t>() >= 10);
  CHECK(j.at("ks_statistic").get<double>() >= 0.0);
  CHECK(j.at("ks_statistic").get<double>() < 1.0);
  CHECK(j.at("p_value").is_null());
  CHECK(j.at("direction") == "in");
  CHECK(j.at("weighted") == false);

  SUBCASE("bootstrap replicates attach a p value") {
    auto b = run_cli("powerlaw " + input + " --bootstrap 150 --seed 5", tmp.path);
    REQUIRE(b.exit_code == 0);
    const auto jb = nlohmann::json::parse(b.out);
    REQUIRE(jb.at("p_value").is_number());
    const double p = jb.at("p_value").get<double>();
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }

  SUBCASE("undersized bootstrap counts are rejected at parse time") {
    CHECK(run_cli("powerlaw " + input + " --bootstrap 50", tmp.path).exit_code != 0);
  }

  SUBCASE("out degrees come from the same graph") {
    auto out_fit = run_cli("powerlaw " + input + " --direction out", tmp.path);
    // every source fired exactly once, so the out-degree sample is all 1s
    CHECK(out_fit.exit_code == 2);
    CHECK(out_fit.err.find("error:") != std::string::npos);
  }
}
