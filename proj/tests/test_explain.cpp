#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "kgddi/error.hpp"
#include "kgddi/explain/pathway.hpp"
#include "kgddi/graph/knowledge_graph.hpp"
#include "kgddi/graph/subgraph.hpp"
#include "kgddi/model/model.hpp"
#include "kgddi/model/params.hpp"
#include "kgddi/rng.hpp"

using namespace kgddi;
using namespace kgddi::explain;
using graph::EnclosingSubgraph;
using graph::EntityId;
using graph::KnowledgeGraph;
using graph::Triplet;
using model::AttentionMask;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
  std::filesystem::create_directories("test_tmp");
  std::string path = "test_tmp/" + name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Five entities with typed names so display fields are observable; the toy
// subgraph below reuses ids 0..3.
KnowledgeGraph named_kg() {
  std::vector<Triplet> edges = {{0, 0, 2}, {2, 1, 1}, {0, 2, 3}, {3, 0, 1}, {2, 2, 3}};
  return KnowledgeGraph(5, 3, edges, {"drug:a", "drug:b", "gene:g1", "gene:g2", "gene:g3"},
                        {"binds", "expresses", "regulates"});
}

// Hand-built subgraph over the named_kg ids: centers 0 and 1, two gene
// intermediaries, five edges in a fixed order so masks can address them by
// index.
EnclosingSubgraph toy_subgraph() {
  EnclosingSubgraph sg;
  sg.k = 2;
  sg.center_u = 0;
  sg.center_v = 1;
  sg.global_nodes = {0, 1, 2, 3};
  sg.dist_u = {0, 2, 1, 1};
  sg.dist_v = {2, 0, 1, 1};
  sg.local_edges = {{0, 0, 2}, {2, 1, 1}, {0, 2, 3}, {3, 0, 1}, {2, 2, 3}};
  return sg;
}

AttentionMask mask_of(std::vector<double> alphas, const std::vector<int>& keep) {
  AttentionMask m;
  m.pruned.resize(alphas.size(), 1);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (std::count(keep.begin(), keep.end(), static_cast<int>(i)) > 0)
      m.pruned[i] = 0;
    else
      alphas[i] = 0.0;  // the model zeroes pruned scores
  }
  m.alpha = std::move(alphas);
  return m;
}

std::size_t count_substr(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("pathway keeps non-pruned edges and drops isolated non-centers") {
  KnowledgeGraph kg = named_kg();
  EnclosingSubgraph sg = toy_subgraph();
  // only edge 0 survives: drug:a -> gene:g1; gene:g2 loses its last edge
  PathwayGraph p = summarize_pathway(sg, mask_of({0.4, 0.2, 0.3, 0.1, 0.5}, {0}), kg);

  REQUIRE(p.edges.size() == 1);
  CHECK(p.edges[0].source == 0);
  CHECK(p.edges[0].target == 2);
  CHECK(p.edges[0].relation_name == "binds");
  CHECK(p.edges[0].alpha == 0.4);

  REQUIRE(p.nodes.size() == 3);
  CHECK(p.nodes[0].global_id == 0);
  CHECK(p.nodes[0].display_name == "drug:a");
  CHECK(p.nodes[0].entity_type == "drug");
  CHECK(p.nodes[0].is_center);
  CHECK(p.nodes[1].global_id == 1);
  CHECK(p.nodes[1].is_center);
  CHECK(p.nodes[2].global_id == 2);
  CHECK(p.nodes[2].display_name == "gene:g1");
  CHECK(p.nodes[2].entity_type == "gene");
  CHECK_FALSE(p.nodes[2].is_center);
}

TEST_CASE("pathway with every edge pruned is exactly the two centers") {
  PathwayGraph p = summarize_pathway(toy_subgraph(), mask_of({0, 0, 0, 0, 0}, {}), named_kg());
  CHECK(p.edges.empty());
  REQUIRE(p.nodes.size() == 2);
  CHECK(p.nodes[0].global_id == 0);
  CHECK(p.nodes[1].global_id == 1);
  CHECK(p.nodes[0].is_center);
  CHECK(p.nodes[1].is_center);
}

TEST_CASE("pathway with nothing pruned mirrors the subgraph") {
  KnowledgeGraph kg = named_kg();
  EnclosingSubgraph sg = toy_subgraph();
  const std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5};
  PathwayGraph p = summarize_pathway(sg, mask_of(alphas, {0, 1, 2, 3, 4}), kg);

  REQUIRE(p.nodes.size() == sg.num_nodes());
  REQUIRE(p.edges.size() == sg.local_edges.size());
  for (std::size_t i = 0; i < sg.local_edges.size(); ++i) {
    CHECK(p.edges[i].source == sg.global_nodes[sg.local_edges[i].head]);
    CHECK(p.edges[i].target == sg.global_nodes[sg.local_edges[i].tail]);
    CHECK(p.edges[i].relation_name == kg.relation_name(sg.local_edges[i].relation));
    CHECK(p.edges[i].alpha == alphas[i]);
  }
}

TEST_CASE("unnamed graphs fall back to numeric labels") {
  KnowledgeGraph kg(5, 3, {{0, 0, 2}});
  PathwayGraph p = summarize_pathway(toy_subgraph(), mask_of({0.4, 0, 0, 0, 0}, {0}), kg);
  CHECK(p.nodes[0].display_name == "0");
  CHECK(p.nodes[0].entity_type == "");
  CHECK(p.edges[0].relation_name == "0");
}

TEST_CASE("pathway edge set equals the kept mask entries exactly") {
  KnowledgeGraph kg = named_kg();
  EnclosingSubgraph sg = toy_subgraph();
  auto rng = make_rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    AttentionMask m;
    m.alpha.resize(sg.local_edges.size());
    m.pruned.resize(sg.local_edges.size());
    for (std::size_t i = 0; i < m.alpha.size(); ++i) {
      m.pruned[i] = uniform01(rng) < 0.5 ? 1 : 0;
      m.alpha[i] = m.pruned[i] ? 0.0 : 0.05 + 0.9 * uniform01(rng);
    }
    PathwayGraph p = summarize_pathway(sg, m, kg);

    std::vector<PathwayEdge> expect;
    for (std::size_t i = 0; i < sg.local_edges.size(); ++i) {
      if (m.pruned[i]) continue;
      expect.push_back({sg.global_nodes[sg.local_edges[i].head],
                        sg.global_nodes[sg.local_edges[i].tail],
                        kg.relation_name(sg.local_edges[i].relation), m.alpha[i]});
    }
    CHECK(p.edges == expect);

    // closure: every edge endpoint is a listed node, no non-center is isolated
    std::set<EntityId> ids;
    for (const PathwayNode& n : p.nodes) ids.insert(n.global_id);
    for (const PathwayEdge& e : p.edges) {
      CHECK(ids.count(e.source) == 1);
      CHECK(ids.count(e.target) == 1);
    }
    for (const PathwayNode& n : p.nodes) {
      if (n.is_center) continue;
      bool touched = false;
      for (const PathwayEdge& e : p.edges)
        touched = touched || e.source == n.global_id || e.target == n.global_id;
      CHECK(touched);
    }
  }
}

TEST_CASE("raising gamma never adds pathway nodes or edges") {
  KnowledgeGraph kg = named_kg();
  EnclosingSubgraph sg = graph::extract_enclosing_subgraph(kg, 0, 1, 2);
  model::ModelConfig cfg;
  cfg.k = 2;
  cfg.d = 6;
  cfg.B = 2;
  cfg.num_ddi_relations = 1;
  model::ModelParams params = model::init_params(cfg, kg.num_entities(), kg.num_relations() + 1, 5);
  tensor::Tensor h = model::build_node_features(sg, params.entity_embed);

  std::size_t prev_nodes = SIZE_MAX;
  std::size_t prev_edges = SIZE_MAX;
  std::set<std::string> prev_edge_keys;
  for (double gamma : {-1.0, -0.5, 0.0, 0.3, 0.9, 1.0}) {
    AttentionMask m =
        model::compute_attention(sg, h, params.attn_wi, params.attn_wj, params.rel_attn_embed,
                                 gamma);
    PathwayGraph p = summarize_pathway(sg, m, kg);
    CHECK(p.nodes.size() <= prev_nodes);
    CHECK(p.edges.size() <= prev_edges);
    std::set<std::string> keys;
    for (const PathwayEdge& e : p.edges)
      keys.insert(std::to_string(e.source) + ">" + e.relation_name + ">" +
                  std::to_string(e.target));
    if (prev_nodes != SIZE_MAX)
      CHECK(std::includes(prev_edge_keys.begin(), prev_edge_keys.end(), keys.begin(), keys.end()));
    prev_nodes = p.nodes.size();
    prev_edges = p.edges.size();
    prev_edge_keys = std::move(keys);
  }
}

TEST_CASE("pathway rejects a mask sized for a different subgraph") {
  CHECK_THROWS_WITH_AS(summarize_pathway(toy_subgraph(), mask_of({0.5}, {0}), named_kg()),
                       doctest::Contains("mask covers"), Error);
}

TEST_CASE("dot export renders nodes, shades, and widths") {
  KnowledgeGraph kg = named_kg();
  EnclosingSubgraph sg = toy_subgraph();

  SUBCASE("empty pathway still declares both centers") {
    PathwayGraph p = summarize_pathway(sg, mask_of({0, 0, 0, 0, 0}, {}), kg);
    std::string dot = to_dot(p);
    CHECK(dot.rfind("digraph pathway {", 0) == 0);
    CHECK(count_substr(dot, "shape=doublecircle") == 2);
    CHECK(count_substr(dot, "->") == 0);
    CHECK(count_substr(dot, "drug:a") == 1);
    CHECK(count_substr(dot, "drug:b") == 1);
  }

  SUBCASE("alpha near one is near-black at max width") {
    PathwayGraph p = summarize_pathway(sg, mask_of({0.999999, 0, 0, 0, 0}, {0}), kg);
    std::string dot = to_dot(p, {.gamma = 0.0});
    CHECK(dot.find("penwidth=4.000") != std::string::npos);
    CHECK(dot.find("color=\"#000000\"") != std::string::npos);
  }

  SUBCASE("alpha just above the threshold is light and thin") {
    PathwayGraph p = summarize_pathway(sg, mask_of({1e-6, 0, 0, 0, 0}, {0}), kg);
    std::string dot = to_dot(p, {.gamma = 0.0});
    CHECK(dot.find("penwidth=0.500") != std::string::npos);
    CHECK(dot.find("color=\"#d0d0d0\"") != std::string::npos);
  }

  SUBCASE("gamma anchors the ramp") {
    // alpha 0.75 under gamma 0.5 sits exactly halfway up the ramp
    PathwayGraph p = summarize_pathway(sg, mask_of({0.75, 0, 0, 0, 0}, {0}), kg);
    std::string dot = to_dot(p, {.gamma = 0.5});
    CHECK(dot.find("penwidth=2.250") != std::string::npos);
    CHECK(dot.find("color=\"#686868\"") != std::string::npos);
  }

  SUBCASE("negative alphas kept under a negative gamma stay renderable") {
    PathwayGraph p = summarize_pathway(sg, mask_of({-0.5, 0, 0, 0, 0}, {0}), kg);
    std::string dot = to_dot(p, {.gamma = -1.0});
    // t = (alpha + 1) / 2 = 0.25
    CHECK(dot.find("penwidth=1.375") != std::string::npos);
    CHECK(dot.find("color=\"#9c9c9c\"") != std::string::npos);
  }
}

TEST_CASE("dot export merges antiparallel edges on request") {
  KnowledgeGraph kg(3, 1, {{0, 0, 2}, {2, 0, 0}, {1, 0, 2}}, {"drug:a", "drug:b", "gene:g"},
                    {"binds"});
  EnclosingSubgraph sg;
  sg.k = 1;
  sg.center_u = 0;
  sg.center_v = 1;
  sg.global_nodes = {0, 1, 2};
  sg.dist_u = {0, 1, 1};
  sg.dist_v = {1, 0, 1};
  sg.local_edges = {{0, 0, 2}, {2, 0, 0}, {1, 0, 2}};
  PathwayGraph p = summarize_pathway(sg, mask_of({0.3, 0.7, 0.2}, {0, 1, 2}), kg);

  std::string merged = to_dot(p, {.gamma = 0.0, .merge_antiparallel = true});
  // the 0<->2 pair folds into one line at alpha 0.7; 1->2 keeps its arrow
  CHECK(count_substr(merged, "->") == 2);
  CHECK(count_substr(merged, "dir=none") == 1);
  CHECK(merged.find("penwidth=2.950") != std::string::npos);

  std::string plain = to_dot(p);
  CHECK(count_substr(plain, "->") == 3);
  CHECK(count_substr(plain, "dir=none") == 0);
}

TEST_CASE("dot labels escape quotes and backslashes") {
  PathwayGraph p;
  p.nodes.push_back({0, "drug:\"q\\uote\"", "drug", true});
  p.nodes.push_back({1, "drug:b", "drug", true});
  std::string dot = to_dot(p);
  CHECK(dot.find("label=\"drug:\\\"q\\\\uote\\\"\"") != std::string::npos);
}

TEST_CASE("json export is byte-stable with sorted keys and fixed decimals") {
  KnowledgeGraph kg = named_kg();
  EnclosingSubgraph sg = toy_subgraph();
  PathwayGraph p = summarize_pathway(sg, mask_of({0.4, 0.25, 0, 0, 0}, {0, 1}), kg);

  std::string text = to_json_text(p);
  CHECK(text == to_json_text(p));
  CHECK(text.find("\"alpha\": 0.400000") != std::string::npos);
  CHECK(text.find("\"alpha\": 0.250000") != std::string::npos);
  CHECK(text.find("\"is_center\": true") != std::string::npos);
  CHECK(text.find("\"name\": \"gene:g1\"") != std::string::npos);
  // alphabetical key order inside each object
  CHECK(text.find("\"alpha\"") < text.find("\"relation\""));
  CHECK(text.find("\"relation\"") < text.find("\"source\""));
  CHECK(text.find("\"source\"") < text.find("\"target\""));
  CHECK(text.find("\"edges\"") < text.find("\"nodes\""));

  PathwayGraph empty;
  CHECK(to_json_text(empty) == "{\n  \"edges\": [],\n  \"nodes\": []\n}\n");
}

TEST_CASE("json round-trip reproduces the pathway and the bytes") {
  KnowledgeGraph kg = named_kg();
  EnclosingSubgraph sg = toy_subgraph();

  SUBCASE("six-decimal alphas reload equal") {
    PathwayGraph p = summarize_pathway(sg, mask_of({0.25, 0.5, 0, 0, 0.125}, {0, 1, 4}), kg);
    std::filesystem::create_directories("test_tmp");
    export_json(p, "test_tmp/pathway_exact.json");
    PathwayGraph back = load_pathway_json("test_tmp/pathway_exact.json");
    CHECK(back == p);
  }

  SUBCASE("arbitrary alphas reload at file precision") {
    PathwayGraph p =
        summarize_pathway(sg, mask_of({1.0 / 3.0, 2.0 / 7.0, 0, 0, 0}, {0, 1}), kg);
    std::filesystem::create_directories("test_tmp");
    export_json(p, "test_tmp/pathway_rt.json");
    PathwayGraph back = load_pathway_json("test_tmp/pathway_rt.json");
    REQUIRE(back.edges.size() == p.edges.size());
    CHECK(back.nodes == p.nodes);
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
      CHECK(back.edges[i].source == p.edges[i].source);
      CHECK(back.edges[i].target == p.edges[i].target);
      CHECK(back.edges[i].relation_name == p.edges[i].relation_name);
      CHECK(back.edges[i].alpha == doctest::Approx(p.edges[i].alpha).epsilon(1e-6));
    }
    // a second export of the reloaded graph is byte-identical to the file
    export_json(back, "test_tmp/pathway_rt2.json");
    CHECK(slurp("test_tmp/pathway_rt2.json") == slurp("test_tmp/pathway_rt.json"));
  }

  SUBCASE("malformed document names the file") {
    auto path = write_tmp("pathway_bad.json", "{ nodes: oops");
    CHECK_THROWS_WITH_AS(load_pathway_json(path), doctest::Contains("pathway_bad.json"), Error);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_WITH_AS(load_pathway_json("test_tmp/absent.json"), doctest::Contains("cannot open"),
                         Error);
  }
}

TEST_CASE("exports reject unwritable paths") {
  PathwayGraph p;
  CHECK_THROWS_WITH_AS(export_dot(p, "test_tmp/no_such_dir/x.dot"),
                       doctest::Contains("cannot write"), Error);
  CHECK_THROWS_WITH_AS(export_json(p, "test_tmp/no_such_dir/x.json"),
                       doctest::Contains("cannot write"), Error);
}
