#include "kgddi/explain/pathway.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace kgddi::explain {

namespace {

std::string entity_label(const graph::KnowledgeGraph& kg, graph::EntityId e) {
  return kg.has_names() ? kg.entity_name(e) : std::to_string(e);
}

std::string relation_label(const graph::KnowledgeGraph& kg, graph::RelationId r) {
  return kg.relation_names().empty() ? std::to_string(r) : kg.relation_name(r);
}

std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\\' || c == '"') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  return out;
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

void write_or_fail(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write ", path);
  out << text;
  out.flush();
  require(out.good(), "write failed for ", path);
}

}  // namespace

PathwayGraph summarize_pathway(const graph::EnclosingSubgraph& sg, const model::AttentionMask& mask,
                               const graph::KnowledgeGraph& kg) {
  require(mask.alpha.size() == sg.local_edges.size() && mask.pruned.size() == sg.local_edges.size(),
          "pathway: mask covers ", mask.alpha.size(), " edges, subgraph has ",
          sg.local_edges.size());
  std::vector<std::uint32_t> incident(sg.num_nodes(), 0);
  PathwayGraph out;
  for (std::size_t i = 0; i < sg.local_edges.size(); ++i) {
    if (mask.pruned[i]) continue;
    const graph::LocalEdge& e = sg.local_edges[i];
    ++incident[e.head];
    ++incident[e.tail];
    out.edges.push_back({sg.global_nodes[e.head], sg.global_nodes[e.tail],
                         relation_label(kg, e.relation), mask.alpha[i]});
  }
  for (std::size_t i = 0; i < sg.num_nodes(); ++i) {
    // local 0 and 1 are the centers; they stay even with every edge pruned
    const bool center = i < 2;
    if (!center && incident[i] == 0) continue;
    const graph::EntityId gid = sg.global_nodes[i];
    out.nodes.push_back({gid, entity_label(kg, gid), kg.entity_type(gid), center});
  }
  return out;
}

std::string to_dot(const PathwayGraph& pathway, const DotStyle& style) {
  std::ostringstream out;
  out << "digraph pathway {\n";
  for (const PathwayNode& n : pathway.nodes) {
    out << "  n" << n.global_id << " [label=\"" << dot_escape(n.display_name) << "\", shape="
        << (n.is_center ? "doublecircle" : "ellipse") << "];\n";
  }
  const double span = 1.0 - style.gamma;
  std::vector<char> consumed(pathway.edges.size(), 0);
  for (std::size_t i = 0; i < pathway.edges.size(); ++i) {
    if (consumed[i]) continue;
    const PathwayEdge& e = pathway.edges[i];
    double alpha = e.alpha;
    bool merged = false;
    if (style.merge_antiparallel) {
      for (std::size_t j = i + 1; j < pathway.edges.size(); ++j) {
        const PathwayEdge& r = pathway.edges[j];
        if (consumed[j] || r.source != e.target || r.target != e.source ||
            r.relation_name != e.relation_name)
          continue;
        alpha = std::max(alpha, r.alpha);
        consumed[j] = 1;
        merged = true;
      }
    }
    double t = span > 0.0 ? (alpha - style.gamma) / span : 1.0;
    t = std::clamp(t, 0.0, 1.0);
    // light gray just above the threshold, black at alpha = 1
    const int gray = static_cast<int>(std::lround(208.0 * (1.0 - t)));
    char color[8];
    std::snprintf(color, sizeof color, "#%02x%02x%02x", gray, gray, gray);
    char penwidth[32];
    std::snprintf(penwidth, sizeof penwidth, "%.3f", 0.5 + 3.5 * t);
    out << "  n" << e.source << " -> n" << e.target << " [label=\""
        << dot_escape(e.relation_name) << "\", penwidth=" << penwidth << ", color=\"" << color
        << "\"";
    if (merged) out << ", dir=none";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

void export_dot(const PathwayGraph& pathway, const std::string& path, const DotStyle& style) {
  write_or_fail(path, to_dot(pathway, style));
}

std::string to_json_text(const PathwayGraph& pathway) {
  std::ostringstream out;
  out << "{\n  \"edges\": [";
  for (std::size_t i = 0; i < pathway.edges.size(); ++i) {
    const PathwayEdge& e = pathway.edges[i];
    out << (i == 0 ? "\n" : ",\n");
    out << "    {\n"
        << "      \"alpha\": " << fixed6(e.alpha) << ",\n"
        << "      \"relation\": \"" << json_escape(e.relation_name) << "\",\n"
        << "      \"source\": " << e.source << ",\n"
        << "      \"target\": " << e.target << "\n"
        << "    }";
  }
  out << (pathway.edges.empty() ? "],\n" : "\n  ],\n");
  out << "  \"nodes\": [";
  for (std::size_t i = 0; i < pathway.nodes.size(); ++i) {
    const PathwayNode& n = pathway.nodes[i];
    out << (i == 0 ? "\n" : ",\n");
    out << "    {\n"
        << "      \"id\": " << n.global_id << ",\n"
        << "      \"is_center\": " << (n.is_center ? "true" : "false") << ",\n"
        << "      \"name\": \"" << json_escape(n.display_name) << "\",\n"
        << "      \"type\": \"" << json_escape(n.entity_type) << "\"\n"
        << "    }";
  }
  out << (pathway.nodes.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return out.str();
}

void export_json(const PathwayGraph& pathway, const std::string& path) {
  write_or_fail(path, to_json_text(pathway));
}

PathwayGraph load_pathway_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open ", path);
  PathwayGraph p;
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    require(doc.is_object(), path, ": expected a top-level object");
    for (const auto& n : doc.at("nodes")) {
      PathwayNode node;
      node.global_id = n.at("id").get<graph::EntityId>();
      node.display_name = n.at("name").get<std::string>();
      node.entity_type = n.at("type").get<std::string>();
      node.is_center = n.at("is_center").get<bool>();
      p.nodes.push_back(std::move(node));
    }
    for (const auto& e : doc.at("edges")) {
      PathwayEdge edge;
      edge.source = e.at("source").get<graph::EntityId>();
      edge.target = e.at("target").get<graph::EntityId>();
      edge.relation_name = e.at("relation").get<std::string>();
      edge.alpha = e.at("alpha").get<double>();
      p.edges.push_back(std::move(edge));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(path, ": ", e.what());
  }
  return p;
}

}  // namespace kgddi::explain
