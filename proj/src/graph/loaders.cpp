#include "kgddi/graph/loaders.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace kgddi::graph {

namespace {

// Splits on tabs after trimming a trailing '\r'. Returns false for lines the
// parsers skip entirely (blank or '#'-comment).
bool split_fields(std::string& line, std::vector<std::string>& fields) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.empty() || line[0] == '#') return false;
  fields.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return true;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::uint32_t parse_label(const std::string& tok, const std::string& path, std::size_t lineno) {
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  require(ec == std::errc() && ptr == tok.data() + tok.size() && !tok.empty(), path, " line ",
          lineno, ": label '", tok, "' is not a non-negative integer");
  return value;
}

std::ifstream open_or_fail(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open ", path);
  return in;
}

}  // namespace

std::vector<Triplet> load_kg_triplets(const std::string& path, Vocab& entities, Vocab& relations) {
  std::ifstream in = open_or_fail(path);
  std::vector<Triplet> triplets;
  std::vector<std::string> fields;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!split_fields(line, fields)) continue;
    require(fields.size() == 3, path, " line ", lineno, ": expected 3 tab-separated fields, got ",
            fields.size());
    require(!fields[0].empty() && !fields[1].empty() && !fields[2].empty(), path, " line ", lineno,
            ": empty field");
    triplets.push_back({entities.get_or_add(fields[0]), relations.get_or_add(fields[1]),
                        entities.get_or_add(fields[2])});
  }
  require(!triplets.empty(), path, ": no triplets");
  return triplets;
}

KnowledgeGraph load_kg(const std::string& path) {
  Vocab entities, relations;
  std::vector<Triplet> triplets = load_kg_triplets(path, entities, relations);
  return KnowledgeGraph(entities.size(), relations.size(), std::move(triplets), entities.names(),
                        relations.names());
}

DDIDataset load_ddi(const std::string& path, TaskMode mode, Vocab& entities) {
  std::ifstream in = open_or_fail(path);
  DDIDataset ds;
  ds.mode = mode;
  std::vector<std::string> fields;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!split_fields(line, fields)) continue;
    require(fields.size() == 3, path, " line ", lineno, ": expected 3 tab-separated fields, got ",
            fields.size());
    DDIPair pair;
    pair.u = entities.get_or_add(fields[0]);
    pair.v = entities.get_or_add(fields[1]);
    require(pair.u != pair.v, path, " line ", lineno, ": self-pair '", fields[0], "'");
    const std::string& labelfield = fields[2];
    if (mode == TaskMode::MultiClass) {
      require(labelfield.find(',') == std::string::npos, path, " line ", lineno,
              ": multi-class rows take exactly one label, got '", labelfield, "'");
      pair.labels.push_back(parse_label(labelfield, path, lineno));
    } else {
      std::size_t start = 0;
      while (start <= labelfield.size()) {
        std::size_t comma = labelfield.find(',', start);
        std::size_t end = comma == std::string::npos ? labelfield.size() : comma;
        pair.labels.push_back(parse_label(labelfield.substr(start, end - start), path, lineno));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      std::sort(pair.labels.begin(), pair.labels.end());
      pair.labels.erase(std::unique(pair.labels.begin(), pair.labels.end()), pair.labels.end());
    }
    for (std::uint32_t l : pair.labels) ds.num_classes = std::max(ds.num_classes, l + 1);
    ds.pairs.push_back(std::move(pair));
  }
  require(!ds.pairs.empty(), path, ": no interaction pairs");
  return ds;
}

FingerprintTable load_fingerprints(const std::string& path, const Vocab& entities) {
  std::ifstream in = open_or_fail(path);
  FingerprintTable table;
  std::vector<std::string> fields;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!split_fields(line, fields)) continue;
    require(fields.size() == 2, path, " line ", lineno, ": expected 2 tab-separated fields, got ",
            fields.size());
    const std::string& bits = fields[1];
    require(!bits.empty(), path, " line ", lineno, ": empty bitstring");
    if (table.width == 0) table.width = bits.size();
    require(bits.size() == table.width, path, " line ", lineno, ": bitstring width ", bits.size(),
            " differs from ", table.width);
    auto id = entities.find(fields[0]);
    if (!id) continue;
    std::vector<double> row(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      require(bits[i] == '0' || bits[i] == '1', path, " line ", lineno,
              ": bitstring may only contain 0/1");
      row[i] = bits[i] == '1' ? 1.0 : 0.0;
    }
    table.rows.emplace(*id, std::move(row));
  }
  return table;
}

void write_id_map_tsv(const std::string& path, const Vocab& vocab) {
  std::ofstream out(path);
  require(out.good(), "cannot write ", path);
  for (std::size_t id = 0; id < vocab.size(); ++id)
    out << id << '\t' << vocab.name(static_cast<std::uint32_t>(id)) << '\n';
  require(out.good(), "write failed for ", path);
}

}  // namespace kgddi::graph
