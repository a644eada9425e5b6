#include "tgr/io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace tgr {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

TripleLoadResult load_triples(const std::string& path, SymbolTable& entities,
                              SymbolTable& relations) {
  std::ifstream in = open_input(path);
  TripleLoadResult out;
  std::unordered_set<Triple, TripleHash> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    std::size_t tab1 = line.find('\t');
    std::size_t tab2 =
        tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos ||
        line.find('\t', tab2 + 1) != std::string::npos) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected 3 tab-separated fields");
    }
    std::string h = line.substr(0, tab1);
    std::string r = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string t = line.substr(tab2 + 1);
    if (h.empty() || r.empty() || t.empty()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": empty field");
    }
    if (h == t) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": self-link not allowed by the schema");
    }
    Triple triple{entities.intern(h), relations.intern(r), entities.intern(t)};
    if (!seen.insert(triple).second) {
      ++out.duplicates_removed;
      continue;
    }
    out.triples.push_back(triple);
  }
  return out;
}

void write_triples(const std::string& path, const std::vector<Triple>& triples,
                   const SymbolTable& entities, const SymbolTable& relations) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw DataError("cannot write " + path);
  for (const Triple& t : triples) {
    outf << entities.name(t.head) << '\t' << relations.name(t.relation) << '\t'
         << entities.name(t.tail) << '\n';
  }
  if (!outf) throw DataError("write failed: " + path);
}

TextLoadResult load_entity_texts(const std::string& path,
                                 const SymbolTable& entities) {
  std::ifstream in = open_input(path);
  TextLoadResult out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": invalid JSON: " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("text") ||
        !rec["id"].is_string() || !rec["text"].is_string()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected object with string fields `id` and `text`");
    }
    std::string id = rec["id"].get<std::string>();
    EntityId eid = entities.find(id);
    if (eid < 0) {
      out.unknown_ids.push_back(id);
      continue;
    }
    if (!out.texts.emplace(eid, rec["text"].get<std::string>()).second) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": duplicate text record for id `" + id + "`");
    }
  }
  return out;
}

Vector PrecomputedEmbeddings::lookup(const std::string& entity_name) const {
  auto it = row_of.find(entity_name);
  if (it == row_of.end()) {
    throw DataError("no precomputed embedding for entity `" + entity_name +
                    "`");
  }
  return rows.row(it->second).transpose();
}

PrecomputedEmbeddings load_precomputed_embeddings(const std::string& path) {
  std::ifstream in = open_input(path);
  PrecomputedEmbeddings out;
  std::vector<std::vector<double>> values;
  std::vector<std::string> names;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id;
    if (!std::getline(ls, id, '\t') || id.empty()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": missing id");
    }
    std::vector<double> row;
    std::string field;
    while (std::getline(ls, field, '\t')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": bad number `" + field + "`");
      }
    }
    if (row.empty()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": no values");
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": inconsistent vector width");
    }
    if (!out.row_of.emplace(id, names.size()).second) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": duplicate id `" + id + "`");
    }
    names.push_back(id);
    values.push_back(std::move(row));
  }
  out.rows.resize(static_cast<Eigen::Index>(values.size()),
                  static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) out.rows(i, j) = values[i][j];
  }
  return out;
}

}  // namespace tgr
