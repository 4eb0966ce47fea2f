#ifndef FGCORE_SERIALIZE_HPP
#define FGCORE_SERIALIZE_HPP

// JSON forms. Graphs are written in canonical numbering:
//   {"n": 2, "vertices": 2, "basepoint": 0, "edges": [[source, target, label], ...]}
// Complex numbers are [re, im] pairs.

#include <string>
#include <vector>

#include <json.hpp>

#include "fgcore/branch_matrix.hpp"
#include "fgcore/hyperbolic.hpp"

namespace fgcore {

using Json = nlohmann::json;

inline Json to_json(const CoreGraph& g) {
  const CoreGraph c = g.folded() ? canonical_relabel(g).graph : g;
  Json edges = Json::array();
  for (const Edge& e : c.edges()) edges.push_back({e.source, e.target, e.label});
  return {{"n", c.alphabet_rank()}, {"vertices", c.vertex_count()}, {"basepoint", c.basepoint()}, {"edges", edges}};
}

inline CoreGraph graph_from_json(const Json& j) {
  try {
    std::vector<Edge> edges;
    for (const Json& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw ParseError("edge must be [source, target, label]");
      edges.push_back({e[0].get<VertexId>(), e[1].get<VertexId>(), e[2].get<std::uint32_t>()});
    }
    return CoreGraph(j.at("n").get<unsigned>(), j.at("vertices").get<std::size_t>(), j.at("basepoint").get<VertexId>(),
                     std::move(edges));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("graph JSON: ") + e.what());
  }
}

inline Json to_json(std::span<const Word> words) {
  Json out = Json::array();
  for (const Word& w : words) out.push_back(w.str());
  return out;
}

inline std::vector<Word> words_from_json(const Json& j, unsigned alphabet_rank) {
  std::vector<Word> out;
  for (const Json& w : j) out.push_back(parse_word(w.get<std::string>(), alphabet_rank));
  return out;
}

inline Json to_json(const PushoutGraph& t) {
  Json edges = Json::array();
  for (const Edge& e : t.edges) edges.push_back({e.source, e.target, e.label});
  return {{"n", t.alphabet_rank},
          {"vertices", t.vertex_count()},
          {"basepoint", t.basepoint},
          {"edges", edges},
          {"h_vertices", t.h_vertices},
          {"vertex_classes", t.classes},
          {"edge_classes", t.edge_classes},
          {"chi_bar", reduced_euler(t).chi_bar}};
}

inline Json to_json(const HalfInteger& h) { return h.value(); }

inline Json to_json(const RankBounds& b) {
  return {{"kent", to_json(b.kent_bound)}, {"refined", to_json(b.refined_bound)}, {"integral", b.integral_bound}};
}

inline Json to_json(const BranchMatrix& m) {
  const BlockDecomposition d = block_decompose(m);
  Json rows = Json::array();
  for (const BranchVertex& v : m.rows) rows.push_back({v.vertex, v.valence});
  Json cols = Json::array();
  for (const BranchVertex& v : m.cols) cols.push_back({v.vertex, v.valence});
  Json ones = Json::array();
  for (const auto& [i, j] : m.ones) ones.push_back({i, j});
  Json blocks = Json::array();
  for (const Block& b : d.blocks) blocks.push_back({{"rows", b.rows}, {"cols", b.cols}});
  Json out = {{"rows", rows},
              {"cols", cols},
              {"ones", ones},
              {"trivalent", m.trivalent},
              {"bound_applicable", m.bound_applicable()},
              {"h_rank", m.h_rank},
              {"k_rank", m.k_rank},
              {"intersection_rank", m.intersection_rank},
              {"l", d.l},
              {"p", d.p},
              {"q", d.q},
              {"blocks", blocks}};
  out["bounds"] = to_json(rank_bounds(m.h_rank, m.k_rank, d));
  return out;
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json to_json(const PointH3& p) { return Json::array({p.x, p.y, p.t}); }

inline Json to_json(const Isometry& m) {
  const Classification c = classify(m);
  return {{"a", to_json(m.a())},
          {"b", to_json(m.b())},
          {"c", to_json(m.c())},
          {"d", to_json(m.d())},
          {"class", to_string(c.kind)},
          {"translation_length", c.translation_length},
          {"rotation_angle", c.rotation_angle}};
}

inline Isometry isometry_from_json(const Json& j) {
  try {
    return Isometry(complex_from_json(j.at("a")), complex_from_json(j.at("b")), complex_from_json(j.at("c")),
                    complex_from_json(j.at("d")));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("isometry JSON: ") + e.what());
  }
}

inline Json to_json(const Circle& c) { return {{"center", to_json(c.center)}, {"radius", c.radius}}; }

inline Circle circle_from_json(const Json& j) {
  return {complex_from_json(j.at("center")), j.at("radius").get<double>()};
}

inline Json to_json(const SchottkyConfig& cfg) {
  Json gens = Json::array();
  Json source = Json::array();
  Json target = Json::array();
  for (unsigned j = 0; j < cfg.k; ++j) {
    gens.push_back(to_json(cfg.generators[j]));
    source.push_back(to_json(cfg.source[j]));
    target.push_back(to_json(cfg.target[j]));
  }
  return {{"k", cfg.k},
          {"seed", cfg.seed},
          {"generators", gens},
          {"source_circles", source},
          {"target_circles", target},
          {"twists", cfg.twist}};
}

inline SchottkyConfig schottky_from_json(const Json& j) {
  try {
    SchottkyConfig cfg;
    cfg.k = j.at("k").get<unsigned>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    for (const Json& g : j.at("generators")) cfg.generators.push_back(isometry_from_json(g));
    for (const Json& c : j.at("source_circles")) cfg.source.push_back(circle_from_json(c));
    for (const Json& c : j.at("target_circles")) cfg.target.push_back(circle_from_json(c));
    cfg.twist = j.at("twists").get<std::vector<double>>();
    if (cfg.generators.size() != cfg.k || cfg.source.size() != cfg.k || cfg.target.size() != cfg.k ||
        cfg.twist.size() != cfg.k) {
      throw ParseError("Schottky JSON: list lengths differ from k");
    }
    return cfg;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("Schottky JSON: ") + e.what());
  }
}

inline Json to_json(const GPEstimate& e) {
  Json words = Json::array();
  for (std::size_t i = 0; i < e.words.size(); ++i) {
    words.push_back({{"word", e.words[i].str()}, {"displacement", e.displacements[i]}});
  }
  return {{"point", to_json(e.point)},
          {"lambda", e.lambda},
          {"word_length_bound", e.word_length_bound},
          {"words", words},
          {"roots", to_json(std::span<const Word>(e.roots))},
          {"rank_estimate", e.rank_estimate}};
}

/// 64-bit FNV-1a, used for config hashes and report digests.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = kHex[x & 0xF];
  return s;
}

}  // namespace fgcore

#endif  // FGCORE_SERIALIZE_HPP
