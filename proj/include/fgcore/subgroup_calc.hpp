#ifndef FGCORE_SUBGROUP_CALC_HPP
#define FGCORE_SUBGROUP_CALC_HPP

// Intersections (pullback), joins (wedge and fold), the pushout graph T and
// Euler characteristic bookkeeping for pairs of subgroups.

#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "fgcore/core_graph.hpp"

namespace fgcore {

/// Label-matched product of two folded graphs. Vertex (u, v) has id
/// u * |V(K)| + v.
class PullbackGraph {
 public:
  PullbackGraph(const CoreGraph& h, const CoreGraph& k)
      : rank_(h.alphabet_rank()), h_vertices_(h.vertex_count()), k_vertices_(k.vertex_count()) {
    detail::require_same_rank(h, k);
    detail::require_folded(h, "pullback");
    detail::require_folded(k, "pullback");
    basepoint_ = id(h.basepoint(), k.basepoint());
    const auto he = h.edges();
    const auto ke = k.edges();
    std::vector<std::pair<Edge, std::pair<std::size_t, std::size_t>>> tagged;
    for (std::size_t i = 0; i < he.size(); ++i) {
      for (std::size_t j = 0; j < ke.size(); ++j) {
        if (he[i].label != ke[j].label) continue;
        tagged.push_back({{id(he[i].source, ke[j].source), id(he[i].target, ke[j].target), he[i].label}, {i, j}});
      }
    }
    std::sort(tagged.begin(), tagged.end());
    for (const auto& [e, origin] : tagged) {
      edges_.push_back(e);
      edge_origin_.push_back(origin);
    }
  }

  unsigned alphabet_rank() const { return rank_; }
  std::size_t vertex_count() const { return h_vertices_ * k_vertices_; }
  VertexId basepoint() const { return basepoint_; }
  std::span<const Edge> edges() const { return edges_; }
  /// Indices into Γ_H.edges() and Γ_K.edges() of the pair forming edge i.
  std::pair<std::size_t, std::size_t> edge_origin(std::size_t i) const { return edge_origin_[i]; }

  VertexId id(VertexId u, VertexId v) const { return static_cast<VertexId>(u * k_vertices_ + v); }
  VertexId project_h(VertexId p) const { return static_cast<VertexId>(p / k_vertices_); }
  VertexId project_k(VertexId p) const { return static_cast<VertexId>(p % k_vertices_); }

  CoreGraph as_graph() const { return CoreGraph(rank_, vertex_count(), basepoint_, edges_); }

  /// Vertices of the connected component of the basepoint.
  std::vector<VertexId> basepoint_component() const {
    std::vector<std::vector<VertexId>> adj(vertex_count());
    for (const Edge& e : edges_) {
      adj[e.source].push_back(e.target);
      adj[e.target].push_back(e.source);
    }
    std::vector<bool> seen(vertex_count(), false);
    std::vector<VertexId> out{basepoint_};
    seen[basepoint_] = true;
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (VertexId w : adj[out[i]]) {
        if (!seen[w]) {
          seen[w] = true;
          out.push_back(w);
        }
      }
    }
    return out;
  }

 private:
  unsigned rank_;
  std::size_t h_vertices_;
  std::size_t k_vertices_;
  VertexId basepoint_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::pair<std::size_t, std::size_t>> edge_origin_;
};

inline PullbackGraph pullback(const CoreGraph& h, const CoreGraph& k) { return PullbackGraph(h, k); }

/// Core of the basepoint component of the pullback, with the pair of
/// vertices (in Γ_H, Γ_K) each of its vertices sits over.
struct Intersection {
  CoreGraph core;
  std::vector<std::pair<VertexId, VertexId>> over;
};

inline Intersection intersect_detailed(const CoreGraph& h, const CoreGraph& k) {
  const PullbackGraph pb(h, k);
  // canonical_relabel keeps only the basepoint component; trimming then
  // renumbers again, so compose both maps.
  const Relabeling component = canonical_relabel(pb.as_graph());
  const CoreGraph trimmed_raw = trim_to_core(component.graph);
  // Recover the vertex map by reading both graphs from the basepoint in
  // parallel; the core is a subgraph of the component.
  std::vector<VertexId> comp_of_core(trimmed_raw.vertex_count(), kNoVertex);
  comp_of_core[0] = 0;
  std::deque<VertexId> queue{0};
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (std::uint32_t label = 0; label < trimmed_raw.alphabet_rank(); ++label) {
      for (std::int8_t sign : {std::int8_t{1}, std::int8_t{-1}}) {
        const Letter l{label, sign};
        const VertexId w = trimmed_raw.follow(v, l);
        if (w == kNoVertex || comp_of_core[w] != kNoVertex) continue;
        comp_of_core[w] = component.graph.follow(comp_of_core[v], l);
        queue.push_back(w);
      }
    }
  }
  Intersection out{trimmed_raw, {}};
  out.over.reserve(trimmed_raw.vertex_count());
  for (VertexId v = 0; v < trimmed_raw.vertex_count(); ++v) {
    const VertexId p = component.old_of_new[comp_of_core[v]];
    out.over.emplace_back(pb.project_h(p), pb.project_k(p));
  }
  return out;
}

inline CoreGraph intersect(const CoreGraph& h, const CoreGraph& k) { return intersect_detailed(h, k).core; }

inline CoreGraph join(const CoreGraph& h, const CoreGraph& k) {
  detail::require_same_rank(h, k);
  detail::require_folded(h, "join");
  detail::require_folded(k, "join");
  // Disjoint union with K's basepoint glued onto H's.
  const auto offset = static_cast<VertexId>(h.vertex_count());
  auto k_id = [&](VertexId v) -> VertexId {
    if (v == k.basepoint()) return h.basepoint();
    return v < k.basepoint() ? offset + v : offset + v - 1;
  };
  std::vector<Edge> edges(h.edges().begin(), h.edges().end());
  for (const Edge& e : k.edges()) edges.push_back({k_id(e.source), k_id(e.target), e.label});
  const CoreGraph wedge(h.alphabet_rank(), h.vertex_count() + k.vertex_count() - 1, h.basepoint(), std::move(edges));
  return trim_to_core(fold(wedge));
}

/// Pushout of Γ_H <- C -> Γ_K where C is the basepoint component of the
/// pullback: vertices x of Γ_H and y of Γ_K are identified when (x, y) is a
/// vertex of C, and edges when they pair up to an edge of C. The result may
/// have multi-edges and label clashes; it is a counting object and is never
/// folded in place.
struct PushoutGraph {
  unsigned alphabet_rank = 2;
  std::size_t h_vertices = 0;
  /// Class of every vertex of the disjoint union; Γ_K vertex v is at
  /// h_vertices + v.
  std::vector<VertexId> class_of;
  /// Members of each vertex class, ascending.
  std::vector<std::vector<VertexId>> classes;
  /// Members of each edge class; Γ_H edge i is i, Γ_K edge j is |E(Γ_H)| + j.
  std::vector<std::vector<std::size_t>> edge_classes;
  /// One edge per edge class.
  std::vector<Edge> edges;
  VertexId basepoint = 0;

  std::size_t vertex_count() const { return classes.size(); }
  CoreGraph as_graph() const { return CoreGraph(alphabet_rank, classes.size(), basepoint, edges); }
};

inline PushoutGraph pushout_T(const CoreGraph& h, const CoreGraph& k) {
  const PullbackGraph pb(h, k);
  const std::size_t hv = h.vertex_count();
  const std::size_t he = h.edge_count();
  const auto component = pb.basepoint_component();
  std::vector<bool> in_component(pb.vertex_count(), false);
  UnionFind vertex_uf(hv + k.vertex_count());
  for (VertexId p : component) {
    in_component[p] = true;
    vertex_uf.unite(pb.project_h(p), static_cast<VertexId>(hv + pb.project_k(p)));
  }
  UnionFind edge_uf(he + k.edge_count());
  for (std::size_t i = 0; i < pb.edges().size(); ++i) {
    if (!in_component[pb.edges()[i].source]) continue;
    const auto [eh, ek] = pb.edge_origin(i);
    edge_uf.unite(static_cast<std::uint32_t>(eh), static_cast<std::uint32_t>(he + ek));
  }

  PushoutGraph t;
  t.alphabet_rank = h.alphabet_rank();
  t.h_vertices = hv;
  t.class_of.assign(hv + k.vertex_count(), kNoVertex);
  std::vector<VertexId> class_of_root(hv + k.vertex_count(), kNoVertex);
  for (VertexId v = 0; v < t.class_of.size(); ++v) {
    const VertexId r = vertex_uf.find(v);
    if (class_of_root[r] == kNoVertex) {
      class_of_root[r] = static_cast<VertexId>(t.classes.size());
      t.classes.emplace_back();
    }
    t.class_of[v] = class_of_root[r];
    t.classes[class_of_root[r]].push_back(v);
  }

  auto edge_at = [&](std::size_t i) -> Edge {
    if (i < he) {
      const Edge& e = h.edges()[i];
      return {t.class_of[e.source], t.class_of[e.target], e.label};
    }
    const Edge& e = k.edges()[i - he];
    return {t.class_of[hv + e.source], t.class_of[hv + e.target], e.label};
  };
  std::vector<std::size_t> edge_class_of_root(he + k.edge_count(), SIZE_MAX);
  for (std::size_t i = 0; i < he + k.edge_count(); ++i) {
    const auto r = edge_uf.find(static_cast<std::uint32_t>(i));
    if (edge_class_of_root[r] == SIZE_MAX) {
      edge_class_of_root[r] = t.edge_classes.size();
      t.edge_classes.emplace_back();
      t.edges.push_back(edge_at(i));
    }
    t.edge_classes[edge_class_of_root[r]].push_back(i);
  }
  t.basepoint = t.class_of[h.basepoint()];
  return t;
}

struct EulerData {
  /// rank(π₁) - 1 = E - V for a connected graph.
  long chi_bar = 0;
};

/// Reduced Euler characteristic of a connected graph. Trimming basepoint
/// tails removes one vertex per edge, so E - V is computed directly.
inline EulerData reduced_euler(const CoreGraph& g) {
  if (!g.is_connected()) throw PreconditionError("reduced_euler requires a connected graph");
  return {static_cast<long>(g.edge_count()) - static_cast<long>(g.vertex_count())};
}

inline EulerData reduced_euler(const PushoutGraph& t) { return reduced_euler(t.as_graph()); }

/// Number of vertices when the graph covers the bouquet of n circles,
/// otherwise nullopt (infinite index).
inline std::optional<std::size_t> index(const CoreGraph& g) {
  detail::require_folded(g, "index");
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    for (std::uint32_t label = 0; label < g.alphabet_rank(); ++label) {
      if (g.follow(v, Letter{label, 1}) == kNoVertex || g.follow(v, Letter{label, -1}) == kNoVertex) {
        return std::nullopt;
      }
    }
  }
  return g.vertex_count();
}

}  // namespace fgcore

#endif  // FGCORE_SUBGROUP_CALC_HPP
