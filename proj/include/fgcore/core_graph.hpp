#ifndef FGCORE_CORE_GRAPH_HPP
#define FGCORE_CORE_GRAPH_HPP

// Stallings core graphs.
//
// A CoreGraph is a based graph whose edges are oriented and labeled by
// generator indices. Reading a word along a path means following an edge
// forwards for a generator and backwards for its inverse. Once folded (at most
// one edge per label leaving and entering each vertex) the words read along
// closed paths at the basepoint form exactly the subgroup the graph carries.
//
// Everything produced by fold/trim_to_core/from_generators uses the canonical
// numbering: breadth-first from the basepoint (id 0), visiting neighbours by
// label ascending, outgoing before incoming.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fgcore/errors.hpp"
#include "fgcore/random.hpp"
#include "fgcore/union_find.hpp"
#include "fgcore/words.hpp"

namespace fgcore {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

struct Edge {
  VertexId source = 0;
  VertexId target = 0;
  std::uint32_t label = 0;

  friend auto operator<=>(const Edge& a, const Edge& b) {
    return std::tie(a.label, a.source, a.target) <=> std::tie(b.label, b.source, b.target);
  }
  friend bool operator==(const Edge&, const Edge&) = default;
};

class CoreGraph {
 public:
  /// Arbitrary based labeled graph; `folded()` reports whether it is
  /// deterministic and co-deterministic.
  CoreGraph(unsigned alphabet_rank, std::size_t vertex_count, VertexId basepoint, std::vector<Edge> edges)
      : rank_(alphabet_rank), vertex_count_(vertex_count), basepoint_(basepoint), edges_(std::move(edges)) {
    if (rank_ < 1 || rank_ > kMaxAlphabetRank) throw PreconditionError("alphabet rank must be in [1, 26]");
    if (vertex_count_ == 0) throw PreconditionError("graph needs at least one vertex");
    if (basepoint_ >= vertex_count_) throw PreconditionError("basepoint out of range");
    for (const Edge& e : edges_) {
      if (e.source >= vertex_count_ || e.target >= vertex_count_) throw PreconditionError("edge endpoint out of range");
      if (e.label >= rank_) throw PreconditionError("edge label outside alphabet");
    }
    build_tables();
  }

  static CoreGraph trivial(unsigned alphabet_rank) { return CoreGraph(alphabet_rank, 1, 0, {}); }

  unsigned alphabet_rank() const { return rank_; }
  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  VertexId basepoint() const { return basepoint_; }
  std::span<const Edge> edges() const { return edges_; }
  bool folded() const { return folded_; }

  /// Endpoint of the unique edge read by `l` from `v`; folded graphs only.
  VertexId follow(VertexId v, Letter l) const {
    const std::size_t slot = static_cast<std::size_t>(v) * rank_ + l.generator;
    return l.sign > 0 ? out_[slot] : in_[slot];
  }

  /// Loops count twice.
  std::vector<std::size_t> valences() const {
    std::vector<std::size_t> val(vertex_count_, 0);
    for (const Edge& e : edges_) {
      ++val[e.source];
      ++val[e.target];
    }
    return val;
  }

  bool is_connected() const {
    UnionFind uf(vertex_count_);
    for (const Edge& e : edges_) uf.unite(e.source, e.target);
    const auto root = uf.find(basepoint_);
    for (VertexId v = 0; v < vertex_count_; ++v) {
      if (uf.find(v) != root) return false;
    }
    return true;
  }

  /// Structural equality (same numbering, same edge multiset).
  friend bool operator==(const CoreGraph& a, const CoreGraph& b) {
    if (a.rank_ != b.rank_ || a.vertex_count_ != b.vertex_count_ || a.basepoint_ != b.basepoint_) return false;
    auto ea = a.edges_;
    auto eb = b.edges_;
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    return ea == eb;
  }

 private:
  void build_tables() {
    folded_ = true;
    out_.assign(vertex_count_ * rank_, kNoVertex);
    in_.assign(vertex_count_ * rank_, kNoVertex);
    for (const Edge& e : edges_) {
      VertexId& o = out_[static_cast<std::size_t>(e.source) * rank_ + e.label];
      VertexId& i = in_[static_cast<std::size_t>(e.target) * rank_ + e.label];
      if (o != kNoVertex || i != kNoVertex) folded_ = false;
      o = e.target;
      i = e.source;
    }
    if (!folded_) {
      out_.clear();
      in_.clear();
    }
  }

  unsigned rank_;
  std::size_t vertex_count_;
  VertexId basepoint_;
  std::vector<Edge> edges_;
  bool folded_ = false;
  std::vector<VertexId> out_;
  std::vector<VertexId> in_;
};

struct BranchVertex {
  VertexId vertex;
  std::size_t valence;
  friend bool operator==(const BranchVertex&, const BranchVertex&) = default;
};

struct BranchVertexReport {
  std::vector<BranchVertex> vertices;
  std::size_t weighted_count = 0;  // sum of max(0, valence - 2)
  std::size_t simple_count = 0;    // vertices of valence >= 3
  bool all_trivalent = true;
};

struct Relabeling {
  CoreGraph graph;
  std::vector<VertexId> old_of_new;
};

namespace detail {

inline void require_folded(const CoreGraph& g, const char* what) {
  if (!g.folded()) throw PreconditionError(std::string(what) + " requires a folded graph");
}

inline void require_same_rank(const CoreGraph& a, const CoreGraph& b) {
  if (a.alphabet_rank() != b.alphabet_rank()) throw AlphabetMismatch(a.alphabet_rank(), b.alphabet_rank());
}

}  // namespace detail

/// Canonical renumbering of the basepoint component of a folded graph.
inline Relabeling canonical_relabel(const CoreGraph& g) {
  detail::require_folded(g, "canonical numbering");
  const unsigned n = g.alphabet_rank();
  std::vector<VertexId> new_of_old(g.vertex_count(), kNoVertex);
  std::vector<VertexId> old_of_new;
  old_of_new.reserve(g.vertex_count());
  std::deque<VertexId> queue{g.basepoint()};
  new_of_old[g.basepoint()] = 0;
  old_of_new.push_back(g.basepoint());
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (std::uint32_t label = 0; label < n; ++label) {
      for (std::int8_t sign : {std::int8_t{1}, std::int8_t{-1}}) {
        const VertexId w = g.follow(v, Letter{label, sign});
        if (w == kNoVertex || new_of_old[w] != kNoVertex) continue;
        new_of_old[w] = static_cast<VertexId>(old_of_new.size());
        old_of_new.push_back(w);
        queue.push_back(w);
      }
    }
  }
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    if (new_of_old[e.source] == kNoVertex) continue;
    edges.push_back({new_of_old[e.source], new_of_old[e.target], e.label});
  }
  std::sort(edges.begin(), edges.end());
  return {CoreGraph(n, old_of_new.size(), 0, std::move(edges)), std::move(old_of_new)};
}

/// Bouquet of subdivided loops, one per non-identity generator, at vertex 0.
inline CoreGraph wedge_of_loops(std::span<const Word> gens, unsigned alphabet_rank) {
  std::vector<Edge> edges;
  VertexId next = 1;
  for (const Word& w : gens) {
    if (w.alphabet_rank() != alphabet_rank) throw AlphabetMismatch(alphabet_rank, w.alphabet_rank());
    if (w.empty()) continue;
    VertexId prev = 0;
    for (std::size_t i = 0; i < w.length(); ++i) {
      const VertexId cur = (i + 1 == w.length()) ? 0 : next++;
      const Letter l = w[i];
      if (l.sign > 0) {
        edges.push_back({prev, cur, l.generator});
      } else {
        edges.push_back({cur, prev, l.generator});
      }
      prev = cur;
    }
  }
  return CoreGraph(alphabet_rank, next, 0, std::move(edges));
}

/// Folds until deterministic and co-deterministic. The result is the
/// basepoint component in canonical numbering. With `order` set, edges are
/// inserted and pending identifications processed in random order.
inline CoreGraph fold(const CoreGraph& g, Rng* order = nullptr) {
  const unsigned n = g.alphabet_rank();
  const std::size_t keys = 2 * static_cast<std::size_t>(n);
  const std::size_t v_count = g.vertex_count();
  UnionFind uf(v_count);
  // slots[v * keys + 2*label + dir]: some neighbour along that label/direction.
  std::vector<VertexId> slots(v_count * keys, kNoVertex);
  std::vector<std::pair<VertexId, VertexId>> pending;

  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  if (order != nullptr) shuffle_portable(edges, *order);
  auto insert = [&](VertexId v, std::size_t key, VertexId w) {
    VertexId& slot = slots[v * keys + key];
    if (slot == kNoVertex) {
      slot = w;
    } else {
      pending.emplace_back(slot, w);
    }
  };
  for (const Edge& e : edges) {
    insert(e.source, 2 * e.label, e.target);
    insert(e.target, 2 * e.label + 1, e.source);
  }

  while (!pending.empty()) {
    if (order != nullptr) {
      const auto j = static_cast<std::size_t>(uniform_below(*order, pending.size()));
      std::swap(pending[j], pending.back());
    }
    const auto [x, y] = pending.back();
    pending.pop_back();
    const auto [root, absorbed] = uf.unite(x, y);
    if (root == absorbed) continue;
    for (std::size_t key = 0; key < keys; ++key) {
      const VertexId moved = slots[absorbed * keys + key];
      if (moved == kNoVertex) continue;
      VertexId& kept = slots[root * keys + key];
      if (kept == kNoVertex) {
        kept = moved;
      } else {
        pending.emplace_back(kept, moved);
      }
    }
  }

  std::vector<VertexId> compact(v_count, kNoVertex);
  VertexId classes = 0;
  for (VertexId v = 0; v < v_count; ++v) {
    const VertexId r = uf.find(v);
    if (compact[r] == kNoVertex) compact[r] = classes++;
  }
  std::vector<Edge> merged;
  merged.reserve(edges.size());
  for (const Edge& e : edges) merged.push_back({compact[uf.find(e.source)], compact[uf.find(e.target)], e.label});
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  CoreGraph folded(n, classes, compact[uf.find(g.basepoint())], std::move(merged));
  return canonical_relabel(folded).graph;
}

/// Repeatedly deletes non-basepoint vertices of valence <= 1.
inline CoreGraph trim_to_core(const CoreGraph& g) {
  detail::require_folded(g, "trim_to_core");
  auto val = g.valences();
  std::vector<std::vector<std::size_t>> incident(g.vertex_count());
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    incident[edges[i].source].push_back(i);
    if (edges[i].target != edges[i].source) incident[edges[i].target].push_back(i);
  }
  std::vector<bool> vertex_gone(g.vertex_count(), false);
  std::vector<bool> edge_gone(edges.size(), false);
  std::vector<VertexId> stack;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (v != g.basepoint() && val[v] <= 1) stack.push_back(v);
  }
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    if (vertex_gone[v]) continue;
    vertex_gone[v] = true;
    for (std::size_t ei : incident[v]) {
      if (edge_gone[ei]) continue;
      edge_gone[ei] = true;
      const VertexId other = edges[ei].source == v ? edges[ei].target : edges[ei].source;
      --val[v];
      --val[other];
      if (other != g.basepoint() && !vertex_gone[other] && val[other] <= 1) stack.push_back(other);
    }
  }
  std::vector<Edge> kept;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!edge_gone[i]) kept.push_back(edges[i]);
  }
  return canonical_relabel(CoreGraph(g.alphabet_rank(), g.vertex_count(), g.basepoint(), std::move(kept))).graph;
}

/// Core graph of the subgroup generated by `gens`. An empty list gives the
/// trivial subgroup.
inline CoreGraph from_generators(std::span<const Word> gens, unsigned alphabet_rank) {
  return trim_to_core(fold(wedge_of_loops(gens, alphabet_rank)));
}

inline CoreGraph from_generators(std::initializer_list<Word> gens, unsigned alphabet_rank) {
  return from_generators(std::span<const Word>(gens.begin(), gens.size()), alphabet_rank);
}

/// E - V + 1 of a connected graph.
inline long rank(const CoreGraph& g) {
  return static_cast<long>(g.edge_count()) - static_cast<long>(g.vertex_count()) + 1;
}

/// Membership: w reads a closed path at the basepoint.
inline bool contains(const CoreGraph& g, const Word& w) {
  detail::require_folded(g, "membership");
  if (g.alphabet_rank() != w.alphabet_rank()) throw AlphabetMismatch(g.alphabet_rank(), w.alphabet_rank());
  VertexId v = g.basepoint();
  for (const Letter& l : w.letters()) {
    v = g.follow(v, l);
    if (v == kNoVertex) return false;
  }
  return v == g.basepoint();
}

/// Free basis of the carried subgroup: one generator per edge outside a
/// breadth-first spanning tree, read as tree path, edge, tree path back.
inline std::vector<Word> free_basis(const CoreGraph& g) {
  detail::require_folded(g, "free basis");
  const unsigned n = g.alphabet_rank();
  std::vector<std::vector<Letter>> path(g.vertex_count());  // basepoint -> v
  std::vector<bool> seen(g.vertex_count(), false);
  std::vector<bool> tree_edge(g.edge_count(), false);
  std::vector<VertexId> order{g.basepoint()};
  seen[g.basepoint()] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const VertexId v = order[i];
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const Edge& edge = g.edges()[e];
      VertexId w;
      Letter l;
      if (edge.source == v && !seen[edge.target]) {
        w = edge.target;
        l = Letter{edge.label, 1};
      } else if (edge.target == v && !seen[edge.source]) {
        w = edge.source;
        l = Letter{edge.label, -1};
      } else {
        continue;
      }
      seen[w] = true;
      tree_edge[e] = true;
      path[w] = path[v];
      path[w].push_back(l);
      order.push_back(w);
    }
  }
  std::vector<Word> basis;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (tree_edge[e]) continue;
    const Edge& edge = g.edges()[e];
    std::vector<Letter> letters = path[edge.source];
    letters.push_back(Letter{edge.label, 1});
    for (auto it = path[edge.target].rbegin(); it != path[edge.target].rend(); ++it) letters.push_back(it->inverse());
    basis.push_back(Word::reduce(n, letters));
  }
  return basis;
}

inline BranchVertexReport branch_report_from_valences(std::span<const std::size_t> val) {
  BranchVertexReport r;
  for (VertexId v = 0; v < val.size(); ++v) {
    if (val[v] < 3) continue;
    r.vertices.push_back({v, val[v]});
    r.weighted_count += val[v] - 2;
    ++r.simple_count;
    if (val[v] != 3) r.all_trivalent = false;
  }
  return r;
}

inline BranchVertexReport branch_vertices(const CoreGraph& g) {
  const auto val = g.valences();
  return branch_report_from_valences(val);
}

/// Valences after also trimming the basepoint tail, i.e. in the unbased core.
/// Vertices outside the unbased core get valence 0. Ids are those of `g`.
inline std::vector<std::size_t> unbased_valences(const CoreGraph& g) {
  auto val = g.valences();
  std::vector<std::vector<VertexId>> neighbours(g.vertex_count());
  for (const Edge& e : g.edges()) {
    if (e.source == e.target) continue;
    neighbours[e.source].push_back(e.target);
    neighbours[e.target].push_back(e.source);
  }
  std::vector<VertexId> stack;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (val[v] == 1) stack.push_back(v);
  }
  // In a folded core only the basepoint can start at valence 1; the tail is a
  // simple path, so peeling along it needs no edge bookkeeping beyond valence.
  std::vector<bool> gone(g.vertex_count(), false);
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    if (gone[v] || val[v] != 1) continue;
    gone[v] = true;
    val[v] = 0;
    for (VertexId w : neighbours[v]) {
      if (gone[w]) continue;
      if (--val[w] == 1) stack.push_back(w);
      break;
    }
  }
  return val;
}

inline BranchVertexReport unbased_branch_vertices(const CoreGraph& g) {
  const auto val = unbased_valences(g);
  return branch_report_from_valences(val);
}

using CanonicalForm = std::string;

/// Byte encoding of the canonical numbering: rank, vertex count, then for
/// every vertex and label the target of the outgoing edge (or 0xFFFFFFFF).
/// Two based graphs are label-isomorphic iff their encodings are equal.
inline CanonicalForm canonical_form(const CoreGraph& g) {
  const CoreGraph c = canonical_relabel(g).graph;
  CanonicalForm out;
  auto put = [&out](std::uint32_t x) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xFF));
  };
  put(c.alphabet_rank());
  put(static_cast<std::uint32_t>(c.vertex_count()));
  for (VertexId v = 0; v < c.vertex_count(); ++v) {
    for (std::uint32_t label = 0; label < c.alphabet_rank(); ++label) put(c.follow(v, Letter{label, 1}));
  }
  return out;
}

/// Hex rendering of a canonical form, used as a stable subgroup id in reports.
inline std::string canonical_id(const CoreGraph& g) {
  static constexpr char kHex[] = "0123456789abcdef";
  const CanonicalForm form = canonical_form(g);
  std::string hex;
  hex.reserve(form.size() * 2);
  for (char ch : form) {
    const auto b = static_cast<unsigned char>(ch);
    hex.push_back(kHex[b >> 4]);
    hex.push_back(kHex[b & 0xF]);
  }
  return hex;
}

}  // namespace fgcore

#endif  // FGCORE_CORE_GRAPH_HPP
