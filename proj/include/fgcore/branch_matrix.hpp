#ifndef FGCORE_BRANCH_MATRIX_HPP
#define FGCORE_BRANCH_MATRIX_HPP

// The 0/1 matrix over pairs of branch vertices of Γ_H and Γ_K that marks
// branch vertices of Γ_{H∩K}, its block structure, and the rank bounds on
// H ∨ K derived from it.
//
// Branch vertices are taken in the unbased cores (basepoint tails trimmed).
// Valence-4 vertices are kept as single rows/columns; such instances are
// flagged non-trivalent and the trivalent identities are not claimed for them.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fgcore/subgroup_calc.hpp"

namespace fgcore {

struct BranchMatrix {
  long h_rank = 0;
  long k_rank = 0;
  std::vector<BranchVertex> rows;  // branch vertices of Γ_H
  std::vector<BranchVertex> cols;  // branch vertices of Γ_K
  std::vector<std::pair<std::size_t, std::size_t>> ones;  // sorted (row, col)
  /// Every branch vertex of the unbased cores of Γ_H, Γ_K and Γ_{H∩K} has
  /// valence exactly 3.
  bool trivalent = false;
  std::size_t intersection_weighted_branch = 0;
  std::size_t intersection_simple_branch = 0;
  long intersection_rank = 0;

  /// The block bound needs Γ_{H∩K} to carry branch vertices; with
  /// rank(H∩K) <= 1 the matrix is zero and the bound h + k - 1 fails for
  /// free products.
  bool bound_applicable() const { return trivalent && intersection_rank >= 2; }

  std::size_t row_count() const { return rows.size(); }
  std::size_t col_count() const { return cols.size(); }
  bool at(std::size_t i, std::size_t j) const {
    return std::binary_search(ones.begin(), ones.end(), std::pair{i, j});
  }
};

inline BranchMatrix build_matrix(const CoreGraph& h, const CoreGraph& k) {
  BranchMatrix m;
  m.h_rank = rank(h);
  m.k_rank = rank(k);
  if (m.h_rank < 2 || m.k_rank < 2) {
    throw PreconditionError("branch matrix requires branch vertices: both ranks must be >= 2");
  }
  const BranchVertexReport hr = unbased_branch_vertices(h);
  const BranchVertexReport kr = unbased_branch_vertices(k);
  m.rows = hr.vertices;
  m.cols = kr.vertices;

  const Intersection inter = intersect_detailed(h, k);
  m.intersection_rank = rank(inter.core);
  const BranchVertexReport ir = unbased_branch_vertices(inter.core);
  m.intersection_weighted_branch = ir.weighted_count;
  m.intersection_simple_branch = ir.simple_count;
  m.trivalent = hr.all_trivalent && kr.all_trivalent && ir.all_trivalent;

  auto row_of = [&](VertexId x) {
    auto it = std::find_if(m.rows.begin(), m.rows.end(), [x](const BranchVertex& b) { return b.vertex == x; });
    if (it == m.rows.end()) throw std::logic_error("intersection branch vertex over a non-branch vertex of H");
    return static_cast<std::size_t>(it - m.rows.begin());
  };
  auto col_of = [&](VertexId y) {
    auto it = std::find_if(m.cols.begin(), m.cols.end(), [y](const BranchVertex& b) { return b.vertex == y; });
    if (it == m.cols.end()) throw std::logic_error("intersection branch vertex over a non-branch vertex of K");
    return static_cast<std::size_t>(it - m.cols.begin());
  };
  for (const BranchVertex& b : ir.vertices) {
    const auto [x, y] = inter.over[b.vertex];
    m.ones.emplace_back(row_of(x), col_of(y));
  }
  std::sort(m.ones.begin(), m.ones.end());
  return m;
}

struct Block {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};

struct BlockDecomposition {
  std::size_t l = 0;  // blocks
  std::size_t p = 0;  // all-zero rows
  std::size_t q = 0;  // all-zero columns
  std::vector<Block> blocks;
};

/// Blocks are the connected components of the bipartite graph on rows and
/// columns with an edge at every one.
inline BlockDecomposition block_decompose(std::size_t row_count, std::size_t col_count,
                                          std::span<const std::pair<std::size_t, std::size_t>> ones) {
  UnionFind uf(row_count + col_count);
  std::vector<bool> row_hit(row_count, false);
  std::vector<bool> col_hit(col_count, false);
  for (const auto& [i, j] : ones) {
    uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(row_count + j));
    row_hit[i] = true;
    col_hit[j] = true;
  }
  BlockDecomposition d;
  std::vector<std::size_t> block_of_root(row_count + col_count, SIZE_MAX);
  auto block_for = [&](std::uint32_t node) -> Block& {
    const auto r = uf.find(node);
    if (block_of_root[r] == SIZE_MAX) {
      block_of_root[r] = d.blocks.size();
      d.blocks.emplace_back();
    }
    return d.blocks[block_of_root[r]];
  };
  for (std::size_t i = 0; i < row_count; ++i) {
    if (row_hit[i]) {
      block_for(static_cast<std::uint32_t>(i)).rows.push_back(i);
    } else {
      ++d.p;
    }
  }
  for (std::size_t j = 0; j < col_count; ++j) {
    if (col_hit[j]) {
      block_for(static_cast<std::uint32_t>(row_count + j)).cols.push_back(j);
    } else {
      ++d.q;
    }
  }
  d.l = d.blocks.size();
  return d;
}

inline BlockDecomposition block_decompose(const BranchMatrix& m) {
  return block_decompose(m.row_count(), m.col_count(), m.ones);
}

/// Exact value in (1/2)Z.
struct HalfInteger {
  long twice = 0;
  double value() const { return static_cast<double>(twice) / 2.0; }
  long floor() const { return twice >= 0 ? twice / 2 : -((-twice + 1) / 2); }
  friend auto operator<=>(const HalfInteger&, const HalfInteger&) = default;
};

struct RankBounds {
  HalfInteger kent_bound;     // 1 + (l + p + q) / 2
  HalfInteger refined_bound;  // min(h + q/2, k + p/2)
  long integral_bound = 0;    // floor(min(kent, refined))
};

inline RankBounds rank_bounds(long h, long k, const BlockDecomposition& d) {
  if (h < 2 || k < 2) throw PreconditionError("rank bounds need h, k >= 2");
  RankBounds b;
  b.kent_bound = {2 + static_cast<long>(d.l + d.p + d.q)};
  b.refined_bound = std::min(HalfInteger{2 * h + static_cast<long>(d.q)}, HalfInteger{2 * k + static_cast<long>(d.p)});
  b.integral_bound = std::min(b.kent_bound, b.refined_bound).floor();
  return b;
}

struct RankThreeCertificate {
  std::size_t l = 0;
  std::size_t p = 0;
  std::size_t q = 0;
  std::size_t ones = 0;
  bool trivalent = false;
  bool ones_at_least_four = false;
  RankBounds bounds;
  long intersection_rank = 0;
  long join_rank = 0;
  bool pass = false;  // join_rank <= 3
};

/// Rank-3 case: for rank(H) = rank(K) = 3 and rank(H∩K) >= 3, records the
/// matrix data and checks rank(H∨K) <= 3 directly.
inline RankThreeCertificate rank_three_certificate(const CoreGraph& h, const CoreGraph& k) {
  if (rank(h) != 3 || rank(k) != 3) throw PreconditionError("certificate requires rank(H) = rank(K) = 3");
  const BranchMatrix m = build_matrix(h, k);
  if (m.intersection_rank < 3) throw PreconditionError("certificate requires rank(H ∩ K) >= 3");
  const BlockDecomposition d = block_decompose(m);
  RankThreeCertificate c;
  c.l = d.l;
  c.p = d.p;
  c.q = d.q;
  c.ones = m.ones.size();
  c.trivalent = m.trivalent;
  c.ones_at_least_four = c.ones >= 4;
  c.bounds = rank_bounds(3, 3, d);
  c.intersection_rank = m.intersection_rank;
  c.join_rank = rank(join(h, k));
  c.pass = c.join_rank <= 3;
  return c;
}

}  // namespace fgcore

#endif  // FGCORE_BRANCH_MATRIX_HPP
