#ifndef FGCORE_TESTS_ORACLES_HPP
#define FGCORE_TESTS_ORACLES_HPP

// Slow, independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <tuple>
#include <vector>

#include "fgcore/core_graph.hpp"
#include "fgcore/hyperbolic.hpp"
#include "fgcore/random.hpp"

namespace fgcore::oracle {

/// One fold step at a time: find two distinct edges with the same label that
/// share a source or share a target, identify their other endpoints, drop the
/// duplicate edge, repeat. The clash to fold is picked uniformly at random.
/// Returns a graph with the same vertex ids as the input (merged vertices
/// point to their representative), restricted later by canonical_relabel.
inline CoreGraph naive_fold(const CoreGraph& g, Rng& rng) {
  std::vector<VertexId> rep(g.vertex_count());
  for (VertexId v = 0; v < rep.size(); ++v) rep[v] = v;
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  while (true) {
    std::vector<std::pair<std::size_t, std::size_t>> clashes;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      for (std::size_t j = i + 1; j < edges.size(); ++j) {
        if (edges[i].label != edges[j].label) continue;
        if (edges[i].source == edges[j].source || edges[i].target == edges[j].target) clashes.emplace_back(i, j);
      }
    }
    if (clashes.empty()) break;
    const auto [i, j] = clashes[uniform_below(rng, clashes.size())];
    const Edge a = edges[i];
    const Edge b = edges[j];
    VertexId keep;
    VertexId drop;
    if (a.source == b.source) {
      keep = std::min(a.target, b.target);
      drop = std::max(a.target, b.target);
    } else {
      keep = std::min(a.source, b.source);
      drop = std::max(a.source, b.source);
    }
    if (keep != drop) {
      for (Edge& e : edges) {
        if (e.source == drop) e.source = keep;
        if (e.target == drop) e.target = keep;
      }
      for (VertexId& r : rep) {
        if (r == drop) r = keep;
      }
    }
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(j));
  }
  return CoreGraph(g.alphabet_rank(), g.vertex_count(), rep[g.basepoint()], std::move(edges));
}

/// Random connected based graph with `vertices` vertices: a random spanning
/// tree plus `extra` random edges, random labels and orientations.
inline CoreGraph random_connected_graph(Rng& rng, unsigned n, std::size_t vertices, std::size_t extra) {
  std::vector<Edge> edges;
  auto random_edge = [&](VertexId u, VertexId v) {
    const auto label = static_cast<std::uint32_t>(uniform_below(rng, n));
    if (uniform_below(rng, 2) == 0) {
      edges.push_back({u, v, label});
    } else {
      edges.push_back({v, u, label});
    }
  };
  for (VertexId v = 1; v < vertices; ++v) random_edge(static_cast<VertexId>(uniform_below(rng, v)), v);
  for (std::size_t i = 0; i < extra; ++i) {
    random_edge(static_cast<VertexId>(uniform_below(rng, vertices)), static_cast<VertexId>(uniform_below(rng, vertices)));
  }
  return CoreGraph(n, vertices, static_cast<VertexId>(uniform_below(rng, vertices)), std::move(edges));
}

/// Reduced product of `factors` random elements of gens ∪ gens^-1.
inline Word random_product(Rng& rng, std::span<const Word> gens, unsigned n, std::size_t factors) {
  Word w(n);
  for (std::size_t i = 0; i < factors; ++i) {
    const Word& g = gens[uniform_below(rng, gens.size())];
    w = concat(w, uniform_below(rng, 2) == 0 ? g : g.inverse());
  }
  return w;
}

/// Random closed path at the basepoint of a folded graph: a non-backtracking
/// walk of up to `steps` edges followed by the breadth-first tree path home.
inline Word random_loop_word(const CoreGraph& g, Rng& rng, std::size_t steps) {
  const unsigned n = g.alphabet_rank();
  // Tree path from every vertex back to the basepoint.
  std::vector<Letter> parent_letter(g.vertex_count());
  std::vector<VertexId> parent(g.vertex_count(), kNoVertex);
  std::vector<VertexId> order{g.basepoint()};
  parent[g.basepoint()] = g.basepoint();
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (unsigned c = 0; c < 2 * n; ++c) {
      const Letter l = Letter::from_code(c);
      const VertexId w = g.follow(order[i], l);
      if (w == kNoVertex || parent[w] != kNoVertex) continue;
      parent[w] = order[i];
      parent_letter[w] = l.inverse();  // reads w -> parent
      order.push_back(w);
    }
  }
  std::vector<Letter> letters;
  VertexId v = g.basepoint();
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<Letter> options;
    for (unsigned c = 0; c < 2 * n; ++c) {
      const Letter l = Letter::from_code(c);
      if (!letters.empty() && letters.back().cancels(l)) continue;
      if (g.follow(v, l) != kNoVertex) options.push_back(l);
    }
    if (options.empty()) break;
    const Letter l = options[uniform_below(rng, options.size())];
    letters.push_back(l);
    v = g.follow(v, l);
  }
  while (v != g.basepoint()) {
    letters.push_back(parent_letter[v]);
    v = parent[v];
  }
  return Word::reduce(n, letters);
}

/// Exponent sum of a word over all generators.
inline long exponent_sum(const Word& w) {
  long s = 0;
  for (const Letter& l : w.letters()) s += l.sign;
  return s;
}

/// Hyperbolic length of the geodesic between two upper half-space points,
/// by adaptive Simpson quadrature of the length element along the geodesic
/// (a vertical ray or a semicircle orthogonal to the boundary).
inline double quadrature_distance(double x1, double y1, double t1, double x2, double y2, double t2) {
  const double dx = x2 - x1;
  const double dy = y2 - y1;
  const double s = std::hypot(dx, dy);
  std::function<double(double)> f;
  double lo;
  double hi;
  if (s < 1e-12 * std::max({1.0, t1, t2})) {
    // Vertical: ds = dt / t.
    f = [](double t) { return 1.0 / t; };
    lo = std::min(t1, t2);
    hi = std::max(t1, t2);
  } else {
    // Semicircle in the vertical plane through both points: coordinate u
    // along the plane, centre c on the boundary, angle phi from the boundary.
    const double u1 = 0.0;
    const double u2 = s;
    const double c = (u2 * u2 + t2 * t2 - u1 * u1 - t1 * t1) / (2.0 * (u2 - u1));
    const double p1 = std::atan2(t1, u1 - c);
    const double p2 = std::atan2(t2, u2 - c);
    f = [](double phi) { return 1.0 / std::sin(phi); };
    lo = std::min(p1, p2);
    hi = std::max(p1, p2);
  }
  std::function<double(double, double, double, double, double, double, int)> simpson =
      [&](double a, double b, double fa, double fm, double fb, double whole, int depth) -> double {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 1e-13 * std::max(1.0, std::fabs(whole))) return left + right + delta / 15.0;
    return simpson(a, m, fa, flm, fm, left, depth - 1) + simpson(m, b, fm, frm, fb, right, depth - 1);
  };
  if (hi - lo == 0.0) return 0.0;
  // Split into panels so the recursion starts from a reasonable estimate.
  const int panels = 64;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = lo + (hi - lo) * i / panels;
    const double b = lo + (hi - lo) * (i + 1) / panels;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    total += simpson(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 40);
  }
  return total;
}

/// Random loxodromic: conjugate of diag(e^{(l + i theta)/2}) by a random
/// matrix with entries in [-2, 2] + [-2, 2] i.
inline Isometry random_loxodromic(Rng& rng, double min_len = 0.1, double max_len = 4.0) {
  const double len = uniform_real(rng, min_len, max_len);
  const double theta = uniform_real(rng, -3.0, 3.0);
  const Complex e = std::exp(Complex(len, theta) / 2.0);
  const Isometry d(e, 0.0, 0.0, 1.0 / e);
  auto entry = [&] { return Complex(uniform_real(rng, -2.0, 2.0), uniform_real(rng, -2.0, 2.0)); };
  Complex a, b, c, dd;
  do {
    a = entry();
    b = entry();
    c = entry();
    dd = entry();
  } while (std::abs(a * dd - b * c) < 0.2);
  const Isometry g = Isometry::normalized(a, b, c, dd);
  return g * d * g.inverse();
}

inline PointH3 random_point(Rng& rng) {
  return {uniform_real(rng, -2.0, 2.0), uniform_real(rng, -2.0, 2.0), std::exp(uniform_real(rng, -1.5, 1.5))};
}

}  // namespace fgcore::oracle

#endif  // FGCORE_TESTS_ORACLES_HPP
