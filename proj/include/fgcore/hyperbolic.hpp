#ifndef FGCORE_HYPERBOLIC_HPP
#define FGCORE_HYPERBOLIC_HPP

// Isometries of hyperbolic 3-space in the upper half-space model, acting by
// the Poincare extension of Mobius maps of the boundary plane. Points are
// (x, y, t) with t > 0; the boundary plane is identified with C via x + iy.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fgcore/core_graph.hpp"
#include "fgcore/errors.hpp"
#include "fgcore/random.hpp"
#include "fgcore/words.hpp"

namespace fgcore {

using Complex = std::complex<double>;

struct PointH3 {
  double x = 0.0;
  double y = 0.0;
  double t = 1.0;

  Complex z() const { return {x, y}; }
};

inline void require_point(const PointH3& p) {
  if (!(p.t > 0.0) || !std::isfinite(p.t) || !std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw PreconditionError("point must have finite coordinates and height > 0");
  }
}

/// Hyperbolic distance. Uses 2 asinh(|p - q| / (2 sqrt(t t'))), which equals
/// acosh(1 + |p - q|^2 / (2 t t')) without cancellation for nearby points.
inline double distance(const PointH3& p, const PointH3& q) {
  require_point(p);
  require_point(q);
  const double chord = std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) + (p.t - q.t) * (p.t - q.t));
  return 2.0 * std::asinh(chord / (2.0 * std::sqrt(p.t * q.t)));
}

enum class IsometryClass { identity, loxodromic, parabolic, elliptic };

inline const char* to_string(IsometryClass c) {
  switch (c) {
    case IsometryClass::identity: return "identity";
    case IsometryClass::loxodromic: return "loxodromic";
    case IsometryClass::parabolic: return "parabolic";
    case IsometryClass::elliptic: return "elliptic";
  }
  return "?";
}

inline constexpr double kDeterminantTolerance = 1e-12;

/// Element of SL(2, C), taken up to sign.
class Isometry {
 public:
  Isometry() = default;

  /// Throws unless ad - bc = 1 up to rounding in the entries' magnitude.
  Isometry(Complex a, Complex b, Complex c, Complex d) : a_(a), b_(b), c_(c), d_(d) {
    const double scale = std::max(1.0, std::abs(a) * std::abs(d) + std::abs(b) * std::abs(c));
    if (std::abs(a * d - b * c - 1.0) > kDeterminantTolerance * scale) {
      throw PreconditionError("isometry matrix must have determinant 1");
    }
  }

  /// Rescales by a square root of the determinant.
  static Isometry normalized(Complex a, Complex b, Complex c, Complex d) {
    const Complex det = a * d - b * c;
    if (std::abs(det) == 0.0) throw PreconditionError("singular matrix");
    const Complex s = std::sqrt(det);
    return Isometry(a / s, b / s, c / s, d / s);
  }

  static Isometry identity() { return Isometry(1.0, 0.0, 0.0, 1.0); }

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  Complex c() const { return c_; }
  Complex d() const { return d_; }
  Complex trace() const { return a_ + d_; }

  Isometry inverse() const { return Isometry(d_, -b_, -c_, a_); }

  friend Isometry operator*(const Isometry& m, const Isometry& n) {
    return normalized(m.a_ * n.a_ + m.b_ * n.c_, m.a_ * n.b_ + m.b_ * n.d_, m.c_ * n.a_ + m.d_ * n.c_,
                      m.c_ * n.b_ + m.d_ * n.d_);
  }

  /// Poincare extension.
  PointH3 apply(const PointH3& p) const {
    require_point(p);
    const Complex z = p.z();
    const Complex cz_d = c_ * z + d_;
    const double t2 = p.t * p.t;
    const double denom = std::norm(cz_d) + std::norm(c_) * t2;
    const Complex w = ((a_ * z + b_) * std::conj(cz_d) + a_ * std::conj(c_) * t2) / denom;
    return {w.real(), w.imag(), p.t / denom};
  }

  /// Action on the boundary plane; nullopt for the point at infinity.
  std::optional<Complex> apply_boundary(Complex z) const {
    const Complex den = c_ * z + d_;
    if (std::abs(den) == 0.0) return std::nullopt;
    return (a_ * z + b_) / den;
  }

  Isometry power(long j) const {
    Isometry base = j < 0 ? inverse() : *this;
    unsigned long e = static_cast<unsigned long>(j < 0 ? -j : j);
    Isometry out = identity();
    while (e > 0) {
      if (e & 1UL) out = out * base;
      base = base * base;
      e >>= 1;
    }
    return out;
  }

 private:
  Complex a_{1.0};
  Complex b_{0.0};
  Complex c_{0.0};
  Complex d_{1.0};
};

struct Classification {
  IsometryClass kind = IsometryClass::identity;
  double translation_length = 0.0;
  double rotation_angle = 0.0;  // in (-pi, pi]
};

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

/// Eigenvalue of largest modulus.
inline Complex dominant_eigenvalue(const Isometry& m) {
  const Complex tr = m.trace();
  const Complex disc = std::sqrt(tr * tr - 4.0);
  const Complex l1 = (tr + disc) / 2.0;
  const Complex l2 = (tr - disc) / 2.0;
  return std::abs(l1) >= std::abs(l2) ? l1 : l2;
}

inline Classification classify(const Isometry& m) {
  const Complex det = m.a() * m.d() - m.b() * m.c();
  if (std::abs(det - 1.0) > 1e-9) throw PreconditionError("classification requires unit determinant");
  const Complex lambda = dominant_eigenvalue(m);
  const double modulus = std::abs(lambda);
  Classification c;
  if (std::log(modulus) > 1e-12) {
    c.kind = IsometryClass::loxodromic;
    c.translation_length = 2.0 * std::log(modulus);
    c.rotation_angle = wrap_angle(2.0 * std::arg(lambda));
    return c;
  }
  const double off = std::abs(m.b()) + std::abs(m.c()) + std::abs(m.a() - m.d());
  if (off <= 1e-12) {
    c.kind = IsometryClass::identity;
    return c;
  }
  const Complex tr = m.trace();
  if (std::abs(tr * tr - 4.0) <= 1e-12) {
    c.kind = IsometryClass::parabolic;
    return c;
  }
  c.kind = IsometryClass::elliptic;
  c.rotation_angle = wrap_angle(2.0 * std::arg(lambda));
  return c;
}

inline double displacement(const PointH3& p, const Isometry& m) { return distance(p, m.apply(p)); }

/// Endpoints of the axis on the boundary: `attracting` is the fixed point of
/// the dominant eigenvector; nullopt stands for infinity.
struct FixedPoints {
  std::optional<Complex> attracting;
  std::optional<Complex> repelling;
};

inline FixedPoints fixed_points(const Isometry& m) {
  if (classify(m).kind != IsometryClass::loxodromic) throw PreconditionError("axis requires a loxodromic isometry");
  const Complex lambda = dominant_eigenvalue(m);
  const Complex mu = 1.0 / lambda;
  // Eigenvector (x, y) for eigenvalue e: (a - e) x + b y = 0, c x + (d - e) y = 0.
  // Fixed point x / y.
  auto point_for = [&](Complex e) -> std::optional<Complex> {
    const Complex c = m.c();
    if (std::abs(c) > 1e-300) {
      // From the second row: x / y = (e - d) / c.
      return (e - m.d()) / c;
    }
    // Upper triangular: fixed points b / (d - a) and infinity.
    const Complex a_minus_e = m.a() - e;
    if (std::abs(a_minus_e) < 1e-12 * std::max(1.0, std::abs(e))) return std::nullopt;
    return -m.b() / a_minus_e;
  };
  return {point_for(lambda), point_for(mu)};
}

/// Mobius map sending the repelling fixed point to 0 and the attracting one
/// to infinity; it conjugates m to a diagonal matrix and carries the axis to
/// the vertical line over 0.
inline Isometry axis_normalizer(const Isometry& m) {
  const FixedPoints f = fixed_points(m);
  if (f.attracting && f.repelling) {
    const Complex p = *f.repelling;
    const Complex q = *f.attracting;
    return Isometry::normalized(1.0, -p, 1.0, -q);
  }
  if (f.repelling) return Isometry::normalized(1.0, -*f.repelling, 0.0, 1.0);
  // Repelling point at infinity: z -> -1 / (z - q).
  return Isometry::normalized(0.0, -1.0, 1.0, -*f.attracting);
}

inline double distance_to_axis(const PointH3& p, const Isometry& m) {
  const PointH3 q = axis_normalizer(m).apply(p);
  return std::asinh(std::hypot(q.x, q.y) / q.t);
}

/// Point on the axis at height parameter s (signed distance along the axis
/// from a reference point).
inline PointH3 axis_point(const Isometry& m, double s = 0.0) {
  const Isometry back = axis_normalizer(m).inverse();
  return back.apply(PointH3{0.0, 0.0, std::exp(s)});
}

/// True iff some power m^j, 1 <= j <= max_power, moves p by less than lambda.
/// Negative powers move p by the same amounts, so they are covered. This
/// under-approximates membership in the cylinder of the cyclic group.
inline bool cylinder_contains(const PointH3& p, const Isometry& generator, double lambda, long max_power) {
  if (max_power < 1) throw PreconditionError("max_power must be >= 1");
  if (classify(generator).kind != IsometryClass::loxodromic) {
    throw PreconditionError("cylinder membership requires a loxodromic generator");
  }
  Isometry g = generator;
  for (long j = 1; j <= max_power; ++j) {
    if (displacement(p, g) < lambda) return true;
    g = g * generator;
  }
  return false;
}

/// Radius of the cylinder of points moved less than lambda by a loxodromic
/// with translation length ell and rotation theta. Solves
///   cosh lambda = cosh ell cosh^2 r - cos theta sinh^2 r
/// in closed form: sinh^2 r = (cosh lambda - cosh ell) / (cosh ell - cos theta),
/// with both differences written as products to avoid cancellation.
inline double cylinder_radius(double ell, double theta, double lambda) {
  if (!(ell > 0.0)) throw PreconditionError("translation length must be positive");
  if (lambda < ell) throw PreconditionError("lambda below the translation length: the cylinder is empty");
  const double num = 2.0 * std::sinh((lambda + ell) / 2.0) * std::sinh((lambda - ell) / 2.0);
  const double sh = std::sinh(ell / 2.0);
  const double sn = std::sin(theta / 2.0);
  const double den = 2.0 * (sh * sh + sn * sn);
  return std::asinh(std::sqrt(num / den));
}

// ---------------------------------------------------------------------------
// Schottky groups

struct Circle {
  Complex center;
  double radius = 0.0;
};

/// Generator j maps the exterior of source[j] onto the interior of target[j]:
///   g_j(z) = target.center + r r' e^{i alpha} / (z - source.center).
struct SchottkyConfig {
  unsigned k = 0;
  std::uint64_t seed = 0;
  std::vector<Isometry> generators;
  std::vector<Circle> source;
  std::vector<Circle> target;
  std::vector<double> twist;
};

inline Isometry schottky_generator(const Circle& from, const Circle& to, double alpha) {
  const Complex rot = std::polar(from.radius * to.radius, alpha);
  return Isometry::normalized(to.center, rot - from.center * to.center, 1.0, -from.center);
}

/// The half-ball over the target circle of letter x (generator index with a
/// sign): x maps everything outside the half-ball of x^-1 into it.
inline const Circle& target_circle(const SchottkyConfig& cfg, const Letter& x) {
  return x.sign > 0 ? cfg.target[x.generator] : cfg.source[x.generator];
}

inline const Isometry generator_matrix(const SchottkyConfig& cfg, const Letter& x) {
  return x.sign > 0 ? cfg.generators[x.generator] : cfg.generators[x.generator].inverse();
}

struct Certificate {
  bool ok = false;
  std::string reason;
};

/// Numerical ping-pong check: the 2k circles are pairwise disjoint, every
/// generator is loxodromic, and at sampled points each generator sends the
/// source circle onto the target circle and the source exterior inside it.
inline Certificate certify(const SchottkyConfig& cfg, double tol = 1e-9, int samples = 64) {
  std::vector<Circle> all;
  for (unsigned j = 0; j < cfg.k; ++j) {
    all.push_back(cfg.source[j]);
    all.push_back(cfg.target[j]);
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (std::abs(all[i].center - all[j].center) <= all[i].radius + all[j].radius + tol) {
        return {false, "circles " + std::to_string(i) + " and " + std::to_string(j) + " meet"};
      }
    }
  }
  for (unsigned j = 0; j < cfg.k; ++j) {
    const Isometry& g = cfg.generators[j];
    if (classify(g).kind != IsometryClass::loxodromic) return {false, "generator not loxodromic"};
    const Circle& from = cfg.source[j];
    const Circle& to = cfg.target[j];
    for (int s = 0; s < samples; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / samples;
      const Complex on = from.center + std::polar(from.radius, phi);
      const auto image = g.apply_boundary(on);
      if (!image || std::abs(std::abs(*image - to.center) - to.radius) > tol * std::max(1.0, to.radius)) {
        return {false, "generator " + std::to_string(j) + " misses its target circle"};
      }
      for (double scale : {1.0 + 1e-6, 1.5, 4.0, 100.0}) {
        const auto out = g.apply_boundary(from.center + std::polar(from.radius * scale, phi));
        if (!out || std::abs(*out - to.center) >= to.radius + tol) {
          return {false, "generator " + std::to_string(j) + " sends the exterior outside its target"};
        }
      }
    }
  }
  return {true, ""};
}

inline constexpr int kSchottkyRetryCap = 10000;

/// 2k disjoint circles with centres in the disc of radius 2 sqrt(k / 2) and
/// radii in [0.5, 1.5], random pairing twists. Deterministic per (k, seed).
inline SchottkyConfig sample_schottky(unsigned k, std::uint64_t seed) {
  if (k < 2 || k > kMaxAlphabetRank) throw PreconditionError("Schottky rank must be in [2, 26]");
  Rng rng = derive_rng(seed, k);
  for (int attempt = 0; attempt < kSchottkyRetryCap; ++attempt) {
    std::vector<Circle> circles;
    int placed_tries = 0;
    while (circles.size() < 2 * k && placed_tries < 1000) {
      ++placed_tries;
      const double rho = 2.0 * std::sqrt(k / 2.0) * std::sqrt(uniform_unit(rng));
      const double phi = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
      const Circle c{std::polar(rho, phi), uniform_real(rng, 0.5, 1.5)};
      const bool clear = std::all_of(circles.begin(), circles.end(), [&](const Circle& o) {
        return std::abs(o.center - c.center) > o.radius + c.radius + 0.02;
      });
      if (clear) circles.push_back(c);
    }
    if (circles.size() < 2 * k) continue;
    SchottkyConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    for (unsigned j = 0; j < k; ++j) {
      cfg.source.push_back(circles[2 * j]);
      cfg.target.push_back(circles[2 * j + 1]);
      cfg.twist.push_back(uniform_real(rng, -std::numbers::pi, std::numbers::pi));
      cfg.generators.push_back(schottky_generator(cfg.source[j], cfg.target[j], cfg.twist[j]));
    }
    if (certify(cfg).ok) return cfg;
  }
  throw std::runtime_error("Schottky sampling: certification failed after retry cap");
}

/// Matrix of a word in the Schottky generators.
inline Isometry word_matrix(const SchottkyConfig& cfg, const Word& w) {
  Isometry m = Isometry::identity();
  for (const Letter& x : w.letters()) m = m * generator_matrix(cfg, x);
  return m;
}

/// max_j d(P, xi_j P) - log(2k - 1).
inline double check_log_bound(const PointH3& p, const SchottkyConfig& cfg) {
  double best = 0.0;
  for (const Isometry& g : cfg.generators) best = std::max(best, displacement(p, g));
  return best - std::log(2.0 * cfg.k - 1.0);
}

/// Point with (x, y) uniform in [-s, s]^2 and height log-uniform in
/// [0.05, 5].
inline PointH3 sample_point(Rng& rng, double s = 4.0) {
  const double x = uniform_real(rng, -s, s);
  const double y = uniform_real(rng, -s, s);
  const double t = std::exp(uniform_real(rng, std::log(0.05), std::log(5.0)));
  return {x, y, t};
}

/// Half the draws uniform over a square containing every circle, half within
/// distance 1 of the axis of a random group element of word length <= 3,
/// where short displacements live.
inline PointH3 sample_point(const SchottkyConfig& cfg, Rng& rng) {
  if (uniform_below(rng, 2) == 0) return sample_point(rng, 2.0 * std::sqrt(cfg.k / 2.0) + 2.0);
  const Isometry m = word_matrix(cfg, random_reduced_word(rng, cfg.k, 3));
  const Isometry to_vertical = axis_normalizer(m);
  const double height = std::exp(uniform_real(rng, -2.0, 2.0));
  const double r = uniform_real(rng, 0.0, 1.0);
  const double phi = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
  const PointH3 off{height * std::sinh(r) * std::cos(phi), height * std::sinh(r) * std::sin(phi), height};
  return to_vertical.inverse().apply(off);
}

// ---------------------------------------------------------------------------
// G_P estimation

struct GPEstimate {
  PointH3 point;
  double lambda = 0.0;
  unsigned word_length_bound = 0;
  std::vector<Word> words;         // shortlex, displacement < lambda
  std::vector<double> displacements;
  std::vector<Word> roots;         // shortlex, each the smaller of r, r^-1
  long rank_estimate = 0;
};

namespace detail {

/// Hyperbolic distance from q to the closed half-ball over c; 0 inside.
inline double distance_to_half_ball(const PointH3& q, const Circle& c) {
  const double r2 = std::norm(q.z() - c.center) + q.t * q.t;
  const double rho2 = c.radius * c.radius;
  if (r2 <= rho2) return 0.0;
  return std::asinh((r2 - rho2) / (2.0 * c.radius * q.t));
}

inline bool inside_half_ball(const PointH3& q, const Circle& c) {
  return std::norm(q.z() - c.center) + q.t * q.t < c.radius * c.radius;
}

/// Moves p into the region outside every half-ball by applying inverse
/// generators; returns the moved point and the word g with p = g . moved.
inline std::pair<PointH3, std::vector<Letter>> reduce_to_fundamental_domain(const SchottkyConfig& cfg, PointH3 p) {
  std::vector<Letter> g;
  for (int step = 0; step < 100000; ++step) {
    bool moved = false;
    for (unsigned j = 0; j < cfg.k && !moved; ++j) {
      for (std::int8_t sign : {std::int8_t{1}, std::int8_t{-1}}) {
        const Letter x{j, sign};
        if (!inside_half_ball(p, target_circle(cfg, x))) continue;
        p = generator_matrix(cfg, x.inverse()).apply(p);
        g.push_back(x);
        moved = true;
        break;
      }
    }
    if (!moved) return {p, g};
  }
  throw std::runtime_error("point did not reach the fundamental domain");
}

struct Survivor {
  Word word;
  double displacement;
};

/// All reduced words u of length <= max_len with d(p, u p) < lambda, for p
/// outside every half-ball. Depth-first over u = y_1 ... y_j tracking
/// q = u^-1 p; every proper extension of u moves p into
/// y_1 ... y_{j-1} (half-ball of y_j), so a subtree is skipped once q_{j-1}
/// is at least lambda from that half-ball.
inline void pruned_search(const SchottkyConfig& cfg, const PointH3& p, double lambda, unsigned max_len,
                          std::vector<Survivor>& out) {
  const unsigned k = cfg.k;
  std::vector<Letter> word;
  std::vector<Isometry> inverse_of(2 * k);
  for (unsigned c = 0; c < 2 * k; ++c) inverse_of[c] = generator_matrix(cfg, Letter::from_code(c).inverse());
  auto visit = [&](auto&& self, const PointH3& q_prev) -> void {
    if (word.size() == max_len) return;
    for (unsigned c = 0; c < 2 * k; ++c) {
      const Letter y = Letter::from_code(c);
      if (!word.empty() && word.back().cancels(y)) continue;
      // Every word with prefix (word, y), y itself included, moves p into
      // word(half-ball of y).
      if (distance_to_half_ball(q_prev, target_circle(cfg, y)) >= lambda) continue;
      const PointH3 q = inverse_of[c].apply(q_prev);
      word.push_back(y);
      const double d = distance(q, p);
      if (d < lambda) out.push_back({Word::reduce(k, word), d});
      self(self, q);
      word.pop_back();
    }
  };
  visit(visit, p);
}

}  // namespace detail

/// Every word of length <= max_len with displacement < lambda at p, by
/// direct enumeration. Exponential; for tests and tiny bounds.
inline std::vector<std::pair<Word, double>> brute_force_survivors(const SchottkyConfig& cfg, const PointH3& p,
                                                                  double lambda, unsigned max_len) {
  std::vector<std::pair<Word, double>> out;
  std::vector<Letter> word;
  auto visit = [&](auto&& self, const Isometry& m) -> void {
    if (word.size() == max_len) return;
    for (unsigned c = 0; c < 2 * cfg.k; ++c) {
      const Letter y = Letter::from_code(c);
      if (!word.empty() && word.back().cancels(y)) continue;
      const Isometry next = m * generator_matrix(cfg, y);
      word.push_back(y);
      const double d = displacement(p, next);
      if (d < lambda) out.emplace_back(Word::reduce(cfg.k, word), d);
      self(self, next);
      word.pop_back();
    }
  };
  visit(visit, Isometry::identity());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

/// Distinct primitive roots, each as the shortlex smaller of r and r^-1, so
/// all powers of one element map to a single representative.
inline std::vector<Word> primitive_roots(std::span<const Word> words) {
  std::set<Word> roots;
  for (const Word& w : words) {
    if (w.empty()) continue;
    const Word r = primitive_root(w);
    const Word ri = r.inverse();
    roots.insert(ri < r ? ri : r);
  }
  return {roots.begin(), roots.end()};
}

/// Lower-bound estimate of rk G_P(lambda): the rank of the subgroup generated
/// by the primitive roots of all words of length <= L moving p less than
/// lambda. Roots of words in the free generators stand in for maximal cyclic
/// subgroups.
inline GPEstimate estimate_GP(const PointH3& p, const SchottkyConfig& cfg, double lambda, unsigned word_length_bound) {
  require_point(p);
  GPEstimate est;
  est.point = p;
  est.lambda = lambda;
  est.word_length_bound = word_length_bound;
  const unsigned k = cfg.k;

  // p = g . p0 with p0 outside all half-balls; u moves p as g^-1 u g moves p0.
  const auto [p0, g_letters] = detail::reduce_to_fundamental_domain(cfg, p);
  const Word g = Word::reduce(k, g_letters);
  std::vector<detail::Survivor> raw;
  detail::pruned_search(cfg, p0, lambda, word_length_bound + 2 * static_cast<unsigned>(g.length()), raw);

  std::vector<std::pair<Word, double>> kept;
  for (const auto& s : raw) {
    Word u = concat(concat(g, s.word), g.inverse());
    if (u.empty() || u.length() > word_length_bound) continue;
    kept.emplace_back(std::move(u), s.displacement);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [w, d] : kept) {
    est.words.push_back(std::move(w));
    est.displacements.push_back(d);
  }
  est.roots = primitive_roots(est.words);
  est.rank_estimate = rank(from_generators(est.roots, k));
  return est;
}

}  // namespace fgcore

#endif  // FGCORE_HYPERBOLIC_HPP
