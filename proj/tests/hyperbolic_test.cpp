#include <gtest/gtest.h>

#include <cmath>

#include "fgcore/hyperbolic.hpp"
#include "oracles.hpp"

namespace fgcore {
namespace {

const double kLog9 = std::log(9.0);

Isometry diag(Complex lambda) { return Isometry(lambda, 0.0, 0.0, 1.0 / lambda); }

using oracle::random_loxodromic;
using oracle::random_point;

TEST(Classify, Examples) {
  const Classification d = classify(diag(3.0));
  EXPECT_EQ(d.kind, IsometryClass::loxodromic);
  EXPECT_NEAR(d.translation_length, kLog9, 1e-12);
  EXPECT_NEAR(d.rotation_angle, 0.0, 1e-12);

  EXPECT_EQ(classify(Isometry::identity()).kind, IsometryClass::identity);
  EXPECT_EQ(classify(Isometry::identity()).translation_length, 0.0);
  EXPECT_EQ(classify(Isometry(-1.0, 0.0, 0.0, -1.0)).kind, IsometryClass::identity);

  const Classification p = classify(Isometry(1.0, 1.0, 0.0, 1.0));
  EXPECT_EQ(p.kind, IsometryClass::parabolic);
  EXPECT_EQ(p.translation_length, 0.0);

  const Classification e = classify(diag(std::polar(1.0, 0.5)));
  EXPECT_EQ(e.kind, IsometryClass::elliptic);
  EXPECT_NEAR(e.rotation_angle, 1.0, 1e-12);

  const Classification screw = classify(diag(std::polar(2.0, 1.0)));
  EXPECT_NEAR(screw.translation_length, 2.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(screw.rotation_angle, 2.0, 1e-12);

  EXPECT_THROW(Isometry(2.0, 0.0, 0.0, 1.0), PreconditionError);
}

TEST(Displacement, Examples) {
  EXPECT_EQ(displacement({0, 0, 1}, Isometry::identity()), 0.0);
  EXPECT_NEAR(displacement({0, 0, 1}, diag(3.0)), kLog9, 1e-12);
  // (0,0,1) -> (1,0,1): cosh d = 1 + 1/2.
  EXPECT_NEAR(displacement({0, 0, 1}, Isometry(1.0, 1.0, 0.0, 1.0)), std::acosh(1.5), 1e-12);
  EXPECT_NEAR(displacement({0, 0, 1}, Isometry(1.0, 1.0, 0.0, 1.0)), 0.9624236501192069, 1e-12);
  EXPECT_THROW(displacement({0, 0, 0}, diag(3.0)), PreconditionError);
  EXPECT_THROW(displacement({0, 0, -1}, diag(3.0)), PreconditionError);
}

TEST(Displacement, ApplyMatchesVerticalScaling) {
  // diag(l) acts as p -> |l|^2 p after a rotation about the vertical axis.
  const PointH3 q = diag(std::polar(2.0, 0.25)).apply({1.0, 0.0, 1.0});
  EXPECT_NEAR(q.t, 4.0, 1e-12);
  EXPECT_NEAR(std::hypot(q.x, q.y), 4.0, 1e-12);
  EXPECT_NEAR(std::atan2(q.y, q.x), 0.5, 1e-12);
}

TEST(Displacement, AgreesWithQuadratureOracle) {
  Rng rng(71);
  for (int i = 0; i < 2000; ++i) {
    const PointH3 p = random_point(rng);
    const Isometry g = random_loxodromic(rng);
    const PointH3 q = g.apply(p);
    const double closed = distance(p, q);
    const double numeric = oracle::quadrature_distance(p.x, p.y, p.t, q.x, q.y, q.t);
    EXPECT_NEAR(closed, numeric, 1e-9 * std::max(1.0, closed));
  }
}

TEST(Displacement, AtLeastTranslationLengthWithEqualityOnAxis) {
  Rng rng(72);
  for (int i = 0; i < 2000; ++i) {
    const Isometry g = random_loxodromic(rng);
    const Classification c = classify(g);
    const PointH3 p = random_point(rng);
    const double d = displacement(p, g);
    EXPECT_GE(d, c.translation_length - 1e-9);
    const double r = distance_to_axis(p, g);
    // Displacement at distance r from the axis.
    const double predicted =
        std::acosh(std::cosh(c.translation_length) * std::cosh(r) * std::cosh(r) -
                   std::cos(c.rotation_angle) * std::sinh(r) * std::sinh(r));
    EXPECT_NEAR(d, predicted, 1e-7 * std::max(1.0, d));
    if (r > 1e-3) {
      EXPECT_GT(d - c.translation_length, 1e-9);
    }
    const PointH3 on_axis = axis_point(g, uniform_real(rng, -2.0, 2.0));
    EXPECT_NEAR(distance_to_axis(on_axis, g), 0.0, 1e-7);
    EXPECT_NEAR(displacement(on_axis, g), c.translation_length, 1e-9);
  }
}

TEST(Displacement, ConjugationInvariant) {
  Rng rng(73);
  for (int i = 0; i < 1000; ++i) {
    const Isometry g = random_loxodromic(rng);
    const Isometry h = random_loxodromic(rng, 0.1, 1.5);
    const PointH3 p = random_point(rng);
    const double d = displacement(p, g);
    EXPECT_NEAR(displacement(h.apply(p), h * g * h.inverse()), d, 1e-9 * std::max(1.0, d));
  }
}

TEST(CylinderContains, Examples) {
  const Isometry g = diag(3.0);
  const PointH3 axis{0, 0, 1};
  EXPECT_TRUE(cylinder_contains(axis, g, kLog9 + 0.1, 1));
  // At lambda equal to the displacement of g (log 9 up to rounding) no power
  // qualifies: the inequality is strict and powers move j times as far.
  EXPECT_FALSE(cylinder_contains(axis, g, displacement(axis, g), 5));
  EXPECT_FALSE(cylinder_contains({100.0, 0.0, 0.01}, g, 3.0, 8));
  EXPECT_THROW(cylinder_contains(axis, Isometry(1.0, 1.0, 0.0, 1.0), 1.0, 1), PreconditionError);
  EXPECT_THROW(cylinder_contains(axis, g, 1.0, 0), PreconditionError);
}

TEST(CylinderContains, PowersReachFurther) {
  // With rotation near pi, g^2 barely rotates and moves far points less than g.
  const Isometry g = diag(std::exp(Complex(0.2, 3.0) / 2.0));
  const PointH3 p{std::sinh(2.0), 0.0, 1.0};
  const double d1 = displacement(p, g);
  const double d2 = displacement(p, g.power(2));
  ASSERT_LT(d2, d1);
  EXPECT_FALSE(cylinder_contains(p, g, d2 + 1e-6, 1));
  EXPECT_TRUE(cylinder_contains(p, g, d2 + 1e-6, 2));
}

/// Bisection on r for displacement(sinh r, 0, 1) = lambda against the
/// concrete matrix; independent of the closed form.
double bisect_radius(double ell, double theta, double lambda) {
  const Isometry g = diag(std::exp(Complex(ell, theta) / 2.0));
  double lo = 0.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (displacement({std::sinh(mid), 0.0, 1.0}, g) < lambda) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

TEST(CylinderRadius, Examples) {
  EXPECT_NEAR(cylinder_radius(1.3, 0.4, 1.3), 0.0, 1e-12);
  const double r = cylinder_radius(1.0, 0.0, kLog9);
  EXPECT_NEAR(r, bisect_radius(1.0, 0.0, kLog9), 1e-12);
  EXPECT_NEAR(r, std::asinh(std::sqrt((std::cosh(kLog9) - std::cosh(1.0)) / (std::cosh(1.0) - 1.0))), 1e-12);
  EXPECT_NEAR(r, 1.592072521932878, 1e-12);
  EXPECT_THROW(cylinder_radius(1.0, 0.0, 0.5), PreconditionError);
  EXPECT_THROW(cylinder_radius(0.0, 0.0, 0.5), PreconditionError);
}

TEST(CylinderRadius, MatchesBisectionAndIncreases) {
  Rng rng(74);
  for (int i = 0; i < 300; ++i) {
    const double ell = uniform_real(rng, 0.05, 3.0);
    const double theta = uniform_real(rng, -3.1, 3.1);
    const double lambda = ell + uniform_real(rng, 0.0, 4.0);
    const double r = cylinder_radius(ell, theta, lambda);
    EXPECT_NEAR(r, bisect_radius(ell, theta, lambda), 1e-9);
    const double bigger = lambda + uniform_real(rng, 1e-3, 2.0);
    EXPECT_GT(cylinder_radius(ell, theta, bigger), r);
  }
}

TEST(Schottky, SampledConfigsAreCertifiedAndDeterministic) {
  for (unsigned k : {2u, 3u, 5u}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const SchottkyConfig cfg = sample_schottky(k, seed);
      ASSERT_EQ(cfg.generators.size(), k);
      EXPECT_TRUE(certify(cfg).ok);
      for (const Isometry& g : cfg.generators) EXPECT_EQ(classify(g).kind, IsometryClass::loxodromic);
      for (unsigned i = 0; i < k; ++i) {
        for (unsigned j = 0; j < k; ++j) {
          const Circle& a = cfg.source[i];
          const Circle& b = cfg.target[j];
          EXPECT_GT(std::abs(a.center - b.center), a.radius + b.radius);
        }
      }
      const SchottkyConfig again = sample_schottky(k, seed);
      for (unsigned j = 0; j < k; ++j) {
        EXPECT_EQ(again.generators[j].a(), cfg.generators[j].a());
        EXPECT_EQ(again.generators[j].b(), cfg.generators[j].b());
        EXPECT_EQ(again.source[j].center, cfg.source[j].center);
      }
    }
  }
  EXPECT_THROW(sample_schottky(1, 0), PreconditionError);
}

TEST(Schottky, CertifyRejectsOverlapAndWrongPairing) {
  SchottkyConfig cfg = sample_schottky(2, 3);
  SchottkyConfig overlap = cfg;
  overlap.target[0].center = overlap.source[0].center;
  EXPECT_FALSE(certify(overlap).ok);
  SchottkyConfig swapped = cfg;
  std::swap(swapped.generators[0], swapped.generators[1]);
  EXPECT_FALSE(certify(swapped).ok);
}

TEST(Schottky, GeneratorMapsCircleToCircle) {
  const Circle from{Complex(-2.0, 0.0), 0.5};
  const Circle to{Complex(2.0, 1.0), 0.8};
  const Isometry g = schottky_generator(from, to, 0.7);
  for (int i = 0; i < 16; ++i) {
    const auto image = g.apply_boundary(from.center + std::polar(from.radius, 0.4 * i));
    ASSERT_TRUE(image.has_value());
    EXPECT_NEAR(std::abs(*image - to.center), to.radius, 1e-12);
  }
  EXPECT_NEAR(std::abs(*g.apply_boundary(Complex(50.0, 50.0)) - to.center), 0.0, 0.05);
}

TEST(LogBound, MarginsNonnegative) {
  for (unsigned k : {2u, 3u}) {
    const SchottkyConfig cfg = sample_schottky(k, 11);
    Rng rng(k);
    double worst = 1e300;
    for (int i = 0; i < 1000; ++i) worst = std::min(worst, check_log_bound(sample_point(cfg, rng), cfg));
    EXPECT_GE(worst, -1e-9);
  }
  const SchottkyConfig cfg = sample_schottky(2, 12);
  EXPECT_GT(check_log_bound({0.0, 0.0, 1e-3}, cfg), 5.0);
}

TEST(PrimitiveRoots, PowersCollapse) {
  const auto roots = primitive_roots(parse_word_list("aa,aaa,A,bab,BAb,BAAb", 2));
  // a from a^2, a^3, A; bab is its own root; BAb and BA^2b share root BAb,
  // stored as its inverse Bab.
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_EQ(roots[0].str(), "a");
  EXPECT_EQ(roots[1].str(), "bab");
  EXPECT_EQ(roots[2].str(), "Bab");
}

TEST(EstimateGP, EmptyBelowAllDisplacements) {
  const SchottkyConfig cfg = sample_schottky(2, 4);
  const GPEstimate e = estimate_GP({0.0, 0.0, 1.0}, cfg, 1e-6, 6);
  EXPECT_TRUE(e.words.empty());
  EXPECT_TRUE(e.roots.empty());
  EXPECT_EQ(e.rank_estimate, 0);
}

TEST(EstimateGP, PrunedSearchMatchesBruteForce) {
  for (unsigned k : {2u, 3u}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const SchottkyConfig cfg = sample_schottky(k, seed);
      Rng rng(100 + seed);
      for (int i = 0; i < 40; ++i) {
        const PointH3 p = sample_point(cfg, rng);
        const double lambda = uniform_real(rng, 1.0, 5.0);
        const unsigned len = k == 2 ? 6 : 4;
        const GPEstimate e = estimate_GP(p, cfg, lambda, len);
        const auto brute = brute_force_survivors(cfg, p, lambda, len);
        ASSERT_EQ(e.words.size(), brute.size());
        for (std::size_t j = 0; j < brute.size(); ++j) {
          EXPECT_EQ(e.words[j], brute[j].first);
          EXPECT_NEAR(e.displacements[j], brute[j].second, 1e-9);
          EXPECT_LT(displacement(p, word_matrix(cfg, e.words[j])), lambda + 1e-12);
        }
      }
    }
  }
}

TEST(EstimateGP, GrowsWithLambdaAndLength) {
  int rank_drops = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SchottkyConfig cfg = sample_schottky(2, seed);
    Rng rng(200 + seed);
    for (int i = 0; i < 40; ++i) {
      const PointH3 p = sample_point(cfg, rng);
      const double lambda = uniform_real(rng, 1.0, 4.0);
      const GPEstimate small = estimate_GP(p, cfg, lambda, 5);
      const GPEstimate big = estimate_GP(p, cfg, lambda + 0.5, 6);
      // Survivors only accumulate, so the generated subgroup only grows.
      const CoreGraph grown = from_generators(big.roots, 2);
      for (const Word& w : small.words) EXPECT_TRUE(std::binary_search(big.words.begin(), big.words.end(), w));
      for (const Word& r : small.roots) EXPECT_TRUE(contains(grown, r));
      if (big.rank_estimate < small.rank_estimate) ++rank_drops;
    }
  }
  EXPECT_EQ(rank_drops, 0);
}

}  // namespace
}  // namespace fgcore
