#include <gtest/gtest.h>

#include "phtt/graded.hpp"
#include "phtt/scalar.hpp"
#include "phtt/sdr.hpp"

namespace phtt {
namespace {

TEST(Scalar, ParseAndCanonicalForm) {
  EXPECT_EQ(Scalar::parse("3/6")->str(), "1/2");
  EXPECT_EQ(Scalar::parse("-4/2")->str(), "-2");
  EXPECT_EQ(Scalar::parse("0/7")->str(), "0");
  EXPECT_EQ(Scalar::parse("-0")->str(), "0");
  EXPECT_FALSE(Scalar::parse("2/-3").has_value());
  EXPECT_FALSE(Scalar::parse("1.5").has_value());
  EXPECT_FALSE(Scalar::parse("").has_value());
  EXPECT_FALSE(Scalar::parse("/3").has_value());
  EXPECT_FALSE(Scalar::parse("3/").has_value());
  EXPECT_FALSE(Scalar::parse("3/0").has_value());
}

TEST(Scalar, Arithmetic) {
  Scalar a(1, 3), b(1, 6);
  EXPECT_EQ((a + b).str(), "1/2");
  EXPECT_EQ((Scalar(2, 3) * Scalar(9, 4)).str(), "3/2");
  EXPECT_EQ(Scalar(-5, 3).inverse().str(), "-3/5");
  EXPECT_EQ((Scalar(7) / Scalar(-2)).str(), "-7/2");
  EXPECT_TRUE((a - a).is_zero());
  EXPECT_EQ(koszul(true), Scalar(-1));
  EXPECT_EQ(koszul(false), Scalar(1));
  EXPECT_EQ(sign_pow(-3), Scalar(-1));
  EXPECT_EQ(sign_pow(4), Scalar(1));
}

TEST(Rng, DeterministicAndInRange) {
  Rng r1(42), r2(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(r1.next(), r2.next());
  Rng r3(7);
  for (int i = 0; i < 200; ++i) {
    long v = r3.range(-3, 5);
    EXPECT_GE(v, -3);
    EXPECT_LE(v, 5);
  }
}

Result<GradedSpace> space8() {
  return GradedSpace::make({{"u0", 0},
                            {"x0", 0},
                            {"x1", 0},
                            {"y0", 1},
                            {"y1", 1},
                            {"y2", 1},
                            {"z0", 2},
                            {"w", 3}});
}

Result<GradedMap> diff8(const GradedSpace& v) {
  return GradedMap::make(v, v, 1,
                         {{"x0", "y0", Scalar(1)},
                          {"x0", "y1", Scalar(1)},
                          {"x1", "y1", Scalar(1)},
                          {"x1", "y2", Scalar(1)},
                          {"y0", "z0", Scalar(1)},
                          {"y1", "z0", Scalar(-1)},
                          {"y2", "z0", Scalar(1)}});
}

TEST(GradedMap, ValidationErrors) {
  auto dup = GradedSpace::make({{"a", 0}, {"a", 1}});
  ASSERT_FALSE(dup.ok());
  EXPECT_EQ(dup.error().code, Errc::duplicate_basis_id);

  auto v = space8();
  ASSERT_TRUE(v.ok());
  auto bad_id = GradedMap::make(v.value(), v.value(), 1, {{"nope", "y0", Scalar(1)}});
  ASSERT_FALSE(bad_id.ok());
  EXPECT_EQ(bad_id.error().code, Errc::unknown_basis_id);

  auto bad_deg = GradedMap::make(v.value(), v.value(), 1, {{"x0", "z0", Scalar(1)}});
  ASSERT_FALSE(bad_deg.ok());
  EXPECT_EQ(bad_deg.error().code, Errc::non_homogeneous_map);

  auto w = GradedSpace::make({{"a", 0}});
  auto m1 = GradedMap::zero(v.value(), w.value(), 0);
  auto m2 = GradedMap::zero(v.value(), v.value(), 0);
  auto c = compose(m2, m1);
  ASSERT_FALSE(c.ok());
  EXPECT_EQ(c.error().code, Errc::dimension_mismatch);
}

TEST(GradedMap, DifferentialSquaresToZeroCheck) {
  auto v = space8();
  ASSERT_TRUE(v.ok());
  auto d = diff8(v.value());
  ASSERT_TRUE(d.ok());
  EXPECT_TRUE(check_differential(d.value()).ok());

  auto bad = GradedMap::make(v.value(), v.value(), 1,
                             {{"x0", "y0", Scalar(1)}, {"y0", "z0", Scalar(1)}});
  ASSERT_TRUE(bad.ok());
  auto st = check_differential(bad.value());
  ASSERT_FALSE(st.ok());
  EXPECT_EQ(st.error().code, Errc::d_squared_nonzero);
}

TEST(GradedMap, ShiftConventions) {
  auto v = space8();
  ASSERT_TRUE(v.ok());
  auto d = diff8(v.value());
  ASSERT_TRUE(d.ok());

  GradedSpace v1 = shift_space(v.value(), 1);
  EXPECT_EQ(v1.ids, v.value().ids);
  for (int i = 0; i < v1.dim(); ++i) EXPECT_EQ(v1.degree(i), v.value().degree(i) - 1);

  // degree-1 operators flip sign under a single shift, degree-0 ones do not
  GradedMap d1 = shift_differential(d.value());
  EXPECT_EQ(d1.cols, map_scale(d.value(), Scalar(-1)).cols);
  EXPECT_TRUE(check_differential(d1).ok());

  GradedMap id0 = GradedMap::identity(v.value());
  EXPECT_EQ(shift_map(id0, 1).cols, id0.cols);

  // shifting twice agrees with shifting by two
  GradedMap twice = shift_map(shift_map(d.value(), 1), 1);
  GradedMap once2 = shift_map(d.value(), 2);
  EXPECT_EQ(twice.cols, once2.cols);
  EXPECT_EQ(shift_space(shift_space(v.value(), 1), 1), shift_space(v.value(), 2));
}

// Hand-checked retraction of the eight-dimensional complex above: u0 and w
// survive, the middle six elements cancel in pairs, and the contraction is
//   h(y1) = -x0, h(y2) = x0 - x1, h(z0) = -y0, h = 0 elsewhere.
TEST(Sdr, HandComputedComplex) {
  auto v = space8();
  ASSERT_TRUE(v.ok());
  auto d = diff8(v.value());
  ASSERT_TRUE(d.ok());
  auto sdr = cohomology_sdr(v.value(), d.value());
  ASSERT_TRUE(sdr.ok()) << sdr.error().str();
  Sdr s = sdr.take();

  ASSERT_EQ(s.H.dim(), 2);
  EXPECT_EQ(s.H.ids[0], "[u0]");
  EXPECT_EQ(s.H.ids[1], "[w]");
  EXPECT_EQ(s.H.degree(0), 0);
  EXPECT_EQ(s.H.degree(1), 3);

  int u0 = *v.value().find("u0"), x0 = *v.value().find("x0"), x1 = *v.value().find("x1");
  int y0 = *v.value().find("y0"), y1 = *v.value().find("y1"), y2 = *v.value().find("y2");
  int z0 = *v.value().find("z0"), w = *v.value().find("w");

  EXPECT_EQ(s.f.cols[0], (Vec{{u0, Scalar(1)}}));
  EXPECT_EQ(s.f.cols[1], (Vec{{w, Scalar(1)}}));

  EXPECT_EQ(s.h.cols[static_cast<std::size_t>(y1)], (Vec{{x0, Scalar(-1)}}));
  EXPECT_EQ(s.h.cols[static_cast<std::size_t>(y2)], (Vec{{x0, Scalar(1)}, {x1, Scalar(-1)}}));
  EXPECT_EQ(s.h.cols[static_cast<std::size_t>(z0)], (Vec{{y0, Scalar(-1)}}));
  for (int j : {u0, x0, x1, y0, w}) EXPECT_TRUE(s.h.cols[static_cast<std::size_t>(j)].empty());

  EXPECT_EQ(s.g.cols[static_cast<std::size_t>(u0)], (Vec{{0, Scalar(1)}}));
  EXPECT_EQ(s.g.cols[static_cast<std::size_t>(w)], (Vec{{1, Scalar(1)}}));
  for (int j : {x0, x1, y0, y1, y2, z0}) EXPECT_TRUE(s.g.cols[static_cast<std::size_t>(j)].empty());

  EXPECT_TRUE(verify_sdr(v.value(), d.value(), s).ok());
  EXPECT_TRUE(s.h_squared_zero);
  EXPECT_TRUE(s.h_f_zero);
  EXPECT_TRUE(s.g_h_zero);
}

// Random complexes: a matching differential conjugated by a random
// unitriangular degree-0 automorphism.  The retraction identities must hold
// on the nose and the cohomology dimension equals dim V minus twice the
// number of matched pairs.
TEST(Sdr, RandomizedComplexes) {
  for (unsigned long seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    int n = static_cast<int>(rng.range(4, 10));
    std::vector<std::pair<std::string, int>> basis;
    for (int i = 0; i < n; ++i)
      basis.emplace_back("e" + std::to_string(i), static_cast<int>(rng.range(-2, 3)));
    auto vr = GradedSpace::make(basis);
    ASSERT_TRUE(vr.ok());
    GradedSpace v = vr.take();

    // match disjoint pairs (i, j) with deg j = deg i + 1
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    GradedMap d = GradedMap::zero(v, v, 1);
    int pairs = 0;
    for (int i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      for (int j = 0; j < n; ++j) {
        if (used[static_cast<std::size_t>(j)] || j == i) continue;
        if (v.degree(j) != v.degree(i) + 1) continue;
        if (!rng.coin()) continue;
        d.cols[static_cast<std::size_t>(i)] = Vec{{j, Scalar(rng.range(1, 5))}};
        used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = true;
        ++pairs;
        break;
      }
    }

    // conjugate by P = Id + N, N strictly triangular within each degree
    GradedMap p = GradedMap::identity(v);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (v.degree(i) == v.degree(j) && rng.coin())
          vec_add(p.cols[static_cast<std::size_t>(i)], j, Scalar(rng.range(-3, 3)));
    GradedMap n_part = map_add(p, map_scale(GradedMap::identity(v), Scalar(-1)));
    GradedMap p_inv = GradedMap::identity(v);
    GradedMap power = GradedMap::identity(v);
    for (int k = 1; k <= n; ++k) {
      auto next = compose(n_part, power);
      ASSERT_TRUE(next.ok());
      power = next.take();
      if (power.is_zero()) break;
      p_inv = map_add(p_inv, map_scale(power, sign_pow(k)));
    }
    ASSERT_TRUE(compose(p, p_inv).value().cols == GradedMap::identity(v).cols);

    auto dp = compose(compose(p, d).value(), p_inv);
    ASSERT_TRUE(dp.ok());
    GradedMap dc = dp.take();
    ASSERT_TRUE(check_differential(dc).ok());

    auto sdr = cohomology_sdr(v, dc);
    ASSERT_TRUE(sdr.ok()) << sdr.error().str();
    Sdr s = sdr.take();
    EXPECT_EQ(s.H.dim(), n - 2 * pairs);
    EXPECT_TRUE(verify_sdr(v, dc, s).ok());
    EXPECT_TRUE(s.h_squared_zero);
    EXPECT_TRUE(s.h_f_zero);
    EXPECT_TRUE(s.g_h_zero);
  }
}

}  // namespace
}  // namespace phtt
