#include "phtt/decorated.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "phtt/canonical.hpp"
#include "phtt/graph.hpp"
#include "tensor_model.hpp"

using namespace phtt;

namespace {

BiComponent hom(int m, int n) { return tmodel::make_hom_component(m, n).take(); }

Bimodule model(std::vector<std::pair<int, int>> arities) {
  std::vector<BiComponent> comps;
  for (auto [m, n] : arities) comps.push_back(hom(m, n));
  return make_bimodule(std::move(comps)).take();
}

int idx(const Bimodule& P, int m, int n, const std::string& o, const std::string& i) {
  auto at = P.find(m, n)->space.find(tmodel::hom_id(o, i));
  EXPECT_TRUE(at.has_value());
  return *at;
}

// One vertex p feeding a vertex q through a single edge, one in-leg at the
// bottom and one out-leg at the top.
Graph chain_pq() {
  RawGraph raw;
  raw.flags = {"pi", "po", "qi", "qo"};
  raw.involution = {{"pi", "pi"}, {"po", "qi"}, {"qi", "po"}, {"qo", "qo"}};
  raw.blocks = {{"p", {"pi", "po"}}, {"q", {"qi", "qo"}}};
  return validate(raw, {{"pi", false}, {"po", true}, {"qi", false}, {"qo", true}}, {{"qo", 1}},
                  {{"pi", 1}})
      .take();
}

// The same shape with vertex names that sort the other way round: z is the
// source, m the sink.
Graph chain_zm() {
  RawGraph raw;
  raw.flags = {"zi", "zo", "mi", "mo"};
  raw.involution = {{"zi", "zi"}, {"zo", "mi"}, {"mi", "zo"}, {"mo", "mo"}};
  raw.blocks = {{"z", {"zi", "zo"}}, {"m", {"mi", "mo"}}};
  return validate(raw, {{"zi", false}, {"zo", true}, {"mi", false}, {"mo", true}}, {{"mo", 1}},
                  {{"zi", 1}})
      .take();
}

const std::map<std::string, std::string> kChainMap = {
    {"pi", "zi"}, {"po", "zo"}, {"qi", "mi"}, {"qo", "mo"}};

// Two vertices joined by a pair of parallel edges, no legs.
Graph parallel_edges() {
  RawGraph raw;
  raw.flags = {"e1o", "e1i", "e2o", "e2i"};
  raw.involution = {{"e1o", "e1i"}, {"e1i", "e1o"}, {"e2o", "e2i"}, {"e2i", "e2o"}};
  raw.blocks = {{"u", {"e1o", "e2o"}}, {"v", {"e1i", "e2i"}}};
  return validate(raw, {{"e1o", true}, {"e2o", true}, {"e1i", false}, {"e2i", false}}, {}, {})
      .take();
}

// v2 -> v1 <- v3 with one out-leg on v1.
Graph two_in_one() {
  RawGraph raw;
  raw.flags = {"t", "x", "y", "p", "q"};
  raw.involution = {{"t", "t"}, {"x", "p"}, {"p", "x"}, {"y", "q"}, {"q", "y"}};
  raw.blocks = {{"v1", {"t", "x", "y"}}, {"v2", {"p"}}, {"v3", {"q"}}};
  return validate(raw,
                  {{"t", true}, {"x", false}, {"y", false}, {"p", true}, {"q", true}},
                  {{"t", 1}}, {})
      .take();
}

FreeElement single(const Graph& g, std::map<std::string, int> dec, long c = 1) {
  FreeElement x;
  x.add(FreeTerm{g, std::move(dec)}, Scalar(c));
  return x;
}

}  // namespace

TEST(Decorated, DecorateExpandsMultilinearly) {
  auto P = model({{1, 1}});
  Graph g = chain_pq();
  int aa = idx(P, 1, 1, "a", "a"), bb = idx(P, 1, 1, "b", "b");
  auto x = decorate(P, g, {{"p", Vec{{aa, Scalar(2)}, {bb, Scalar(3)}}},
                           {"q", Vec{{aa, Scalar(1)}, {bb, Scalar(-1)}}}});
  ASSERT_TRUE(x.ok());
  ASSERT_EQ(x.value().terms.size(), 4u);
  Scalar total(0);
  for (const auto& [t, c] : x.value().terms) {
    EXPECT_EQ(t.dec.size(), 2u);
    total = total + c;
  }
  // (2+3) * (1-1) summed over all branches
  EXPECT_EQ(total, Scalar(0));

  auto missing = decorate(P, g, {{"p", Vec{{aa, Scalar(1)}}}});
  ASSERT_FALSE(missing.ok());
  EXPECT_EQ(missing.error().code, Errc::bad_arguments);

  auto bad_index = decorate(P, g, {{"p", Vec{{99, Scalar(1)}}}, {"q", Vec{{aa, Scalar(1)}}}});
  ASSERT_FALSE(bad_index.ok());
  EXPECT_EQ(bad_index.error().code, Errc::unknown_basis_id);

  auto no_component = decorate(model({{2, 2}}), g, {{"p", Vec{{0, Scalar(1)}}},
                                                    {"q", Vec{{0, Scalar(1)}}}});
  ASSERT_FALSE(no_component.ok());
  EXPECT_EQ(no_component.error().code, Errc::bad_arguments);
}

TEST(Decorated, SingleVertexTransportMatchesConjugation) {
  auto P = model({{3, 3}});
  Graph g = corolla(3, 3, "v");

  // Target corolla with its own flag names; the bijection below realizes a
  // 3-cycle on the output slots and a 3-cycle on the input slots.
  RawGraph raw;
  raw.flags = {"u1", "u2", "u3", "t1", "t2", "t3"};
  std::map<std::string, bool> tags;
  std::map<std::string, int> out_labels, in_labels;
  for (int k = 1; k <= 3; ++k) {
    std::string u = "u" + std::to_string(k), t = "t" + std::to_string(k);
    raw.involution[u] = u;
    raw.involution[t] = t;
    tags[u] = true;
    tags[t] = false;
    out_labels[u] = k;
    in_labels[t] = k;
  }
  raw.blocks = {{"w", {"u1", "u2", "u3", "t1", "t2", "t3"}}};
  Graph h = validate(raw, tags, out_labels, in_labels).take();

  std::map<std::string, std::string> fmap = {{"o1", "u2"}, {"o2", "u3"}, {"o3", "u1"},
                                             {"i1", "t2"}, {"i2", "t3"}, {"i3", "t1"}};
  Perm p_out = {1, 2, 0}, p_in = {1, 2, 0};

  const auto& space = P.find(3, 3)->space;
  for (int col = 0; col < space.dim(); ++col) {
    std::string id = space.ids[col];
    auto bar = id.find('|');
    std::string o = id.substr(0, bar), i = id.substr(bar + 1);

    auto moved = transport_term(P, FreeTerm{g, {{"v", col}}}, Scalar(1), fmap, h);
    ASSERT_TRUE(moved.ok());
    ASSERT_EQ(moved.value().terms.size(), 1u);

    auto [o2, s_out] = tmodel::word_perm(o, p_out);
    auto [i2, s_in] = tmodel::word_perm(i, p_in);
    const auto& [term, coeff] = moved.value().terms.front();
    EXPECT_EQ(term.dec.at("w"), idx(P, 3, 3, o2, i2));
    EXPECT_EQ(coeff, Scalar(s_out * s_in));
  }
}

TEST(Decorated, VertexOrderFlipSign) {
  auto P = model({{1, 1}});
  Graph g = chain_pq(), h = chain_zm();
  int ba = idx(P, 1, 1, "b", "a"), aa = idx(P, 1, 1, "a", "a");

  // both decorations odd: crossing the vertex order pays a sign
  auto odd = transport_term(P, FreeTerm{g, {{"p", ba}, {"q", ba}}}, Scalar(1), kChainMap, h);
  ASSERT_TRUE(odd.ok());
  ASSERT_EQ(odd.value().terms.size(), 1u);
  EXPECT_EQ(odd.value().terms.front().second, Scalar(-1));
  EXPECT_EQ(odd.value().terms.front().first.dec.at("z"), ba);
  EXPECT_EQ(odd.value().terms.front().first.dec.at("m"), ba);

  // one factor even: no sign
  auto mixed = transport_term(P, FreeTerm{g, {{"p", ba}, {"q", aa}}}, Scalar(1), kChainMap, h);
  ASSERT_TRUE(mixed.ok());
  EXPECT_EQ(mixed.value().terms.front().second, Scalar(1));
}

TEST(Decorated, TransportRoundTripAndInvariance) {
  auto P = model({{1, 1}});
  Graph g = chain_pq(), h = chain_zm();
  std::map<std::string, std::string> back;
  for (const auto& [a, b] : kChainMap) back[b] = a;

  int ba = idx(P, 1, 1, "b", "a"), ab = idx(P, 1, 1, "a", "b");
  FreeElement x = single(g, {{"p", ba}, {"q", ab}}, 5);

  auto there = transport_term(P, x.terms[0].first, x.terms[0].second, kChainMap, h);
  ASSERT_TRUE(there.ok());
  FreeElement und;
  for (const auto& [t, c] : there.value().terms) {
    auto r = transport_term(P, t, c, back, g);
    ASSERT_TRUE(r.ok());
    und = element_add(und, r.value());
  }
  auto eq = elements_equal(P, und, x);
  ASSERT_TRUE(eq.ok());
  EXPECT_TRUE(eq.value());

  // relabeling a graph does not change the normal form
  auto nf_g = normal_form(P, x);
  auto nf_h = normal_form(P, there.value());
  ASSERT_TRUE(nf_g.ok());
  ASSERT_TRUE(nf_h.ok());
  ASSERT_EQ(nf_g.value().terms.size(), nf_h.value().terms.size());
  for (std::size_t k = 0; k < nf_g.value().terms.size(); ++k) {
    EXPECT_EQ(graph_key(nf_g.value().terms[k].first.graph),
              graph_key(nf_h.value().terms[k].first.graph));
    EXPECT_EQ(nf_g.value().terms[k].first.dec, nf_h.value().terms[k].first.dec);
    EXPECT_EQ(nf_g.value().terms[k].second, nf_h.value().terms[k].second);
  }
}

TEST(Decorated, AutomorphismAverageOnParallelEdges) {
  auto P = model({{2, 0}, {0, 2}});
  Graph g = parallel_edges();
  int ab = idx(P, 2, 0, "ab", ""), ba = idx(P, 2, 0, "ba", ""), bb = idx(P, 2, 0, "bb", "");
  int iaa = idx(P, 0, 2, "", "aa"), iab = idx(P, 0, 2, "", "ab"), iba = idx(P, 0, 2, "", "ba");

  auto zero = [&](const FreeElement& x) {
    auto r = element_zero(P, x);
    EXPECT_TRUE(r.ok());
    return r.ok() && r.value();
  };

  // antisymmetric against symmetric dies under the edge swap
  FreeElement anti_sym = element_add(single(g, {{"u", ab}, {"v", iaa}}),
                                     single(g, {{"u", ba}, {"v", iaa}}, -1));
  EXPECT_TRUE(zero(anti_sym));

  // bb picks up the Koszul sign of swapping two odd factors, so it is
  // anti-invariant on its own
  EXPECT_TRUE(zero(single(g, {{"u", bb}, {"v", iaa}})));

  // antisymmetric against antisymmetric is invariant
  FreeElement anti_anti;
  anti_anti = element_add(anti_anti, single(g, {{"u", ab}, {"v", iab}}));
  anti_anti = element_add(anti_anti, single(g, {{"u", ab}, {"v", iba}}, -1));
  anti_anti = element_add(anti_anti, single(g, {{"u", ba}, {"v", iab}}, -1));
  anti_anti = element_add(anti_anti, single(g, {{"u", ba}, {"v", iba}}));
  EXPECT_FALSE(zero(anti_anti));
  auto nf = normal_form(P, anti_anti);
  ASSERT_TRUE(nf.ok());
  auto again = normal_form(P, nf.value());
  ASSERT_TRUE(again.ok());
  auto eq = elements_equal(P, nf.value(), again.value());
  ASSERT_TRUE(eq.ok());
  EXPECT_TRUE(eq.value());

  // symmetric against symmetric survives with its coefficient intact
  FreeElement sym = element_add(single(g, {{"u", ab}, {"v", iaa}}),
                                single(g, {{"u", ba}, {"v", iaa}}));
  auto nf_sym = normal_form(P, sym);
  ASSERT_TRUE(nf_sym.ok());
  Scalar total(0);
  for (const auto& [t, c] : nf_sym.value().terms) total = total + c;
  EXPECT_EQ(total, Scalar(2));
}

TEST(Decorated, FreeDifferential) {
  auto P = model({{1, 1}});
  Graph g = chain_pq();
  int aa = idx(P, 1, 1, "a", "a"), ba = idx(P, 1, 1, "b", "a");

  // d(e_{b|a}) = 0 and d(e_{a|a}) = e_{b|a}; the second factor sits past an
  // odd first factor, so the prefix sign flips it
  auto dx = free_differential(P, single(g, {{"p", ba}, {"q", aa}}));
  ASSERT_TRUE(dx.ok());
  ASSERT_EQ(dx.value().terms.size(), 1u);
  EXPECT_EQ(dx.value().terms.front().first.dec.at("p"), ba);
  EXPECT_EQ(dx.value().terms.front().first.dec.at("q"), ba);
  EXPECT_EQ(dx.value().terms.front().second, Scalar(-1));

  // degree bookkeeping
  auto deg0 = term_degree(P, FreeTerm{g, {{"p", ba}, {"q", aa}}});
  ASSERT_TRUE(deg0.ok());
  auto deg1 = term_degree(P, dx.value().terms.front().first);
  ASSERT_TRUE(deg1.ok());
  EXPECT_EQ(deg1.value(), deg0.value() + 1);
}

TEST(Decorated, FreeDifferentialSquaresToZero) {
  auto P = model({{1, 2}, {1, 0}});
  Graph g = two_in_one();
  const auto& sp = P.find(1, 2)->space;
  const auto& leaf = P.find(1, 0)->space;
  for (int c1 = 0; c1 < sp.dim(); ++c1)
    for (int c2 = 0; c2 < leaf.dim(); ++c2)
      for (int c3 = 0; c3 < leaf.dim(); ++c3) {
        FreeElement x = single(g, {{"v1", c1}, {"v2", c2}, {"v3", c3}});
        auto dx = free_differential(P, x);
        ASSERT_TRUE(dx.ok());
        auto ddx = free_differential(P, dx.value());
        ASSERT_TRUE(ddx.ok());
        auto z = element_zero(P, ddx.value());
        ASSERT_TRUE(z.ok());
        EXPECT_TRUE(z.value()) << sp.ids[c1] << " " << leaf.ids[c2] << " " << leaf.ids[c3];
      }
}

TEST(Decorated, TransportCommutesWithDifferential) {
  auto P = model({{1, 1}});
  Graph g = chain_pq(), h = chain_zm();
  const auto& sp = P.find(1, 1)->space;
  for (int c1 = 0; c1 < sp.dim(); ++c1)
    for (int c2 = 0; c2 < sp.dim(); ++c2) {
      FreeTerm t{g, {{"p", c1}, {"q", c2}}};
      auto moved = transport_term(P, t, Scalar(1), kChainMap, h);
      ASSERT_TRUE(moved.ok());
      auto d_then = free_differential(P, moved.value());
      ASSERT_TRUE(d_then.ok());

      FreeElement x;
      x.add(t, Scalar(1));
      auto dx = free_differential(P, x);
      ASSERT_TRUE(dx.ok());
      FreeElement then_d;
      for (const auto& [tt, cc] : dx.value().terms) {
        auto r = transport_term(P, tt, cc, kChainMap, h);
        ASSERT_TRUE(r.ok());
        then_d = element_add(then_d, r.value());
      }
      auto eq = elements_equal(P, d_then.value(), then_d);
      ASSERT_TRUE(eq.ok());
      EXPECT_TRUE(eq.value()) << sp.ids[c1] << " " << sp.ids[c2];
    }
}

TEST(Decorated, TransportErrors) {
  auto P = model({{1, 1}});
  Graph g = chain_pq(), h = chain_zm();

  auto incomplete = transport_term(P, FreeTerm{g, {{"p", 0}, {"q", 0}}}, Scalar(1),
                                   {{"pi", "zi"}, {"po", "zo"}, {"qi", "mi"}}, h);
  ASSERT_FALSE(incomplete.ok());
  EXPECT_EQ(incomplete.error().code, Errc::unknown_flag);

  auto splits = transport_term(P, FreeTerm{g, {{"p", 0}, {"q", 0}}}, Scalar(1),
                               {{"pi", "zi"}, {"po", "mo"}, {"qi", "mi"}, {"qo", "zo"}}, h);
  ASSERT_FALSE(splits.ok());
  EXPECT_EQ(splits.error().code, Errc::bad_arguments);

  auto bad_dec = transport_term(P, FreeTerm{g, {{"p", 0}}}, Scalar(1), kChainMap, h);
  ASSERT_FALSE(bad_dec.ok());
  EXPECT_EQ(bad_dec.error().code, Errc::unknown_basis_id);
}
