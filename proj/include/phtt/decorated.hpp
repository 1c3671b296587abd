#ifndef PHTT_DECORATED_HPP
#define PHTT_DECORATED_HPP

// Decorated graphs and elements of the free construction on a bimodule.
// A term assigns each vertex a basis decoration from the component of its
// arity, written against the vertex's reference slot order: out-flags
// sorted by name give output slots 0..m-1, in-flags likewise.  The term
// stands for the ordered tensor of decorations over vertices sorted by id,
// so every reordering or transport pays the Koszul sign of its degrees.
//
// Transport along a flag bijection rewrites decorations through the
// bimodule actions (slot permutations at each vertex) and the reordering
// sign of the vertex order change.  The normal form canonicalizes every
// term's graph, transports onto it, and averages over the automorphism
// group, which realizes invariants of the symmetries exactly over the
// rationals; equality and zeroness of elements are read off there.
//
// Sign-sensitive operations accept a degree shift added uniformly to every
// decoration degree, serving the suspended setting without a second basis:
// slot actions commute with the shift and stay untouched, while reordering
// parities use the shifted degrees and the vertexwise differential picks up
// the shift's sign on each application.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phtt/bimodule.hpp"
#include "phtt/canonical.hpp"
#include "phtt/common.hpp"
#include "phtt/graph.hpp"

namespace phtt {

struct FreeTerm {
  Graph graph;
  std::map<std::string, int> dec;  // vertex id -> basis index in the component of its arity
};

struct FreeElement {
  std::vector<std::pair<FreeTerm, Scalar>> terms;

  void add(FreeTerm t, Scalar c) {
    if (c.is_zero()) return;
    terms.emplace_back(std::move(t), std::move(c));
  }
};

inline std::pair<std::vector<std::string>, std::vector<std::string>> slot_flags(
    const Graph& g, const std::string& v) {
  std::vector<std::string> out, in;
  for (const auto& f : g.raw.blocks.at(v))
    (g.out_tag.at(f) ? out : in).push_back(f);
  std::sort(out.begin(), out.end());
  std::sort(in.begin(), in.end());
  return {out, in};
}

inline Result<const BiComponent*> vertex_component(const Bimodule& P, const Graph& g,
                                                   const std::string& v) {
  auto [out, in] = slot_flags(g, v);
  const BiComponent* c = P.find(static_cast<int>(out.size()), static_cast<int>(in.size()));
  if (!c)
    return Error{Errc::bad_arguments,
                 "no component of biarity (" + std::to_string(out.size()) + "," +
                     std::to_string(in.size()) + ") for vertex " + v};
  return c;
}

inline Result<int> vertex_degree(const Bimodule& P, const FreeTerm& t, const std::string& v) {
  auto c = vertex_component(P, t.graph, v);
  if (!c.ok()) return c.error();
  auto it = t.dec.find(v);
  if (it == t.dec.end() || it->second < 0 || it->second >= c.value()->space.dim())
    return Error{Errc::unknown_basis_id, "decoration of vertex " + v};
  return c.value()->space.degree(it->second);
}

inline Result<int> term_degree(const Bimodule& P, const FreeTerm& t, int dshift = 0) {
  int total = 0;
  for (const auto& [v, fl] : t.graph.raw.blocks) {
    auto d = vertex_degree(P, t, v);
    if (!d.ok()) return d.error();
    total += d.value() + dshift;
  }
  return total;
}

// Sum of decoration degrees at vertices strictly before v in the term's
// vertex order.
inline Result<int> prefix_degree(const Bimodule& P, const FreeTerm& t, const std::string& v,
                                 int dshift = 0) {
  int total = 0;
  for (const auto& [w, fl] : t.graph.raw.blocks) {
    if (w == v) return total;
    auto d = vertex_degree(P, t, w);
    if (!d.ok()) return d.error();
    total += d.value() + dshift;
  }
  return Error{Errc::bad_arguments, "vertex " + v + " not in graph"};
}

// Multilinear expansion of vector-valued decorations into basis terms.
inline Result<FreeElement> decorate(const Bimodule& P, const Graph& g,
                                    const std::map<std::string, Vec>& decs) {
  std::vector<std::pair<std::map<std::string, int>, Scalar>> partial{{{}, Scalar(1)}};
  for (const auto& [v, fl] : g.raw.blocks) {
    auto c = vertex_component(P, g, v);
    if (!c.ok()) return c.error();
    auto it = decs.find(v);
    if (it == decs.end()) return Error{Errc::bad_arguments, "no decoration for vertex " + v};
    std::vector<std::pair<std::map<std::string, int>, Scalar>> next;
    for (const auto& [partial_dec, coeff] : partial)
      for (const auto& [idx, entry] : it->second) {
        if (idx < 0 || idx >= c.value()->space.dim())
          return Error{Errc::unknown_basis_id, "decoration of vertex " + v};
        auto dec = partial_dec;
        dec[v] = idx;
        next.emplace_back(std::move(dec), coeff * entry);
      }
    partial = std::move(next);
  }
  FreeElement out;
  for (auto& [dec, coeff] : partial) out.add(FreeTerm{g, std::move(dec)}, coeff);
  return out;
}

namespace detail {

// Slot permutation of a vertex under a flag bijection: p[source slot] =
// slot of the image flag at the image vertex.
inline Result<Perm> slot_perm(const std::vector<std::string>& src_slots,
                              const std::vector<std::string>& dst_slots,
                              const std::map<std::string, std::string>& fmap) {
  Perm p(src_slots.size());
  for (std::size_t i = 0; i < src_slots.size(); ++i) {
    auto im = fmap.find(src_slots[i]);
    if (im == fmap.end()) return Error{Errc::unknown_flag, src_slots[i]};
    auto at = std::find(dst_slots.begin(), dst_slots.end(), im->second);
    if (at == dst_slots.end())
      return Error{Errc::bad_arguments, "flag bijection does not respect vertices"};
    p[i] = static_cast<int>(at - dst_slots.begin());
  }
  return p;
}

}  // namespace detail

// Carries one term through a flag bijection onto the target graph.  The
// result can have several terms when the actions are not monomial.
inline Result<FreeElement> transport_term(const Bimodule& P, const FreeTerm& t,
                                          const Scalar& coeff,
                                          const std::map<std::string, std::string>& fmap,
                                          const Graph& target, int dshift = 0) {
  // induced vertex map and its consistency
  std::map<std::string, std::string> vmap;
  auto target_at = flag_to_vertex(target.raw);
  for (const auto& [v, fl] : t.graph.raw.blocks) {
    if (fl.empty()) return Error{Errc::empty_block, v};
    std::string image;
    for (const auto& f : fl) {
      auto im = fmap.find(f);
      if (im == fmap.end()) return Error{Errc::unknown_flag, f};
      auto tv = target_at.find(im->second);
      if (tv == target_at.end()) return Error{Errc::unknown_flag, im->second};
      if (image.empty()) image = tv->second;
      if (tv->second != image)
        return Error{Errc::bad_arguments, "flag bijection splits vertex " + v};
    }
    vmap[v] = image;
  }

  // reordering sign between source and target vertex orders
  std::vector<std::string> src_order;
  std::vector<int> deg;
  for (const auto& [v, fl] : t.graph.raw.blocks) {
    src_order.push_back(v);
    auto d = vertex_degree(P, t, v);
    if (!d.ok()) return d.error();
    deg.push_back(d.value());
  }
  std::map<std::string, std::size_t> target_pos;
  {
    std::size_t j = 0;
    for (const auto& [w, fl] : target.raw.blocks) target_pos[w] = j++;
  }
  if (target_pos.size() != src_order.size())
    return Error{Errc::bad_arguments, "vertex counts differ"};
  Scalar sign(1);
  for (std::size_t i = 0; i < src_order.size(); ++i)
    for (std::size_t j = i + 1; j < src_order.size(); ++j)
      if (target_pos.at(vmap.at(src_order[i])) > target_pos.at(vmap.at(src_order[j])) &&
          (deg[i] + dshift) % 2 != 0 && (deg[j] + dshift) % 2 != 0)
        sign = sign * Scalar(-1);

  // per-vertex slot actions, expanded multilinearly
  std::vector<std::pair<std::map<std::string, int>, Scalar>> partial{{{}, sign * coeff}};
  for (const auto& [v, fl] : t.graph.raw.blocks) {
    auto c = vertex_component(P, t.graph, v);
    if (!c.ok()) return c.error();
    auto [src_out, src_in] = slot_flags(t.graph, v);
    auto [dst_out, dst_in] = slot_flags(target, vmap.at(v));
    auto po = detail::slot_perm(src_out, dst_out, fmap);
    if (!po.ok()) return po.error();
    auto pi = detail::slot_perm(src_in, dst_in, fmap);
    if (!pi.ok()) return pi.error();
    auto it = t.dec.find(v);
    if (it == t.dec.end()) return Error{Errc::unknown_basis_id, "decoration of vertex " + v};
    auto image = act(*c.value(), po.value(), perm_inverse(pi.value()),
                     Vec{{it->second, Scalar(1)}});
    if (!image.ok()) return image.error();
    std::vector<std::pair<std::map<std::string, int>, Scalar>> next;
    for (const auto& [dec, cf] : partial)
      for (const auto& [idx, entry] : image.value()) {
        auto d = dec;
        d[vmap.at(v)] = idx;
        next.emplace_back(std::move(d), cf * entry);
      }
    partial = std::move(next);
  }
  FreeElement out;
  for (auto& [dec, cf] : partial) out.add(FreeTerm{target, std::move(dec)}, cf);
  return out;
}

// Differential of the free construction: the component differential at
// each vertex in turn, with the sign of the degrees it moved past.
inline Result<FreeElement> free_differential(const Bimodule& P, const FreeElement& x,
                                             int dshift = 0) {
  Scalar dsign(dshift % 2 != 0 ? -1 : 1);
  FreeElement out;
  for (const auto& [t, coeff] : x.terms) {
    Scalar sign = dsign;
    for (const auto& [v, fl] : t.graph.raw.blocks) {
      auto c = vertex_component(P, t.graph, v);
      if (!c.ok()) return c.error();
      auto it = t.dec.find(v);
      if (it == t.dec.end()) return Error{Errc::unknown_basis_id, "decoration of vertex " + v};
      for (const auto& [idx, entry] : c.value()->d.apply_basis(it->second)) {
        FreeTerm nt = t;
        nt.dec[v] = idx;
        out.add(std::move(nt), coeff * sign * entry);
      }
      auto d = vertex_degree(P, t, v);
      if (!d.ok()) return d.error();
      if ((d.value() + dshift) % 2 != 0) sign = sign * Scalar(-1);
    }
  }
  return out;
}

inline std::string dec_key(const FreeTerm& t) {
  std::string s;
  for (const auto& [v, idx] : t.dec) s += v + "#" + std::to_string(idx) + ";";
  return s;
}

// Canonical graphs, transported decorations, automorphism average,
// combined like terms in a fixed order.
inline Result<FreeElement> normal_form(const Bimodule& P, const FreeElement& x,
                                       int dshift = 0) {
  std::map<std::string, std::pair<FreeTerm, Scalar>> acc;
  for (const auto& [t, coeff] : x.terms) {
    if (coeff.is_zero()) continue;
    auto can = canonical_form(t.graph);
    if (!can.ok()) return can.error();
    auto moved = transport_term(P, t, coeff, can.value().iso, can.value().graph, dshift);
    if (!moved.ok()) return moved.error();
    Scalar weight = Scalar(1) / Scalar(static_cast<long>(can.value().automorphisms.size()));
    for (const auto& [ct, cc] : moved.value().terms)
      for (const auto& alpha : can.value().automorphisms) {
        auto img = transport_term(P, ct, cc * weight, alpha, can.value().graph, dshift);
        if (!img.ok()) return img.error();
        for (const auto& [ft, fc] : img.value().terms) {
          std::string key = graph_key(ft.graph) + "|" + dec_key(ft);
          auto [it, fresh] = acc.emplace(key, std::make_pair(ft, fc));
          if (!fresh) it->second.second = it->second.second + fc;
        }
      }
  }
  FreeElement out;
  for (auto& [key, tc] : acc) out.add(std::move(tc.first), std::move(tc.second));
  return out;
}

inline Result<bool> element_zero(const Bimodule& P, const FreeElement& x, int dshift = 0) {
  auto nf = normal_form(P, x, dshift);
  if (!nf.ok()) return nf.error();
  return nf.value().terms.empty();
}

inline Result<bool> elements_equal(const Bimodule& P, const FreeElement& a,
                                   const FreeElement& b, int dshift = 0) {
  FreeElement diff = a;
  for (const auto& [t, c] : b.terms) diff.add(t, c * Scalar(-1));
  return element_zero(P, diff, dshift);
}

inline FreeElement element_scale(const FreeElement& x, const Scalar& c) {
  FreeElement out;
  for (const auto& [t, coeff] : x.terms) out.add(t, coeff * c);
  return out;
}

inline FreeElement element_add(const FreeElement& a, const FreeElement& b) {
  FreeElement out = a;
  for (const auto& [t, c] : b.terms) out.add(t, c);
  return out;
}

}  // namespace phtt

#endif
