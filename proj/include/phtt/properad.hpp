#ifndef PHTT_PROPERAD_HPP
#define PHTT_PROPERAD_HPP

// Properads as rule tables over canonical two-vertex shapes, and the shifted
// machinery built on them: contraction of decorated graphs one admissible
// subgraph at a time, execution of contraction trees, cocomposition,
// coderivations of the cofree construction on the suspended module, and
// checks that stored data satisfies the axioms on concrete shapes.
//
// A rule entry gives the composite of two basis decorations, read against
// the shape's vertex order and written in the shape's leg-label frame.
// Contraction then aligns frames with no convention of its own: the cut
// flags of a merged subset keep their names, the induced subgraph labels
// its legs by sorted flag name, and canonicalization preserves labels, so a
// table value indexes directly as the merged vertex's decoration.  All
// directional conventions (which decoration is composed into which) live in
// the tables themselves; validation only demands equivariance under shape
// automorphisms and compatibility with the differentials.
//
// The suspended layer works with the same basis indices under a uniform
// degree shift of -1.  A family assigns to each canonical shape a linear
// rule on shifted decorations; extending it as a coderivation sums its
// action over admissible subgraphs, with corollas contributing the shifted
// differential.  The shifted two-vertex rule of a strict properad applies
// the unshifted rule with the sign of the first factor's degree, flipped
// once more when the thick edge points at the second vertex.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phtt/bimodule.hpp"
#include "phtt/canonical.hpp"
#include "phtt/catalog.hpp"
#include "phtt/common.hpp"
#include "phtt/decorated.hpp"
#include "phtt/graph.hpp"
#include "phtt/trees.hpp"

namespace phtt {

struct MuRule {
  Graph shape;  // canonical two-vertex graph
  // (decoration at the first vertex, at the second) -> composite in the
  // shape's leg-label frame; missing pairs are zero
  std::map<std::pair<int, int>, Vec> rules;
};

struct Properad {
  Bimodule module;
  std::map<std::string, MuRule> mu;  // canonical key -> rule
  std::optional<Vec> unit;           // closed degree-zero element of the (1,1) component
};

// Rule on shifted decorations of one canonical shape: basis indices are the
// unshifted ones, the value is written in the shape's leg-label frame.
using ShiftedFamily =
    std::function<Result<Vec>(const Graph& shape, const std::string& key,
                              const std::map<std::string, int>& dec)>;

// Homotopy properad data: a family on canonical shapes with at least two
// vertices, degree one on shifted decorations, defined up to the vertex
// bound.  Corollas are implicit and contribute the shifted differential.
struct ShProperad {
  Bimodule module;
  ShiftedFamily family;
  int max_vertices = 5;
};

namespace detail {

inline std::string vec_str(const Vec& v) {
  std::string s;
  for (const auto& [i, c] : v) s += (s.empty() ? "" : " + ") + c.str() + "*[" + std::to_string(i) + "]";
  return s.empty() ? "0" : s;
}

// Slot-to-label permutations of a vertex whose every flag is a leg.
inline Result<std::pair<Perm, Perm>> label_frame_perms(const Graph& g, const std::string& v) {
  auto [out, in] = slot_flags(g, v);
  Perm po(out.size()), pi(in.size());
  for (std::size_t a = 0; a < out.size(); ++a) {
    auto it = g.out_labels.find(out[a]);
    if (it == g.out_labels.end())
      return Error{Errc::bad_arguments, "flag " + out[a] + " is not a leg"};
    po[a] = it->second - 1;
  }
  for (std::size_t a = 0; a < in.size(); ++a) {
    auto it = g.in_labels.find(in[a]);
    if (it == g.in_labels.end())
      return Error{Errc::bad_arguments, "flag " + in[a] + " is not a leg"};
    pi[a] = it->second - 1;
  }
  return std::make_pair(po, pi);
}

// The vertex a thick edge points at; any edge serves since parallel edges
// of an acyclic two-vertex graph agree in direction.
inline Result<std::string> head_vertex(const Graph& g) {
  auto at = flag_to_vertex(g.raw);
  for (const auto& [f, sf] : g.raw.involution) {
    if (sf == f) continue;
    if (g.out_tag.at(f)) return at.at(sf);
  }
  return Error{Errc::bad_arguments, "no thick edge"};
}

// Applies a family rule at one admissible vertex subset of one term: the
// selected factors move to the front (Koszul sign in shifted degrees), the
// induced subgraph is canonicalized and fed to the family, and the value is
// reinserted at the merged vertex's position in the contracted graph.
inline Result<FreeElement> apply_family_at(const Bimodule& M, const ShiftedFamily& fam,
                                           const FreeTerm& t, const Scalar& coeff,
                                           const std::set<std::string>& sub, int dshift) {
  std::map<std::string, long> deg;
  long ext = 0, bys = 0;
  for (const auto& [v, fl] : t.graph.raw.blocks) {
    auto d = vertex_degree(M, t, v);
    if (!d.ok()) return d.error();
    deg[v] = d.value() + dshift;
    if (sub.count(v))
      ext += deg[v] * bys;
    else
      bys += deg[v];
  }
  Scalar esign(ext % 2 != 0 ? -1 : 1);

  auto L = induced_subgraph(t.graph, sub);
  if (!L.ok()) return L.error();
  FreeTerm lt{L.value(), {}};
  for (const auto& v : sub) {
    auto it = t.dec.find(v);
    if (it == t.dec.end()) return Error{Errc::unknown_basis_id, "decoration of vertex " + v};
    lt.dec[v] = it->second;
  }
  auto can = canonical_form(L.value());
  if (!can.ok()) return can.error();
  auto moved = transport_term(M, lt, coeff * esign, can.value().iso, can.value().graph, dshift);
  if (!moved.ok()) return moved.error();

  // The merged component is resolved only when a value lands in it, so a
  // family that vanishes on a shape never requires the target biarity.
  std::string mid;
  for (const auto& v : sub) mid = mid.empty() ? v : merge_ids(mid, v);
  std::optional<Graph> contracted;
  const BiComponent* mc = nullptr;
  long pre = 0;
  FreeElement out;
  for (const auto& [ct, cc] : moved.value().terms) {
    auto y = fam(can.value().graph, can.value().key, ct.dec);
    if (!y.ok()) return y.error();
    if (vec_is_zero(y.value())) continue;
    if (!contracted) {
      auto cg = contract_subgraph(t.graph, sub);
      if (!cg.ok()) return cg.error();
      contracted = cg.take();
      auto comp = vertex_component(M, *contracted, mid);
      if (!comp.ok()) return comp.error();
      mc = comp.value();
      for (const auto& [w, fl] : contracted->raw.blocks) {
        if (w == mid) break;
        pre += deg.at(w);
      }
    }
    for (const auto& [idx, entry] : y.value()) {
      if (idx < 0 || idx >= mc->space.dim())
        return Error{Errc::bad_rule, "family value out of range at " + mid};
      long ydeg = mc->space.degree(idx) + dshift;
      Scalar isign(ydeg % 2 != 0 && pre % 2 != 0 ? -1 : 1);
      FreeTerm nt{*contracted, {}};
      for (const auto& [v, i] : t.dec)
        if (!sub.count(v)) nt.dec[v] = i;
      nt.dec[mid] = idx;
      out.add(std::move(nt), cc * entry * isign);
    }
  }
  return out;
}

inline Vec rule_lookup(const MuRule& r, int i, int j) {
  auto it = r.rules.find({i, j});
  return it == r.rules.end() ? Vec{} : it->second;
}

inline Result<Vec> rule_value(const Properad& P, const std::string& key,
                              const std::map<std::string, int>& dec) {
  auto it = P.mu.find(key);
  if (it == P.mu.end()) return Error{Errc::shape_not_in_table, key};
  auto a = dec.begin();
  auto b = std::next(a);
  return rule_lookup(it->second, a->second, b->second);
}

// Unshifted table lookup as a family, for strict contraction.
inline ShiftedFamily plain_rule_family(const Properad& P) {
  return [&P](const Graph&, const std::string& key,
              const std::map<std::string, int>& dec) { return rule_value(P, key, dec); };
}

}  // namespace detail

// Shifted two-vertex rule of a strict properad; three or more vertices give
// zero.  The sign is the degree of the first vertex's decoration, flipped
// once more when the thick edge points at the second vertex.
inline ShiftedFamily strict_family(const Properad& P) {
  return [P](const Graph& shape, const std::string& key,
             const std::map<std::string, int>& dec) -> Result<Vec> {
    std::size_t nv = shape.raw.blocks.size();
    if (nv < 2) return Error{Errc::bad_arguments, "family entries start at two vertices"};
    if (nv > 2) return Vec{};
    auto val = detail::rule_value(P, key, dec);
    if (!val.ok()) return val.error();
    const std::string& v0 = shape.raw.blocks.begin()->first;
    auto c0 = vertex_component(P.module, shape, v0);
    if (!c0.ok()) return c0.error();
    auto it = dec.find(v0);
    if (it == dec.end() || it->second < 0 || it->second >= c0.value()->space.dim())
      return Error{Errc::unknown_basis_id, "decoration of vertex " + v0};
    auto head = detail::head_vertex(shape);
    if (!head.ok()) return head.error();
    long e = c0.value()->space.degree(it->second) + (head.value() == v0 ? 0 : 1);
    return e % 2 != 0 ? vec_scale(val.value(), Scalar(-1)) : val.value();
  };
}

// Corolla entry shared by every coderivation: the negated component
// differential, written in the leg-label frame.
inline Result<Vec> shifted_differential_entry(const Bimodule& M, const Graph& shape,
                                              const std::map<std::string, int>& dec) {
  const std::string& v = shape.raw.blocks.begin()->first;
  auto c = vertex_component(M, shape, v);
  if (!c.ok()) return c.error();
  auto it = dec.find(v);
  if (it == dec.end() || it->second < 0 || it->second >= c.value()->space.dim())
    return Error{Errc::unknown_basis_id, "decoration of vertex " + v};
  auto p = detail::label_frame_perms(shape, v);
  if (!p.ok()) return p.error();
  auto moved = act(*c.value(), p.value().first, perm_inverse(p.value().second),
                   Vec{{it->second, Scalar(1)}});
  if (!moved.ok()) return moved.error();
  return vec_scale(c.value()->d.apply(moved.value()), Scalar(-1));
}

// Extends a family over composite shapes to the full coderivation domain by
// routing corollas to the shifted differential.
inline ShiftedFamily coderivation_family(const Bimodule& M, ShiftedFamily fam) {
  return [M, fam](const Graph& shape, const std::string& key,
                  const std::map<std::string, int>& dec) -> Result<Vec> {
    if (shape.raw.blocks.size() == 1) return shifted_differential_entry(M, shape, dec);
    return fam(shape, key, dec);
  };
}

inline ShProperad sh_from_properad(const Properad& P, int max_vertices = 5) {
  return ShProperad{P.module, strict_family(P), max_vertices};
}

// Contracts the thick edge between two vertices of one term, multiplying in
// the rule table's composite.  Inadmissible pairs (a directed path between
// the two vertices through a third) are refused.
inline Result<FreeElement> mu_contract(const Properad& P, const FreeTerm& t, const Scalar& coeff,
                                       const std::string& u, const std::string& v) {
  if (u == v) return Error{Errc::bad_arguments, "need two distinct vertices"};
  if (!t.graph.raw.blocks.count(u) || !t.graph.raw.blocks.count(v))
    return Error{Errc::bad_arguments, "unknown vertex"};
  auto info = subgraph_info(t.graph, {u, v});
  if (!info.connected)
    return Error{Errc::bad_arguments, "no thick edge between " + u + " and " + v};
  if (!info.admissible)
    return Error{Errc::directed_cycle, "contracting " + u + "," + v + " creates a directed cycle"};
  return detail::apply_family_at(P.module, detail::plain_rule_family(P), t, coeff, {u, v}, 0);
}

// Full contraction of two-vertex terms onto the corolla.
inline Result<FreeElement> mu_apply(const Properad& P, const FreeElement& x) {
  FreeElement out;
  for (const auto& [t, coeff] : x.terms) {
    if (t.graph.raw.blocks.size() != 2)
      return Error{Errc::bad_arguments, "two-vertex terms only"};
    auto a = t.graph.raw.blocks.begin();
    auto part = mu_contract(P, t, coeff, a->first, std::next(a)->first);
    if (!part.ok()) return part.error();
    for (auto& [nt, nc] : part.value().terms) out.add(std::move(nt), nc);
  }
  return out;
}

// Shifted composition of two-vertex terms onto the corolla.
inline Result<FreeElement> mu_tilde(const Properad& P, const FreeElement& x) {
  auto fam = strict_family(P);
  FreeElement out;
  for (const auto& [t, coeff] : x.terms) {
    if (t.graph.raw.blocks.size() != 2)
      return Error{Errc::bad_arguments, "two-vertex terms only"};
    std::set<std::string> all;
    for (const auto& [v, fl] : t.graph.raw.blocks) all.insert(v);
    auto info = subgraph_info(t.graph, all);
    if (!info.connected) return Error{Errc::bad_arguments, "no thick edge"};
    auto part = detail::apply_family_at(P.module, fam, t, coeff, all, -1);
    if (!part.ok()) return part.error();
    for (auto& [nt, nc] : part.value().terms) out.add(std::move(nt), nc);
  }
  return out;
}

// Executes a contraction tree on an element whose terms share one graph.
// Only trees realized by a sequence of pairwise contractions qualify: every
// event must merge exactly two clusters, and some child-first firing order
// must find the two clusters adjacent and admissible at each step.
inline Result<FreeElement> mu_tree(const Properad& P, const FreeElement& x,
                                   const ContractionTree& tree) {
  if (x.terms.empty()) return FreeElement{};
  const Graph& g0 = x.terms.front().first.graph;
  std::string k0 = graph_key(g0);
  for (const auto& [t, c] : x.terms)
    if (graph_key(t.graph) != k0) return Error{Errc::bad_arguments, "terms on different graphs"};
  std::set<std::string> vset;
  for (const auto& [v, fl] : g0.raw.blocks) vset.insert(v);
  auto leaves = node_leaves(tree.root);
  if (std::set<std::string>(leaves.begin(), leaves.end()) != vset ||
      leaves.size() != vset.size())
    return Error{Errc::bad_arguments, "tree leaves do not match the graph"};

  std::vector<detail::MergeEvent> events;
  detail::collect_events(tree.root, events);
  for (const auto& e : events)
    if (e.child_clusters.size() != 2)
      return Error{Errc::bad_arguments, "tree does not arise from a contraction sequence"};

  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  do {
    bool good = true;
    for (std::size_t p = 0; p < order.size() && good; ++p)
      for (std::size_t q = p + 1; q < order.size() && good; ++q)
        if (detail::is_descendant(events[order[q]], events[order[p]])) good = false;
    if (!good) continue;

    FreeElement cur = x;
    Graph curg = g0;
    std::map<std::string, std::string> now;
    for (const auto& v : vset) now[v] = v;
    bool feasible = true;
    for (std::size_t idx : order) {
      const auto& e = events[idx];
      std::string id1 = now.at(e.child_clusters[0].front());
      std::string id2 = now.at(e.child_clusters[1].front());
      auto info = subgraph_info(curg, {id1, id2});
      if (!info.connected || !info.admissible) {
        feasible = false;
        break;
      }
      FreeElement next;
      for (const auto& [t, c] : cur.terms) {
        auto r = mu_contract(P, t, c, id1, id2);
        if (!r.ok()) return r.error();
        for (auto& [nt, nc] : r.value().terms) next.add(std::move(nt), nc);
      }
      cur = std::move(next);
      auto cg = contract_subgraph(curg, {id1, id2});
      if (!cg.ok()) return cg.error();
      curg = cg.take();
      std::string mid = merge_ids(id1, id2);
      for (const auto& v : e.cluster) now[v] = mid;
    }
    if (feasible) return cur;
  } while (std::next_permutation(order.begin(), order.end()));
  return Error{Errc::bad_arguments, "tree does not arise from any contraction sequence"};
}

// Reads an element supported on one corolla as a vector in its leg-label
// frame.
inline Result<Vec> corolla_vector(const Bimodule& M, const FreeElement& x) {
  Vec total;
  std::string key;
  for (const auto& [t, c] : x.terms) {
    if (t.graph.raw.blocks.size() != 1)
      return Error{Errc::bad_arguments, "single-vertex terms only"};
    std::string k = graph_key(t.graph);
    if (key.empty())
      key = k;
    else if (k != key)
      return Error{Errc::bad_arguments, "terms on different graphs"};
    const std::string& v = t.graph.raw.blocks.begin()->first;
    auto comp = vertex_component(M, t.graph, v);
    if (!comp.ok()) return comp.error();
    auto it = t.dec.find(v);
    if (it == t.dec.end() || it->second < 0 || it->second >= comp.value()->space.dim())
      return Error{Errc::unknown_basis_id, "decoration of vertex " + v};
    auto p = detail::label_frame_perms(t.graph, v);
    if (!p.ok()) return p.error();
    auto moved = act(*comp.value(), p.value().first, perm_inverse(p.value().second),
                     Vec{{it->second, Scalar(1)}});
    if (!moved.ok()) return moved.error();
    vec_add(total, moved.value(), c);
  }
  return total;
}

// Inverse of corolla_vector: places a leg-label-frame vector on a corolla.
inline Result<FreeElement> corolla_term(const Bimodule& M, const Graph& g, const Vec& value) {
  if (g.raw.blocks.size() != 1) return Error{Errc::bad_arguments, "not a corolla"};
  const std::string& v = g.raw.blocks.begin()->first;
  auto comp = vertex_component(M, g, v);
  if (!comp.ok()) return comp.error();
  auto p = detail::label_frame_perms(g, v);
  if (!p.ok()) return p.error();
  auto moved = act(*comp.value(), perm_inverse(p.value().first), p.value().second, value);
  if (!moved.ok()) return moved.error();
  FreeElement out;
  for (const auto& [idx, entry] : moved.value()) out.add(FreeTerm{g, {{v, idx}}}, entry);
  return out;
}

// Extends a family (with its corolla entry) to a coderivation: the sum of
// its action over every admissible subgraph of every term.
inline Result<FreeElement> coderivation_apply(const Bimodule& M, const ShiftedFamily& fam,
                                              const FreeElement& x) {
  FreeElement out;
  for (const auto& [t, coeff] : x.terms)
    for (const auto& sub : enumerate_admissible_subgraphs(t.graph)) {
      auto part = detail::apply_family_at(M, fam, t, coeff, sub, -1);
      if (!part.ok()) return part.error();
      for (auto& [nt, nc] : part.value().terms) out.add(std::move(nt), nc);
    }
  return out;
}

// Differential of the bar construction: the coderivation extending the
// shifted differential and the shifted two-vertex composition.
inline Result<FreeElement> bar_differential(const Properad& P, const FreeElement& x) {
  return coderivation_apply(P.module, coderivation_family(P.module, strict_family(P)), x);
}

// One decorated splitting into an upper and a lower connected piece.
struct CoTerm {
  Graph quotient;  // two-vertex graph, the top piece's vertex receiving the bottom's
  std::string top_id, bottom_id;
  FreeTerm top, bottom;
};

// Cocomposition of one term: a signed sum over its two-level splittings.
// The sign is the Koszul reorder putting the top piece's factors first; the
// reduced-shifted variant adds the parity of the top piece's total degree.
// dshift moves every decoration degree uniformly, for the suspended module.
inline Result<std::vector<std::pair<CoTerm, Scalar>>> cocomposition(const Bimodule& M,
                                                                    const FreeTerm& t,
                                                                    const Scalar& coeff,
                                                                    bool shifted,
                                                                    int dshift = 0) {
  std::vector<std::pair<CoTerm, Scalar>> out;
  if (t.graph.raw.blocks.size() < 2) return out;
  auto splits = enumerate_splittings(t.graph, 2);
  if (!splits.ok()) return splits.error();
  std::map<std::string, long> deg;
  for (const auto& [v, fl] : t.graph.raw.blocks) {
    auto d = vertex_degree(M, t, v);
    if (!d.ok()) return d.error();
    deg[v] = d.value() + dshift;
  }
  for (const auto& s : splits.value()) {
    const auto& topset = s.blocks[0];
    long e = 0, bys = 0, topsum = 0;
    for (const auto& [v, fl] : t.graph.raw.blocks) {
      if (topset.count(v)) {
        e += deg[v] * bys;
        topsum += deg[v];
      } else {
        bys += deg[v];
      }
    }
    if (shifted) e += topsum;
    CoTerm ct;
    ct.quotient = s.quotient;
    for (int blk = 0; blk < 2; ++blk) {
      const auto& part = s.blocks[static_cast<std::size_t>(blk)];
      std::string id;
      for (const auto& v : part) id = id.empty() ? v : merge_ids(id, v);
      (blk == 0 ? ct.top_id : ct.bottom_id) = id;
      auto piece = induced_subgraph(t.graph, part);
      if (!piece.ok()) return piece.error();
      FreeTerm ft{piece.take(), {}};
      for (const auto& v : part) ft.dec[v] = t.dec.at(v);
      (blk == 0 ? ct.top : ct.bottom) = std::move(ft);
    }
    out.emplace_back(std::move(ct), coeff * Scalar(e % 2 != 0 ? -1 : 1));
  }
  return out;
}

struct CheckReport {
  int shapes = 0;
  long long checks = 0;
  int skipped = 0;
  bool passed = true;
  std::string witness;
};

namespace detail {

// Defect of the square identity at one decorated shape: the inner
// coderivation followed by one full application of the family, summed in
// the common leg-label frame.
inline Result<Vec> sh_defect(const Bimodule& M, const ShiftedFamily& fam, const FreeTerm& t) {
  FreeElement x;
  x.add(t, Scalar(1));
  auto inner = coderivation_apply(M, fam, x);
  if (!inner.ok()) return inner.error();
  Vec total;
  for (const auto& [nt, nc] : inner.value().terms) {
    auto can = canonical_form(nt.graph);
    if (!can.ok()) return can.error();
    auto moved = transport_term(M, nt, nc, can.value().iso, can.value().graph, -1);
    if (!moved.ok()) return moved.error();
    for (const auto& [ct, cc] : moved.value().terms) {
      auto y = fam(can.value().graph, can.value().key, ct.dec);
      if (!y.ok()) return y.error();
      vec_add(total, y.value(), cc);
    }
  }
  return total;
}

// Runs a per-decoration check over every basis decoration of every shape
// within bounds whose vertex arities the module supports.  The callback
// returns the defect vector; a missing table shape skips the whole shape.
template <typename Fn>
inline Result<CheckReport> sweep_decorations(const Bimodule& M, const CatalogBounds& bounds,
                                             int exact_vertices, Fn&& defect) {
  ArityFilter filter;
  for (const auto& [mn, comp] : M.at) filter.allowed.insert(mn);
  auto shapes = enumerate_all_graphs(bounds, filter);
  if (!shapes.ok()) return shapes.error();
  CheckReport rep;
  for (const auto& cg : shapes.value()) {
    int nv = static_cast<int>(cg.graph.raw.blocks.size());
    if (exact_vertices > 0 ? nv != exact_vertices : nv < 2) continue;
    std::vector<std::string> vs;
    std::vector<int> dims;
    for (const auto& [v, fl] : cg.graph.raw.blocks) {
      auto c = vertex_component(M, cg.graph, v);
      if (!c.ok()) return c.error();
      vs.push_back(v);
      dims.push_back(c.value()->space.dim());
    }
    ++rep.shapes;
    std::vector<int> idx(vs.size(), 0);
    bool skip_shape = false;
    while (true) {
      FreeTerm t{cg.graph, {}};
      for (std::size_t i = 0; i < vs.size(); ++i) t.dec[vs[i]] = idx[i];
      auto r = defect(cg, t);
      if (!r.ok()) {
        if (r.error().code == Errc::shape_not_in_table) {
          skip_shape = true;
          break;
        }
        return r.error();
      }
      ++rep.checks;
      if (!vec_is_zero(r.value())) {
        rep.passed = false;
        rep.witness = cg.key + " dec " + dec_key(t) + " defect " + vec_str(r.value());
        return rep;
      }
      std::size_t p = 0;
      while (p < idx.size()) {
        if (++idx[p] < dims[p]) break;
        idx[p] = 0;
        ++p;
      }
      if (p == idx.size()) break;
    }
    if (skip_shape) ++rep.skipped;
  }
  return rep;
}

}  // namespace detail

// Square identity of a homotopy properad on every decorated shape within
// bounds: the coderivation of the family followed by one full application
// must vanish.  Shapes absent from a partial table are counted as skipped.
inline Result<CheckReport> check_sh(const ShProperad& S, const CatalogBounds& bounds) {
  CatalogBounds b = bounds;
  b.max_vertices = std::min(bounds.max_vertices, S.max_vertices);
  auto fam = coderivation_family(S.module, S.family);
  return detail::sweep_decorations(
      S.module, b, 0,
      [&](const CanonicalGraph&, const FreeTerm& t) { return detail::sh_defect(S.module, fam, t); });
}

// Compares the two contraction trees of every three-vertex shape on every
// basis decoration; a strict properad must give equal composites.
inline Result<CheckReport> check_associativity(const Properad& P, const CatalogBounds& bounds) {
  CatalogBounds b = bounds;
  b.max_vertices = std::min(bounds.max_vertices, 3);
  return detail::sweep_decorations(
      P.module, b, 3,
      [&](const CanonicalGraph& cg, const FreeTerm& t) -> Result<Vec> {
        auto trees = enumerate_T(cg.graph);
        if (!trees.ok()) return trees.error();
        FreeElement x;
        x.add(t, Scalar(1));
        Vec first;
        for (std::size_t i = 0; i < trees.value().size(); ++i) {
          auto r = mu_tree(P, x, trees.value()[i]);
          if (!r.ok()) return r.error();
          auto v = corolla_vector(P.module, r.value());
          if (!v.ok()) return v.error();
          if (i == 0) {
            first = v.take();
            continue;
          }
          Vec diff = first;
          vec_add(diff, v.value(), Scalar(-1));
          if (!vec_is_zero(diff)) return diff;
        }
        return Vec{};
      });
}

namespace detail {

// Two-vertex graph grafting a (1,1) vertex above output k (when above is
// true) or below input k of an (m,n) vertex.  Remaining legs keep their
// slot numbers as labels, the grafted vertex's free leg takes label k.
inline Result<Graph> unit_graph(int m, int n, int k, bool above) {
  RawGraph raw;
  std::map<std::string, bool> out_tag;
  std::map<std::string, int> out_labels, in_labels;
  auto add = [&](const std::string& f, const std::string& v, bool is_out) {
    raw.flags.insert(f);
    raw.blocks[v].insert(f);
    raw.involution[f] = f;
    out_tag[f] = is_out;
  };
  for (int j = 1; j <= m; ++j) add("o" + std::to_string(j), "w", true);
  for (int j = 1; j <= n; ++j) add("i" + std::to_string(j), "w", false);
  add("uo", "u", true);
  add("ui", "u", false);
  std::string graft = (above ? "o" : "i") + std::to_string(k);
  std::string mate = above ? "ui" : "uo";
  raw.involution[graft] = mate;
  raw.involution[mate] = graft;
  for (int j = 1; j <= m; ++j)
    if (above ? j != k : true) out_labels["o" + std::to_string(j)] = j;
  for (int j = 1; j <= n; ++j)
    if (above ? true : j != k) in_labels["i" + std::to_string(j)] = j;
  (above ? out_labels["uo"] : in_labels["ui"]) = k;
  return validate(raw, out_tag, out_labels, in_labels);
}

}  // namespace detail

// Composing with the unit above any output or below any input must return
// the element unchanged.  Chains whose shape the table lacks are skipped.
inline Result<CheckReport> check_units(const Properad& P) {
  CheckReport rep;
  if (!P.unit) return rep;
  for (const auto& [mn, comp] : P.module.at) {
    auto [m, n] = mn;
    for (int side = 0; side < 2; ++side) {
      int legs = side == 0 ? m : n;
      for (int k = 1; k <= legs; ++k) {
        auto g = detail::unit_graph(m, n, k, side == 0);
        if (!g.ok()) return g.error();
        bool skipped = false;
        for (int i = 0; i < comp.space.dim() && !skipped; ++i) {
          auto x = decorate(P.module, g.value(), {{"w", Vec{{i, Scalar(1)}}}, {"u", *P.unit}});
          if (!x.ok()) return x.error();
          FreeElement res;
          for (const auto& [t, c] : x.value().terms) {
            auto r = mu_contract(P, t, c, "u", "w");
            if (!r.ok()) {
              if (r.error().code == Errc::shape_not_in_table) {
                ++rep.skipped;
                skipped = true;
                break;
              }
              return r.error();
            }
            for (auto& [nt, nc] : r.value().terms) res.add(std::move(nt), nc);
          }
          if (skipped) break;
          auto got = corolla_vector(P.module, res);
          if (!got.ok()) return got.error();
          ++rep.checks;
          Vec diff = got.take();
          vec_add(diff, Vec{{i, Scalar(1)}}, Scalar(-1));
          if (!vec_is_zero(diff)) {
            rep.passed = false;
            rep.witness = "unit law fails at (" + std::to_string(m) + "," + std::to_string(n) +
                          ") basis " + std::to_string(i) + (side == 0 ? " output " : " input ") +
                          std::to_string(k);
            return rep;
          }
        }
      }
    }
  }
  return rep;
}

// Builds a properad after validating every rule: canonical two-vertex
// shapes without duplicates, indices in range, values homogeneous of the
// summed degree, equivariance under shape automorphisms, compatibility with
// the differentials, and a closed degree-zero unit when one is given.
inline Result<Properad> make_properad(Bimodule module, std::vector<MuRule> rules,
                                      std::optional<Vec> unit = std::nullopt) {
  Properad P;
  P.module = std::move(module);
  for (auto& r : rules) {
    if (r.shape.raw.blocks.size() != 2)
      return Error{Errc::bad_arguments, "rule shapes have two vertices"};
    auto can = canonical_form(r.shape);
    if (!can.ok()) return can.error();
    std::string key = graph_key(r.shape);
    if (key != can.value().key)
      return Error{Errc::bad_arguments, "rule shape is not canonical"};
    if (P.mu.count(key)) return Error{Errc::bad_arguments, "duplicate rule shape " + key};
    auto head = detail::head_vertex(r.shape);
    if (!head.ok()) return head.error();

    auto a = r.shape.raw.blocks.begin();
    const std::string v0 = a->first, v1 = std::next(a)->first;
    auto c0 = vertex_component(P.module, r.shape, v0);
    if (!c0.ok()) return c0.error();
    auto c1 = vertex_component(P.module, r.shape, v1);
    if (!c1.ok()) return c1.error();
    int m = static_cast<int>(r.shape.out_labels.size());
    int n = static_cast<int>(r.shape.in_labels.size());
    const BiComponent* cm = P.module.find(m, n);
    if (!cm)
      return Error{Errc::bad_arguments, "no component of biarity (" + std::to_string(m) + "," +
                                            std::to_string(n) + ") for rule values"};

    std::map<std::pair<int, int>, Vec> clean;
    for (const auto& [pair, value] : r.rules) {
      if (pair.first < 0 || pair.first >= c0.value()->space.dim() || pair.second < 0 ||
          pair.second >= c1.value()->space.dim())
        return Error{Errc::bad_rule, "rule index out of range on " + key};
      int want = c0.value()->space.degree(pair.first) + c1.value()->space.degree(pair.second);
      Vec norm;
      for (const auto& [idx, coef] : value) {
        if (idx < 0 || idx >= cm->space.dim())
          return Error{Errc::bad_rule, "rule value out of range on " + key};
        if (!coef.is_zero() && cm->space.degree(idx) != want)
          return Error{Errc::bad_rule, "rule value is not homogeneous of the summed degree"};
        vec_add(norm, idx, coef);
      }
      if (!vec_is_zero(norm)) clean.emplace(pair, std::move(norm));
    }
    r.rules = std::move(clean);

    for (const auto& alpha : can.value().automorphisms) {
      bool identity = true;
      for (const auto& [f, im] : alpha)
        if (f != im) {
          identity = false;
          break;
        }
      if (identity) continue;
      for (int i = 0; i < c0.value()->space.dim(); ++i)
        for (int j = 0; j < c1.value()->space.dim(); ++j) {
          FreeTerm t{r.shape, {{v0, i}, {v1, j}}};
          auto moved = transport_term(P.module, t, Scalar(1), alpha, r.shape, 0);
          if (!moved.ok()) return moved.error();
          Vec rhs;
          for (const auto& [tt, cc] : moved.value().terms)
            vec_add(rhs, detail::rule_lookup(r, tt.dec.at(v0), tt.dec.at(v1)), cc);
          Vec diff = detail::rule_lookup(r, i, j);
          vec_add(diff, rhs, Scalar(-1));
          if (!vec_is_zero(diff))
            return Error{Errc::bad_rule, "rule table is not equivariant on " + key};
        }
    }

    for (int i = 0; i < c0.value()->space.dim(); ++i)
      for (int j = 0; j < c1.value()->space.dim(); ++j) {
        Vec lhs = cm->d.apply(detail::rule_lookup(r, i, j));
        Vec rhs;
        for (const auto& [k2, ck] : c0.value()->d.apply_basis(i))
          vec_add(rhs, detail::rule_lookup(r, k2, j), ck);
        Scalar sgn(c0.value()->space.degree(i) % 2 != 0 ? -1 : 1);
        for (const auto& [k2, ck] : c1.value()->d.apply_basis(j))
          vec_add(rhs, detail::rule_lookup(r, i, k2), ck * sgn);
        vec_add(lhs, rhs, Scalar(-1));
        if (!vec_is_zero(lhs))
          return Error{Errc::bad_rule, "rule table does not satisfy the derivation law on " + key};
      }

    P.mu.emplace(key, std::move(r));
  }

  if (unit) {
    const BiComponent* c = P.module.find(1, 1);
    if (!c) return Error{Errc::bad_arguments, "unit needs a (1,1) component"};
    Vec norm;
    for (const auto& [idx, coef] : *unit) {
      if (idx < 0 || idx >= c->space.dim())
        return Error{Errc::bad_arguments, "unit index out of range"};
      if (!coef.is_zero() && c->space.degree(idx) != 0)
        return Error{Errc::bad_arguments, "unit must have degree zero"};
      vec_add(norm, idx, coef);
    }
    if (vec_is_zero(norm)) return Error{Errc::bad_arguments, "unit must be nonzero"};
    if (!vec_is_zero(c->d.apply(norm)))
      return Error{Errc::bad_arguments, "unit must be closed"};
    P.unit = std::move(norm);
  }
  return P;
}

}  // namespace phtt

#endif
