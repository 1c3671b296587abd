#ifndef PHTT_TRANSFER_HPP
#define PHTT_TRANSFER_HPP

// Homotopy transfer along a retract of bimodules.  The input is a properad
// structure (strict or homotopy) on a source bimodule together with chain
// maps f (target into source) and g (source onto target) of degree zero and
// a homotopy h of degree -1 on the source with f g - Id = d h + h d in
// every component.  The engine evaluates the tree-sum operators built from
// this data: each contraction tree of a graph composes the shifted
// two-vertex rule (or the family entry, in the homotopy case) along its
// internal nodes, with the homotopy inserted on every internal edge, and
// the sums over all trees assemble the transferred coderivation on the
// target side and the morphism back into the source side.
//
// Suspension bookkeeping routes through one primitive: applying a
// component operator at a vertex of a decorated term costs the operator
// degree against the shifted degrees standing before that vertex, plus one
// conjugation sign through the shift.  The composite inserted for a
// completed subtree (homotopy after tree value) has degree zero, so the
// evaluation order of sibling subtrees never contributes a sign.
//
// For retracts concentrated in biarity (1,1) the transferred values on
// chains obey a classical one-dimensional splitting recursion; it is
// implemented at the end of this header on flat index tensors, with no
// graphs, trees, or decorated terms, and serves as an independent oracle
// for the whole engine.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phtt/properad.hpp"

namespace phtt {

// A biarity-indexed homogeneous map between bimodules, one component map
// per biarity.  Biarities without an entry act as zero.
struct BimoduleMap {
  int degree = 0;
  std::map<std::pair<int, int>, GradedMap> at;

  const GradedMap* find(int m, int n) const {
    auto it = at.find({m, n});
    return it == at.end() ? nullptr : &it->second;
  }
};

namespace detail {

inline std::string biarity_str(int m, int n) {
  return "(" + std::to_string(m) + "," + std::to_string(n) + ")";
}

// One component map must intertwine the two components' symmetric group
// actions; the adjacent transpositions generate, so checking them suffices.
inline Status map_equivariant(const BiComponent& src, const BiComponent& dst,
                              const GradedMap& m, const std::string& who) {
  for (std::size_t i = 0; i < src.out_gen.size(); ++i) {
    auto a = compose(m, src.out_gen[i]);
    auto b = compose(dst.out_gen[i], m);
    if (!a.ok()) return a.error();
    if (!b.ok()) return b.error();
    if (!(a.value() == b.value()))
      return Error{Errc::not_equivariant, who + " against output transposition " +
                                              std::to_string(i)};
  }
  for (std::size_t i = 0; i < src.in_gen.size(); ++i) {
    auto a = compose(m, src.in_gen[i]);
    auto b = compose(dst.in_gen[i], m);
    if (!a.ok()) return a.error();
    if (!b.ok()) return b.error();
    if (!(a.value() == b.value()))
      return Error{Errc::not_equivariant,
                   who + " against input transposition " + std::to_string(i)};
  }
  return ok_status();
}

}  // namespace detail

// Validated transfer data.  Exactly one of the two source fields is set.
// Target components are a subset of the source's biarities; where the
// target has no component, g and the composite f g act as zero.
struct TransferContext {
  std::optional<Properad> strict;
  std::optional<ShProperad> homotopy;
  Bimodule target;
  BimoduleMap f;   // target -> source, degree 0
  BimoduleMap g;   // source -> target, degree 0
  BimoduleMap h;   // source -> source, degree -1
  BimoduleMap fg;  // composite on the source, built during validation

  bool is_strict() const { return strict.has_value(); }

  const Bimodule& source_module() const {
    return strict ? strict->module : homotopy->module;
  }

  ShiftedFamily source_family() const {
    return strict ? strict_family(*strict) : homotopy->family;
  }
};

namespace detail {

inline Result<TransferContext> finish_transfer_context(TransferContext ctx) {
  const Bimodule& P = ctx.source_module();
  const Bimodule& E = ctx.target;
  if (ctx.f.degree != 0 || ctx.g.degree != 0)
    return Error{Errc::bad_arguments, "f and g must have degree zero"};
  if (ctx.h.degree != -1) return Error{Errc::bad_arguments, "h must have degree -1"};

  for (const auto& [mn, ec] : E.at) {
    const std::string where = biarity_str(mn.first, mn.second);
    const BiComponent* pc = P.find(mn.first, mn.second);
    if (!pc)
      return Error{Errc::dimension_mismatch,
                   "target component " + where + " has no source counterpart"};
    const GradedMap* fm = ctx.f.find(mn.first, mn.second);
    const GradedMap* gm = ctx.g.find(mn.first, mn.second);
    if (!fm || !gm)
      return Error{Errc::bad_arguments,
                   "f and g must cover target component " + where};
    if (!(fm->src == ec.space) || !(fm->dst == pc->space) || fm->degree != 0 ||
        !map_homogeneous(*fm))
      return Error{Errc::non_homogeneous_map, "f at " + where};
    if (!(gm->src == pc->space) || !(gm->dst == ec.space) || gm->degree != 0 ||
        !map_homogeneous(*gm))
      return Error{Errc::non_homogeneous_map, "g at " + where};

    auto fe = map_equivariant(ec, *pc, *fm, "f at " + where);
    if (!fe.ok()) return fe.error();
    auto ge = map_equivariant(*pc, ec, *gm, "g at " + where);
    if (!ge.ok()) return ge.error();

    auto fchain_a = compose(pc->d, *fm);
    auto fchain_b = compose(*fm, ec.d);
    if (!fchain_a.ok()) return fchain_a.error();
    if (!fchain_b.ok()) return fchain_b.error();
    if (!(fchain_a.value() == fchain_b.value()))
      return Error{Errc::not_a_retraction, "f is not a chain map at " + where};
    auto gchain_a = compose(ec.d, *gm);
    auto gchain_b = compose(*gm, pc->d);
    if (!gchain_a.ok()) return gchain_a.error();
    if (!gchain_b.ok()) return gchain_b.error();
    if (!(gchain_a.value() == gchain_b.value()))
      return Error{Errc::not_a_retraction, "g is not a chain map at " + where};
  }

  ctx.fg = BimoduleMap{};
  ctx.fg.degree = 0;
  for (const auto& [mn, pc] : P.at) {
    const std::string where = biarity_str(mn.first, mn.second);
    const GradedMap* hm = ctx.h.find(mn.first, mn.second);
    if (!hm)
      return Error{Errc::bad_arguments, "h must cover source component " + where};
    if (!(hm->src == pc.space) || !(hm->dst == pc.space) || hm->degree != -1 ||
        !map_homogeneous(*hm))
      return Error{Errc::non_homogeneous_map, "h at " + where};
    auto he = map_equivariant(pc, pc, *hm, "h at " + where);
    if (!he.ok()) return he.error();

    GradedMap comp = GradedMap::zero(pc.space, pc.space, 0);
    const GradedMap* fm = ctx.f.find(mn.first, mn.second);
    const GradedMap* gm = ctx.g.find(mn.first, mn.second);
    if (fm && gm) {
      auto c = compose(*fm, *gm);
      if (!c.ok()) return c.error();
      comp = c.take();
    }
    GradedMap lhs = map_add(comp, map_scale(GradedMap::identity(pc.space), Scalar(-1)));
    auto dh = compose(pc.d, *hm);
    auto hd = compose(*hm, pc.d);
    if (!dh.ok()) return dh.error();
    if (!hd.ok()) return hd.error();
    if (!(lhs == map_add(dh.value(), hd.value())))
      return Error{Errc::not_a_retraction, "f g - Id != d h + h d at " + where};
    ctx.fg.at.emplace(mn, std::move(comp));
  }
  return ctx;
}

}  // namespace detail

inline Result<TransferContext> make_transfer_context(Properad source, Bimodule target,
                                                     BimoduleMap f, BimoduleMap g,
                                                     BimoduleMap h) {
  TransferContext ctx;
  ctx.strict = std::move(source);
  ctx.target = std::move(target);
  ctx.f = std::move(f);
  ctx.g = std::move(g);
  ctx.h = std::move(h);
  return detail::finish_transfer_context(std::move(ctx));
}

inline Result<TransferContext> make_transfer_context(ShProperad source, Bimodule target,
                                                     BimoduleMap f, BimoduleMap g,
                                                     BimoduleMap h) {
  TransferContext ctx;
  ctx.homotopy = std::move(source);
  ctx.target = std::move(target);
  ctx.f = std::move(f);
  ctx.g = std::move(g);
  ctx.h = std::move(h);
  return detail::finish_transfer_context(std::move(ctx));
}

namespace detail {

// Applies a biarity-indexed operator to the decoration of one vertex in the
// suspended reading of each term: the coefficient picks up the operator
// degree against the shifted prefix before the vertex plus one conjugation
// sign through the shift.  Missing components act as zero.
inline Result<FreeElement> apply_map_at(const Bimodule& M, const BimoduleMap& op,
                                        const FreeElement& x, const std::string& v) {
  FreeElement out;
  for (const auto& [t, coeff] : x.terms) {
    auto comp = vertex_component(M, t.graph, v);
    if (!comp.ok()) return comp.error();
    const GradedMap* gm = op.find(comp.value()->m, comp.value()->n);
    if (!gm) continue;
    auto it = t.dec.find(v);
    if (it == t.dec.end()) return Error{Errc::unknown_basis_id, "decoration of vertex " + v};
    auto pre = prefix_degree(M, t, v, -1);
    if (!pre.ok()) return pre.error();
    Scalar sign(op.degree % 2 != 0 && (pre.value() + 1) % 2 != 0 ? -1 : 1);
    for (const auto& [idx, c] : gm->apply_basis(it->second)) {
      FreeTerm nt = t;
      nt.dec[v] = idx;
      out.add(std::move(nt), coeff * c * sign);
    }
  }
  return out;
}

// Applies a degree-zero operator at every vertex at once; with no degree to
// move there are no signs.  Decorations are read against the source module
// and rewritten through the operator's components.
inline Result<FreeElement> apply_map_all(const Bimodule& src, const BimoduleMap& op,
                                         const FreeElement& x) {
  FreeElement out;
  for (const auto& [t, coeff] : x.terms) {
    std::vector<std::pair<std::map<std::string, int>, Scalar>> partial{{{}, coeff}};
    for (const auto& [v, fl] : t.graph.raw.blocks) {
      auto comp = vertex_component(src, t.graph, v);
      if (!comp.ok()) return comp.error();
      const GradedMap* gm = op.find(comp.value()->m, comp.value()->n);
      if (!gm) {
        partial.clear();
        break;
      }
      auto it = t.dec.find(v);
      if (it == t.dec.end())
        return Error{Errc::unknown_basis_id, "decoration of vertex " + v};
      const Vec img = gm->apply_basis(it->second);
      std::vector<std::pair<std::map<std::string, int>, Scalar>> next;
      for (const auto& [dec, c] : partial)
        for (const auto& [idx, entry] : img) {
          auto d2 = dec;
          d2[v] = idx;
          next.emplace_back(std::move(d2), c * entry);
        }
      partial = std::move(next);
    }
    for (auto& [dec, c] : partial) out.add(FreeTerm{t.graph, std::move(dec)}, c);
  }
  return out;
}

// Canonicalizes one decorated term and reads a family there.  Values come
// back in the leg-label frame, which canonicalization preserves, so sums
// over terms on different graphs with the same legs are well defined.
inline Result<Vec> family_on_term(const Bimodule& M, const ShiftedFamily& fam,
                                  const FreeTerm& t, const Scalar& coeff) {
  auto can = canonical_form(t.graph);
  if (!can.ok()) return can.error();
  auto moved = transport_term(M, t, coeff, can.value().iso, can.value().graph, -1);
  if (!moved.ok()) return moved.error();
  Vec total;
  for (const auto& [ct, cc] : moved.value().terms) {
    auto y = fam(can.value().graph, can.value().key, ct.dec);
    if (!y.ok()) return y.error();
    vec_add(total, y.value(), cc);
  }
  return total;
}

// Optional replacement of the homotopy on one tree edge, addressed by the
// child node's leaf cluster as in internal_edges.
struct EdgeMark {
  const std::vector<std::string>* cluster = nullptr;
  bool retract = false;  // insert f g instead of the identity
};

// Evaluates a subtree bottom-up on a shared element: child clusters are
// contracted through the family, each completed principal subtree is
// wrapped with the homotopy (or with the marked edge's replacement), and
// the merged vertex id is returned.  Leaves pass through untouched, which
// is the identity convention on trivial subtrees.
inline Result<std::string> theta_node(const TransferContext& ctx, const ShiftedFamily& fam,
                                      FreeElement& cur, const TreeNode& node,
                                      const EdgeMark& mark) {
  if (node.is_leaf()) return node.leaf;
  const Bimodule& M = ctx.source_module();
  std::vector<std::string> ids;
  for (const auto& child : node.children) {
    auto id = theta_node(ctx, fam, cur, child, mark);
    if (!id.ok()) return id;
    if (!child.is_leaf()) {
      bool marked = mark.cluster && node_leaves(child) == *mark.cluster;
      if (!marked) {
        auto w = apply_map_at(M, ctx.h, cur, id.value());
        if (!w.ok()) return w.error();
        cur = w.take();
      } else if (mark.retract) {
        auto w = apply_map_at(M, ctx.fg, cur, id.value());
        if (!w.ok()) return w.error();
        cur = w.take();
      }
    }
    ids.push_back(id.take());
  }
  std::set<std::string> sub(ids.begin(), ids.end());
  FreeElement next;
  for (const auto& [t, c] : cur.terms) {
    auto part = apply_family_at(M, fam, t, c, sub, -1);
    if (!part.ok()) return part.error();
    for (auto& [nt, nc] : part.value().terms) next.add(std::move(nt), nc);
  }
  cur = std::move(next);
  std::string mid;
  for (const auto& v : ids) mid = mid.empty() ? v : merge_ids(mid, v);
  return mid;
}

// One term through one tree.  The value is read in the label frame of the
// final corolla and its degree is checked against the input: one per
// internal node, minus one per homotopy insertion, which leaves +1 without
// a mark and +2 with one.
inline Result<Vec> theta_term(const TransferContext& ctx, const ShiftedFamily& fam,
                              const FreeTerm& t, const Scalar& coeff,
                              const ContractionTree& tree, const EdgeMark& mark) {
  const Bimodule& M = ctx.source_module();
  if (ctx.is_strict()) {
    std::vector<MergeEvent> events;
    collect_events(tree.root, events);
    for (const auto& e : events)
      if (e.child_clusters.size() != 2)
        return Error{Errc::bad_arguments, "a strict source composes along binary trees"};
  }
  auto din = term_degree(M, t, -1);
  if (!din.ok()) return din.error();
  FreeElement cur;
  cur.add(t, coeff);
  auto mid = theta_node(ctx, fam, cur, tree.root, mark);
  if (!mid.ok()) return mid.error();
  auto val = corolla_vector(M, cur);
  if (!val.ok()) return val.error();
  if (!vec_is_zero(val.value())) {
    int want = din.value() + 1 + (mark.cluster ? 1 : 0);
    const FreeTerm& res = cur.terms.front().first;
    auto comp = vertex_component(M, res.graph, res.graph.raw.blocks.begin()->first);
    if (!comp.ok()) return comp.error();
    for (const auto& [idx, c] : val.value())
      if (comp.value()->space.degree(idx) - 1 != want)
        return Error{Errc::bad_rule, "tree composite violates the degree law"};
  }
  return val;
}

inline Status same_graph_terms(const FreeElement& x) {
  if (x.terms.empty()) return ok_status();
  const std::string k = graph_key(x.terms.front().first.graph);
  for (const auto& [t, c] : x.terms)
    if (graph_key(t.graph) != k)
      return Error{Errc::bad_arguments, "terms must share one graph"};
  return ok_status();
}

}  // namespace detail

enum class TreeEdgeVariant {
  identity,  // drop the homotopy on the edge
  retract,   // replace it by the composite f g
};

// Tree-sum building block: composes the family along one contraction tree
// of the terms' graph with the homotopy on every internal edge.
inline Result<Vec> theta_tree(const TransferContext& ctx, const FreeElement& x,
                              const ContractionTree& tree) {
  if (tree.root.is_leaf())
    return Error{Errc::bad_arguments, "tree must have an internal node"};
  auto same = detail::same_graph_terms(x);
  if (!same.ok()) return same.error();
  auto fam = ctx.source_family();
  Vec total;
  for (const auto& [t, c] : x.terms) {
    auto v = detail::theta_term(ctx, fam, t, c, tree, {});
    if (!v.ok()) return v.error();
    vec_add(total, v.value());
  }
  return total;
}

// Same composite with the homotopy on one internal edge replaced by the
// identity or by f g.  Edges are addressed by the child node's leaf
// cluster, matching internal_edges and split_at_edge.
inline Result<Vec> theta_variant(const TransferContext& ctx, const FreeElement& x,
                                 const ContractionTree& tree,
                                 const std::vector<std::string>& edge,
                                 TreeEdgeVariant variant) {
  if (tree.root.is_leaf())
    return Error{Errc::bad_arguments, "tree must have an internal node"};
  if (node_leaves(tree.root) == edge)
    return Error{Errc::not_an_edge, "the root carries no edge"};
  const TreeNode* n = detail::find_node(tree.root, edge);
  if (!n || n->is_leaf())
    return Error{Errc::not_an_edge, "no internal node with this cluster"};
  auto same = detail::same_graph_terms(x);
  if (!same.ok()) return same.error();
  detail::EdgeMark mark{&edge, variant == TreeEdgeVariant::retract};
  auto fam = ctx.source_family();
  Vec total;
  for (const auto& [t, c] : x.terms) {
    auto v = detail::theta_term(ctx, fam, t, c, tree, mark);
    if (!v.ok()) return v.error();
    vec_add(total, v.value());
  }
  return total;
}

// Sum over all contraction trees of the terms' graph: binary trees for a
// strict source, all cluster trees for a homotopy source.
inline Result<Vec> theta_graph(const TransferContext& ctx, const FreeElement& x) {
  if (x.terms.empty()) return Vec{};
  auto same = detail::same_graph_terms(x);
  if (!same.ok()) return same.error();
  const Graph& g = x.terms.front().first.graph;
  auto trees = ctx.is_strict() ? enumerate_T(g) : enumerate_That(g);
  if (!trees.ok()) return trees.error();
  auto fam = ctx.source_family();
  Vec total;
  for (const auto& tr : trees.value())
    for (const auto& [t, c] : x.terms) {
      auto v = detail::theta_term(ctx, fam, t, c, tr, {});
      if (!v.ok()) return v.error();
      vec_add(total, v.value());
    }
  return total;
}

// Identity-variant composites summed over every (tree, internal edge) pair
// of the terms' graph.  One-step contractions pair up two by two with
// opposite signs, so the sum vanishes for a strict source; callers check
// the returned vector against zero.
inline Result<Vec> edge_variant_sum(const TransferContext& ctx, const FreeElement& x) {
  if (!ctx.is_strict())
    return Error{Errc::bad_arguments, "the edge pairing needs a strict source"};
  if (x.terms.empty()) return Vec{};
  auto same = detail::same_graph_terms(x);
  if (!same.ok()) return same.error();
  const Graph& g = x.terms.front().first.graph;
  auto trees = enumerate_T(g);
  if (!trees.ok()) return trees.error();
  auto fam = ctx.source_family();
  Vec total;
  for (const auto& tr : trees.value())
    for (const auto& edge : internal_edges(tr)) {
      detail::EdgeMark mark{&edge, false};
      for (const auto& [t, c] : x.terms) {
        auto v = detail::theta_term(ctx, fam, t, c, tr, mark);
        if (!v.ok()) return v.error();
        vec_add(total, v.value());
      }
    }
  return total;
}

// The transferred coderivation's value on one decorated graph over the
// target: the shifted target differential on corollas and g theta_G f at
// every vertex on anything larger.  The value is read in the label frame
// of the terms' graph; an outer biarity missing from the target gives
// zero.
inline Result<Vec> transfer_entry(const TransferContext& ctx, const FreeElement& y) {
  if (y.terms.empty()) return Vec{};
  auto same = detail::same_graph_terms(y);
  if (!same.ok()) return same.error();
  const Graph& g = y.terms.front().first.graph;
  if (g.raw.blocks.size() == 1) {
    Vec total;
    for (const auto& [t, c] : y.terms) {
      auto e = shifted_differential_entry(ctx.target, t.graph, t.dec);
      if (!e.ok()) return e.error();
      vec_add(total, e.value(), c);
    }
    return total;
  }
  auto xp = detail::apply_map_all(ctx.target, ctx.f, y);
  if (!xp.ok()) return xp.error();
  auto th = theta_graph(ctx, xp.value());
  if (!th.ok()) return th.error();
  if (vec_is_zero(th.value())) return Vec{};
  int m = static_cast<int>(g.out_labels.size());
  int n = static_cast<int>(g.in_labels.size());
  const GradedMap* gm = ctx.g.find(m, n);
  if (!gm) return Vec{};
  return gm->apply(th.value());
}

namespace detail {

// Morphism family entry on one decorated graph: f on the corolla, the
// homotopy applied to the full tree sum on anything larger.  Values live
// over the source, in the label frame of the given graph.
inline Result<Vec> morphism_entry(const TransferContext& ctx, const Graph& shape,
                                  const std::map<std::string, int>& dec) {
  const Bimodule& E = ctx.target;
  FreeElement y;
  y.add(FreeTerm{shape, dec}, Scalar(1));
  int m = static_cast<int>(shape.out_labels.size());
  int n = static_cast<int>(shape.in_labels.size());
  if (shape.raw.blocks.size() == 1) {
    auto lvec = corolla_vector(E, y);
    if (!lvec.ok()) return lvec.error();
    const GradedMap* fm = ctx.f.find(m, n);
    if (!fm) return Error{Errc::bad_arguments, "f misses biarity " + biarity_str(m, n)};
    return fm->apply(lvec.value());
  }
  auto xp = apply_map_all(E, ctx.f, y);
  if (!xp.ok()) return xp.error();
  auto th = theta_graph(ctx, xp.value());
  if (!th.ok()) return th.error();
  if (vec_is_zero(th.value())) return Vec{};
  const GradedMap* hm = ctx.h.find(m, n);
  if (!hm)
    return Error{Errc::bad_arguments, "h misses biarity " + biarity_str(m, n)};
  // one factor under the shift: conjugation costs the operator degree
  Vec out = vec_scale(hm->apply(th.value()), Scalar(-1));
  // the morphism preserves shifted degree
  auto din = term_degree(E, y.terms.front().first, -1);
  if (!din.ok()) return din.error();
  const BiComponent* pc = ctx.source_module().find(m, n);
  if (!pc) return Error{Errc::dimension_mismatch, "source misses " + biarity_str(m, n)};
  for (const auto& [idx, c] : out)
    if (pc->space.degree(idx) - 1 != din.value())
      return Error{Errc::bad_rule, "morphism entry violates the degree law"};
  return out;
}

}  // namespace detail

// The transferred structure packaged as memoized families on canonical
// shapes over the target: the coderivation family (corollas excluded, as
// always) and the morphism family with its corolla entries.
struct TransferResult {
  ShProperad transferred;
  ShiftedFamily morphism;
  int bound = 4;
};

inline Result<TransferResult> transferred_coderivation(const TransferContext& ctx,
                                                       int bound = 4) {
  if (bound < 1) return Error{Errc::bound_too_large, "bound must be positive"};
  if (!ctx.is_strict() && bound > ctx.homotopy->max_vertices)
    return Error{Errc::bound_too_large,
                 "bound exceeds the homotopy source's vertex cap"};
  auto cp = std::make_shared<const TransferContext>(ctx);
  struct Memo {
    std::mutex mu;
    std::map<std::string, Vec> entry, morph;
  };
  auto memo = std::make_shared<Memo>();
  ShiftedFamily fam = [cp, memo](const Graph& shape, const std::string& key,
                                 const std::map<std::string, int>& dec) -> Result<Vec> {
    if (shape.raw.blocks.size() < 2)
      return Error{Errc::bad_arguments, "family entries start at two vertices"};
    std::string mk = key + "|";
    for (const auto& [v, i] : dec) mk += v + "#" + std::to_string(i) + ";";
    {
      std::lock_guard<std::mutex> lock(memo->mu);
      auto it = memo->entry.find(mk);
      if (it != memo->entry.end()) return it->second;
    }
    FreeElement y;
    y.add(FreeTerm{shape, dec}, Scalar(1));
    auto val = transfer_entry(*cp, y);
    if (!val.ok()) return val.error();
    {
      std::lock_guard<std::mutex> lock(memo->mu);
      memo->entry.emplace(mk, val.value());
    }
    return val;
  };
  ShiftedFamily morph = [cp, memo](const Graph& shape, const std::string& key,
                                   const std::map<std::string, int>& dec) -> Result<Vec> {
    std::string mk = key + "|";
    for (const auto& [v, i] : dec) mk += v + "#" + std::to_string(i) + ";";
    {
      std::lock_guard<std::mutex> lock(memo->mu);
      auto it = memo->morph.find(mk);
      if (it != memo->morph.end()) return it->second;
    }
    auto val = detail::morphism_entry(*cp, shape, dec);
    if (!val.ok()) return val.error();
    {
      std::lock_guard<std::mutex> lock(memo->mu);
      memo->morph.emplace(mk, val.value());
    }
    return val;
  };
  TransferResult out;
  out.transferred = ShProperad{cp->target, std::move(fam), bound};
  out.morphism = std::move(morph);
  out.bound = bound;
  return out;
}

// The k-vertex component of the morphism on one decorated graph over the
// target: a sum over k-level splittings with the morphism family on each
// piece, assembled as a decorated element over the source on the quotient
// graph.  Piece values index merged-vertex decorations directly because
// induced subgraphs label their legs by sorted flag name.
inline Result<FreeElement> morphism_component(const TransferContext& ctx,
                                              const FreeElement& y, int k,
                                              const ShiftedFamily* morph = nullptr) {
  auto same = detail::same_graph_terms(y);
  if (!same.ok()) return same.error();
  if (y.terms.empty()) return FreeElement{};
  ShiftedFamily local = [&ctx](const Graph& shape, const std::string&,
                               const std::map<std::string, int>& dec) {
    return detail::morphism_entry(ctx, shape, dec);
  };
  const ShiftedFamily& mf = morph ? *morph : local;
  const Bimodule& E = ctx.target;
  const Bimodule& P = ctx.source_module();
  const Graph& g = y.terms.front().first.graph;
  int nv = static_cast<int>(g.raw.blocks.size());
  if (k < 1 || k > nv) return Error{Errc::bad_arguments, "component index out of range"};

  FreeElement out;
  if (k == 1) {
    std::set<std::string> all;
    for (const auto& [v, fl] : g.raw.blocks) all.insert(v);
    auto cq = nv == 1 ? Result<Graph>(g) : contract_subgraph(g, all);
    if (!cq.ok()) return cq.error();
    Vec total;
    for (const auto& [t, c] : y.terms) {
      auto v = detail::family_on_term(E, mf, t, c);
      if (!v.ok()) return v.error();
      vec_add(total, v.value());
    }
    return corolla_term(P, cq.value(), total);
  }

  auto splits = enumerate_splittings(g, k);
  if (!splits.ok()) return splits.error();
  for (const auto& [t, coeff] : y.terms) {
    // shifted degrees per vertex, in sorted vertex order
    std::map<std::string, int> sdeg;
    for (const auto& [v, fl] : t.graph.raw.blocks) {
      auto d = vertex_degree(E, t, v);
      if (!d.ok()) return d.error();
      sdeg[v] = d.value() - 1;
    }
    for (const auto& s : splits.value()) {
      // unshuffle sign: vertices regroup into levels, top block first
      auto block_of = [&](const std::string& v) {
        for (std::size_t b = 0; b < s.blocks.size(); ++b)
          if (s.blocks[b].count(v)) return static_cast<int>(b);
        return -1;
      };
      long e = 0;
      std::vector<std::string> vs;
      for (const auto& [v, fl] : t.graph.raw.blocks) vs.push_back(v);
      for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j)
          if (block_of(vs[i]) > block_of(vs[j]) && sdeg[vs[i]] % 2 != 0 &&
              sdeg[vs[j]] % 2 != 0)
            ++e;

      // per block: merged id, piece value, piece shifted degree
      struct Piece {
        std::string id;
        Vec value;
        int deg = 0;
      };
      std::vector<Piece> pieces;
      bool dead = false;
      for (const auto& blk : s.blocks) {
        Piece p;
        for (const auto& v : blk) p.id = p.id.empty() ? v : merge_ids(p.id, v);
        auto sub = induced_subgraph(t.graph, blk);
        if (!sub.ok()) return sub.error();
        FreeTerm pt{sub.value(), {}};
        for (const auto& v : blk) {
          auto it = t.dec.find(v);
          if (it == t.dec.end())
            return Error{Errc::unknown_basis_id, "decoration of vertex " + v};
          pt.dec[v] = it->second;
          p.deg += sdeg[v];
        }
        auto val = detail::family_on_term(E, mf, pt, Scalar(1));
        if (!val.ok()) return val.error();
        if (vec_is_zero(val.value())) {
          dead = true;
          break;
        }
        p.value = val.take();
        pieces.push_back(std::move(p));
      }
      if (dead) continue;

      // reorder from block order to the quotient's sorted vertex order
      std::vector<std::string> qorder;
      for (const auto& [v, fl] : s.quotient.raw.blocks) qorder.push_back(v);
      auto rank = [&](const std::string& id) {
        return static_cast<int>(std::find(qorder.begin(), qorder.end(), id) -
                                qorder.begin());
      };
      for (std::size_t i = 0; i < pieces.size(); ++i)
        for (std::size_t j = i + 1; j < pieces.size(); ++j)
          if (rank(pieces[i].id) > rank(pieces[j].id) && pieces[i].deg % 2 != 0 &&
              pieces[j].deg % 2 != 0)
            ++e;

      std::map<std::string, Vec> decs;
      for (auto& p : pieces) decs[p.id] = std::move(p.value);
      auto placed = decorate(P, s.quotient, decs);
      if (!placed.ok()) return placed.error();
      Scalar sign(e % 2 != 0 ? -1 : 1);
      for (auto& [nt, nc] : placed.value().terms) out.add(std::move(nt), nc * coeff * sign);
    }
  }
  return out;
}

// Per decorated shape within bounds, the two routes from the bar-type
// construction over the target into the source cogenerators must agree:
// the morphism read after the transferred coderivation equals the source
// family (with its corolla differential) read after every morphism
// component.
inline Result<CheckReport> check_morphism(const TransferContext& ctx,
                                          const TransferResult& result,
                                          const CatalogBounds& bounds) {
  CatalogBounds b = bounds;
  b.max_vertices = std::min(bounds.max_vertices, result.bound);
  const Bimodule& E = ctx.target;
  const Bimodule& P = ctx.source_module();
  auto dE = coderivation_family(E, result.transferred.family);
  auto dP = coderivation_family(P, ctx.source_family());
  return detail::sweep_decorations(
      E, b, 0, [&](const CanonicalGraph& cg, const FreeTerm& t) -> Result<Vec> {
        FreeElement y;
        y.add(t, Scalar(1));
        auto inner = coderivation_apply(E, dE, y);
        if (!inner.ok()) return inner.error();
        Vec lhs;
        for (const auto& [nt, nc] : inner.value().terms) {
          auto v = detail::family_on_term(E, result.morphism, nt, nc);
          if (!v.ok()) return v.error();
          vec_add(lhs, v.value());
        }
        int k = static_cast<int>(cg.graph.raw.blocks.size());
        for (int l = 1; l <= k; ++l) {
          if (ctx.is_strict() && l > 2) break;
          auto part = morphism_component(ctx, y, l, &result.morphism);
          if (!part.ok()) return part.error();
          for (const auto& [nt, nc] : part.value().terms) {
            auto v = detail::family_on_term(P, dP, nt, nc);
            if (!v.ok()) return v.error();
            vec_add(lhs, v.value(), Scalar(-1));
          }
        }
        return lhs;
      });
}

// The failure of theta_G to intertwine the differentials is the sum of
// retract-variant composites over every (tree, internal edge) pair, with a
// minus sign; checked on every basis decoration of every source-supported
// shape within bounds.
inline Result<CheckReport> check_theta_identity(const TransferContext& ctx,
                                                const CatalogBounds& bounds) {
  if (!ctx.is_strict())
    return Error{Errc::bad_arguments, "the identity is stated for strict sources"};
  const Bimodule& P = ctx.strict->module;
  return detail::sweep_decorations(
      P, bounds, 0, [&](const CanonicalGraph& cg, const FreeTerm& t) -> Result<Vec> {
        FreeElement x;
        x.add(t, Scalar(1));
        auto th = theta_graph(ctx, x);
        if (!th.ok()) return th.error();
        int m = static_cast<int>(cg.graph.out_labels.size());
        int n = static_cast<int>(cg.graph.in_labels.size());
        const BiComponent* pc = P.find(m, n);
        if (!pc)
          return Error{Errc::dimension_mismatch,
                       "source misses " + detail::biarity_str(m, n)};
        Vec defect = vec_scale(pc->d.apply(th.value()), Scalar(-1));
        auto dx = free_differential(P, x, -1);
        if (!dx.ok()) return dx.error();
        for (const auto& [nt, nc] : dx.value().terms) {
          FreeElement one;
          one.add(nt, nc);
          auto v = theta_graph(ctx, one);
          if (!v.ok()) return v.error();
          vec_add(defect, v.value());
        }
        auto trees = enumerate_T(cg.graph);
        if (!trees.ok()) return trees.error();
        auto fam = ctx.source_family();
        for (const auto& tr : trees.value())
          for (const auto& edge : internal_edges(tr)) {
            detail::EdgeMark mark{&edge, true};
            auto v = detail::theta_term(ctx, fam, t, Scalar(1), tr, mark);
            if (!v.ok()) return v.error();
            vec_add(defect, v.value());
          }
        return defect;
      });
}

// Exhaustive sweep of the identity-variant cancellation over every basis
// decoration within bounds.
inline Result<CheckReport> check_edge_sum(const TransferContext& ctx,
                                          const CatalogBounds& bounds) {
  if (!ctx.is_strict())
    return Error{Errc::bad_arguments, "the edge pairing needs a strict source"};
  const Bimodule& P = ctx.strict->module;
  return detail::sweep_decorations(
      P, bounds, 0, [&](const CanonicalGraph&, const FreeTerm& t) -> Result<Vec> {
        FreeElement x;
        x.add(t, Scalar(1));
        return edge_variant_sum(ctx, x);
      });
}

namespace detail {

// Flat index tensors over one graded space, for the one-dimensional
// recursion.  Keys are basis-id tuples in chain order, the receiving end
// first.
using FlatTensor = std::map<std::vector<int>, Scalar>;

inline void flat_add(FlatTensor& t, const std::vector<int>& k, const Scalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = t.emplace(k, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) t.erase(it);
  }
}

struct ChainData {
  const GradedSpace* space = nullptr;
  const GradedMap* h = nullptr;
  std::function<Vec(int, int)> mul;  // receiving end first
};

inline long flat_prefix(const ChainData& cd, const std::vector<int>& key,
                        std::size_t slot) {
  long p = 0;
  for (std::size_t s = 0; s < slot; ++s) p += cd.space->degree(key[s]) - 1;
  return p;
}

// homotopy at one slot of the suspended tensor
inline FlatTensor flat_h(const ChainData& cd, const FlatTensor& t, std::size_t slot) {
  FlatTensor out;
  for (const auto& [key, c] : t) {
    long pre = flat_prefix(cd, key, slot);
    Scalar sign((pre + 1) % 2 != 0 ? -1 : 1);
    for (const auto& [idx, e] : cd.h->apply_basis(key[slot])) {
      auto k2 = key;
      k2[slot] = idx;
      flat_add(out, k2, c * e * sign);
    }
  }
  return out;
}

// shifted product of two adjacent slots, the left factor receiving
inline FlatTensor flat_mu(const ChainData& cd, const FlatTensor& t, std::size_t slot) {
  FlatTensor out;
  for (const auto& [key, c] : t) {
    long pre = flat_prefix(cd, key, slot);
    long loc = cd.space->degree(key[slot]);
    Scalar sign((pre + loc) % 2 != 0 ? -1 : 1);
    for (const auto& [idx, e] : cd.mul(key[slot], key[slot + 1])) {
      std::vector<int> k2;
      k2.reserve(key.size() - 1);
      for (std::size_t s = 0; s < key.size(); ++s)
        if (s != slot + 1) k2.push_back(s == slot ? idx : key[s]);
      flat_add(out, k2, c * e * sign);
    }
  }
  return out;
}

// Splitting recursion: collapse the slot interval [lo, hi] to one slot.
// Singletons stay as they are; both sides of each split are collapsed,
// wrapped with the homotopy when they did collapse something, and merged.
inline FlatTensor flat_lambda(const ChainData& cd, const FlatTensor& t, std::size_t lo,
                              std::size_t hi) {
  if (lo == hi) return t;
  FlatTensor acc;
  for (std::size_t s = lo; s < hi; ++s) {
    FlatTensor left = flat_lambda(cd, t, lo, s);
    if (s > lo) left = flat_h(cd, left, lo);
    std::size_t hi2 = hi - (s - lo);
    FlatTensor right = flat_lambda(cd, left, lo + 1, hi2);
    if (hi2 > lo + 1) right = flat_h(cd, right, lo + 1);
    FlatTensor done = flat_mu(cd, right, lo);
    for (const auto& [k, c] : done) flat_add(acc, k, c);
  }
  return acc;
}

// Vertices of a chain from the outgoing leg downward.
inline Result<std::vector<std::string>> chain_order(const Graph& g) {
  auto at = flag_to_vertex(g.raw);
  std::string head;
  for (const auto& [v, fl] : g.raw.blocks)
    for (const auto& f : fl)
      if (g.out_tag.at(f) && g.raw.involution.at(f) == f) {
        if (!head.empty() && head != v) return Error{Errc::bad_arguments, "not a chain"};
        head = v;
      }
  if (head.empty()) return Error{Errc::bad_arguments, "not a chain"};
  std::vector<std::string> order;
  std::string cur = head;
  while (true) {
    order.push_back(cur);
    std::string next;
    for (const auto& f : g.raw.blocks.at(cur)) {
      if (g.out_tag.at(f)) continue;
      const std::string& mate = g.raw.involution.at(f);
      if (mate == f) continue;
      if (!next.empty()) return Error{Errc::bad_arguments, "not a chain"};
      next = at.at(mate);
    }
    if (next.empty()) break;
    cur = next;
  }
  if (order.size() != g.raw.blocks.size())
    return Error{Errc::bad_arguments, "not a chain"};
  return order;
}

}  // namespace detail

// For retracts concentrated in biarity (1,1) over a strict source, the
// transferred values on chains must reproduce the classical splitting
// recursion, evaluated here on flat tensors with no graph machinery.
// Chains from two up to max_chain vertices are checked on every basis
// tuple.
inline Result<CheckReport> check_classical_recursion(const TransferContext& ctx,
                                                     int max_chain) {
  if (!ctx.is_strict())
    return Error{Errc::bad_arguments, "the recursion compares a strict source"};
  if (max_chain < 2 || max_chain > 6)
    return Error{Errc::bound_too_large, "chain length must lie between 2 and 6"};
  const Bimodule& P = ctx.strict->module;
  const Bimodule& E = ctx.target;
  auto only11 = [](const Bimodule& M) {
    return M.at.size() == 1 && M.at.count({1, 1}) == 1;
  };
  if (!only11(P) || !only11(E))
    return Error{Errc::bad_arguments, "the recursion needs biarity (1,1) only"};
  const BiComponent& pc = P.at.at({1, 1});
  const BiComponent& ec = E.at.at({1, 1});

  ArityFilter filt;
  filt.allowed.insert({1, 1});
  CatalogBounds two;
  two.max_vertices = 2;
  two.max_out_legs = 1;
  two.max_in_legs = 1;
  two.max_parallel = 1;
  two.max_total_edges = 1;
  auto pair_shapes = enumerate_all_graphs(two, filt);
  if (!pair_shapes.ok()) return pair_shapes.error();
  const CanonicalGraph* pair_shape = nullptr;
  for (const auto& cgr : pair_shapes.value())
    if (cgr.graph.raw.blocks.size() == 2) pair_shape = &cgr;
  if (!pair_shape) return Error{Errc::bad_arguments, "no two-vertex chain in range"};
  auto rule_it = ctx.strict->mu.find(pair_shape->key);
  if (rule_it == ctx.strict->mu.end())
    return Error{Errc::shape_not_in_table, pair_shape->key};
  auto head = detail::head_vertex(pair_shape->graph);
  if (!head.ok()) return head.error();
  const bool head_first = head.value() == pair_shape->graph.raw.blocks.begin()->first;
  const MuRule* rule = &rule_it->second;
  auto mul = [rule, head_first, &pc](int a, int b) -> Vec {
    if (head_first) return detail::rule_lookup(*rule, a, b);
    Vec v = detail::rule_lookup(*rule, b, a);
    long s = static_cast<long>(pc.space.degree(a)) * pc.space.degree(b);
    return s % 2 != 0 ? vec_scale(v, Scalar(-1)) : v;
  };
  detail::ChainData cd{&pc.space, ctx.h.find(1, 1), mul};
  const GradedMap* fm = ctx.f.find(1, 1);
  const GradedMap* gm = ctx.g.find(1, 1);
  if (!cd.h || !fm || !gm) return Error{Errc::bad_arguments, "retract misses (1,1)"};

  CheckReport rep;
  for (int n = 2; n <= max_chain; ++n) {
    CatalogBounds cb;
    cb.max_vertices = n;
    cb.max_out_legs = 1;
    cb.max_in_legs = 1;
    cb.max_parallel = 1;
    cb.max_total_edges = n;
    auto shapes = enumerate_all_graphs(cb, filt);
    if (!shapes.ok()) return shapes.error();
    const CanonicalGraph* chain = nullptr;
    for (const auto& cgr : shapes.value())
      if (static_cast<int>(cgr.graph.raw.blocks.size()) == n) chain = &cgr;
    if (!chain) return Error{Errc::bad_arguments, "no chain shape in range"};
    auto order = detail::chain_order(chain->graph);
    if (!order.ok()) return order.error();

    std::vector<std::string> sorted_v;
    for (const auto& [v, fl] : chain->graph.raw.blocks) sorted_v.push_back(v);
    std::map<std::string, int> chain_pos;
    for (std::size_t i = 0; i < order.value().size(); ++i)
      chain_pos[order.value()[i]] = static_cast<int>(i);

    ++rep.shapes;
    int edim = ec.space.dim();
    if (edim == 0) continue;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
      FreeTerm t{chain->graph, {}};
      for (int i = 0; i < n; ++i)
        t.dec[order.value()[static_cast<std::size_t>(i)]] = idx[static_cast<std::size_t>(i)];
      FreeElement y;
      y.add(t, Scalar(1));
      auto got = transfer_entry(ctx, y);
      if (!got.ok()) return got.error();

      detail::FlatTensor start;
      {
        std::vector<std::pair<std::vector<int>, Scalar>> partial{{{}, Scalar(1)}};
        for (int i = 0; i < n; ++i) {
          std::vector<std::pair<std::vector<int>, Scalar>> next;
          for (const auto& [key, c] : partial)
            for (const auto& [j, e] : fm->apply_basis(idx[static_cast<std::size_t>(i)])) {
              auto k2 = key;
              k2.push_back(j);
              next.emplace_back(std::move(k2), c * e);
            }
          partial = std::move(next);
        }
        for (auto& [key, c] : partial) detail::flat_add(start, key, c);
      }
      detail::FlatTensor lam =
          detail::flat_lambda(cd, start, 0, static_cast<std::size_t>(n - 1));
      Vec oracle;
      for (const auto& [key, c] : lam) vec_add(oracle, gm->apply_basis(key[0]), c);

      // reorder sign between the sorted tensor order and the chain order
      long x = 0;
      for (std::size_t a = 0; a + 1 < sorted_v.size(); ++a)
        for (std::size_t b = a + 1; b < sorted_v.size(); ++b) {
          int pa = chain_pos.at(sorted_v[a]);
          int pb = chain_pos.at(sorted_v[b]);
          if (pa > pb &&
              (ec.space.degree(idx[static_cast<std::size_t>(pa)]) - 1) % 2 != 0 &&
              (ec.space.degree(idx[static_cast<std::size_t>(pb)]) - 1) % 2 != 0)
            ++x;
        }
      Vec diff = got.take();
      vec_add(diff, oracle, Scalar(x % 2 != 0 ? 1 : -1));
      ++rep.checks;
      if (!vec_is_zero(diff)) {
        rep.passed = false;
        rep.witness = "chain " + std::to_string(n) + " dec " + dec_key(t) + " defect " +
                      detail::vec_str(diff);
        return rep;
      }
      std::size_t p = 0;
      while (p < idx.size()) {
        if (++idx[p] < edim) break;
        idx[p] = 0;
        ++p;
      }
      if (p == idx.size()) break;
    }
  }
  return rep;
}

}  // namespace phtt

#endif  // PHTT_TRANSFER_HPP
