#ifndef PHTT_TREES_HPP
#define PHTT_TREES_HPP

// Contraction sequences and their equivalence classes as leaf-labeled
// trees.  A sequence contracts one admissible thick edge at a time until a
// single vertex remains; its tree records which vertex clusters merged,
// with levels forgotten.  The binary classes form T(G); allowing a whole
// admissible connected subgraph per step gives the non-binary classes
// That(G).
//
// Tree identity: children of every internal node are sorted by their
// sorted leaf lists, and leaves carry vertex ids, so equality is plain
// structural comparison of the normal form.
//
// Validity of a non-binary tree is order-sensitive: every cluster may be
// individually admissible while some intermediate quotient is cyclic
// (merging creates paths), so membership in That(G) requires a firing
// order of the internal nodes, children first, whose every intermediate
// quotient stays acyclic.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phtt/common.hpp"
#include "phtt/graph.hpp"

namespace phtt {

struct TreeNode {
  std::string leaf;                // vertex id when a leaf
  std::vector<TreeNode> children;  // empty for leaves

  bool is_leaf() const { return children.empty(); }
};

struct ContractionSequence {
  Graph graph;
  std::vector<ThickEdge> steps;
};

struct ContractionTree {
  TreeNode root;
};

inline void collect_leaves(const TreeNode& n, std::vector<std::string>& out) {
  if (n.is_leaf()) {
    out.push_back(n.leaf);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

inline std::vector<std::string> node_leaves(const TreeNode& n) {
  std::vector<std::string> out;
  collect_leaves(n, out);
  std::sort(out.begin(), out.end());
  return out;
}

inline void normalize_tree(TreeNode& n) {
  for (auto& c : n.children) normalize_tree(c);
  std::stable_sort(n.children.begin(), n.children.end(),
                   [](const TreeNode& a, const TreeNode& b) {
                     return node_leaves(a) < node_leaves(b);
                   });
}

inline std::string node_key(const TreeNode& n) {
  if (n.is_leaf()) return n.leaf;
  std::string s = "(";
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i) s += ",";
    s += node_key(n.children[i]);
  }
  return s + ")";
}

inline std::string tree_key(const ContractionTree& t) { return node_key(t.root); }

inline bool trees_equal(const ContractionTree& a, const ContractionTree& b) {
  return tree_key(a) == tree_key(b);
}

// All maximal sequences of admissible thick-edge contractions.  A graph
// with at most one vertex has exactly the empty sequence.
inline std::vector<ContractionSequence> enumerate_sequences(const Graph& g) {
  std::vector<ContractionSequence> out;
  if (g.raw.blocks.size() <= 1) {
    out.push_back(ContractionSequence{g, {}});
    return out;
  }
  for (const auto& te : thick_edges(g)) {
    auto adm = is_admissible(g, te);
    if (!adm.ok() || !adm.value()) continue;
    auto q = contract_thick_edge(g, te);
    for (auto& tail : enumerate_sequences(q.value())) {
      ContractionSequence s{g, {te}};
      s.steps.insert(s.steps.end(), tail.steps.begin(), tail.steps.end());
      out.push_back(std::move(s));
    }
  }
  return out;
}

// The merge tree of a sequence: leaves are the vertices of the starting
// graph, each internal node the merge performed by one step, levels
// forgotten.
inline ContractionTree sequence_to_tree(const ContractionSequence& s) {
  ContractionTree t;
  if (s.graph.raw.blocks.empty()) return t;
  std::map<std::string, TreeNode> at;
  for (const auto& [v, fl] : s.graph.raw.blocks) at[v] = TreeNode{v, {}};
  for (const auto& st : s.steps) {
    TreeNode merged;
    merged.children.push_back(at.at(st.source));
    merged.children.push_back(at.at(st.target));
    at.erase(st.source);
    at.erase(st.target);
    at[merge_ids(st.source, st.target)] = std::move(merged);
  }
  t.root = at.begin()->second;
  normalize_tree(t.root);
  return t;
}

inline Result<std::vector<ContractionTree>> enumerate_T(const Graph& g) {
  if (g.raw.blocks.size() < 2)
    return Error{Errc::bad_arguments, "tree enumeration needs at least two vertices"};
  std::map<std::string, ContractionTree> by_key;
  for (const auto& s : enumerate_sequences(g)) {
    auto t = sequence_to_tree(s);
    by_key.emplace(tree_key(t), std::move(t));
  }
  std::vector<ContractionTree> out;
  for (auto& [k, t] : by_key) out.push_back(std::move(t));
  return out;
}

namespace detail {

// Internal nodes of a tree in postorder, as clusters of original leaves
// plus the clusters of their direct children (singletons included).
struct MergeEvent {
  std::vector<std::string> cluster;
  std::vector<std::vector<std::string>> child_clusters;
};

inline void collect_events(const TreeNode& n, std::vector<MergeEvent>& out) {
  if (n.is_leaf()) return;
  for (const auto& c : n.children) collect_events(c, out);
  MergeEvent e;
  e.cluster = node_leaves(n);
  for (const auto& c : n.children) e.child_clusters.push_back(node_leaves(c));
  out.push_back(std::move(e));
}

// Runs the merges in the given order; each step contracts the current
// images of one event's children into one vertex.  Returns the final graph
// unless an intermediate quotient picks up a directed cycle (or, with
// require_acyclic off, unconditionally).
inline Result<Graph> run_merges(const Graph& g, const std::vector<MergeEvent>& events,
                                const std::vector<std::size_t>& order, bool require_acyclic) {
  Graph cur = g;
  std::map<std::string, std::string> now;  // original vertex id -> current id
  for (const auto& [v, fl] : g.raw.blocks) now[v] = v;
  for (std::size_t idx : order) {
    const auto& e = events[idx];
    std::set<std::string> ids;
    for (const auto& v : e.cluster) ids.insert(now.at(v));
    std::set<std::string> before;
    for (const auto& [v, fl] : cur.raw.blocks) before.insert(v);
    auto r = contract_subgraph(cur, ids);
    if (!r.ok()) return r.error();
    cur = r.take();
    std::string merged;
    for (const auto& [v, fl] : cur.raw.blocks)
      if (!before.count(v)) merged = v;
    for (auto& [ov, cv] : now)
      if (ids.count(cv)) cv = merged;
    if (require_acyclic && !is_acyclic(cur))
      return Error{Errc::directed_cycle, "intermediate quotient is cyclic"};
  }
  return cur;
}

inline bool is_descendant(const MergeEvent& a, const MergeEvent& b) {
  // a strictly below b: a's cluster strictly contained in b's.
  return a.cluster.size() < b.cluster.size() &&
         std::includes(b.cluster.begin(), b.cluster.end(), a.cluster.begin(), a.cluster.end());
}

// Some child-first firing order keeps every intermediate quotient acyclic.
inline bool has_valid_firing(const Graph& g, const ContractionTree& t) {
  std::vector<MergeEvent> events;
  collect_events(t.root, events);
  std::vector<std::size_t> order(events.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end());
  do {
    bool respects = true;
    for (std::size_t i = 0; i < order.size() && respects; ++i)
      for (std::size_t j = i + 1; j < order.size() && respects; ++j)
        if (is_descendant(events[order[j]], events[order[i]])) respects = false;
    if (!respects) continue;
    if (run_merges(g, events, order, true).ok()) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

// All cluster trees over the vertices of g whose every part is connected;
// validity against intermediate admissibility is checked by the caller.
inline std::vector<TreeNode> cluster_trees(const Graph& g) {
  std::vector<std::string> verts;
  for (const auto& [v, fl] : g.raw.blocks) verts.push_back(v);
  std::sort(verts.begin(), verts.end());
  std::size_t k = verts.size();
  std::vector<TreeNode> out;
  if (k < 2) return out;
  auto at = flag_to_vertex(g.raw);
  // Restricted-growth strings enumerate set partitions once each.
  std::vector<int> rgs(k, 0);
  auto emit = [&]() {
    int parts = *std::max_element(rgs.begin(), rgs.end()) + 1;
    if (parts < 2) return;
    std::vector<std::set<std::string>> part(static_cast<std::size_t>(parts));
    for (std::size_t i = 0; i < k; ++i) part[static_cast<std::size_t>(rgs[i])].insert(verts[i]);
    std::vector<std::vector<TreeNode>> options;
    for (const auto& p : part) {
      if (!connected_on(g.raw, at, p)) return;
      if (p.size() == 1) {
        options.push_back({TreeNode{*p.begin(), {}}});
      } else {
        auto sub = induced_subgraph(g, p);
        if (!sub.ok()) return;
        options.push_back(cluster_trees(sub.value()));
        if (options.back().empty()) return;
      }
    }
    std::vector<std::size_t> pick(options.size(), 0);
    while (true) {
      TreeNode root;
      for (std::size_t i = 0; i < options.size(); ++i)
        root.children.push_back(options[i][pick[i]]);
      normalize_tree(root);
      out.push_back(std::move(root));
      std::size_t pos = 0;
      while (pos < pick.size() && pick[pos] + 1 == options[pos].size()) pick[pos++] = 0;
      if (pos == pick.size()) break;
      ++pick[pos];
    }
  };
  // Odometer over restricted-growth strings.
  while (true) {
    emit();
    std::size_t pos = k - 1;
    while (pos > 0) {
      int cap = 0;
      for (std::size_t i = 0; i < pos; ++i) cap = std::max(cap, rgs[i]);
      if (rgs[pos] <= cap) {
        ++rgs[pos];
        for (std::size_t i = pos + 1; i < k; ++i) rgs[i] = 0;
        break;
      }
      rgs[pos] = 0;
      --pos;
    }
    if (pos == 0) break;
  }
  return out;
}

}  // namespace detail

// Equivalence classes of generalized sequences that may contract a whole
// admissible connected subgraph per step; rooted trees of arbitrary arity.
inline Result<std::vector<ContractionTree>> enumerate_That(const Graph& g) {
  if (g.raw.blocks.size() < 2)
    return Error{Errc::bad_arguments, "tree enumeration needs at least two vertices"};
  std::map<std::string, ContractionTree> by_key;
  for (auto& root : detail::cluster_trees(g)) {
    ContractionTree t{std::move(root)};
    if (!detail::has_valid_firing(g, t)) continue;
    by_key.emplace(tree_key(t), std::move(t));
  }
  std::vector<ContractionTree> out;
  for (auto& [k, t] : by_key) out.push_back(std::move(t));
  return out;
}

// Internal edges of a tree, addressed by the leaf cluster of the child
// endpoint; distinct internal nodes have distinct clusters.
inline std::vector<std::vector<std::string>> internal_edges(const ContractionTree& t) {
  std::vector<std::vector<std::string>> out;
  std::vector<const TreeNode*> stack{&t.root};
  while (!stack.empty()) {
    const TreeNode* n = stack.back();
    stack.pop_back();
    for (const auto& c : n->children) {
      if (c.is_leaf()) continue;
      out.push_back(node_leaves(c));
      stack.push_back(&c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline bool contract_node(TreeNode& n, const std::vector<std::string>& cluster) {
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    TreeNode& c = n.children[i];
    if (c.is_leaf()) continue;
    if (node_leaves(c) == cluster) {
      std::vector<TreeNode> grand = std::move(c.children);
      n.children.erase(n.children.begin() + static_cast<std::ptrdiff_t>(i));
      for (auto& gch : grand) n.children.push_back(std::move(gch));
      return true;
    }
    if (contract_node(c, cluster)) return true;
  }
  return false;
}

inline const TreeNode* find_node(const TreeNode& n, const std::vector<std::string>& cluster) {
  if (!n.is_leaf() && node_leaves(n) == cluster) return &n;
  for (const auto& c : n.children) {
    const TreeNode* r = find_node(c, cluster);
    if (r) return r;
  }
  return nullptr;
}

inline bool replace_by_leaf(TreeNode& n, const std::vector<std::string>& cluster,
                            const std::string& leaf_id) {
  for (auto& c : n.children) {
    if (!c.is_leaf() && node_leaves(c) == cluster) {
      c = TreeNode{leaf_id, {}};
      return true;
    }
    if (replace_by_leaf(c, cluster, leaf_id)) return true;
  }
  return false;
}

}  // namespace detail

// Contracts the tree edge above the internal node with the given cluster:
// its children are absorbed by its parent.
inline Result<ContractionTree> contract_tree_edge(const ContractionTree& t,
                                                  const std::vector<std::string>& cluster) {
  if (node_leaves(t.root) == cluster)
    return Error{Errc::not_an_edge, "the root has no edge above it"};
  ContractionTree out = t;
  if (!detail::contract_node(out.root, cluster))
    return Error{Errc::not_an_edge, "no internal node with this cluster"};
  normalize_tree(out.root);
  return out;
}

// The unique other (tree, internal edge) pair with the same one-step
// contraction, for binary trees of g.
inline Result<std::pair<ContractionTree, std::vector<std::string>>> tree_partner(
    const Graph& g, const ContractionTree& t, const std::vector<std::string>& cluster) {
  auto trees = enumerate_T(g);
  if (!trees.ok()) return trees.error();
  std::string tk = tree_key(t);
  bool member = false;
  for (const auto& c : trees.value()) member = member || tree_key(c) == tk;
  if (!member) return Error{Errc::bad_arguments, "tree does not arise from any sequence"};
  auto q = contract_tree_edge(t, cluster);
  if (!q.ok()) return q.error();
  std::string qk = tree_key(q.value());
  for (const auto& c : trees.value())
    for (const auto& e : internal_edges(c)) {
      if (tree_key(c) == tk && e == cluster) continue;
      auto cq = contract_tree_edge(c, e);
      if (cq.ok() && tree_key(cq.value()) == qk)
        return std::make_pair(c, e);
    }
  return Error{Errc::bad_arguments, "no partner pair found"};
}

struct TreeSplit {
  ContractionTree below;   // the subtree rooted at the edge
  ContractionTree above;   // the rest, with the subtree collapsed to a leaf
  Subgraph part;           // subgraph spanned by the subtree's leaves
  std::string merged_id;   // leaf id standing for the collapsed subtree
};

// Cuts a tree at an internal edge: the part below it is a contraction tree
// of the spanned subgraph, the part above a contraction tree of the
// quotient by that subgraph.
inline Result<TreeSplit> split_at_edge(const Graph& g, const ContractionTree& t,
                                       const std::vector<std::string>& cluster) {
  if (node_leaves(t.root) == cluster)
    return Error{Errc::not_an_edge, "the root has no edge above it"};
  const TreeNode* n = detail::find_node(t.root, cluster);
  if (!n) return Error{Errc::not_an_edge, "no internal node with this cluster"};
  TreeSplit out;
  out.below.root = *n;
  std::set<std::string> verts(cluster.begin(), cluster.end());
  out.part = subgraph_info(g, verts);
  std::string merged = cluster.front();
  for (std::size_t i = 1; i < cluster.size(); ++i) merged = merge_ids(merged, cluster[i]);
  out.merged_id = merged;
  out.above = t;
  detail::replace_by_leaf(out.above.root, cluster, merged);
  normalize_tree(out.above.root);
  return out;
}

// Runs a tree as a contraction recipe, children first, and returns the
// final one-vertex graph.  No admissibility is demanded here; membership
// checks belong to the enumerators.
inline Result<Graph> execute_tree(const Graph& g, const ContractionTree& t) {
  std::vector<detail::MergeEvent> events;
  detail::collect_events(t.root, events);
  std::vector<std::size_t> order(events.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return detail::run_merges(g, events, order, false);
}

}  // namespace phtt

#endif
