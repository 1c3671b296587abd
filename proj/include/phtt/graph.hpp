#ifndef PHTT_GRAPH_HPP
#define PHTT_GRAPH_HPP

// Graphs as (flags, involution, vertex partition) with direction tags and
// numbered legs.  Edges are the 2-element involution orbits, legs the fixed
// points.  The class of interest is connected directed graphs whose
// thick-edge digraph is acyclic, plus one exceptional unit graph with a
// single edge and no vertices.
//
// All operations are pure; graphs are plain data.  String ids keep vertex
// identity stable across contraction: contracting merges "v3" and "v4" into
// "v3+v4", so untouched vertices keep their names and merged ones record
// their pre-images.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phtt/common.hpp"

namespace phtt {

struct RawGraph {
  std::set<std::string> flags;
  std::map<std::string, std::string> involution;
  std::map<std::string, std::set<std::string>> blocks;  // vertex id -> flags
};

struct Graph {
  RawGraph raw;
  std::map<std::string, bool> out_tag;  // per flag: true = out, false = in
  std::map<std::string, int> out_labels;
  std::map<std::string, int> in_labels;
  bool trivial = false;  // the unit graph: one edge, no vertices

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.trivial == b.trivial && a.raw.flags == b.raw.flags &&
           a.raw.involution == b.raw.involution && a.raw.blocks == b.raw.blocks &&
           a.out_tag == b.out_tag && a.out_labels == b.out_labels && a.in_labels == b.in_labels;
  }
};

struct ThickEdge {
  std::string source;
  std::string target;
  std::set<std::pair<std::string, std::string>> edges;  // (out-half, in-half)

  friend bool operator==(const ThickEdge& a, const ThickEdge& b) {
    return a.source == b.source && a.target == b.target && a.edges == b.edges;
  }
};

struct Subgraph {
  std::set<std::string> vertices;
  bool connected = false;
  bool admissible = false;
};

inline std::map<std::string, std::string> flag_to_vertex(const RawGraph& raw) {
  std::map<std::string, std::string> at;
  for (const auto& [v, fl] : raw.blocks)
    for (const auto& f : fl) at[f] = v;
  return at;
}

inline bool is_leg(const Graph& g, const std::string& flag) {
  auto it = g.raw.involution.find(flag);
  return it != g.raw.involution.end() && it->second == flag;
}

// Directed edges as (out-half, in-half) flag pairs, sorted by out-half.
inline std::vector<std::pair<std::string, std::string>> edge_orbits(const Graph& g) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [f, sf] : g.raw.involution) {
    if (sf == f || f > sf) continue;
    const std::string& a = g.out_tag.at(f) ? f : sf;
    const std::string& b = g.out_tag.at(f) ? sf : f;
    out.emplace_back(a, b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Legs tagged out (resp. in), indexed by label: element i-1 has label i.
inline std::vector<std::string> out_legs(const Graph& g) {
  std::vector<std::string> v(g.out_labels.size());
  for (const auto& [f, l] : g.out_labels) v[static_cast<std::size_t>(l - 1)] = f;
  return v;
}
inline std::vector<std::string> in_legs(const Graph& g) {
  std::vector<std::string> v(g.in_labels.size());
  for (const auto& [f, l] : g.in_labels) v[static_cast<std::size_t>(l - 1)] = f;
  return v;
}

inline std::pair<int, int> arity(const Graph& g) {
  return {static_cast<int>(g.out_labels.size()), static_cast<int>(g.in_labels.size())};
}

namespace detail {

// Undirected connectivity of the vertex set through edges whose halves both
// lie at vertices of the given subset.
inline bool connected_on(const RawGraph& raw, const std::map<std::string, std::string>& at,
                         const std::set<std::string>& verts) {
  if (verts.empty()) return false;
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [f, sf] : raw.involution) {
    if (sf == f || f > sf) continue;
    auto a = at.find(f), b = at.find(sf);
    if (a == at.end() || b == at.end()) continue;
    if (!verts.count(a->second) || !verts.count(b->second)) continue;
    adj[a->second].push_back(b->second);
    adj[b->second].push_back(a->second);
  }
  std::set<std::string> seen{*verts.begin()};
  std::vector<std::string> stack{*verts.begin()};
  while (!stack.empty()) {
    std::string v = stack.back();
    stack.pop_back();
    for (const auto& w : adj[v])
      if (seen.insert(w).second) stack.push_back(w);
  }
  return seen.size() == verts.size();
}

// Acyclicity of the thick-edge digraph restricted to the given vertex set.
inline bool acyclic_on(const Graph& g, const std::map<std::string, std::string>& at,
                       const std::set<std::string>& verts) {
  std::map<std::string, std::set<std::string>> succ;
  std::map<std::string, int> indeg;
  for (const auto& v : verts) indeg[v] = 0;
  for (const auto& [f, sf] : g.raw.involution) {
    if (sf == f || f > sf) continue;
    const std::string& o = g.out_tag.at(f) ? f : sf;
    const std::string& i = g.out_tag.at(f) ? sf : f;
    auto a = at.find(o), b = at.find(i);
    if (a == at.end() || b == at.end()) continue;
    if (!verts.count(a->second) || !verts.count(b->second)) continue;
    if (a->second == b->second) return false;  // loop
    if (succ[a->second].insert(b->second).second) ++indeg[b->second];
  }
  std::vector<std::string> ready;
  for (const auto& [v, d] : indeg)
    if (d == 0) ready.push_back(v);
  std::size_t done = 0;
  while (!ready.empty()) {
    std::string v = ready.back();
    ready.pop_back();
    ++done;
    for (const auto& w : succ[v])
      if (--indeg[w] == 0) ready.push_back(w);
  }
  return done == verts.size();
}

inline std::set<std::string> vertex_ids(const RawGraph& raw) {
  std::set<std::string> v;
  for (const auto& [id, fl] : raw.blocks) v.insert(id);
  return v;
}

}  // namespace detail

inline bool is_connected(const Graph& g) {
  if (g.trivial) return true;
  auto at = flag_to_vertex(g.raw);
  return detail::connected_on(g.raw, at, detail::vertex_ids(g.raw));
}

inline bool is_acyclic(const Graph& g) {
  if (g.trivial) return true;
  auto at = flag_to_vertex(g.raw);
  return detail::acyclic_on(g, at, detail::vertex_ids(g.raw));
}

// All structural violations, in a fixed check order.  validate() returns the
// first as the error; this form exposes the complete list.
inline std::vector<Error> validate_report(const RawGraph& raw,
                                          const std::map<std::string, bool>& out_tag,
                                          const std::map<std::string, int>& out_labels,
                                          const std::map<std::string, int>& in_labels,
                                          bool trivial) {
  std::vector<Error> errs;

  for (const auto& [f, sf] : raw.involution)
    if (!raw.flags.count(f) || !raw.flags.count(sf))
      errs.push_back({Errc::unknown_flag, "involution mentions " + (raw.flags.count(f) ? sf : f)});
  for (const auto& f : raw.flags) {
    auto it = raw.involution.find(f);
    if (it == raw.involution.end()) {
      errs.push_back({Errc::involution_not_involutive, "no image for " + f});
      continue;
    }
    auto back = raw.involution.find(it->second);
    if (back == raw.involution.end() || back->second != f)
      errs.push_back({Errc::involution_not_involutive, f});
  }

  std::map<std::string, int> cover;
  for (const auto& [v, fl] : raw.blocks) {
    if (fl.empty()) errs.push_back({Errc::empty_block, v});
    for (const auto& f : fl) {
      if (!raw.flags.count(f)) errs.push_back({Errc::unknown_flag, "block " + v + " holds " + f});
      if (++cover[f] > 1) errs.push_back({Errc::partition_overlap, f});
    }
  }

  if (trivial) {
    bool shape = raw.blocks.empty() && raw.flags.size() == 2;
    for (const auto& f : raw.flags)
      shape = shape && raw.involution.count(f) && raw.involution.at(f) == f;
    int outs = 0, ins = 0;
    for (const auto& f : raw.flags) {
      auto t = out_tag.find(f);
      if (t == out_tag.end()) { shape = false; break; }
      (t->second ? outs : ins)++;
    }
    shape = shape && outs == 1 && ins == 1;
    shape = shape && out_labels.size() == 1 && in_labels.size() == 1;
    for (const auto& [f, l] : out_labels) shape = shape && l == 1 && out_tag.count(f) && out_tag.at(f);
    for (const auto& [f, l] : in_labels) shape = shape && l == 1 && out_tag.count(f) && !out_tag.at(f);
    if (!shape) errs.push_back({Errc::bad_trivial, "unit graph must be a single bare edge"});
    return errs;
  }

  for (const auto& f : raw.flags)
    if (!cover.count(f)) errs.push_back({Errc::partition_overlap, "no block holds " + f});
  if (!errs.empty()) return errs;  // later checks assume a sane skeleton

  for (const auto& f : raw.flags)
    if (!out_tag.count(f)) errs.push_back({Errc::direction_inconsistent_on_edge, "no tag on " + f});
  if (!errs.empty()) return errs;
  for (const auto& [f, sf] : raw.involution)
    if (sf != f && f < sf && out_tag.at(f) == out_tag.at(sf))
      errs.push_back({Errc::direction_inconsistent_on_edge, f + "," + sf});

  auto at = flag_to_vertex(raw);
  auto verts = detail::vertex_ids(raw);
  if (verts.empty() || !detail::connected_on(raw, at, verts))
    errs.push_back({Errc::disconnected, ""});

  {
    Graph probe{raw, out_tag, out_labels, in_labels, false};
    if (errs.empty() && !detail::acyclic_on(probe, at, verts))
      errs.push_back({Errc::directed_cycle, ""});
  }

  auto check_labels = [&](const std::map<std::string, int>& labels, bool want_out,
                          const char* which) {
    std::set<std::string> expected;
    for (const auto& f : raw.flags)
      if (raw.involution.at(f) == f && out_tag.at(f) == want_out) expected.insert(f);
    std::set<int> seen;
    for (const auto& [f, l] : labels) {
      if (!expected.count(f)) {
        errs.push_back({Errc::bad_labeling, std::string(which) + " label on non-leg " + f});
        return;
      }
      if (l < 1 || !seen.insert(l).second) {
        errs.push_back({Errc::bad_labeling, std::string(which) + " label " + std::to_string(l)});
        return;
      }
    }
    if (labels.size() != expected.size() ||
        (!seen.empty() && *seen.rbegin() != static_cast<int>(seen.size())))
      errs.push_back({Errc::bad_labeling, std::string(which) + " labels not a bijection onto 1.." +
                                              std::to_string(expected.size())});
  };
  check_labels(out_labels, true, "out");
  check_labels(in_labels, false, "in");
  return errs;
}

inline Result<Graph> validate(RawGraph raw, std::map<std::string, bool> out_tag,
                              std::map<std::string, int> out_labels,
                              std::map<std::string, int> in_labels, bool trivial = false) {
  auto errs = validate_report(raw, out_tag, out_labels, in_labels, trivial);
  if (!errs.empty()) return errs.front();
  return Graph{std::move(raw), std::move(out_tag), std::move(out_labels), std::move(in_labels),
               trivial};
}

// One-vertex graph with out-legs o1..om (labels 1..m) and in-legs i1..in.
inline Graph corolla(int m, int n, const std::string& vertex_id = "v1") {
  Graph g;
  std::set<std::string> fl;
  for (int k = 1; k <= m; ++k) {
    std::string f = "o" + std::to_string(k);
    fl.insert(f);
    g.raw.involution[f] = f;
    g.out_tag[f] = true;
    g.out_labels[f] = k;
  }
  for (int k = 1; k <= n; ++k) {
    std::string f = "i" + std::to_string(k);
    fl.insert(f);
    g.raw.involution[f] = f;
    g.out_tag[f] = false;
    g.in_labels[f] = k;
  }
  g.raw.flags = fl;
  g.raw.blocks[vertex_id] = fl;
  return g;
}

inline Graph trivial_graph() {
  Graph g;
  g.trivial = true;
  g.raw.flags = {"uo", "ui"};
  g.raw.involution = {{"uo", "uo"}, {"ui", "ui"}};
  g.out_tag = {{"uo", true}, {"ui", false}};
  g.out_labels = {{"uo", 1}};
  g.in_labels = {{"ui", 1}};
  return g;
}

// Contraction of one 2-element orbit (i, j) in the undirected skeleton: both
// flags disappear and the incident blocks merge.
inline Result<RawGraph> contract_single_edge(const RawGraph& raw, const std::string& i,
                                             const std::string& j) {
  auto it = raw.involution.find(i);
  if (i == j || it == raw.involution.end() || it->second != j)
    return Error{Errc::not_an_edge, i + "," + j};
  auto at = flag_to_vertex(raw);
  if (!at.count(i) || !at.count(j)) return Error{Errc::not_an_edge, i + "," + j + " not at vertices"};
  RawGraph out;
  for (const auto& f : raw.flags)
    if (f != i && f != j) out.flags.insert(f);
  for (const auto& [f, sf] : raw.involution)
    if (f != i && f != j) out.involution[f] = sf;
  std::string bi = at.at(i), bj = at.at(j);
  std::set<std::string> merged;
  for (const auto& [v, fl] : raw.blocks) {
    if (v == bi || v == bj) {
      for (const auto& f : fl)
        if (f != i && f != j) merged.insert(f);
    } else {
      out.blocks[v] = fl;
    }
  }
  std::string mid = bi == bj ? bi : bi + "+" + bj;
  if (!merged.empty()) out.blocks[mid] = merged;
  return out;
}

// Vertex ids are '+'-joins of original ids; merging re-joins the union so
// the id of a merged vertex lists exactly its pre-images, sorted.
inline std::string merge_ids(const std::string& a, const std::string& b) {
  std::set<std::string> parts;
  auto split = [&parts](const std::string& s) {
    std::size_t p = 0;
    while (p <= s.size()) {
      std::size_t q = s.find('+', p);
      if (q == std::string::npos) q = s.size();
      parts.insert(s.substr(p, q - p));
      p = q + 1;
    }
  };
  split(a);
  split(b);
  std::string out;
  for (const auto& s : parts) {
    if (!out.empty()) out += "+";
    out += s;
  }
  return out;
}

inline std::vector<ThickEdge> thick_edges(const Graph& g) {
  auto at = flag_to_vertex(g.raw);
  std::map<std::pair<std::string, std::string>, ThickEdge> by_pair;
  for (const auto& [o, i] : edge_orbits(g)) {
    std::pair<std::string, std::string> key{at.at(o), at.at(i)};
    auto& te = by_pair[key];
    te.source = key.first;
    te.target = key.second;
    te.edges.insert({o, i});
  }
  std::vector<ThickEdge> out;
  for (auto& [k, te] : by_pair) out.push_back(std::move(te));
  return out;
}

// Contract a whole thick edge: every parallel edge between the two endpoint
// vertices disappears and the endpoints merge.  The result need not be
// acyclic; admissibility is a separate question.
inline Result<Graph> contract_thick_edge(const Graph& g, const ThickEdge& eps) {
  bool found = false;
  for (const auto& te : thick_edges(g))
    if (te == eps) { found = true; break; }
  if (!found) return Error{Errc::not_a_thick_edge, eps.source + "->" + eps.target};

  std::set<std::string> dropped;
  for (const auto& [o, i] : eps.edges) {
    dropped.insert(o);
    dropped.insert(i);
  }
  Graph out;
  for (const auto& f : g.raw.flags)
    if (!dropped.count(f)) out.raw.flags.insert(f);
  for (const auto& [f, sf] : g.raw.involution)
    if (!dropped.count(f)) out.raw.involution[f] = sf;
  std::set<std::string> merged;
  for (const auto& [v, fl] : g.raw.blocks) {
    if (v == eps.source || v == eps.target) {
      for (const auto& f : fl)
        if (!dropped.count(f)) merged.insert(f);
    } else {
      out.raw.blocks[v] = fl;
    }
  }
  out.raw.blocks[merge_ids(eps.source, eps.target)] = merged;
  for (const auto& [f, t] : g.out_tag)
    if (!dropped.count(f)) out.out_tag[f] = t;
  out.out_labels = g.out_labels;
  out.in_labels = g.in_labels;
  return out;
}

inline Result<bool> is_admissible(const Graph& g, const ThickEdge& eps) {
  auto c = contract_thick_edge(g, eps);
  if (!c.ok()) return c.error();
  return is_acyclic(c.value());
}

// Merge a vertex subset into a single vertex, deleting all edges internal to
// the subset.  This is contraction along a subgraph; for a two-vertex subset
// it agrees with contracting the thick edge between them.
inline Result<Graph> contract_subgraph(const Graph& g, const std::set<std::string>& verts) {
  if (verts.empty()) return Error{Errc::bad_arguments, "empty vertex subset"};
  for (const auto& v : verts)
    if (!g.raw.blocks.count(v)) return Error{Errc::bad_arguments, "unknown vertex " + v};
  auto at = flag_to_vertex(g.raw);
  std::set<std::string> dropped;
  for (const auto& [f, sf] : g.raw.involution) {
    if (sf == f) continue;
    if (verts.count(at.at(f)) && verts.count(at.at(sf))) dropped.insert(f);
  }
  Graph out;
  for (const auto& f : g.raw.flags)
    if (!dropped.count(f)) out.raw.flags.insert(f);
  for (const auto& [f, sf] : g.raw.involution)
    if (!dropped.count(f)) out.raw.involution[f] = sf;
  std::string mid;
  std::set<std::string> merged;
  for (const auto& [v, fl] : g.raw.blocks) {
    if (verts.count(v)) {
      mid = mid.empty() ? v : merge_ids(mid, v);
      for (const auto& f : fl)
        if (!dropped.count(f)) merged.insert(f);
    } else {
      out.raw.blocks[v] = fl;
    }
  }
  out.raw.blocks[mid] = merged;
  for (const auto& [f, t] : g.out_tag)
    if (!dropped.count(f)) out.out_tag[f] = t;
  out.out_labels = g.out_labels;
  out.in_labels = g.in_labels;
  return out;
}

// Stand-alone induced subgraph on a vertex subset.  Edges with one half
// outside become legs; leg labels are assigned by sorted flag name, out and
// in numbered independently from 1.
inline Result<Graph> induced_subgraph(const Graph& g, const std::set<std::string>& verts) {
  if (verts.empty()) return Error{Errc::bad_arguments, "empty vertex subset"};
  auto at = flag_to_vertex(g.raw);
  Graph out;
  for (const auto& v : verts) {
    auto it = g.raw.blocks.find(v);
    if (it == g.raw.blocks.end()) return Error{Errc::bad_arguments, "unknown vertex " + v};
    out.raw.blocks[v] = it->second;
    for (const auto& f : it->second) out.raw.flags.insert(f);
  }
  for (const auto& f : out.raw.flags) {
    const std::string& sf = g.raw.involution.at(f);
    out.raw.involution[f] = out.raw.flags.count(sf) ? sf : f;
    out.out_tag[f] = g.out_tag.at(f);
  }
  int next_out = 1, next_in = 1;
  for (const auto& f : out.raw.flags) {  // std::set: sorted by name
    if (out.raw.involution.at(f) != f) continue;
    if (out.out_tag.at(f))
      out.out_labels[f] = next_out++;
    else
      out.in_labels[f] = next_in++;
  }
  return out;
}

inline Subgraph subgraph_info(const Graph& g, const std::set<std::string>& verts) {
  Subgraph s;
  s.vertices = verts;
  auto at = flag_to_vertex(g.raw);
  s.connected = detail::connected_on(g.raw, at, verts);
  if (s.connected) {
    auto q = contract_subgraph(g, verts);
    s.admissible = q.ok() && is_acyclic(q.value());
  }
  return s;
}

// All vertex subsets inducing a connected subgraph whose contraction leaves
// the graph acyclic; includes every single vertex and the full vertex set.
// Sorted by size, then by joined vertex ids.
inline std::vector<std::set<std::string>> enumerate_admissible_subgraphs(const Graph& g) {
  std::set<std::string> vset = detail::vertex_ids(g.raw);
  std::vector<std::string> verts(vset.begin(), vset.end());
  std::vector<std::set<std::string>> out;
  int n = static_cast<int>(verts.size());
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::set<std::string> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) s.insert(verts[static_cast<std::size_t>(i)]);
    auto info = subgraph_info(g, s);
    if (info.connected && info.admissible) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

struct Splitting {
  std::vector<std::set<std::string>> blocks;  // blocks[0] is the top level
  Graph quotient;                             // one vertex per block, ids joined
};

// Ordered partitions of the vertex set into k connected pieces such that
// every quotient edge runs from a later block to an earlier one, so the
// tuple can be read as an iterated grafting with blocks[0] on top.
inline Result<std::vector<Splitting>> enumerate_splittings(const Graph& g, int k) {
  std::set<std::string> vset = detail::vertex_ids(g.raw);
  std::vector<std::string> verts(vset.begin(), vset.end());
  int n = static_cast<int>(verts.size());
  if (k < 1 || k > n) return Error{Errc::bad_arguments, "k out of range"};

  auto at = flag_to_vertex(g.raw);
  std::vector<Splitting> out;

  // restricted-growth strings enumerate unordered partitions into exactly k
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  auto emit = [&]() {
    std::vector<std::set<std::string>> blocks(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i)
      blocks[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])].insert(
          verts[static_cast<std::size_t>(i)]);
    for (const auto& b : blocks)
      if (!detail::connected_on(g.raw, at, b)) return;
    // quotient arrows between unordered blocks
    auto block_of = [&](const std::string& v) {
      for (int b = 0; b < k; ++b)
        if (blocks[static_cast<std::size_t>(b)].count(v)) return b;
      return -1;
    };
    std::set<std::pair<int, int>> arrows;
    for (const auto& [o, i] : edge_orbits(g)) {
      int a = block_of(at.at(o)), b = block_of(at.at(i));
      if (a != b) arrows.insert({a, b});
    }
    std::vector<int> perm(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
    do {  // perm[p] = which block sits at position p; arrows must go later->earlier
      std::vector<int> pos(static_cast<std::size_t>(k));
      for (int p = 0; p < k; ++p) pos[static_cast<std::size_t>(perm[static_cast<std::size_t>(p)])] = p;
      bool good = true;
      for (const auto& [a, b] : arrows)
        if (pos[static_cast<std::size_t>(a)] <= pos[static_cast<std::size_t>(b)]) { good = false; break; }
      if (!good) continue;
      Splitting s;
      s.blocks.resize(static_cast<std::size_t>(k));
      for (int p = 0; p < k; ++p)
        s.blocks[static_cast<std::size_t>(p)] = blocks[static_cast<std::size_t>(perm[static_cast<std::size_t>(p)])];
      Graph q = g;
      for (const auto& blk : s.blocks) {
        auto c = contract_subgraph(q, blk);
        if (!c.ok()) return;
        q = c.take();
      }
      if (!is_acyclic(q)) return;  // cannot happen given the arrow filter
      s.quotient = std::move(q);
      out.push_back(std::move(s));
    } while (std::next_permutation(perm.begin(), perm.end()));
  };

  // enumerate surjections onto {0..k-1} up to block renaming
  std::vector<int> maxes(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int i, int used) -> void {
    if (i == n) {
      if (used == k) emit();
      return;
    }
    for (int b = 0; b <= used && b < k; ++b) {
      assign[static_cast<std::size_t>(i)] = b;
      self(self, i + 1, std::max(used, b + 1));
    }
  };
  rec(rec, 0, 0);

  std::sort(out.begin(), out.end(), [](const Splitting& a, const Splitting& b) {
    return a.blocks < b.blocks;
  });
  return out;
}

struct Relabeling {
  std::map<std::string, int> out_labels;
  std::map<std::string, int> in_labels;
};

// Graft g2's out-legs into g1's in-legs (g1 on top).  Flag names of the two
// graphs must be disjoint; glued legs become internal edges, surviving legs
// take the supplied labels.  Unit graphs compose by renaming the absorbed
// leg, so grafting with the unit is isomorphism on the nose.
inline Result<Graph> graft(const Graph& g1, const Graph& g2,
                           const std::vector<std::pair<std::string, std::string>>& pairs,
                           const Relabeling& relab) {
  for (const auto& f : g1.raw.flags)
    if (g2.raw.flags.count(f)) return Error{Errc::bad_graft_pair, "flag sets overlap at " + f};

  std::set<std::string> used;
  for (const auto& [x, y] : pairs) {
    if (!g1.raw.flags.count(x) || !is_leg(g1, x) || g1.out_tag.at(x))
      return Error{Errc::bad_graft_pair, x + " is not an in-leg above"};
    if (!g2.raw.flags.count(y) || !is_leg(g2, y) || !g2.out_tag.at(y))
      return Error{Errc::bad_graft_pair, y + " is not an out-leg below"};
    if (!used.insert(x).second) return Error{Errc::leg_reuse, x};
    if (!used.insert(y).second) return Error{Errc::leg_reuse, y};
  }

  if (g1.trivial || g2.trivial) {
    if (pairs.size() != 1) return Error{Errc::bad_graft_pair, "unit grafting takes one pair"};
    if (g1.trivial && g2.trivial) {
      Graph t;
      t.trivial = true;
      std::string o = out_legs(g1)[0], i = in_legs(g2)[0];
      t.raw.flags = {o, i};
      t.raw.involution = {{o, o}, {i, i}};
      t.out_tag = {{o, true}, {i, false}};
      t.out_labels = {{o, 1}};
      t.in_labels = {{i, 1}};
      return t;
    }
    Graph base = g1.trivial ? g2 : g1;
    std::string absorbed = g1.trivial ? pairs[0].second : pairs[0].first;
    std::string survivor = g1.trivial ? out_legs(g1)[0] : in_legs(g2)[0];
    auto rename = [&](const std::string& f) { return f == absorbed ? survivor : f; };
    Graph out;
    out.trivial = false;
    for (const auto& f : base.raw.flags) out.raw.flags.insert(rename(f));
    for (const auto& [f, sf] : base.raw.involution) out.raw.involution[rename(f)] = rename(sf);
    for (const auto& [v, fl] : base.raw.blocks) {
      std::set<std::string> nf;
      for (const auto& f : fl) nf.insert(rename(f));
      out.raw.blocks[v] = nf;
    }
    for (const auto& [f, t] : base.out_tag) out.out_tag[rename(f)] = t;
    out.out_labels = relab.out_labels;
    out.in_labels = relab.in_labels;
    auto errs = validate_report(out.raw, out.out_tag, out.out_labels, out.in_labels, false);
    if (!errs.empty()) return errs.front();
    return out;
  }

  Graph out;
  out.raw.flags = g1.raw.flags;
  out.raw.flags.insert(g2.raw.flags.begin(), g2.raw.flags.end());
  out.raw.involution = g1.raw.involution;
  for (const auto& [f, sf] : g2.raw.involution) out.raw.involution[f] = sf;
  for (const auto& [x, y] : pairs) {
    out.raw.involution[x] = y;
    out.raw.involution[y] = x;
  }
  out.raw.blocks = g1.raw.blocks;
  for (const auto& [v, fl] : g2.raw.blocks) {
    if (out.raw.blocks.count(v)) return Error{Errc::bad_graft_pair, "vertex ids overlap at " + v};
    out.raw.blocks[v] = fl;
  }
  out.out_tag = g1.out_tag;
  for (const auto& [f, t] : g2.out_tag) out.out_tag[f] = t;
  out.out_labels = relab.out_labels;
  out.in_labels = relab.in_labels;

  auto errs = validate_report(out.raw, out.out_tag, out.out_labels, out.in_labels, false);
  for (const auto& e : errs) {
    if (e.code == Errc::disconnected) return Error{Errc::disconnected_result, e.context};
    if (e.code == Errc::directed_cycle) return Error{Errc::cycle_created, e.context};
    return e;
  }
  return out;
}

// Rename flags by an injective map (missing entries keep their name).
inline Graph relabel_flags(const Graph& g, const std::map<std::string, std::string>& m) {
  auto rn = [&m](const std::string& f) {
    auto it = m.find(f);
    return it == m.end() ? f : it->second;
  };
  Graph out;
  out.trivial = g.trivial;
  for (const auto& f : g.raw.flags) out.raw.flags.insert(rn(f));
  for (const auto& [f, sf] : g.raw.involution) out.raw.involution[rn(f)] = rn(sf);
  for (const auto& [v, fl] : g.raw.blocks) {
    std::set<std::string> nf;
    for (const auto& f : fl) nf.insert(rn(f));
    out.raw.blocks[v] = nf;
  }
  for (const auto& [f, t] : g.out_tag) out.out_tag[rn(f)] = t;
  for (const auto& [f, l] : g.out_labels) out.out_labels[rn(f)] = l;
  for (const auto& [f, l] : g.in_labels) out.in_labels[rn(f)] = l;
  return out;
}

inline Graph relabel_vertices(const Graph& g, const std::map<std::string, std::string>& m) {
  Graph out = g;
  out.raw.blocks.clear();
  for (const auto& [v, fl] : g.raw.blocks) {
    auto it = m.find(v);
    out.raw.blocks[it == m.end() ? v : it->second] = fl;
  }
  return out;
}

}  // namespace phtt

#endif  // PHTT_GRAPH_HPP
