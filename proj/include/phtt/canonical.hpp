#ifndef PHTT_CANONICAL_HPP
#define PHTT_CANONICAL_HPP

// Canonical forms for labeled directed graphs.  Isomorphism here is a flag
// bijection commuting with the involution, mapping blocks to blocks and
// preserving direction tags and leg labels.  Two graphs are isomorphic
// exactly when their canonical forms are identical as data.
//
// The search is exhaustive over vertex orderings, which is fine at the
// scale this library targets (six vertices or fewer); within one ordering
// the flags of a vertex are sorted by an ordering-invariant key, and
// parallel edges are tie-broken consistently at both endpoints so the
// serialized form does not depend on input names.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "phtt/graph.hpp"

namespace phtt {

// Deterministic structural serialization; equal strings iff equal data.
inline std::string graph_key(const Graph& g) {
  std::string s = g.trivial ? "T;" : "G;";
  for (const auto& [v, fl] : g.raw.blocks) {
    s += "[" + v + ":";
    for (const auto& f : fl) s += f + ",";
    s += "]";
  }
  s += ";s:";
  for (const auto& [f, sf] : g.raw.involution)
    if (f <= sf) s += "(" + f + " " + sf + ")";
  s += ";o:";
  for (const auto& [f, t] : g.out_tag)
    if (t) s += f + ",";
  s += ";lo:";
  for (const auto& [f, l] : g.out_labels) s += f + "=" + std::to_string(l) + ",";
  s += ";li:";
  for (const auto& [f, l] : g.in_labels) s += f + "=" + std::to_string(l) + ",";
  return s;
}

struct CanonicalGraph {
  Graph graph;  // flags renamed f0.., vertices v0..
  std::string key;
  std::map<std::string, std::string> iso;  // original flag -> canonical flag
  std::vector<std::map<std::string, std::string>> automorphisms;  // of the canonical graph
};

inline bool is_graph_automorphism(const Graph& g, const std::map<std::string, std::string>& m) {
  if (m.size() != g.raw.flags.size()) return false;
  std::set<std::string> image;
  for (const auto& [a, b] : m) {
    if (!g.raw.flags.count(a) || !g.raw.flags.count(b)) return false;
    image.insert(b);
  }
  if (image.size() != g.raw.flags.size()) return false;
  for (const auto& [f, sf] : g.raw.involution)
    if (m.at(sf) != g.raw.involution.at(m.at(f))) return false;
  for (const auto& [f, t] : g.out_tag)
    if (g.out_tag.at(m.at(f)) != t) return false;
  for (const auto& [f, l] : g.out_labels) {
    auto it = g.out_labels.find(m.at(f));
    if (it == g.out_labels.end() || it->second != l) return false;
  }
  for (const auto& [f, l] : g.in_labels) {
    auto it = g.in_labels.find(m.at(f));
    if (it == g.in_labels.end() || it->second != l) return false;
  }
  std::set<std::set<std::string>> blocks, mapped;
  for (const auto& [v, fl] : g.raw.blocks) {
    blocks.insert(fl);
    std::set<std::string> mf;
    for (const auto& f : fl) mf.insert(m.at(f));
    mapped.insert(mf);
  }
  return blocks == mapped;
}

namespace detail {

struct NamedForm {
  Graph graph;
  std::string key;
  std::map<std::string, std::string> naming;  // input flag -> canonical flag
};

// Canonical renaming induced by one vertex ordering.
inline NamedForm name_by_order(const Graph& g, const std::vector<std::string>& order) {
  std::map<std::string, int> pos;
  for (std::size_t p = 0; p < order.size(); ++p) pos[order[p]] = static_cast<int>(p);
  auto at = flag_to_vertex(g.raw);

  // orbits sorted by (source position, target position, out-half name): the
  // final component only orders parallel edges and cancels from the key
  auto orbits = edge_orbits(g);
  std::sort(orbits.begin(), orbits.end(),
            [&](const std::pair<std::string, std::string>& a,
                const std::pair<std::string, std::string>& b) {
              auto ka = std::tuple(pos.at(at.at(a.first)), pos.at(at.at(a.second)), a.first);
              auto kb = std::tuple(pos.at(at.at(b.first)), pos.at(at.at(b.second)), b.first);
              return ka < kb;
            });
  std::map<std::string, int> orbit_of;
  for (std::size_t r = 0; r < orbits.size(); ++r) {
    orbit_of[orbits[r].first] = static_cast<int>(r);
    orbit_of[orbits[r].second] = static_cast<int>(r);
  }

  NamedForm nf;
  int next = 0;
  for (std::size_t p = 0; p < order.size(); ++p) {
    const auto& fl = g.raw.blocks.at(order[p]);
    std::vector<std::pair<std::tuple<int, int, int, int>, std::string>> keyed;
    for (const auto& f : fl) {
      bool leg = g.raw.involution.at(f) == f;
      int dir = g.out_tag.at(f) ? 0 : 1;
      if (leg) {
        int label = dir == 0 ? g.out_labels.at(f) : g.in_labels.at(f);
        keyed.push_back({{0, dir, label, -1}, f});
      } else {
        const std::string& partner = g.raw.involution.at(f);
        keyed.push_back({{1, dir, pos.at(at.at(partner)), orbit_of.at(f)}, f});
      }
    }
    std::sort(keyed.begin(), keyed.end());
    for (const auto& [k, f] : keyed) nf.naming[f] = "f" + std::to_string(next++);
  }

  Graph c = relabel_flags(g, nf.naming);
  std::map<std::string, std::string> vmap;
  for (std::size_t p = 0; p < order.size(); ++p) vmap[order[p]] = "v" + std::to_string(p);
  nf.graph = relabel_vertices(c, vmap);
  nf.key = graph_key(nf.graph);
  return nf;
}

}  // namespace detail

inline Result<CanonicalGraph> canonical_form(const Graph& g) {
  CanonicalGraph out;
  if (g.trivial) {
    out.graph = trivial_graph();
    std::map<std::string, std::string> rn{{out_legs(g)[0], "uo"}, {in_legs(g)[0], "ui"}};
    out.iso = rn;
    out.key = graph_key(out.graph);
    out.automorphisms.push_back({{"uo", "uo"}, {"ui", "ui"}});
    return out;
  }
  if (g.raw.blocks.empty()) return Error{Errc::disconnected, "no vertices"};

  std::vector<std::string> order;
  for (const auto& [v, fl] : g.raw.blocks) order.push_back(v);
  std::sort(order.begin(), order.end());

  bool have = false;
  std::vector<std::vector<std::string>> winners;
  do {
    auto nf = detail::name_by_order(g, order);
    if (!have || nf.key < out.key) {
      have = true;
      out.graph = nf.graph;
      out.key = nf.key;
      out.iso = nf.naming;
      winners.clear();
      winners.push_back(order);
    } else if (nf.key == out.key) {
      winners.push_back(order);
    }
  } while (std::next_permutation(order.begin(), order.end()));

  // Automorphism group of the canonical graph: vertex-level symmetries come
  // from the orderings that tie for the minimal key, parallel-edge swaps
  // from permuting orbits within each thick edge.
  std::map<std::string, std::string> min_inv;
  for (const auto& [a, b] : out.iso) min_inv[b] = a;

  std::vector<std::map<std::string, std::string>> vertex_level;
  for (const auto& w : winners) {
    auto nf = detail::name_by_order(g, w);
    std::map<std::string, std::string> alpha;  // canonical -> canonical
    for (const auto& [canon, orig] : min_inv) alpha[canon] = nf.naming.at(orig);
    vertex_level.push_back(std::move(alpha));
  }

  std::vector<std::vector<std::pair<std::string, std::string>>> bundles;
  {
    auto at = flag_to_vertex(out.graph.raw);
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<std::string, std::string>>>
        by_pair;
    for (const auto& [o, i] : edge_orbits(out.graph)) by_pair[{at.at(o), at.at(i)}].push_back({o, i});
    for (auto& [k, v] : by_pair)
      if (v.size() > 1) bundles.push_back(v);
  }

  std::vector<std::map<std::string, std::string>> swaps{{}};  // as partial maps
  for (const auto& bundle : bundles) {
    std::vector<std::size_t> perm(bundle.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::vector<std::map<std::string, std::string>> grown;
    do {
      for (const auto& base : swaps) {
        auto m = base;
        for (std::size_t i = 0; i < perm.size(); ++i) {
          m[bundle[i].first] = bundle[perm[i]].first;
          m[bundle[i].second] = bundle[perm[i]].second;
        }
        grown.push_back(std::move(m));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    swaps = std::move(grown);
  }

  std::set<std::map<std::string, std::string>> seen;
  for (const auto& alpha : vertex_level) {
    for (const auto& rho : swaps) {
      std::map<std::string, std::string> full;
      for (const auto& f : out.graph.raw.flags) {
        const std::string& mid = alpha.at(f);
        auto it = rho.find(mid);
        full[f] = it == rho.end() ? mid : it->second;
      }
      if (is_graph_automorphism(out.graph, full)) seen.insert(std::move(full));
    }
  }
  out.automorphisms.assign(seen.begin(), seen.end());
  return out;
}

}  // namespace phtt

#endif  // PHTT_CANONICAL_HPP
