#ifndef PHTT_CATALOG_HPP
#define PHTT_CATALOG_HPP

// Exhaustive generation of isomorphism classes of graphs within explicit
// bounds on vertices, legs per side, parallel edges, and total edges.
//
// Strategy: a connected acyclic multi-digraph on k vertices is a k x k
// multiplicity matrix, enumerable in upper-triangular position since every
// acyclic digraph admits a topological order.  Matrices are grouped into
// isomorphism classes by minimizing over vertex permutations; leg
// placements are then enumerated up to the automorphism group of the class
// representative.  Distinct orbit representatives give non-isomorphic
// graphs, so no final dedup pass is needed; each survivor is canonicalized
// once for output.
//
// Leg placements dominate the count (4 vertices with 3 legs per side is
// already above a million classes), so the materializing enumerators carry
// an entry cap, and consumers that only need per-shape combinatorics use
// enumerate_shape_classes, which returns one legless representative per
// edge structure together with the exact number of leg dressings it
// represents.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phtt/canonical.hpp"
#include "phtt/common.hpp"
#include "phtt/graph.hpp"

namespace phtt {

struct CatalogBounds {
  int max_vertices = 4;
  int max_out_legs = 3;
  int max_in_legs = 3;
  int max_parallel = 2;
  int max_total_edges = 6;
};

// Restricts generation to graphs whose every vertex has an allowed
// (out-flag, in-flag) count.  Empty means unrestricted.  Decorated sweeps
// pass the arity support of their coefficient space here, which prunes the
// leg-placement explosion at the source.
struct ArityFilter {
  std::set<std::pair<int, int>> allowed;

  bool pass(int out_flags, int in_flags) const {
    return allowed.empty() || allowed.count({out_flags, in_flags}) > 0;
  }
};

// Materializing enumerators refuse to build more than this many entries.
inline constexpr long kMaxCatalogEntries = 30000;

namespace detail {

// Hard ceilings: canonicalization is an exhaustive search and the class is
// infinite without the edge caps, so oversized requests are refused rather
// than attempted.
inline Status check_bounds(const CatalogBounds& b) {
  if (b.max_vertices < 0 || b.max_out_legs < 0 || b.max_in_legs < 0 || b.max_parallel < 0 ||
      b.max_total_edges < 0)
    return Error{Errc::bad_arguments, "catalog bounds must be non-negative"};
  if (b.max_vertices > 5 || b.max_out_legs > 4 || b.max_in_legs > 4 || b.max_parallel > 3 ||
      b.max_total_edges > 8)
    return Error{Errc::bound_too_large,
                 "catalog limits: 5 vertices, 4 legs per side, 3 parallel, 8 edges"};
  return ok_status();
}

inline std::vector<std::vector<int>> all_permutations(int k) {
  std::vector<int> p(static_cast<std::size_t>(k));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Entry (i, j) of the permuted matrix is entry (p[i], p[j]) of the original:
// vertex i of the new indexing is vertex p[i] of the old.
inline std::vector<int> permute_matrix(const std::vector<int>& mat, int k,
                                       const std::vector<int>& p) {
  std::vector<int> out(mat.size());
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      out[static_cast<std::size_t>(i * k + j)] =
          mat[static_cast<std::size_t>(p[static_cast<std::size_t>(i)] * k +
                                       p[static_cast<std::size_t>(j)])];
  return out;
}

inline bool matrix_connected(const std::vector<int>& mat, int k) {
  if (k <= 1) return true;
  std::vector<int> seen(static_cast<std::size_t>(k), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w = 0; w < k; ++w) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      if (mat[static_cast<std::size_t>(v * k + w)] || mat[static_cast<std::size_t>(w * k + v)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
  for (int v = 0; v < k; ++v)
    if (!seen[static_cast<std::size_t>(v)]) return false;
  return true;
}

struct DagClass {
  int k = 0;
  std::vector<int> mat;                // representative multiplicity matrix
  std::vector<std::vector<int>> auts;  // permutations fixing the representative
};

// Isomorphism classes of connected acyclic multi-digraphs on k vertices.
inline std::vector<DagClass> dag_classes(int k, int max_parallel, int max_total_edges) {
  std::vector<DagClass> classes;
  if (k == 1) {
    classes.push_back(DagClass{1, {0}, {{0}}});
    return classes;
  }
  auto perms = all_permutations(k);
  std::vector<std::pair<int, int>> slots;  // upper-triangular positions
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) slots.emplace_back(i, j);
  std::set<std::vector<int>> seen;  // minimal permuted form per class
  std::vector<int> mult(slots.size(), 0);
  // Odometer over multiplicities with a running total for the edge cap.
  while (true) {
    int total = std::accumulate(mult.begin(), mult.end(), 0);
    if (total <= max_total_edges) {
      std::vector<int> mat(static_cast<std::size_t>(k * k), 0);
      for (std::size_t s = 0; s < slots.size(); ++s)
        mat[static_cast<std::size_t>(slots[s].first * k + slots[s].second)] = mult[s];
      if (matrix_connected(mat, k)) {
        std::vector<int> best = mat;
        for (const auto& p : perms) best = std::min(best, permute_matrix(mat, k, p));
        if (seen.insert(best).second) {
          DagClass c;
          c.k = k;
          c.mat = best;
          for (const auto& p : perms)
            if (permute_matrix(best, k, p) == best) c.auts.push_back(p);
          classes.push_back(std::move(c));
        }
      }
    }
    std::size_t pos = 0;
    while (pos < mult.size() && mult[pos] == max_parallel) mult[pos++] = 0;
    if (pos == mult.size()) break;
    ++mult[pos];
  }
  std::sort(classes.begin(), classes.end(),
            [](const DagClass& a, const DagClass& b) { return a.mat < b.mat; });
  return classes;
}

// A placement pair is kept only when lexicographically minimal in its
// automorphism orbit; the image of vertex v under an automorphism p is p[v].
inline bool orbit_minimal(const std::vector<int>& out_at, const std::vector<int>& in_at,
                          const std::vector<std::vector<int>>& auts) {
  for (const auto& p : auts) {
    std::vector<int> po(out_at.size()), pi(in_at.size());
    for (std::size_t i = 0; i < out_at.size(); ++i)
      po[i] = p[static_cast<std::size_t>(out_at[i])];
    for (std::size_t i = 0; i < in_at.size(); ++i)
      pi[i] = p[static_cast<std::size_t>(in_at[i])];
    if (std::make_pair(po, pi) < std::make_pair(out_at, in_at)) return false;
  }
  return true;
}

// All placement vectors of the given length over k vertices.
inline std::vector<std::vector<int>> placements(int count, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(count), 0);
  while (true) {
    out.push_back(cur);
    std::size_t pos = 0;
    while (pos < cur.size() && cur[pos] == k - 1) cur[pos++] = 0;
    if (pos == cur.size()) break;
    ++cur[pos];
  }
  return out;
}

// Calls fn(out_at, in_at) for each orbit representative with m out-legs and
// n in-legs that passes the arity filter.
template <typename F>
void scan_placements(const DagClass& c, int m, int n, const ArityFilter& filter, F&& fn) {
  if (c.k == 1 && m + n == 0) return;  // a vertex must carry at least one flag
  std::vector<int> row(static_cast<std::size_t>(c.k), 0), col(static_cast<std::size_t>(c.k), 0);
  for (int i = 0; i < c.k; ++i)
    for (int j = 0; j < c.k; ++j) {
      row[static_cast<std::size_t>(i)] += c.mat[static_cast<std::size_t>(i * c.k + j)];
      col[static_cast<std::size_t>(j)] += c.mat[static_cast<std::size_t>(i * c.k + j)];
    }
  auto outs = placements(m, c.k);
  auto ins = placements(n, c.k);
  for (const auto& oa : outs)
    for (const auto& ia : ins) {
      if (!orbit_minimal(oa, ia, c.auts)) continue;
      if (!filter.allowed.empty()) {
        bool ok = true;
        for (int v = 0; v < c.k && ok; ++v) {
          int mo = row[static_cast<std::size_t>(v)];
          int ni = col[static_cast<std::size_t>(v)];
          for (int x : oa) mo += (x == v);
          for (int x : ia) ni += (x == v);
          ok = filter.pass(mo, ni);
        }
        if (!ok) continue;
      }
      fn(oa, ia);
    }
}

inline Graph graph_from_matrix(const DagClass& c, const std::vector<int>& out_at,
                               const std::vector<int>& in_at) {
  Graph g;
  auto vid = [](int i) { return "v" + std::to_string(i + 1); };
  for (int i = 0; i < c.k; ++i) g.raw.blocks[vid(i)];
  int e = 0;
  for (int i = 0; i < c.k; ++i)
    for (int j = 0; j < c.k; ++j)
      for (int r = 0; r < c.mat[static_cast<std::size_t>(i * c.k + j)]; ++r) {
        std::string a = "e" + std::to_string(++e) + "o";
        std::string b = "e" + std::to_string(e) + "i";
        g.raw.flags.insert(a);
        g.raw.flags.insert(b);
        g.raw.involution[a] = b;
        g.raw.involution[b] = a;
        g.out_tag[a] = true;
        g.out_tag[b] = false;
        g.raw.blocks[vid(i)].insert(a);
        g.raw.blocks[vid(j)].insert(b);
      }
  for (std::size_t l = 0; l < out_at.size(); ++l) {
    std::string f = "o" + std::to_string(l + 1);
    g.raw.flags.insert(f);
    g.raw.involution[f] = f;
    g.out_tag[f] = true;
    g.out_labels[f] = static_cast<int>(l + 1);
    g.raw.blocks[vid(out_at[l])].insert(f);
  }
  for (std::size_t l = 0; l < in_at.size(); ++l) {
    std::string f = "i" + std::to_string(l + 1);
    g.raw.flags.insert(f);
    g.raw.involution[f] = f;
    g.out_tag[f] = false;
    g.in_labels[f] = static_cast<int>(l + 1);
    g.raw.blocks[vid(in_at[l])].insert(f);
  }
  return g;
}

// Exact number of entries the materializing build would produce, or -1 as
// soon as the cap is crossed.
inline long count_entries(const CatalogBounds& b,
                          const std::vector<std::pair<int, int>>& leg_counts,
                          const ArityFilter& filter, long cap) {
  long total = 0;
  for (int k = 1; k <= b.max_vertices; ++k) {
    auto classes = dag_classes(k, b.max_parallel, b.max_total_edges);
    for (const auto& c : classes)
      for (auto [m, n] : leg_counts) {
        scan_placements(c, m, n, filter, [&](const auto&, const auto&) { ++total; });
        if (total > cap) return -1;
      }
  }
  return total;
}

inline void append_exact(std::vector<CanonicalGraph>& out, const std::vector<DagClass>& classes,
                         int m, int n, const ArityFilter& filter) {
  for (const auto& c : classes)
    scan_placements(c, m, n, filter, [&](const std::vector<int>& oa, const std::vector<int>& ia) {
      out.push_back(canonical_form(graph_from_matrix(c, oa, ia)).take());
    });
}

}  // namespace detail

// Isomorphism classes with exactly m out-legs and n in-legs, all vertex
// counts from 1 to the bound, sorted by canonical key.  The vertex-free
// unit graph is listed first when (m, n) = (1, 1) and the filter is empty.
inline Result<std::vector<CanonicalGraph>> enumerate_graphs(const CatalogBounds& b, int m, int n,
                                                            const ArityFilter& filter = {}) {
  if (auto st = detail::check_bounds(b); !st.ok()) return st.error();
  if (m < 0 || n < 0) return Error{Errc::bad_arguments, "leg counts must be non-negative"};
  if (m > b.max_out_legs || n > b.max_in_legs)
    return Error{Errc::bound_too_large, "requested legs exceed catalog bounds"};
  if (detail::count_entries(b, {{m, n}}, filter, kMaxCatalogEntries) < 0)
    return Error{Errc::bound_too_large, "catalog would exceed " +
                                            std::to_string(kMaxCatalogEntries) + " entries"};
  std::vector<CanonicalGraph> out;
  bool with_unit = m == 1 && n == 1 && filter.allowed.empty();
  if (with_unit) out.push_back(canonical_form(trivial_graph()).take());
  for (int k = 1; k <= b.max_vertices; ++k)
    detail::append_exact(out, detail::dag_classes(k, b.max_parallel, b.max_total_edges), m, n,
                         filter);
  std::sort(out.begin() + (with_unit ? 1 : 0), out.end(),
            [](const CanonicalGraph& a, const CanonicalGraph& c) { return a.key < c.key; });
  return out;
}

// Pooled listing over all leg counts within bounds, for sweeps over every
// shape.  Excludes the vertex-free unit graph: decorations live on
// vertices.  Sorted by canonical key.
inline Result<std::vector<CanonicalGraph>> enumerate_all_graphs(const CatalogBounds& b,
                                                                const ArityFilter& filter = {}) {
  if (auto st = detail::check_bounds(b); !st.ok()) return st.error();
  std::vector<std::pair<int, int>> leg_counts;
  for (int m = 0; m <= b.max_out_legs; ++m)
    for (int n = 0; n <= b.max_in_legs; ++n) leg_counts.emplace_back(m, n);
  if (detail::count_entries(b, leg_counts, filter, kMaxCatalogEntries) < 0)
    return Error{Errc::bound_too_large, "catalog would exceed " +
                                            std::to_string(kMaxCatalogEntries) + " entries"};
  std::vector<CanonicalGraph> out;
  for (int k = 1; k <= b.max_vertices; ++k) {
    auto classes = detail::dag_classes(k, b.max_parallel, b.max_total_edges);
    for (auto [m, n] : leg_counts) detail::append_exact(out, classes, m, n, filter);
  }
  std::sort(out.begin(), out.end(),
            [](const CanonicalGraph& a, const CanonicalGraph& c) { return a.key < c.key; });
  return out;
}

// One legless representative per edge structure with at least two vertices,
// plus the exact number of distinct leg dressings (over all leg counts
// within bounds) the structure represents.  Contraction combinatorics
// (thick edges, admissibility, contraction trees) never read legs, so a
// per-shape result extends verbatim to every dressing; sweeps use this to
// stay exhaustive without materializing the dressed catalog.
struct ShapeClass {
  CanonicalGraph stripped;
  long dressings = 0;
};

inline Result<std::vector<ShapeClass>> enumerate_shape_classes(const CatalogBounds& b) {
  if (auto st = detail::check_bounds(b); !st.ok()) return st.error();
  std::vector<ShapeClass> out;
  ArityFilter none;
  for (int k = 2; k <= b.max_vertices; ++k)
    for (const auto& c : detail::dag_classes(k, b.max_parallel, b.max_total_edges)) {
      ShapeClass sc;
      sc.stripped = canonical_form(detail::graph_from_matrix(c, {}, {})).take();
      for (int m = 0; m <= b.max_out_legs; ++m)
        for (int n = 0; n <= b.max_in_legs; ++n)
          detail::scan_placements(c, m, n, none,
                                  [&](const auto&, const auto&) { ++sc.dressings; });
      out.push_back(std::move(sc));
    }
  std::sort(out.begin(), out.end(),
            [](const ShapeClass& a, const ShapeClass& c) { return a.stripped.key < c.stripped.key; });
  return out;
}

}  // namespace phtt

#endif
