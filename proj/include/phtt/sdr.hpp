#ifndef PHTT_SDR_HPP
#define PHTT_SDR_HPP

// Strong deformation retraction of a finite complex onto its cohomology,
// built degreewise by exact Gaussian elimination.  The output satisfies
//
//   f g - Id_V = d h + h d,   g f = Id_H,   d_H = 0,
//
// on the nose (no tolerances).  Pivoting is deterministic: source columns
// are processed in basis order and each pivot is the first nonzero entry of
// the reduced column, so identical input yields identical output.

#include <cassert>
#include <map>
#include <string>
#include <vector>

#include "phtt/graded.hpp"

namespace phtt {

struct Sdr {
  GradedSpace H;
  GradedMap f;  // H -> V
  GradedMap g;  // V -> H
  GradedMap h;  // V -> V, degree -1
  // The construction happens to satisfy the usual side conditions; they are
  // reported rather than promised so callers relying on them can check.
  bool h_squared_zero = false;
  bool h_f_zero = false;
  bool g_h_zero = false;
};

namespace detail {

struct Pivot {
  int row;  // pivot coordinate of b, which is monic there
  Vec b;    // d(a), lives one degree above a
  Vec a;
};

}  // namespace detail

inline Result<Sdr> cohomology_sdr(const GradedSpace& V, const GradedMap& d) {
  if (!(d.src == V) || !(d.dst == V))
    return Error{Errc::dimension_mismatch, "differential must be an endomorphism of V"};
  if (auto st = check_differential(d); !st.ok()) return st.error();

  std::map<int, std::vector<int>> by_degree;  // degree -> basis indices, in basis order
  for (int j = 0; j < V.dim(); ++j) by_degree[V.degree(j)].push_back(j);

  std::map<int, std::vector<detail::Pivot>> pivots_landing_in;  // keyed by degree of b
  std::map<int, std::vector<Vec>> kernel_candidates;

  for (const auto& [deg, indices] : by_degree) {
    auto& pivots = pivots_landing_in[deg + 1];
    for (int j : indices) {
      Vec c = d.apply_basis(j);
      Vec a{{j, Scalar(1)}};
      for (const auto& p : pivots) {
        auto it = c.find(p.row);
        if (it == c.end()) continue;
        Scalar coef = it->second;
        vec_add(c, p.b, -coef);
        vec_add(a, p.a, -coef);
      }
      if (c.empty()) {
        kernel_candidates[deg].push_back(std::move(a));
        continue;
      }
      int row = c.begin()->first;
      Scalar lead = c.begin()->second;
      pivots.push_back({row, vec_scale(c, lead.inverse()), vec_scale(a, lead.inverse())});
    }
  }

  // Homology representatives: kernel vectors reduced against the exact part.
  struct ClassVec {
    int row;
    Vec v;
    int degree;
  };
  std::vector<ClassVec> classes;
  std::map<int, std::vector<int>> class_positions_by_degree;

  for (const auto& [deg, candidates] : kernel_candidates) {
    const auto& exact = pivots_landing_in.count(deg) ? pivots_landing_in[deg]
                                                     : std::vector<detail::Pivot>{};
    for (const Vec& cand : candidates) {
      Vec v = cand;
      for (const auto& p : exact) {
        auto it = v.find(p.row);
        if (it == v.end()) continue;
        vec_add(v, p.b, -it->second);
      }
      for (int pos : class_positions_by_degree[deg]) {
        auto it = v.find(classes[static_cast<std::size_t>(pos)].row);
        if (it == v.end()) continue;
        vec_add(v, classes[static_cast<std::size_t>(pos)].v, -it->second);
      }
      if (v.empty()) continue;
      int row = v.begin()->first;
      Scalar lead = v.begin()->second;
      class_positions_by_degree[deg].push_back(static_cast<int>(classes.size()));
      classes.push_back({row, vec_scale(v, lead.inverse()), deg});
    }
  }

  std::vector<std::pair<std::string, int>> h_basis;
  h_basis.reserve(classes.size());
  for (const auto& cls : classes) h_basis.emplace_back("[" + V.ids[static_cast<std::size_t>(cls.row)] + "]", cls.degree);
  auto h_space = GradedSpace::make(h_basis);
  if (!h_space.ok()) return h_space.error();

  Sdr out;
  out.H = h_space.take();
  out.f = GradedMap::zero(out.H, V, 0);
  out.g = GradedMap::zero(V, out.H, 0);
  out.h = GradedMap::zero(V, V, -1);
  for (std::size_t k = 0; k < classes.size(); ++k) out.f.cols[k] = classes[k].v;

  // Per degree, invert the change of basis [exact-partners | exact | classes]
  // to read off the projection g and the contraction h.
  for (const auto& [deg, indices] : by_degree) {
    std::map<int, int> local;  // global basis index -> row of the local matrix
    for (std::size_t r = 0; r < indices.size(); ++r) local[indices[r]] = static_cast<int>(r);
    int n = static_cast<int>(indices.size());

    struct Col {
      Vec v;
      int kind;     // 0 = partner of an exact pivot, 1 = exact, 2 = class
      int payload;  // kind 1: pivot index in this degree; kind 2: class position
    };
    std::vector<Col> columns;
    if (pivots_landing_in.count(deg + 1)) {
      const auto& ps = pivots_landing_in[deg + 1];
      for (std::size_t i = 0; i < ps.size(); ++i) columns.push_back({ps[i].a, 0, -1});
    }
    if (pivots_landing_in.count(deg)) {
      const auto& ps = pivots_landing_in[deg];
      for (std::size_t i = 0; i < ps.size(); ++i) columns.push_back({ps[i].b, 1, static_cast<int>(i)});
    }
    for (int pos : class_positions_by_degree[deg])
      columns.push_back({classes[static_cast<std::size_t>(pos)].v, 2, pos});
    assert(static_cast<int>(columns.size()) == n);

    // Gauss-Jordan inversion of the local matrix M (columns as above).
    std::vector<std::vector<Scalar>> m(static_cast<std::size_t>(n)),
        inv(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
      m[static_cast<std::size_t>(r)].assign(static_cast<std::size_t>(n), Scalar(0));
      inv[static_cast<std::size_t>(r)].assign(static_cast<std::size_t>(n), Scalar(0));
      inv[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)] = Scalar(1);
    }
    for (int cidx = 0; cidx < n; ++cidx)
      for (const auto& [gi, coef] : columns[static_cast<std::size_t>(cidx)].v)
        m[static_cast<std::size_t>(local[gi])][static_cast<std::size_t>(cidx)] = coef;
    for (int col = 0; col < n; ++col) {
      int pr = -1;
      for (int r = col; r < n; ++r)
        if (!m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)].is_zero()) { pr = r; break; }
      assert(pr >= 0 && "change of basis must be invertible");
      std::swap(m[static_cast<std::size_t>(pr)], m[static_cast<std::size_t>(col)]);
      std::swap(inv[static_cast<std::size_t>(pr)], inv[static_cast<std::size_t>(col)]);
      Scalar piv = m[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
      Scalar piv_inv = piv.inverse();
      for (int c2 = 0; c2 < n; ++c2) {
        m[static_cast<std::size_t>(col)][static_cast<std::size_t>(c2)] *= piv_inv;
        inv[static_cast<std::size_t>(col)][static_cast<std::size_t>(c2)] *= piv_inv;
      }
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        Scalar factor = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
        if (factor.is_zero()) continue;
        for (int c2 = 0; c2 < n; ++c2) {
          m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)] -=
              factor * m[static_cast<std::size_t>(col)][static_cast<std::size_t>(c2)];
          inv[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)] -=
              factor * inv[static_cast<std::size_t>(col)][static_cast<std::size_t>(c2)];
        }
      }
    }

    // Column cidx of M^{-1} holds the [A|B|C] coordinates of basis vector
    // indices[cidx]; route the B block through -a and the C block through g.
    for (int cidx = 0; cidx < n; ++cidx) {
      int gj = indices[static_cast<std::size_t>(cidx)];
      for (int r = 0; r < n; ++r) {
        Scalar coord = inv[static_cast<std::size_t>(r)][static_cast<std::size_t>(cidx)];
        if (coord.is_zero()) continue;
        const Col& col = columns[static_cast<std::size_t>(r)];
        if (col.kind == 1) {
          // exact direction: h sends b back to -a
          const auto& p = pivots_landing_in[deg][static_cast<std::size_t>(col.payload)];
          vec_add(out.h.cols[static_cast<std::size_t>(gj)], p.a, -coord);
        } else if (col.kind == 2) {
          vec_add(out.g.cols[static_cast<std::size_t>(gj)], col.payload, coord);
        }
      }
    }
  }

  return out;
}

// Exact verification of the retraction identities; used by constructors and
// available to callers that load (f, g, h) from files.
inline Status verify_sdr(const GradedSpace& V, const GradedMap& d, Sdr& s) {
  auto fg = compose(s.f, s.g);
  if (!fg.ok()) return fg.error();
  auto dh = compose(d, s.h);
  auto hd = compose(s.h, d);
  if (!dh.ok() || !hd.ok()) return Error{Errc::dimension_mismatch, "h does not fit d"};
  GradedMap rhs = map_add(dh.value(), hd.value());
  GradedMap lhs = map_add(fg.value(), map_scale(GradedMap::identity(V), Scalar(-1)));
  if (!(lhs.cols == rhs.cols))
    return Error{Errc::not_a_retraction, "f g - Id != d h + h d"};
  auto gf = compose(s.g, s.f);
  if (!gf.ok()) return gf.error();
  if (!(gf.value().cols == GradedMap::identity(s.H).cols))
    return Error{Errc::not_a_retraction, "g f != Id on cohomology"};
  auto hh = compose(s.h, s.h);
  auto hf = compose(s.h, s.f);
  auto gh = compose(s.g, s.h);
  s.h_squared_zero = hh.ok() && hh.value().is_zero();
  s.h_f_zero = hf.ok() && hf.value().is_zero();
  s.g_h_zero = gh.ok() && gh.value().is_zero();
  return ok_status();
}

}  // namespace phtt

#endif  // PHTT_SDR_HPP
