#ifndef PHTT_GRADED_HPP
#define PHTT_GRADED_HPP

// Finite-dimensional graded vector spaces over the exact field, with sparse
// homogeneous maps between them.  Cohomological convention throughout: a
// differential raises degree by one; the shift V[j] puts what was in degree
// i into degree i - j.

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "phtt/common.hpp"
#include "phtt/scalar.hpp"

namespace phtt {

struct GradedSpace {
  std::vector<std::string> ids;
  std::vector<int> degrees;
  std::unordered_map<std::string, int> index;

  static Result<GradedSpace> make(const std::vector<std::pair<std::string, int>>& basis) {
    GradedSpace v;
    for (const auto& [id, deg] : basis) {
      if (v.index.count(id)) return Error{Errc::duplicate_basis_id, id};
      v.index.emplace(id, static_cast<int>(v.ids.size()));
      v.ids.push_back(id);
      v.degrees.push_back(deg);
    }
    return v;
  }

  int dim() const { return static_cast<int>(ids.size()); }
  int degree(int i) const { return degrees[static_cast<std::size_t>(i)]; }

  std::optional<int> find(const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const GradedSpace& a, const GradedSpace& b) {
    return a.ids == b.ids && a.degrees == b.degrees;
  }
};

// Sparse vector: basis index -> coefficient, zeros never stored.
using Vec = std::map<int, Scalar>;

inline void vec_add(Vec& target, int idx, const Scalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = target.emplace(idx, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) target.erase(it);
  }
}

inline void vec_add(Vec& target, const Vec& other, const Scalar& factor = Scalar(1)) {
  if (factor.is_zero()) return;
  for (const auto& [i, c] : other) vec_add(target, i, c * factor);
}

inline Vec vec_scale(const Vec& v, const Scalar& factor) {
  Vec out;
  if (factor.is_zero()) return out;
  for (const auto& [i, c] : v) out.emplace(i, c * factor);
  return out;
}

inline bool vec_is_zero(const Vec& v) { return v.empty(); }

// Homogeneous linear map of fixed degree, stored column-wise.
struct GradedMap {
  GradedSpace src;
  GradedSpace dst;
  int degree = 0;
  std::vector<Vec> cols;  // one per src basis element

  static GradedMap zero(GradedSpace source, GradedSpace target, int deg) {
    GradedMap m;
    m.src = std::move(source);
    m.dst = std::move(target);
    m.degree = deg;
    m.cols.assign(static_cast<std::size_t>(m.src.dim()), Vec{});
    return m;
  }

  static GradedMap identity(const GradedSpace& space) {
    GradedMap m = zero(space, space, 0);
    for (int j = 0; j < space.dim(); ++j) m.cols[static_cast<std::size_t>(j)] = Vec{{j, Scalar(1)}};
    return m;
  }

  // Entries are (src id, dst id, coefficient); every entry must respect the
  // declared degree.
  static Result<GradedMap> make(const GradedSpace& source, const GradedSpace& target, int deg,
                                const std::vector<std::tuple<std::string, std::string, Scalar>>& entries) {
    GradedMap m = zero(source, target, deg);
    for (const auto& [sid, tid, c] : entries) {
      auto j = source.find(sid);
      if (!j) return Error{Errc::unknown_basis_id, sid};
      auto i = target.find(tid);
      if (!i) return Error{Errc::unknown_basis_id, tid};
      if (target.degree(*i) != source.degree(*j) + deg)
        return Error{Errc::non_homogeneous_map,
                     sid + " -> " + tid + " violates degree " + std::to_string(deg)};
      vec_add(m.cols[static_cast<std::size_t>(*j)], *i, c);
    }
    return m;
  }

  Vec apply(const Vec& x) const {
    Vec out;
    for (const auto& [j, c] : x) vec_add(out, cols[static_cast<std::size_t>(j)], c);
    return out;
  }

  Vec apply_basis(int j) const { return cols[static_cast<std::size_t>(j)]; }

  bool is_zero() const {
    return std::all_of(cols.begin(), cols.end(), [](const Vec& v) { return v.empty(); });
  }

  friend bool operator==(const GradedMap& a, const GradedMap& b) {
    return a.src == b.src && a.dst == b.dst && a.degree == b.degree && a.cols == b.cols;
  }
};

inline bool map_homogeneous(const GradedMap& m) {
  for (std::size_t j = 0; j < m.cols.size(); ++j)
    for (const auto& [i, c] : m.cols[j])
      if (m.dst.degree(i) != m.src.degree(static_cast<int>(j)) + m.degree) return false;
  return true;
}

inline Result<GradedMap> compose(const GradedMap& after, const GradedMap& before) {
  if (!(after.src == before.dst))
    return Error{Errc::dimension_mismatch, "compose: middle spaces differ"};
  GradedMap out = GradedMap::zero(before.src, after.dst, after.degree + before.degree);
  for (std::size_t j = 0; j < before.cols.size(); ++j) out.cols[j] = after.apply(before.cols[j]);
  return out;
}

inline GradedMap map_add(const GradedMap& a, const GradedMap& b) {
  GradedMap out = a;
  for (std::size_t j = 0; j < out.cols.size(); ++j) vec_add(out.cols[j], b.cols[j]);
  return out;
}

inline GradedMap map_scale(const GradedMap& a, const Scalar& c) {
  GradedMap out = a;
  for (auto& col : out.cols) col = vec_scale(col, c);
  return out;
}

// V[j]: same basis ids, degree i becomes i - j.
inline GradedSpace shift_space(const GradedSpace& v, int j) {
  GradedSpace out = v;
  for (auto& d : out.degrees) d -= j;
  return out;
}

// A degree-k map V -> W induces a map V[j] -> W[j] acting on the same
// coefficients up to the sign (-1)^(j*k); for the differential (k = 1) and
// an odd shift this is the usual flip d[1] = -d.
inline GradedMap shift_map(const GradedMap& m, int j) {
  GradedMap out = ((j * m.degree) % 2 != 0) ? map_scale(m, Scalar(-1)) : m;
  out.src = shift_space(m.src, j);
  out.dst = shift_space(m.dst, j);
  return out;
}

inline GradedMap shift_differential(const GradedMap& d, int j = 1) { return shift_map(d, j); }

// d^2 = 0, with the offending composite entry reported on failure.
inline Status check_differential(const GradedMap& d) {
  if (!(d.src == d.dst) || d.degree != 1)
    return Error{Errc::non_homogeneous_map, "differential must be an endomorphism of degree 1"};
  auto dd = compose(d, d);
  if (!dd.ok()) return dd.error();
  if (!dd.value().is_zero()) {
    for (std::size_t j = 0; j < dd.value().cols.size(); ++j)
      if (!dd.value().cols[j].empty())
        return Error{Errc::d_squared_nonzero, "d(d(" + d.src.ids[j] + ")) != 0"};
  }
  return ok_status();
}

}  // namespace phtt

#endif  // PHTT_GRADED_HPP
