#ifndef PHTT_BIMODULE_HPP
#define PHTT_BIMODULE_HPP

// Biarity-indexed families of complexes with commuting permutation actions
// on outputs and inputs.  Actions are stored as the adjacent-transposition
// generators only; arbitrary permutations act through a sorting word, which
// is well defined once the generators pass the Coxeter relations checked by
// validate_component.
//
// Conventions: a permutation of size k is a vector p with p[i] = image of
// position i, 0-based.  The output action is a left action,
// act(s o t) = act(s) act(t); the input action is a right action,
// act(s o t) = act(t) act(s).

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phtt/common.hpp"
#include "phtt/graded.hpp"

namespace phtt {

inline constexpr int kMaxDegree = 8;

using Perm = std::vector<int>;

inline Perm perm_identity(int k) {
  Perm p(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(i)] = i;
  return p;
}

inline Perm perm_compose(const Perm& a, const Perm& b) {  // (a o b)[i] = a[b[i]]
  Perm out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    out[i] = a[static_cast<std::size_t>(b[i])];
  return out;
}

inline Perm perm_inverse(const Perm& p) {
  Perm out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return out;
}

inline int perm_sign(const Perm& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

// Adjacent transposition indices i1, i2, ... with p = s_{ik} o ... o s_{i1},
// where s_i swaps positions i and i+1.
inline std::vector<int> adjacent_word(Perm p) {
  std::vector<int> word;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      if (p[i] > p[i + 1]) {
        std::swap(p[i], p[i + 1]);
        word.push_back(static_cast<int>(i));
        moved = true;
      }
  }
  return word;
}

// One biarity component: a finite complex together with the adjacent
// transposition generators of the output and input permutation actions.
struct BiComponent {
  int m = 0;
  int n = 0;
  GradedSpace space;
  GradedMap d;                     // degree +1
  std::vector<GradedMap> out_gen;  // swap of output slots (i, i+1), 0-based i
  std::vector<GradedMap> in_gen;   // swap of input slots (j, j+1)
};

inline Status validate_component(const BiComponent& c) {
  if (c.m < 0 || c.n < 0)
    return Error{Errc::bad_arguments, "negative arity"};
  for (int i = 0; i < c.space.dim(); ++i)
    if (c.space.degree(i) > kMaxDegree || c.space.degree(i) < -kMaxDegree)
      return Error{Errc::degree_out_of_range,
                   c.space.ids[static_cast<std::size_t>(i)]};
  if (!(c.d.src == c.space) || !(c.d.dst == c.space))
    return Error{Errc::dimension_mismatch, "differential is not an endomorphism"};
  if (!map_homogeneous(c.d))
    return Error{Errc::non_homogeneous_map, "differential"};
  auto ds = check_differential(c.d);
  if (!ds.ok()) return ds;
  if (c.out_gen.size() != static_cast<std::size_t>(c.m > 0 ? c.m - 1 : 0) ||
      c.in_gen.size() != static_cast<std::size_t>(c.n > 0 ? c.n - 1 : 0))
    return Error{Errc::bad_action, "generator count does not match arity"};

  GradedMap id = GradedMap::identity(c.space);
  auto check_side = [&](const std::vector<GradedMap>& gen) -> Status {
    for (const auto& s : gen) {
      if (!(s.src == c.space) || !(s.dst == c.space) || s.degree != 0 || !map_homogeneous(s))
        return Error{Errc::bad_action, "generator is not a degree-zero endomorphism"};
      if (!(compose(s, s).value() == id))
        return Error{Errc::bad_action, "generator is not an involution"};
      if (!(compose(s, c.d).value() == compose(c.d, s).value()))
        return Error{Errc::not_equivariant, "differential does not commute with a generator"};
    }
    for (std::size_t i = 0; i + 1 < gen.size(); ++i) {
      GradedMap aba = compose(gen[i], compose(gen[i + 1], gen[i]).value()).value();
      GradedMap bab = compose(gen[i + 1], compose(gen[i], gen[i + 1]).value()).value();
      if (!(aba == bab)) return Error{Errc::bad_action, "braid relation fails"};
    }
    for (std::size_t i = 0; i < gen.size(); ++i)
      for (std::size_t j = i + 2; j < gen.size(); ++j)
        if (!(compose(gen[i], gen[j]).value() == compose(gen[j], gen[i]).value()))
          return Error{Errc::bad_action, "distant generators do not commute"};
    return ok_status();
  };
  auto ls = check_side(c.out_gen);
  if (!ls.ok()) return ls;
  auto rs = check_side(c.in_gen);
  if (!rs.ok()) return rs;
  for (const auto& a : c.out_gen)
    for (const auto& b : c.in_gen)
      if (!(compose(a, b).value() == compose(b, a).value()))
        return Error{Errc::bad_action, "output and input actions do not commute"};
  return ok_status();
}

// Applies the pair (out_perm, in_perm) to a vector, output action on the
// left, input action on the right.
inline Result<Vec> act(const BiComponent& c, const Perm& out_perm, const Perm& in_perm,
                       const Vec& x) {
  if (static_cast<int>(out_perm.size()) != c.m || static_cast<int>(in_perm.size()) != c.n)
    return Error{Errc::bad_arguments, "permutation size does not match arity"};
  Vec cur = x;
  // input side: reversed word, so the composite for s o t is
  // act(t) o act(s), a right action
  auto iw = adjacent_word(in_perm);
  for (auto it = iw.rbegin(); it != iw.rend(); ++it)
    cur = c.in_gen[static_cast<std::size_t>(*it)].apply(cur);
  // output side: word order, so the composite for s o t is
  // act(s) o act(t), a left action
  for (int i : adjacent_word(out_perm)) cur = c.out_gen[static_cast<std::size_t>(i)].apply(cur);
  return cur;
}

inline Result<GradedMap> action_map(const BiComponent& c, const Perm& out_perm,
                                    const Perm& in_perm) {
  GradedMap out = GradedMap::zero(c.space, c.space, 0);
  for (int j = 0; j < c.space.dim(); ++j) {
    Vec e{{j, Scalar(1)}};
    auto r = act(c, out_perm, in_perm, e);
    if (!r.ok()) return r.error();
    out.cols[static_cast<std::size_t>(j)] = r.take();
  }
  return out;
}

// A finite family of components keyed by biarity; absent keys mean the
// zero complex there.
struct Bimodule {
  std::map<std::pair<int, int>, BiComponent> at;

  const BiComponent* find(int m, int n) const {
    auto it = at.find({m, n});
    return it == at.end() ? nullptr : &it->second;
  }
};

inline Result<Bimodule> make_bimodule(std::vector<BiComponent> comps) {
  Bimodule b;
  for (auto& c : comps) {
    auto s = validate_component(c);
    if (!s.ok()) return s.error();
    auto key = std::make_pair(c.m, c.n);
    if (b.at.count(key))
      return Error{Errc::bad_arguments, "duplicate biarity component"};
    b.at.emplace(key, std::move(c));
  }
  return b;
}

// Column-list form of a matrix on the component's basis: one entry list
// per source basis index, each entry a (target index, coefficient) pair.
using MatCols = std::vector<std::vector<std::pair<int, Scalar>>>;

// Convenience builder from explicit tables; validates the result.
inline Result<BiComponent> component_from_tables(
    int m, int n, const std::vector<std::pair<std::string, int>>& basis, const MatCols& d_cols,
    const std::vector<MatCols>& out_gens, const std::vector<MatCols>& in_gens) {
  auto sp = GradedSpace::make(basis);
  if (!sp.ok()) return sp.error();
  BiComponent c;
  c.m = m;
  c.n = n;
  c.space = sp.take();
  int dim = c.space.dim();
  auto build = [&](const MatCols& cols, int deg) -> Result<GradedMap> {
    if (static_cast<int>(cols.size()) != dim)
      return Error{Errc::dimension_mismatch, "column count does not match basis"};
    GradedMap mmap = GradedMap::zero(c.space, c.space, deg);
    for (int j = 0; j < dim; ++j)
      for (const auto& [i, coeff] : cols[static_cast<std::size_t>(j)]) {
        if (i < 0 || i >= dim) return Error{Errc::unknown_basis_id, "row index out of range"};
        vec_add(mmap.cols[static_cast<std::size_t>(j)], i, coeff);
      }
    return mmap;
  };
  auto dm = build(d_cols, 1);
  if (!dm.ok()) return dm.error();
  c.d = dm.take();
  for (const auto& cols : out_gens) {
    auto gm = build(cols, 0);
    if (!gm.ok()) return gm.error();
    c.out_gen.push_back(gm.take());
  }
  for (const auto& cols : in_gens) {
    auto gm = build(cols, 0);
    if (!gm.ok()) return gm.error();
    c.in_gen.push_back(gm.take());
  }
  auto s = validate_component(c);
  if (!s.ok()) return s.error();
  return c;
}

}  // namespace phtt

#endif
