#ifndef PHTT_TESTS_TENSOR_MODEL_HPP
#define PHTT_TESTS_TENSOR_MODEL_HPP

// Concrete bimodule of linear maps between tensor powers of a two-line
// complex, used as an independent oracle in tests.  V has basis a in
// degree 0 and b in degree 1 with d(a) = b.  The (m,n) component is
// Hom(V^n, V^m) with basis e_{o|i} indexed by words over {a,b}; the
// symmetric groups permute tensor factors with the sign of the degrees
// swapped, and the differential is the Hom one.  Everything here is
// computed from those definitions directly, not through the library's
// action plumbing, so agreement is evidence for the conventions.

#include <string>
#include <utility>
#include <vector>

#include "phtt/bimodule.hpp"

namespace tmodel {

inline int bcount(const std::string& s) {
  int k = 0;
  for (char c : s)
    if (c == 'b') ++k;
  return k;
}

inline int bprefix(const std::string& s, std::size_t j) {
  int k = 0;
  for (std::size_t p = 0; p < j; ++p)
    if (s[p] == 'b') ++k;
  return k;
}

inline std::vector<std::string> words(int len) {
  std::vector<std::string> out{""};
  for (int k = 0; k < len; ++k) {
    std::vector<std::string> next;
    for (const auto& w : out) {
      next.push_back(w + "a");
      next.push_back(w + "b");
    }
    out = std::move(next);
  }
  return out;
}

inline std::string hom_id(const std::string& o, const std::string& i) { return o + "|" + i; }

// Tensor factors permuted by rho (source position k lands at rho[k]),
// with the Koszul sign of the crossings.
inline std::pair<std::string, int> word_perm(const std::string& w, const phtt::Perm& rho) {
  std::string out(w.size(), '?');
  int sign = 1;
  for (std::size_t k = 0; k < w.size(); ++k) out[rho[k]] = w[k];
  for (std::size_t k = 0; k < w.size(); ++k)
    for (std::size_t l = k + 1; l < w.size(); ++l)
      if (rho[k] > rho[l] && w[k] == 'b' && w[l] == 'b') sign = -sign;
  return {out, sign};
}

inline phtt::Result<phtt::BiComponent> make_hom_component(int m, int n) {
  using phtt::MatCols;
  using phtt::Scalar;
  auto outs = words(m);
  auto ins = words(n);
  std::vector<std::pair<std::string, int>> basis;
  std::map<std::string, int> index;
  for (const auto& o : outs)
    for (const auto& i : ins) {
      index[hom_id(o, i)] = static_cast<int>(basis.size());
      basis.emplace_back(hom_id(o, i), bcount(o) - bcount(i));
    }
  int dim = static_cast<int>(basis.size());

  // d(phi) = d_tensor compose phi - (-1)^{|phi|} phi compose d_tensor
  MatCols d_cols(dim);
  for (const auto& o : outs)
    for (const auto& i : ins) {
      int col = index.at(hom_id(o, i));
      for (std::size_t j = 0; j < o.size(); ++j)
        if (o[j] == 'a') {
          std::string o2 = o;
          o2[j] = 'b';
          int s = bprefix(o, j) % 2 == 0 ? 1 : -1;
          d_cols[col].emplace_back(index.at(hom_id(o2, i)), Scalar(s));
        }
      int parity = (bcount(o) + bcount(i)) % 2;
      for (std::size_t j = 0; j < i.size(); ++j)
        if (i[j] == 'b') {
          std::string i2 = i;
          i2[j] = 'a';
          int s = bprefix(i, j) % 2 == 0 ? 1 : -1;
          if (parity == 0) s = -s;
          d_cols[col].emplace_back(index.at(hom_id(o, i2)), Scalar(s));
        }
    }

  auto swap_tables = [&](bool on_out) {
    int len = on_out ? m : n;
    std::vector<MatCols> gens;
    for (int j = 0; j + 1 < len; ++j) {
      MatCols g(dim);
      for (const auto& o : outs)
        for (const auto& i : ins) {
          const std::string& w = on_out ? o : i;
          std::string w2 = w;
          std::swap(w2[j], w2[j + 1]);
          int s = (w[j] == 'b' && w[j + 1] == 'b') ? -1 : 1;
          int col = index.at(hom_id(o, i));
          int row = on_out ? index.at(hom_id(w2, i)) : index.at(hom_id(o, w2));
          g[col].emplace_back(row, Scalar(s));
        }
      gens.push_back(std::move(g));
    }
    return gens;
  };

  return phtt::component_from_tables(m, n, basis, d_cols, swap_tables(true),
                                     swap_tables(false));
}

}  // namespace tmodel

#endif
