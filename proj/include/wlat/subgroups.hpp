#pragma once

#include "wlat/fingroup.hpp"

namespace wlat {

// sigma in Sym(d) applied simultaneously to every d-letter block of {1..n}.
inline SignedPerm diag_block_perm(int n, int d, const SignedPerm& sigma) {
  if (d < 1 || n % d != 0) fail(errc::bad_params, "diagonal embedding needs d | n");
  SignedPerm p = SignedPerm::identity(n);
  for (int r = 0; r < n / d; ++r)
    for (int j = 0; j < d; ++j) p.img[r * d + j] = r * d + sigma.img[j];
  return p;
}

// X_d: the copy of Sym(d) diagonally embedded in Sym(n).
inline std::vector<SignedPerm> diag_x_gens(int n, int d) {
  std::vector<SignedPerm> out;
  if (d < 2) return out;
  out.push_back(diag_block_perm(n, d, parse_cycles(d, "(1 2)")));
  std::vector<int> c(d);
  for (int i = 0; i < d; ++i) c[i] = (i + 1) % d;
  out.push_back(diag_block_perm(n, d, SignedPerm(c)));
  return out;
}

// Y_d: Sym({1..d}) times the copy of Sym(d) diagonally embedded in
// Sym({d+1..n}).
inline std::vector<SignedPerm> diag_y_gens(int n, int d) {
  if (d < 1 || n % d != 0 || n / d < 2) fail(errc::bad_params, "Y_d needs d | n, n/d >= 2");
  std::vector<SignedPerm> out;
  if (d < 2) return out;
  // Sym on the first block
  SignedPerm t = SignedPerm::identity(n);
  std::swap(t.img[0], t.img[1]);
  out.push_back(t);
  SignedPerm c = SignedPerm::identity(n);
  for (int i = 0; i < d; ++i) c.img[i] = (i + 1) % d;
  out.push_back(c);
  // diagonal Sym(d) on blocks 2..t
  for (const SignedPerm& g : diag_x_gens(n - d, d)) {
    SignedPerm e = SignedPerm::identity(n);
    for (int i = 0; i < n - d; ++i) e.img[d + i] = d + g.img[i];
    out.push_back(e);
  }
  return out;
}

inline std::shared_ptr<const FinGroup> diag_x_group(int n, int d) {
  return std::make_shared<const FinGroup>(group_from_generators(
      "X_" + std::to_string(d) + "<Sym(" + std::to_string(n) + ")", n, diag_x_gens(n, d)));
}

inline std::shared_ptr<const FinGroup> diag_y_group(int n, int d) {
  return std::make_shared<const FinGroup>(group_from_generators(
      "Y_" + std::to_string(d) + "<Sym(" + std::to_string(n) + ")", n, diag_y_gens(n, d)));
}

}  // namespace wlat
