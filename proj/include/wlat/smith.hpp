#pragma once

#include <optional>
#include <vector>

#include "wlat/intmat.hpp"

namespace wlat {

// Elementary row operation log entry (enough to replay inverse transforms).
struct RowOp {
  enum Kind : uint8_t { kSwap, kAddMul, kNegate } kind;
  int i, k;  // kSwap: rows i<->k; kAddMul: row_i -= q*row_k; kNegate: row i
  Int q;
};

struct SnfOptions {
  bool want_u = false;
  bool want_v = false;
  bool want_uinv = false;
  bool want_vinv = false;
  bool row_log = false;  // record row ops instead of materializing u/uinv
};

struct SmithForm {
  std::vector<Int> d;  // nonzero invariant factors, d[i] | d[i+1], all > 0
  int rank = 0;
  IntMat u, v, uinv, vinv;  // u*a*v = diag(d) padded with zeros
  std::vector<RowOp> row_log;
};

struct AbelianInvariants {
  std::vector<Int> torsion;  // invariant factors > 1, divisibility chain
  int free_rank = 0;
  bool operator==(const AbelianInvariants& o) const = default;
  bool trivial() const { return torsion.empty() && free_rank == 0; }
  std::string str() const {
    if (trivial()) return "0";
    std::string s;
    for (const Int& t : torsion) s += (s.empty() ? "" : " + ") + ("Z/" + t.get_str());
    if (free_rank) s += (s.empty() ? "" : " + ") + ("Z^" + std::to_string(free_rank));
    return s;
  }
};

namespace detail {

// Applies the inverse of a recorded row-op sequence to e_col, giving one
// column of uinv without materializing the full matrix.
inline std::vector<Int> uinv_column(const std::vector<RowOp>& log, int rows, int col) {
  std::vector<Int> v(rows);
  v[col] = 1;
  for (auto it = log.rbegin(); it != log.rend(); ++it) {
    switch (it->kind) {
      case RowOp::kSwap: std::swap(v[it->i], v[it->k]); break;
      case RowOp::kAddMul:
        // uinv = E_1^{-1} * ... * E_N^{-1}; its column j is obtained by
        // feeding e_j through the inverses in reverse order, each acting on
        // the vector from the left: for E = I - q*e_{ik} that is v_i += q*v_k.
        if (v[it->k] != 0) v[it->i] += it->q * v[it->k];
        break;
      case RowOp::kNegate: v[it->i] = -v[it->i]; break;
    }
  }
  return v;
}

}  // namespace detail

// Smith normal form. Pivot strategy: minimal absolute value over the
// remaining submatrix, ties broken by lowest row then lowest column.
inline SmithForm smith_normal_form(IntMat a, SnfOptions opt = {}) {
  const int r = a.rows(), c = a.cols();
  SmithForm out;
  if (opt.want_u) out.u = IntMat::identity(r);
  if (opt.want_uinv) out.uinv = IntMat::identity(r);
  if (opt.want_v) out.v = IntMat::identity(c);
  if (opt.want_vinv) out.vinv = IntMat::identity(c);

  auto log_op = [&](RowOp::Kind kind, int i, int k, const Int& q) {
    if (opt.row_log) out.row_log.push_back({kind, i, k, q});
  };
  auto row_swap = [&](int i, int k) {
    if (i == k) return;
    for (int j = 0; j < c; ++j) std::swap(a.at(i, j), a.at(k, j));
    if (opt.want_u)
      for (int j = 0; j < r; ++j) std::swap(out.u.at(i, j), out.u.at(k, j));
    if (opt.want_uinv)
      for (int j = 0; j < r; ++j) std::swap(out.uinv.at(j, i), out.uinv.at(j, k));
    log_op(RowOp::kSwap, i, k, 0);
  };
  auto col_swap = [&](int i, int k) {
    if (i == k) return;
    for (int j = 0; j < r; ++j) std::swap(a.at(j, i), a.at(j, k));
    if (opt.want_v)
      for (int j = 0; j < c; ++j) std::swap(out.v.at(j, i), out.v.at(j, k));
    if (opt.want_vinv)
      for (int j = 0; j < c; ++j) std::swap(out.vinv.at(i, j), out.vinv.at(k, j));
  };
  // row_i -= q * row_k
  auto row_addmul = [&](int i, int k, const Int& q) {
    if (q == 0) return;
    Int t;
    for (int j = 0; j < c; ++j) {
      if (a.at(k, j) == 0) continue;
      t = q * a.at(k, j);
      a.at(i, j) -= t;
    }
    if (opt.want_u)
      for (int j = 0; j < r; ++j) {
        if (out.u.at(k, j) == 0) continue;
        t = q * out.u.at(k, j);
        out.u.at(i, j) -= t;
      }
    if (opt.want_uinv)  // uinv <- uinv * E^{-1}, E^{-1} adds q*col_i to col_k
      for (int j = 0; j < r; ++j) {
        if (out.uinv.at(j, i) == 0) continue;
        t = q * out.uinv.at(j, i);
        out.uinv.at(j, k) += t;
      }
    log_op(RowOp::kAddMul, i, k, q);
  };
  // col_j -= q * col_k
  auto col_addmul = [&](int j, int k, const Int& q) {
    if (q == 0) return;
    Int t;
    for (int i = 0; i < r; ++i) {
      if (a.at(i, k) == 0) continue;
      t = q * a.at(i, k);
      a.at(i, j) -= t;
    }
    if (opt.want_v)
      for (int i = 0; i < c; ++i) {
        if (out.v.at(i, k) == 0) continue;
        t = q * out.v.at(i, k);
        out.v.at(i, j) -= t;
      }
    if (opt.want_vinv)
      for (int i = 0; i < c; ++i) {
        if (out.vinv.at(j, i) == 0) continue;
        t = q * out.vinv.at(j, i);
        out.vinv.at(k, i) += t;
      }
  };
  auto row_negate = [&](int i) {
    for (int j = 0; j < c; ++j) a.at(i, j) = -a.at(i, j);
    if (opt.want_u)
      for (int j = 0; j < r; ++j) out.u.at(i, j) = -out.u.at(i, j);
    if (opt.want_uinv)
      for (int j = 0; j < r; ++j) out.uinv.at(j, i) = -out.uinv.at(j, i);
    log_op(RowOp::kNegate, i, i, 0);
  };

  const int kmax = std::min(r, c);
  Int q, rem;
  for (int k = 0; k < kmax; ++k) {
    for (;;) {
      // Min-abs pivot over the trailing submatrix, lowest row then column.
      int pi = -1, pj = -1;
      for (int i = k; i < r; ++i)
        for (int j = k; j < c; ++j) {
          const Int& x = a.at(i, j);
          if (x == 0) continue;
          if (pi < 0 || mpz_cmpabs(x.get_mpz_t(), a.at(pi, pj).get_mpz_t()) < 0) pi = i, pj = j;
        }
      if (pi < 0) {
        k = kmax;  // rest of the matrix is zero
        break;
      }
      row_swap(k, pi);
      col_swap(k, pj);

      bool clean = true;
      for (int i = k + 1; i < r; ++i) {
        if (a.at(i, k) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), a.at(i, k).get_mpz_t(), a.at(k, k).get_mpz_t());
        row_addmul(i, k, q);
        if (a.at(i, k) != 0) clean = false;
      }
      for (int j = k + 1; j < c; ++j) {
        if (a.at(k, j) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), a.at(k, j).get_mpz_t(), a.at(k, k).get_mpz_t());
        col_addmul(j, k, q);
        if (a.at(k, j) != 0) clean = false;
      }
      if (!clean) continue;  // smaller remainders exist; re-pick pivot

      // Divisibility sweep: pivot must divide the whole trailing block.
      bool divides = true;
      for (int i = k + 1; i < r && divides; ++i)
        for (int j = k + 1; j < c; ++j) {
          mpz_tdiv_r(rem.get_mpz_t(), a.at(i, j).get_mpz_t(), a.at(k, k).get_mpz_t());
          if (rem != 0) {
            row_addmul(k, i, Int(-1));  // fold offending row into pivot row
            divides = false;
            break;
          }
        }
      if (!divides) continue;

      if (a.at(k, k) < 0) row_negate(k);
      break;
    }
    if (k >= kmax) break;
  }

  for (int k = 0; k < kmax; ++k) {
    if (a.at(k, k) == 0) break;
    out.d.push_back(a.at(k, k));
  }
  out.rank = int(out.d.size());
  return out;
}

inline std::vector<Int> smith_invariants(const IntMat& a) {
  return smith_normal_form(a, {}).d;
}

inline int rank_of(const IntMat& a) { return smith_normal_form(a, {}).rank; }

// Saturated basis of the integer kernel {x : a*x = 0}; columns are a basis,
// deterministic order. Always primitive (columns of a unimodular matrix).
inline IntMat kernel_basis(const IntMat& a) {
  SnfOptions opt;
  opt.want_v = true;
  SmithForm s = smith_normal_form(a, opt);
  return s.v.cols_range(s.rank, a.cols() - s.rank);
}

// Basis of the saturation of the column span of `a` inside Z^rows.
inline IntMat saturation_basis(const IntMat& a) {
  SnfOptions opt;
  opt.want_uinv = true;
  SmithForm s = smith_normal_form(a, opt);
  return s.uinv.cols_range(0, s.rank);
}

// Invariants of the cokernel Z^rows / col-span(a).
inline AbelianInvariants cokernel_invariants(const IntMat& a) {
  SmithForm s = smith_normal_form(a, {});
  AbelianInvariants inv;
  for (const Int& x : s.d)
    if (x > 1) inv.torsion.push_back(x);
  inv.free_rank = a.rows() - s.rank;
  return inv;
}

// Solves a*x = b over the integers, column by column. Returns nullopt when
// any column has no integral solution.
inline std::optional<IntMat> solve_integer(const IntMat& a, const IntMat& b) {
  if (a.rows() != b.rows()) fail(errc::bad_params, "solve shape mismatch");
  SnfOptions opt;
  opt.want_u = true;
  opt.want_v = true;
  SmithForm s = smith_normal_form(a, opt);
  IntMat cb = s.u * b;
  IntMat y(a.cols(), b.cols());
  Int q, rem;
  for (int j = 0; j < b.cols(); ++j) {
    for (int i = 0; i < a.rows(); ++i) {
      if (i < s.rank) {
        mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), cb.at(i, j).get_mpz_t(),
                    s.d[i].get_mpz_t());
        if (rem != 0) return std::nullopt;
        if (i < a.cols()) y.at(i, j) = q;
      } else if (cb.at(i, j) != 0) {
        return std::nullopt;
      }
    }
  }
  return s.v * y;
}

inline std::optional<std::vector<Int>> solve_integer(const IntMat& a,
                                                     const std::vector<Int>& b) {
  auto x = solve_integer(a, IntMat::column(b));
  if (!x) return std::nullopt;
  return x->col_vec(0);
}

// Signed determinant (Bareiss fraction-free elimination); exact.
inline Int det(const IntMat& m) {
  if (m.rows() != m.cols()) fail(errc::bad_params, "det of non-square matrix");
  int n = m.rows();
  if (n == 0) return 1;
  IntMat a = m;
  Int prev = 1, sign = 1, t;
  for (int k = 0; k < n - 1; ++k) {
    if (a.at(k, k) == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (a.at(i, k) != 0) {
          p = i;
          break;
        }
      if (p < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        t = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
        mpz_divexact(a.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    prev = a.at(k, k);
  }
  return sign * a.at(n - 1, n - 1);
}

inline bool is_unimodular(const IntMat& m) {
  if (m.rows() != m.cols()) return false;
  Int d = det(m);
  return d == 1 || d == -1;
}

// Inverse of a unimodular matrix (exact, integral).
inline IntMat inverse_unimodular(const IntMat& m) {
  SnfOptions opt;
  opt.want_u = true;
  opt.want_v = true;
  SmithForm s = smith_normal_form(m, opt);
  if (s.rank != m.rows() || s.rank != m.cols())
    fail(errc::singular, "matrix not invertible over Z");
  for (const Int& x : s.d)
    if (x != 1) fail(errc::singular, "matrix not unimodular");
  return s.v * s.u;  // m = uinv * vinv  =>  m^{-1} = v * u
}

// Invariants of (Z^r / col-span(sub)) where sub is expressed in the ambient
// basis of `big`'s columns: i.e. the quotient big-lattice / sub-lattice.
// Requires sub ⊆ span(big) over Z.
inline AbelianInvariants quotient_invariants(const IntMat& big, const IntMat& sub) {
  auto coeff = solve_integer(big, sub);
  if (!coeff) fail(errc::bad_params, "sublattice not contained in lattice");
  return cokernel_invariants(*coeff);
}

// Basis of the lattice spanned by the columns of a (which may be dependent
// or redundant): with u*a*v = diag(d), the span equals span{d_i * uinv_i}.
inline IntMat column_basis(const IntMat& a) {
  SmithForm f = smith_normal_form(a, {.want_uinv = true});
  IntMat b(a.rows(), f.rank);
  for (int j = 0; j < f.rank; ++j)
    for (int i = 0; i < a.rows(); ++i) b.at(i, j) = f.uinv.at(i, j) * f.d[j];
  return b;
}

inline IntMat rows_range(const IntMat& m, int i0, int n) {
  IntMat out(n, m.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m.cols(); ++j) out.at(i, j) = m.at(i0 + i, j);
  return out;
}

// Basis of the intersection of the column spans of a and b. Both inputs must
// have full column rank (be bases); then x |-> a*x is injective on the kernel
// of [a | -b] and the images of a kernel basis form a basis.
inline IntMat lattice_intersection(const IntMat& a, const IntMat& b) {
  if (a.rows() != b.rows()) fail(errc::bad_params, "intersection shape mismatch");
  IntMat k = kernel_basis(IntMat::hstack(a, -b));
  return a * rows_range(k, 0, a.cols());
}

}  // namespace wlat
