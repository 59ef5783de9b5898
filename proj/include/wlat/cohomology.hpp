#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wlat/fingroup.hpp"
#include "wlat/glattice.hpp"
#include "wlat/smith.hpp"

// Tate cohomology of a finite signed-permutation group acting on a lattice,
// in degrees -1..2, plus cocycle restriction and the "dies on every cyclic
// subgroup" kernels Sha^1 / Sha^2.
//
// Degrees -1 and 0 come from the norm map N = sum of the group's action
// matrices: H^-1 = Ker(N) / (augmentation ideal)·L and H^0 = L^S / N·L.
// Degrees 1 and 2 use the normalized bar complex, i.e. cochains on tuples
// of non-identity elements. Because the rational cohomology of a lattice
// vanishes in positive degrees, the cocycle lattice is exactly the
// saturation of the coboundary lattice, so H^k (k = 1, 2) is read off the
// nontrivial invariant factors of the boundary matrix d^{k-1}, and
// representative cocycles sit in the matching columns of the inverse row
// transform.

namespace wlat {

struct CohomOptions {
  bool generators = false;      // return representative cocycles (degrees 1, 2)
  long size_guard = 2'000'000;  // refusal threshold, in matrix coordinates
};

struct CohomResult {
  int degree = 0;
  std::string subgroup;
  AbelianInvariants invariants;
  // One cocycle per torsion invariant (degrees 1 and 2, on request): an
  // r x m^degree matrix with one column per tuple of non-identity elements,
  // ordered by the group's element enumeration with the identity dropped.
  std::vector<IntMat> generators;
};

namespace detail {

// The acting group together with the action matrix of every element.
struct LocalAction {
  std::shared_ptr<const FinGroup> g;
  std::vector<IntMat> act;  // act[0] is the identity
  int r = 0;
};

inline LocalAction local_action(const GLattice& l, const std::shared_ptr<const FinGroup>& s) {
  if (s->degree != l.group().degree)
    fail(errc::group_mismatch, "group " + s->label + " acts on " + std::to_string(s->degree) +
                                   " letters, lattice wants " + std::to_string(l.group().degree));
  LocalAction la{s, {}, l.rank()};
  la.act.reserve(size_t(s->order()));
  for (const SignedPerm& p : s->elems) la.act.push_back(l.action_of(p));
  return la;
}

// Normalized bar boundary d^k as a matrix C^k -> C^{k+1}, k = 0, 1, 2.
// C^k has one r-block per k-tuple of non-identity elements, blocks ordered
// lexicographically by element index.
inline IntMat d_matrix(const LocalAction& la, int k) {
  const int r = la.r, m = la.g->order() - 1;
  const FinGroup& g = *la.g;
  auto add_block = [&](IntMat& d, long rb, long cb, const IntMat& a, int sign) {
    for (int p = 0; p < r; ++p)
      for (int q = 0; q < r; ++q)
        if (a.at(p, q) != 0) d.at(rb * r + p, cb * r + q) += sign * a.at(p, q);
  };
  IntMat id = IntMat::identity(r);
  if (k == 0) {
    IntMat d(r * m, r);
    for (int i = 1; i <= m; ++i) add_block(d, i - 1, 0, la.act[i] - id, 1);
    return d;
  }
  if (k == 1) {
    IntMat d(long(r) * m * m, long(r) * m);
    for (int i = 1; i <= m; ++i)
      for (int j = 1; j <= m; ++j) {
        long rb = long(i - 1) * m + (j - 1);
        add_block(d, rb, j - 1, la.act[i], 1);
        int t = g.mulIdx(i, j);
        if (t != 0) add_block(d, rb, t - 1, id, -1);
        add_block(d, rb, i - 1, id, 1);
      }
    return d;
  }
  if (k == 2) {
    IntMat d(long(r) * m * m * m, long(r) * m * m);
    for (int i = 1; i <= m; ++i)
      for (int j = 1; j <= m; ++j)
        for (int e = 1; e <= m; ++e) {
          long rb = (long(i - 1) * m + (j - 1)) * m + (e - 1);
          add_block(d, rb, long(j - 1) * m + (e - 1), la.act[i], 1);
          int t1 = g.mulIdx(i, j);
          if (t1 != 0) add_block(d, rb, long(t1 - 1) * m + (e - 1), id, -1);
          int t2 = g.mulIdx(j, e);
          if (t2 != 0) add_block(d, rb, long(i - 1) * m + (t2 - 1), id, 1);
          add_block(d, rb, long(i - 1) * m + (j - 1), id, -1);
        }
    return d;
  }
  fail(errc::bad_params, "no boundary matrix for k = " + std::to_string(k));
}

// d^deg applied to a single cochain in the r x m^deg column layout, without
// materializing the boundary matrix.
inline IntMat apply_d(const LocalAction& la, int deg, const IntMat& f) {
  const int r = la.r, m = la.g->order() - 1;
  const FinGroup& g = *la.g;
  if (deg == 1) {
    IntMat out(r, m * m);
    for (int i = 1; i <= m; ++i)
      for (int j = 1; j <= m; ++j) {
        int c = (i - 1) * m + (j - 1);
        for (int p = 0; p < r; ++p) {
          Int v = 0;
          for (int q = 0; q < r; ++q) v += la.act[i].at(p, q) * f.at(q, j - 1);
          int t = g.mulIdx(i, j);
          if (t != 0) v -= f.at(p, t - 1);
          v += f.at(p, i - 1);
          out.at(p, c) = v;
        }
      }
    return out;
  }
  if (deg == 2) {
    IntMat out(r, m * m * m);
    for (int i = 1; i <= m; ++i)
      for (int j = 1; j <= m; ++j)
        for (int e = 1; e <= m; ++e) {
          int c = ((i - 1) * m + (j - 1)) * m + (e - 1);
          int jk = (j - 1) * m + (e - 1);
          for (int p = 0; p < r; ++p) {
            Int v = 0;
            for (int q = 0; q < r; ++q) v += la.act[i].at(p, q) * f.at(q, jk);
            int t1 = g.mulIdx(i, j);
            if (t1 != 0) v -= f.at(p, (t1 - 1) * m + (e - 1));
            int t2 = g.mulIdx(j, e);
            if (t2 != 0) v += f.at(p, (i - 1) * m + (t2 - 1));
            v -= f.at(p, (i - 1) * m + (j - 1));
            out.at(p, c) = v;
          }
        }
    return out;
  }
  fail(errc::bad_params, "apply_d handles degrees 1 and 2");
}

inline IntMat flatten(const IntMat& f) {
  IntMat v(f.rows() * f.cols(), 1);
  for (int j = 0; j < f.cols(); ++j)
    for (int i = 0; i < f.rows(); ++i) v.at(long(j) * f.rows() + i, 0) = f.at(i, j);
  return v;
}

inline IntMat unflatten(const std::vector<Int>& v, int r) {
  IntMat f(r, int(v.size()) / r);
  for (size_t k = 0; k < v.size(); ++k) f.at(int(k) % r, int(k) / r) = v[k];
  return f;
}

// The computation depends only on the element list and its action matrices,
// so that is what the cache keys on (never object identity: heap addresses
// get reused).
inline std::string cohom_key(const LocalAction& la, int degree, bool gens) {
  std::ostringstream o;
  o << degree << '|' << gens;
  for (const SignedPerm& p : la.g->elems) {
    o << '|';
    for (size_t i = 0; i < p.img.size(); ++i) o << int(p.img[i]) << (p.sgn[i] < 0 ? '-' : '+');
  }
  for (const IntMat& a : la.act) o << '#' << a.str();
  return o.str();
}

struct CohomCacheState {
  std::mutex mu;
  std::map<std::string, CohomResult> map;
};

inline CohomCacheState& cohom_cache() {
  static CohomCacheState c;
  return c;
}

}  // namespace detail

inline CohomResult tate(const GLattice& l, const std::shared_ptr<const FinGroup>& s, int degree,
                        CohomOptions opt = {}) {
  if (degree < -1 || degree > 2) fail(errc::bad_params, "degree must be -1, 0, 1, or 2");
  const bool want_gens = opt.generators && degree >= 1;
  const int r = l.rank();
  const int n = s->order();
  const int m = n - 1;
  if (long(r) * n > opt.size_guard)
    fail(errc::size_guard, "group order x rank exceeds the size guard");
  CohomResult res;
  res.degree = degree;
  res.subgroup = s->label;
  if (n == 1) return res;  // every Tate group of the trivial group vanishes
  if (r == 0) return res;  // ... and of the zero lattice

  detail::LocalAction la = detail::local_action(l, s);
  std::string key = detail::cohom_key(la, degree, want_gens);
  {
    std::lock_guard<std::mutex> lk(detail::cohom_cache().mu);
    auto it = detail::cohom_cache().map.find(key);
    if (it != detail::cohom_cache().map.end()) {
      CohomResult out = it->second;
      out.subgroup = s->label;  // labels are cosmetic, keep the caller's
      return out;
    }
  }
  if (degree == -1 || degree == 0) {
    IntMat norm(r, r);
    for (const IntMat& a : la.act) norm = norm + a;
    if (degree == -1) {
      IntMat ker = kernel_basis(norm);
      // The augmentation ideal image (as a subgroup of L) is already spanned
      // by (g - 1)L over the generators: gh - 1 = (g - 1)h + (h - 1), hL = L.
      IntMat il(r, r * int(s->gens.size()));
      for (size_t gi = 0; gi < s->gens.size(); ++gi) {
        IntMat b = la.act[s->gens[gi]] - IntMat::identity(r);
        for (int p = 0; p < r; ++p)
          for (int q = 0; q < r; ++q) il.at(p, int(gi) * r + q) = b.at(p, q);
      }
      res.invariants = quotient_invariants(ker, il);
    } else {
      IntMat stack(r * int(s->gens.size()), r);
      for (size_t gi = 0; gi < s->gens.size(); ++gi) {
        IntMat b = la.act[s->gens[gi]] - IntMat::identity(r);
        for (int p = 0; p < r; ++p)
          for (int q = 0; q < r; ++q) stack.at(int(gi) * r + p, q) = b.at(p, q);
      }
      res.invariants = quotient_invariants(kernel_basis(stack), norm);
    }
  } else {
    if (degree == 1 && long(r) * r * m > opt.size_guard)
      fail(errc::size_guard, "degree-1 boundary exceeds the size guard");
    if (degree == 2 && long(r) * m * m * m > opt.size_guard)
      fail(errc::size_guard, "degree-2 computation exceeds the size guard");
    IntMat d = detail::d_matrix(la, degree - 1);
    SmithForm f = smith_normal_form(d, {.row_log = want_gens});
    for (const Int& x : f.d)
      if (x > 1) res.invariants.torsion.push_back(x);
    if (want_gens) {
      for (int i = 0; i < f.rank; ++i) {
        if (f.d[i] <= 1) continue;
        IntMat gen = detail::unflatten(detail::uinv_column(f.row_log, d.rows(), i), r);
        // the column lies in the saturation of the coboundaries, so it must
        // satisfy the cocycle condition; re-check rather than assume
        IntMat dz = detail::apply_d(la, degree, gen);
        if (!(dz == IntMat(dz.rows(), dz.cols())))
          fail(errc::hypothesis_failed, "representative failed the cocycle re-check");
        res.generators.push_back(std::move(gen));
      }
    }
  }

  std::lock_guard<std::mutex> lk(detail::cohom_cache().mu);
  detail::cohom_cache().map[key] = res;
  return res;
}

inline CohomResult tate(const GLattice& l, const Subgroup& s, int degree, CohomOptions opt = {}) {
  return tate(l, std::make_shared<const FinGroup>(s.group()), degree, opt);
}

// Literal tuple-restriction of a degree-1 or -2 cocycle to a subgroup,
// with a verdict on whether the restricted class is a coboundary there.
struct RestrictionResult {
  IntMat restricted;
  bool coboundary = false;
};

inline RestrictionResult restriction(const GLattice& l, const std::shared_ptr<const FinGroup>& big,
                                     const std::shared_ptr<const FinGroup>& small, int degree,
                                     const IntMat& cls) {
  if (degree != 1 && degree != 2) fail(errc::bad_params, "restriction handles degrees 1 and 2");
  const int r = l.rank();
  const int mb = big->order() - 1, ms = small->order() - 1;
  if (cls.rows() != r || cls.cols() != (degree == 1 ? mb : mb * mb))
    fail(errc::bad_params, "cocycle shape does not match the group and lattice");
  for (const SignedPerm& p : small->elems)
    if (!big->contains(p))
      fail(errc::group_mismatch, small->label + " is not a subgroup of " + big->label);
  detail::LocalAction bla = detail::local_action(l, big);
  IntMat dz = detail::apply_d(bla, degree, cls);
  if (!(dz == IntMat(dz.rows(), dz.cols())))
    fail(errc::not_a_cocycle, "class fails the cocycle condition over " + big->label);
  if (ms == 0) return {IntMat(r, 0), true};

  std::vector<int> at(size_t(ms) + 1, 0);
  for (int e = 1; e <= ms; ++e) at[size_t(e)] = big->index_of(small->elems[size_t(e)]);
  IntMat rest(r, degree == 1 ? ms : ms * ms);
  if (degree == 1) {
    for (int e = 1; e <= ms; ++e)
      for (int p = 0; p < r; ++p) rest.at(p, e - 1) = cls.at(p, at[size_t(e)] - 1);
  } else {
    for (int e1 = 1; e1 <= ms; ++e1)
      for (int e2 = 1; e2 <= ms; ++e2)
        for (int p = 0; p < r; ++p)
          rest.at(p, (e1 - 1) * ms + (e2 - 1)) =
              cls.at(p, (at[size_t(e1)] - 1) * mb + (at[size_t(e2)] - 1));
  }
  detail::LocalAction sla = detail::local_action(l, small);
  IntMat d = detail::d_matrix(sla, degree - 1);
  bool cob = solve_integer(d, detail::flatten(rest)).has_value();
  return {std::move(rest), cob};
}

inline RestrictionResult restriction(const GLattice& l, const Subgroup& big, const Subgroup& small,
                                     int degree, const IntMat& cls) {
  return restriction(l, std::make_shared<const FinGroup>(big.group()),
                     std::make_shared<const FinGroup>(small.group()), degree, cls);
}

// Subgroup of H^degree(S, L) of classes whose restriction to every cyclic
// subgroup is a coboundary. Checking the maximal cyclic subgroups suffices:
// a coboundary restricts to a coboundary.
inline CohomResult sha(const GLattice& l, const std::shared_ptr<const FinGroup>& s, int degree,
                       CohomOptions opt = {}) {
  if (degree != 1 && degree != 2) fail(errc::bad_params, "Sha is computed for degrees 1 and 2");
  CohomOptions inner = opt;
  inner.generators = true;
  CohomResult h = tate(l, s, degree, inner);
  CohomResult res;
  res.degree = degree;
  res.subgroup = s->label;
  if (h.invariants.torsion.empty()) return res;

  const int r = l.rank();
  const int mb = s->order() - 1;
  const int t = int(h.invariants.torsion.size());
  IntMat z(long(r) * (degree == 1 ? mb : mb * mb), t);
  for (int j = 0; j < t; ++j) {
    IntMat flat = detail::flatten(h.generators[size_t(j)]);
    for (int i = 0; i < z.rows(); ++i) z.at(i, j) = flat.at(i, 0);
  }

  // Admissible coefficient vectors y (classes sum y_i [z_i] dying on C) per
  // maximal cyclic C, intersected over all of them.
  IntMat w = IntMat::identity(t);
  for (const Subgroup& c : maximal_cyclic_subgroups(s)) {
    auto cg = std::make_shared<const FinGroup>(c.group());
    const int mc = cg->order() - 1;
    std::vector<int> at(size_t(mc) + 1, 0);
    for (int e = 1; e <= mc; ++e) at[size_t(e)] = s->index_of(cg->elems[size_t(e)]);
    IntMat rz(long(r) * (degree == 1 ? mc : mc * mc), t);
    for (int j = 0; j < t; ++j) {
      const IntMat& gen = h.generators[size_t(j)];
      if (degree == 1) {
        for (int e = 1; e <= mc; ++e)
          for (int p = 0; p < r; ++p)
            rz.at(long(e - 1) * r + p, j) = gen.at(p, at[size_t(e)] - 1);
      } else {
        for (int e1 = 1; e1 <= mc; ++e1)
          for (int e2 = 1; e2 <= mc; ++e2)
            for (int p = 0; p < r; ++p)
              rz.at((long(e1 - 1) * mc + (e2 - 1)) * r + p, j) =
                  gen.at(p, (at[size_t(e1)] - 1) * mb + (at[size_t(e2)] - 1));
      }
    }
    detail::LocalAction cla = detail::local_action(l, cg);
    IntMat d = detail::d_matrix(cla, degree - 1);
    IntMat k = kernel_basis(IntMat::hstack(rz, -d));
    w = lattice_intersection(w, column_basis(rows_range(k, 0, t)));
  }

  // Sha = W / D Z^t where D = diag of the invariant factors (y is the zero
  // class exactly when d_i | y_i, the generators having exact order d_i).
  IntMat dm(t, t);
  for (int i = 0; i < t; ++i) dm.at(i, i) = h.invariants.torsion[size_t(i)];
  auto coeff = solve_integer(w, dm);
  if (!coeff) fail(errc::hypothesis_failed, "coboundary classes escaped the admissible lattice");
  SmithForm f = smith_normal_form(*coeff, {.want_uinv = opt.generators});
  for (const Int& x : f.d)
    if (x > 1) res.invariants.torsion.push_back(x);
  res.invariants.free_rank = t - f.rank;
  if (opt.generators) {
    for (int i = 0; i < f.rank; ++i) {
      if (f.d[i] <= 1) continue;
      IntMat y = w * f.uinv.cols_range(i, 1);
      IntMat gen(r, degree == 1 ? mb : mb * mb);
      for (int j = 0; j < t; ++j) gen = gen + h.generators[size_t(j)] * y.at(j, 0);
      res.generators.push_back(std::move(gen));
    }
  }
  return res;
}

inline CohomResult sha(const GLattice& l, const Subgroup& s, int degree, CohomOptions opt = {}) {
  return sha(l, std::make_shared<const FinGroup>(s.group()), degree, opt);
}

// H^1(S, L) and H^-1(S, L^vee) are dual finite groups, so their invariant
// factors agree; report both sides rather than asserting.
struct DualityVerdict {
  std::string subgroup;
  AbelianInvariants h1;
  AbelianInvariants hMinus1;
  bool agree = false;
};

inline DualityVerdict h1_h_minus1_duality_check(const GLattice& l,
                                                const std::shared_ptr<const FinGroup>& s,
                                                CohomOptions opt = {}) {
  DualityVerdict v;
  v.subgroup = s->label;
  opt.generators = false;
  v.h1 = tate(l, s, 1, opt).invariants;
  v.hMinus1 = tate(l.dual(), s, -1, opt).invariants;
  v.agree = v.h1 == v.hMinus1;
  return v;
}

inline DualityVerdict h1_h_minus1_duality_check(const GLattice& l, const Subgroup& s,
                                                CohomOptions opt = {}) {
  return h1_h_minus1_duality_check(l, std::make_shared<const FinGroup>(s.group()), opt);
}

// The normalized bar complex itself, for callers that want the boundary
// matrices and index maps (tests, the resolution checks).
struct CochainComplex {
  std::shared_ptr<const FinGroup> group;
  int rank = 0;  // lattice rank r
  int m = 0;     // non-identity element count
  IntMat d0, d1, d2;

  long level(int k) const {
    long v = rank;
    for (int i = 0; i < k; ++i) v *= m;
    return v;
  }
  // coordinate of lattice entry c at the given non-identity element tuple
  int index1(int e, int c) const { return (e - 1) * rank + c; }
  int index2(int e1, int e2, int c) const { return ((e1 - 1) * m + (e2 - 1)) * rank + c; }
  int index3(int e1, int e2, int e3, int c) const {
    return (((e1 - 1) * m + (e2 - 1)) * m + (e3 - 1)) * rank + c;
  }
};

inline CochainComplex build_complex(const GLattice& l, const std::shared_ptr<const FinGroup>& s,
                                    int top = 2, long max_entries = 20'000'000) {
  if (top < 1 || top > 3) fail(errc::bad_params, "complex is built to top degree 1, 2, or 3");
  detail::LocalAction la = detail::local_action(l, s);
  CochainComplex c;
  c.group = s;
  c.rank = l.rank();
  c.m = s->order() - 1;
  for (int k = 0; k < top; ++k)
    if (c.level(k) * c.level(k + 1) > max_entries)
      fail(errc::size_guard, "boundary matrix d^" + std::to_string(k) + " exceeds the size guard");
  c.d0 = detail::d_matrix(la, 0);
  if (top >= 2) c.d1 = detail::d_matrix(la, 1);
  if (top >= 3) c.d2 = detail::d_matrix(la, 2);
  return c;
}

inline CochainComplex build_complex(const GLattice& l, const Subgroup& s, int top = 2,
                                    long max_entries = 20'000'000) {
  return build_complex(l, std::make_shared<const FinGroup>(s.group()), top, max_entries);
}

}  // namespace wlat
