#pragma once

#include <optional>

#include "wlat/fingroup.hpp"
#include "wlat/smith.hpp"

namespace wlat {

// Basis columns inside a denominator-scaled coordinate space on which the
// ambient group acts by signed permutations: true basis = coords / denom.
struct Embedding {
  Int denom;
  IntMat coords;  // ambient degree x rank
};

inline bool same_handle(const GroupHandle& a, const GroupHandle& b) {
  return a.label == b.label && a.degree == b.degree && a.gens == b.gens;
}

// Lattice with a unimodular action of (a subgroup of) an ambient group of
// signed permutations. Immutable; cheap to copy. Action matrices for
// arbitrary elements are derived lazily — from the embedding when there is
// one, otherwise structurally (cosets, duals, sums, tensors, generator
// words) — and memoized per element.
class GLattice {
  struct Impl {
    GroupHandle group;
    std::string name;
    int rank = 0;
    std::optional<Embedding> emb;
    std::vector<IntMat> gen_actions;  // aligned with group.gens

    enum Kind { kTrivial, kEmbedding, kWords, kCoset, kDual, kSum, kTensor, kRestrict } kind =
        kTrivial;
    std::shared_ptr<const Impl> base, base2;
    // kCoset
    std::shared_ptr<const FinGroup> coset_parent;
    std::vector<int> coset_of, reps;
    // kWords: actions aligned with word_group->gens
    std::shared_ptr<const FinGroup> word_group;
    std::vector<IntMat> word_gen_actions;

    mutable std::mutex memo_m;
    mutable std::unordered_map<SignedPerm, IntMat, SignedPermHash> memo;

    IntMat compute(const SignedPerm& w) const {
      switch (kind) {
        case kTrivial:
          if (w.degree() != group.degree) fail(errc::group_mismatch, "degree mismatch");
          return IntMat::identity(rank);
        case kEmbedding: {
          if (w.degree() != emb->coords.rows()) fail(errc::group_mismatch, "degree mismatch");
          auto m = solve_integer(emb->coords, w.matrix() * emb->coords);
          if (!m)
            fail(errc::group_mismatch,
                 "element " + w.str() + " does not stabilize lattice " + name);
          return *m;
        }
        case kWords: {
          int k = word_group->index_of(w);
          if (k < 0)
            fail(errc::group_mismatch, "element " + w.str() + " not in " + word_group->label);
          IntMat m = IntMat::identity(rank);
          for (int gi : word_group->word(k)) m = m * word_gen_actions[gi];
          return m;
        }
        case kCoset: {
          int k = coset_parent->index_of(w);
          if (k < 0)
            fail(errc::group_mismatch, "element " + w.str() + " not in " + coset_parent->label);
          IntMat m(rank, rank);
          for (int j = 0; j < rank; ++j)
            m.at(coset_of[coset_parent->mulIdx(k, reps[j])], j) = 1;
          return m;
        }
        case kDual:
          return inverse_unimodular(act(*base, w)).transpose();
        case kSum:
          return IntMat::block_diag(act(*base, w), act(*base2, w));
        case kTensor:
          return IntMat::kron(act(*base, w), act(*base2, w));
        case kRestrict:
          return act(*base, w);
      }
      fail(errc::unsupported, "unreachable");
    }

    static IntMat act(const Impl& impl, const SignedPerm& w) {
      {
        std::lock_guard<std::mutex> lk(impl.memo_m);
        auto it = impl.memo.find(w);
        if (it != impl.memo.end()) return it->second;
      }
      IntMat m = impl.compute(w);
      std::lock_guard<std::mutex> lk(impl.memo_m);
      return impl.memo.emplace(w, std::move(m)).first->second;
    }
  };

  std::shared_ptr<const Impl> impl_;
  explicit GLattice(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  // Fills gen_actions and checks the group-law and determinant invariants.
  static GLattice finish(std::shared_ptr<Impl> impl) {
    for (const SignedPerm& g : impl->group.gens)
      impl->gen_actions.push_back(Impl::act(*impl, g));
    const auto& gens = impl->group.gens;
    for (size_t i = 0; i < gens.size(); ++i) {
      if (impl->kind == Impl::kEmbedding || impl->kind == Impl::kWords)
        if (!is_unimodular(impl->gen_actions[i]))
          fail(errc::hypothesis_failed, "generator action not unimodular on " + impl->name);
      for (size_t j = 0; j < gens.size(); ++j)
        if (Impl::act(*impl, compose(gens[i], gens[j])) !=
            impl->gen_actions[i] * impl->gen_actions[j])
          fail(errc::hypothesis_failed, "action is not a homomorphism on " + impl->name);
    }
    return GLattice(std::move(impl));
  }

 public:
  GLattice() = default;

  int rank() const { return impl_->rank; }
  const GroupHandle& group() const { return impl_->group; }
  const std::string& name() const { return impl_->name; }
  const std::optional<Embedding>& embedding() const { return impl_->emb; }
  const std::vector<IntMat>& gen_actions() const { return impl_->gen_actions; }
  IntMat action_of(const SignedPerm& w) const {
    if (w.is_identity() && w.degree() == impl_->group.degree) return IntMat::identity(rank());
    return Impl::act(*impl_, w);
  }
  bool same_object(const GLattice& o) const { return impl_ == o.impl_; }

  static GLattice from_embedding(GroupHandle g, std::string name, Embedding e) {
    if (e.coords.rows() != g.degree) fail(errc::bad_params, "embedding rows != ambient degree");
    if (e.denom <= 0) fail(errc::bad_params, "embedding denominator must be positive");
    if (rank_of(e.coords) != e.coords.cols())
      fail(errc::bad_params, "embedding columns are not independent");
    auto impl = std::make_shared<Impl>();
    impl->group = std::move(g);
    impl->name = std::move(name);
    impl->rank = e.coords.cols();
    impl->kind = Impl::kEmbedding;
    impl->emb = std::move(e);
    return finish(std::move(impl));
  }

  // Trivial action of any group on Z^rank.
  static GLattice trivial(GroupHandle g, int rank, std::string name = "") {
    auto impl = std::make_shared<Impl>();
    impl->group = std::move(g);
    impl->name = name.empty() ? "Z^" + std::to_string(rank) : std::move(name);
    impl->rank = rank;
    impl->kind = Impl::kTrivial;
    return finish(std::move(impl));
  }

  // The ambient signed-permutation action itself (identity embedding).
  static GLattice natural(GroupHandle g, std::string name = "") {
    int n = g.degree;
    if (name.empty()) name = "nat(" + g.label + ")";
    return from_embedding(std::move(g), std::move(name),
                          Embedding{1, IntMat::identity(n)});
  }

  // Action given by explicit matrices on the generators of an enumerable
  // group; other elements are resolved through generator words.
  static GLattice from_generator_actions(GroupHandle g, std::string name,
                                         const std::vector<IntMat>& gen_actions, int rank) {
    if (gen_actions.size() != g.gens.size())
      fail(errc::bad_params, "one action matrix per generator required");
    auto impl = std::make_shared<Impl>();
    impl->word_group = g.fingroup();
    impl->group = std::move(g);
    impl->name = std::move(name);
    impl->rank = rank;
    impl->kind = Impl::kWords;
    for (int gi : impl->word_group->gens) {
      const SignedPerm& p = impl->word_group->elems[gi];
      size_t j = 0;
      while (j < impl->group.gens.size() && !(impl->group.gens[j] == p)) ++j;
      if (j == impl->group.gens.size())
        fail(errc::bad_params, "generator alignment failed for " + impl->name);
      if (gen_actions[j].rows() != rank || gen_actions[j].cols() != rank)
        fail(errc::bad_params, "action matrix has wrong shape");
      impl->word_gen_actions.push_back(gen_actions[j]);
    }
    return finish(std::move(impl));
  }

  // Z[g/h] with basis the left cosets of h, ordered by smallest member;
  // the group acts by left translation.
  static GLattice permutation(std::shared_ptr<const FinGroup> g, const Subgroup& h,
                              std::string name = "") {
    if (h.parent.get() != g.get()) fail(errc::group_mismatch, "subgroup of a different group");
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::kCoset;
    impl->coset_parent = g;
    impl->coset_of.assign(g->order(), -1);
    for (int e = 0; e < g->order(); ++e) {
      if (impl->coset_of[e] >= 0) continue;
      int j = int(impl->reps.size());
      impl->reps.push_back(e);
      for (int m : h.members) impl->coset_of[g->mulIdx(e, m)] = j;
    }
    impl->rank = int(impl->reps.size());
    if (impl->rank * h.order() != g->order())
      fail(errc::hypothesis_failed, "cosets do not partition the group");
    impl->group = GroupHandle::from_group(g);
    impl->name = name.empty() ? "Z[" + g->label + "/" + h.describe() + "]" : std::move(name);
    return finish(std::move(impl));
  }

  GLattice dual(std::string name = "") const;
  friend GLattice direct_sum(const GLattice& a, const GLattice& b);
  friend GLattice tensor(const GLattice& a, const GLattice& b);
  friend GLattice restrict_to(const GLattice& l, std::shared_ptr<const FinGroup> s);
};

inline GLattice GLattice::dual(std::string name) const {
  auto impl = std::make_shared<Impl>();
  impl->group = impl_->group;
  impl->name = name.empty() ? "dual(" + impl_->name + ")" : std::move(name);
  impl->rank = impl_->rank;
  if (impl_->emb) {
    // Dual basis inside the same coordinate space: with B = E/d the true
    // basis, the dual basis is B (B^T B)^{-1} = d * E * adj / det where
    // adj = det(E^T E) * (E^T E)^{-1} is integral.
    const IntMat& e = impl_->emb->coords;
    IntMat gram = e.transpose() * e;
    Int c = det(gram);
    auto adj = solve_integer(gram, Int(c) * IntMat::identity(e.cols()));
    if (!adj) fail(errc::hypothesis_failed, "gram adjugate not integral");
    IntMat coords = e * *adj;
    Int g = c * impl_->emb->denom;  // true dual basis = denom * e * adj / c
    Int den = c;
    Int num = impl_->emb->denom;
    // coords/den scaled by num: represent as (num*coords)/den, then reduce.
    coords = coords * num;
    for (int i = 0; i < coords.rows(); ++i)
      for (int j = 0; j < coords.cols(); ++j) g = gcd(g, coords.at(i, j));
    g = gcd(g, den);
    if (g > 1) {
      IntMat red(coords.rows(), coords.cols());
      for (int i = 0; i < coords.rows(); ++i)
        for (int j = 0; j < coords.cols(); ++j)
          mpz_divexact(red.at(i, j).get_mpz_t(), coords.at(i, j).get_mpz_t(), g.get_mpz_t());
      coords = std::move(red);
      den /= g;
    }
    impl->kind = Impl::kEmbedding;
    impl->emb = Embedding{den, std::move(coords)};
  } else {
    impl->kind = Impl::kDual;
    impl->base = impl_;
  }
  return finish(std::move(impl));
}

inline GLattice direct_sum(const GLattice& a, const GLattice& b) {
  if (!same_handle(a.group(), b.group()))
    fail(errc::group_mismatch, "direct sum needs one common group");
  auto impl = std::make_shared<GLattice::Impl>();
  impl->group = a.group();
  impl->name = a.name() + " (+) " + b.name();
  impl->rank = a.rank() + b.rank();
  impl->kind = GLattice::Impl::kSum;
  impl->base = a.impl_;
  impl->base2 = b.impl_;
  return GLattice::finish(std::move(impl));
}

inline GLattice tensor(const GLattice& a, const GLattice& b) {
  if (!same_handle(a.group(), b.group()))
    fail(errc::group_mismatch, "tensor product needs one common group");
  auto impl = std::make_shared<GLattice::Impl>();
  impl->group = a.group();
  impl->name = a.name() + " (x) " + b.name();
  impl->rank = a.rank() * b.rank();
  impl->kind = GLattice::Impl::kTensor;
  impl->base = a.impl_;
  impl->base2 = b.impl_;
  return GLattice::finish(std::move(impl));
}

// The same module considered over a subgroup (same degree, same matrices).
inline GLattice restrict_to(const GLattice& l, std::shared_ptr<const FinGroup> s) {
  if (s->degree != l.group().degree) fail(errc::group_mismatch, "restriction degree mismatch");
  auto impl = std::make_shared<GLattice::Impl>();
  impl->group = GroupHandle::from_group(s);
  impl->name = l.name() + "|" + s->label;
  impl->rank = l.rank();
  impl->emb = l.embedding();
  impl->kind = GLattice::Impl::kRestrict;
  impl->base = l.impl_;
  return GLattice::finish(std::move(impl));
}

inline GLattice restrict_to(const GLattice& l, const Subgroup& s) {
  return restrict_to(l, std::make_shared<const FinGroup>(s.group()));
}

// Equivariant map of lattices over one group; matrix columns are images of
// the source basis in the target basis.
struct LatticeHom {
  GLattice source, target;
  IntMat matrix;  // target.rank x source.rank
};

inline LatticeHom make_hom(GLattice source, GLattice target, IntMat matrix) {
  if (!same_handle(source.group(), target.group()))
    fail(errc::group_mismatch, "hom between lattices over different groups");
  if (matrix.rows() != target.rank() || matrix.cols() != source.rank())
    fail(errc::bad_params, "hom matrix shape mismatch");
  for (size_t i = 0; i < source.group().gens.size(); ++i)
    if (target.gen_actions()[i] * matrix != matrix * source.gen_actions()[i])
      fail(errc::hypothesis_failed, "map is not equivariant");
  return LatticeHom{std::move(source), std::move(target), std::move(matrix)};
}

// Saturated basis of the fixed sublattice L^S, packaged as an equivariant
// embedding of a trivial lattice into L|_S.
inline LatticeHom fixed_sublattice(const GLattice& l, std::shared_ptr<const FinGroup> s) {
  std::vector<IntMat> blocks;
  for (int gi : s->gens)
    blocks.push_back(l.action_of(s->elems[gi]) - IntMat::identity(l.rank()));
  IntMat stack(0, l.rank());
  for (const IntMat& b : blocks) stack = IntMat::vstack(stack, b);
  IntMat basis = kernel_basis(stack);
  GLattice target = restrict_to(l, s);
  GLattice source = GLattice::trivial(target.group(), basis.cols(),
                                      "(" + l.name() + ")^" + s->label);
  return make_hom(std::move(source), std::move(target), std::move(basis));
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

namespace cat {

// alpha_i = e_i - e_{i+1} as columns, i = 1..count, inside Z^n.
inline IntMat alpha_cols(int n, int count, const Int& scale = 1) {
  IntMat m(n, count);
  for (int i = 0; i < count; ++i) {
    m.at(i, i) = scale;
    m.at(i + 1, i) = -scale;
  }
  return m;
}

// n * varpi_i for the A-series: n-i on the first i rows, -i below.
inline IntMat a_weight_col(int n, int i) {
  IntMat c(n, 1);
  for (int r = 0; r < n; ++r) c.at(r, 0) = r < i ? n - i : -i;
  return c;
}

}  // namespace cat

// Root lattice of the A-series: alpha_i = e_i - e_{i+1} under Sym(n).
inline GLattice za(int n) {
  if (n < 2) fail(errc::bad_params, "ZA needs n >= 2");
  return GLattice::from_embedding(GroupHandle::symmetric(n), "ZA(" + std::to_string(n) + ")",
                                  Embedding{1, cat::alpha_cols(n, n - 1)});
}

// Weight lattice of the A-series, basis varpi_1..varpi_{n-1}.
inline GLattice lambda(int n) {
  if (n < 2) fail(errc::bad_params, "Lambda needs n >= 2");
  IntMat coords(n, n - 1);
  for (int i = 1; i < n; ++i) {
    IntMat c = cat::a_weight_col(n, i);
    for (int r = 0; r < n; ++r) coords.at(r, i - 1) = c.at(r, 0);
  }
  return GLattice::from_embedding(GroupHandle::symmetric(n), "Lambda(" + std::to_string(n) + ")",
                                  Embedding{n, std::move(coords)});
}

// Intermediate lattice Q(n,d) = ZA(n) + Z.d*varpi_1 for d | n, with basis
// {d varpi_1, alpha_1..alpha_{n-2}}. Q(n,n) normalizes to ZA(n) and Q(n,1)
// to Lambda(n).
inline GLattice q_lattice(int n, int d) {
  if (n < 2 || d < 1 || d > n || n % d != 0)
    fail(errc::bad_params, "Q(n,d) needs d | n, 1 <= d <= n");
  if (d == n) return za(n);
  if (d == 1) return lambda(n);
  IntMat coords(n, n - 1);
  IntMat w1 = cat::a_weight_col(n, 1);
  for (int r = 0; r < n; ++r) coords.at(r, 0) = Int(d) * w1.at(r, 0);
  IntMat al = cat::alpha_cols(n, n - 2, n);
  for (int i = 0; i < n - 2; ++i)
    for (int r = 0; r < n; ++r) coords.at(r, i + 1) = al.at(r, i);
  return GLattice::from_embedding(
      GroupHandle::symmetric(n),
      "Q(" + std::to_string(n) + "," + std::to_string(d) + ")", Embedding{n, std::move(coords)});
}

// Root lattice of the D-series: alpha_1..alpha_{n-1} as in the A-series plus
// alpha_n = e_{n-1} + e_n, under W(D_n).
inline GLattice zd(int n) {
  if (n < 2) fail(errc::bad_params, "ZD needs n >= 2");
  IntMat coords(n, n);
  IntMat al = cat::alpha_cols(n, n - 1);
  for (int i = 0; i < n - 1; ++i)
    for (int r = 0; r < n; ++r) coords.at(r, i) = al.at(r, i);
  coords.at(n - 2, n - 1) = 1;
  coords.at(n - 1, n - 1) = 1;
  return GLattice::from_embedding(GroupHandle::weylD(n), "ZD(" + std::to_string(n) + ")",
                                  Embedding{1, std::move(coords)});
}

// Weight lattice of the D-series: varpi_i = e_1+..+e_i for i <= n-2 and the
// two half-weight spin columns.
inline GLattice lambdad(int n) {
  if (n < 3) fail(errc::bad_params, "LambdaD needs n >= 3");
  IntMat coords(n, n);
  for (int i = 0; i < n - 2; ++i)
    for (int r = 0; r <= i; ++r) coords.at(r, i) = 2;
  for (int r = 0; r < n; ++r) {
    coords.at(r, n - 2) = r < n - 1 ? 1 : -1;
    coords.at(r, n - 1) = 1;
  }
  return GLattice::from_embedding(GroupHandle::weylD(n), "LambdaD(" + std::to_string(n) + ")",
                                  Embedding{2, std::move(coords)});
}

// X_{2m} = ZD + Z.varpi_1: the full sign-permutation lattice e_1..e_{2m}.
inline GLattice x2m(int m) {
  if (m < 2) fail(errc::bad_params, "X2m needs m >= 2");
  return GLattice::natural(GroupHandle::weylD(2 * m), "X" + std::to_string(2 * m));
}

namespace cat {

// Shared basis {alpha_1..alpha_{2m-2}, gamma, e_{2m-2}+e_{2m-1}} of
// Y_{2m} (m odd) / Z_{2m} (m even), coordinates scaled by 2. The
// opposite-parity twin applies the outer sign flip e_{2m} -> -e_{2m}.
inline IntMat yz_coords(int m, bool flip) {
  const int n = 2 * m;
  IntMat coords(n, n);
  IntMat al = alpha_cols(n, n - 2, 2);
  for (int i = 0; i < n - 2; ++i)
    for (int r = 0; r < n; ++r) coords.at(r, i) = al.at(r, i);
  for (int r = 0; r < n; ++r) coords.at(r, n - 2) = r < m ? 1 : -1;  // gamma
  coords.at(n - 3, n - 1) = 2;
  coords.at(n - 2, n - 1) = 2;
  if (flip)
    for (int j = 0; j < n; ++j) coords.at(n - 1, j) = -coords.at(n - 1, j);
  return coords;
}

}  // namespace cat

inline GLattice y2m(int m) {
  if (m < 2) fail(errc::bad_params, "Y2m needs m >= 2");
  return GLattice::from_embedding(GroupHandle::weylD(2 * m), "Y" + std::to_string(2 * m),
                                  Embedding{2, cat::yz_coords(m, m % 2 == 0)});
}

inline GLattice z2m(int m) {
  if (m < 2) fail(errc::bad_params, "Z2m needs m >= 2");
  return GLattice::from_embedding(GroupHandle::weylD(2 * m), "Z" + std::to_string(2 * m),
                                  Embedding{2, cat::yz_coords(m, m % 2 == 1)});
}

// Character lattice of the exceptional rank-2 group: Sym(3) acts as on
// ZA(3), the order-2 factor as -identity.
inline GLattice g2() {
  std::vector<SignedPerm> gens{parse_cycles(3, "(1 2)"), parse_cycles(3, "(1 2 3)")};
  SignedPerm minus = SignedPerm::identity(3);
  minus.sgn = {-1, -1, -1};
  gens.push_back(minus);
  GroupHandle h = GroupHandle::from_generators("Sym(3) x Sym(2)", 3, std::move(gens));
  return GLattice::from_embedding(std::move(h), "G2", Embedding{1, cat::alpha_cols(3, 2)});
}

}  // namespace wlat
