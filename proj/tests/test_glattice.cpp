#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "wlat/glattice.hpp"
#include "wlat/subgroups.hpp"

using namespace wlat;

namespace {

// Order of the quotient big/sub, clearing the two embeddings to a common
// denominator first.
AbelianInvariants quot(const GLattice& big, const GLattice& sub) {
  const Embedding& b = *big.embedding();
  const Embedding& s = *sub.embedding();
  Int l = lcm(b.denom, s.denom);
  return quotient_invariants(b.coords * (l / b.denom), s.coords * (l / s.denom));
}

Int torsion_order(const AbelianInvariants& inv) {
  Int o = 1;
  for (const Int& t : inv.torsion) o *= t;
  return o;
}

SignedPerm rand_word(std::mt19937_64& rng, const GroupHandle& g, int len) {
  SignedPerm w = SignedPerm::identity(g.degree);
  for (int i = 0; i < len; ++i) w = compose(w, g.gens[rng() % g.gens.size()]);
  return w;
}

}  // namespace

TEST_CASE("catalog ranks, groups, embeddings") {
  REQUIRE(za(6).rank() == 5);
  REQUIRE(lambda(6).rank() == 5);
  REQUIRE(q_lattice(8, 4).rank() == 7);
  REQUIRE(zd(6).rank() == 6);
  REQUIRE(lambdad(6).rank() == 6);
  REQUIRE(x2m(3).rank() == 6);
  REQUIRE(y2m(3).rank() == 6);
  REQUIRE(z2m(2).rank() == 4);
  REQUIRE(g2().rank() == 2);
  REQUIRE(g2().group().order == 12);
  REQUIRE(za(8).group().label == "Sym(8)");
  REQUIRE(y2m(4).group().label == "W(D8)");
  // big ambients stay unenumerated
  REQUIRE_FALSE(za(8).group().enumerated());
  REQUIRE_FALSE(y2m(3).group().enumerated());

  SECTION("degenerate Q parameters normalize to catalog twins") {
    REQUIRE(q_lattice(4, 4).name() == "ZA(4)");
    REQUIRE(q_lattice(4, 1).name() == "Lambda(4)");
    REQUIRE_THROWS_AS(q_lattice(8, 3), Error);
  }
}

TEST_CASE("catalog inclusions carry the right indices") {
  SECTION("A-series: ZA ⊆ Q(n,d) ⊆ Lambda with indices n/d and d") {
    for (auto [n, d] : {std::pair{4, 2}, {6, 2}, {6, 3}, {8, 2}, {8, 4}}) {
      GLattice q = q_lattice(n, d);
      REQUIRE(torsion_order(quot(q, za(n))) == n / d);
      REQUIRE(torsion_order(quot(lambda(n), q)) == d);
      REQUIRE(quot(lambda(n), za(n)) == AbelianInvariants{{n}, 0});
    }
  }
  SECTION("D-series: ZD ⊆ X,Y,Z ⊆ LambdaD, index 2 on both sides") {
    for (int m : {2, 3}) {
      GLattice bottom = zd(2 * m), top = lambdad(2 * m);
      for (const GLattice& mid : {x2m(m), y2m(m), z2m(m)}) {
        REQUIRE(torsion_order(quot(mid, bottom)) == 2);
        REQUIRE(torsion_order(quot(top, mid)) == 2);
      }
      REQUIRE(torsion_order(quot(top, bottom)) == 4);
    }
  }
}

TEST_CASE("Y4/Z4 match their published sign-permutation bases") {
  // rows e_1..e_4, columns the four half-sum vectors
  IntMat ybasis{{1, 1, 1, -1}, {1, 1, -1, 1}, {1, -1, 1, 1}, {-1, 1, 1, 1}};
  IntMat zbasis{{1, 1, 1, -1}, {1, 1, -1, 1}, {1, -1, 1, 1}, {1, -1, -1, -1}};
  // same span: mutual integer solvability at the common denominator 2
  GLattice y = y2m(2), z = z2m(2);
  REQUIRE(solve_integer(y.embedding()->coords, ybasis).has_value());
  REQUIRE(solve_integer(ybasis, y.embedding()->coords).has_value());
  REQUIRE(solve_integer(z.embedding()->coords, zbasis).has_value());
  REQUIRE(solve_integer(zbasis, z.embedding()->coords).has_value());
}

TEST_CASE("Q(2m,m) basis agrees with its generator description") {
  for (int m : {2, 3}) {
    const int n = 2 * m;
    GLattice q = q_lattice(n, m);
    // generators alpha_1..alpha_{n-1}, beta = m e_1 - (1/2) sum e_i,
    // scaled to the catalog denominator n.
    IntMat gens(n, n);
    IntMat al = cat::alpha_cols(n, n - 1, n);
    for (int i = 0; i < n - 1; ++i)
      for (int r = 0; r < n; ++r) gens.at(r, i) = al.at(r, i);
    for (int r = 0; r < n; ++r) gens.at(r, n - 1) = r == 0 ? Int(m * n - m) : Int(-m);
    REQUIRE(solve_integer(q.embedding()->coords, gens).has_value());
    for (int j = 0; j < q.rank(); ++j)
      REQUIRE(solve_integer(gens, q.embedding()->coords.cols_range(j, 1)).has_value());
  }
}

TEST_CASE("actions are homomorphisms on random words") {
  std::mt19937_64 rng(411);
  for (const GLattice& l : {za(5), lambda(6), q_lattice(8, 2), y2m(3), g2()}) {
    for (int t = 0; t < 20; ++t) {
      SignedPerm a = rand_word(rng, l.group(), 1 + int(rng() % 6));
      SignedPerm b = rand_word(rng, l.group(), 1 + int(rng() % 6));
      REQUIRE(l.action_of(compose(a, b)) == l.action_of(a) * l.action_of(b));
      REQUIRE(is_unimodular(l.action_of(a)));
    }
  }
}

TEST_CASE("actions reject elements outside the stabilizer") {
  SignedPerm flip = SignedPerm::identity(4);
  flip.sgn[0] = -1;
  REQUIRE_THROWS_AS(za(4).action_of(flip), Error);  // a sign flip moves the hyperplane
  // A single flip swaps the Y and Z half-integer classes, so neither twin
  // admits it; the even-sum lattice ZD is stable under all sign changes.
  REQUIRE_THROWS_AS(y2m(2).action_of(flip), Error);
  REQUIRE_THROWS_AS(z2m(2).action_of(flip), Error);
  REQUIRE(is_unimodular(zd(4).action_of(flip)));
  REQUIRE_THROWS_AS(za(4).action_of(parse_cycles(5, "(1 2)")), Error);
  SignedPerm dblflip = SignedPerm::identity(4);
  dblflip.sgn[0] = dblflip.sgn[1] = -1;
  REQUIRE(is_unimodular(zd(4).action_of(dblflip)));  // even flips are fine
}

TEST_CASE("permutation lattices") {
  auto s3 = GroupHandle::symmetric(3).fingroup();
  SECTION("whole group gives the rank-1 trivial lattice") {
    GLattice l = GLattice::permutation(s3, whole_subgroup(s3));
    REQUIRE(l.rank() == 1);
    for (const SignedPerm& g : l.group().gens) REQUIRE(l.action_of(g) == IntMat::identity(1));
  }
  SECTION("point stabilizer gives the natural rank-n lattice") {
    Subgroup s2 = subgroup_of(s3, {parse_cycles(3, "(1 2)")});
    GLattice l = GLattice::permutation(s3, s2);
    REQUIRE(l.rank() == 3);
    for (const SignedPerm& g : l.group().gens) {
      REQUIRE(is_unimodular(l.action_of(g)));
      // permutation matrix: one 1 per column
      for (int j = 0; j < 3; ++j) {
        Int colsum = 0;
        for (int i = 0; i < 3; ++i) colsum += l.action_of(g).at(i, j);
        REQUIRE(colsum == 1);
      }
    }
  }
  SECTION("coset lattice over the order-9 group") {
    auto g9 = std::make_shared<const FinGroup>(group_from_generators(
        "Gamma9", 6, {parse_cycles(6, "(1 2 3)"), parse_cycles(6, "(4 5 6)")}));
    Subgroup c = subgroup_of(g9, {parse_cycles(6, "(4 5 6)")});
    GLattice p1 = GLattice::permutation(g9, c);
    REQUIRE(p1.rank() == 3);
    // (1 2 3) permutes the three cosets cyclically; (4 5 6) fixes them
    REQUIRE(p1.action_of(parse_cycles(6, "(4 5 6)")) == IntMat::identity(3));
    IntMat a = p1.action_of(parse_cycles(6, "(1 2 3)"));
    REQUIRE(a != IntMat::identity(3));
    REQUIRE(a * a * a == IntMat::identity(3));
  }
}

TEST_CASE("duals") {
  SECTION("dual of a permutation lattice has the same matrices") {
    auto s3 = GroupHandle::symmetric(3).fingroup();
    GLattice p = GLattice::permutation(s3, subgroup_of(s3, {parse_cycles(3, "(1 2)")}));
    GLattice pd = p.dual();
    for (const SignedPerm& g : p.group().gens) REQUIRE(pd.action_of(g) == p.action_of(g));
  }
  SECTION("double dual restores the action") {
    for (const GLattice& l : {za(4), q_lattice(6, 2), y2m(2)}) {
      GLattice dd = l.dual().dual();
      for (const SignedPerm& g : l.group().gens) REQUIRE(dd.action_of(g) == l.action_of(g));
    }
  }
  SECTION("dual action is the inverse transpose") {
    GLattice l = q_lattice(8, 2);  // Sym(8): embedding path, no enumeration
    GLattice d = l.dual();
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
      SignedPerm w = rand_word(rng, l.group(), 1 + int(rng() % 8));
      REQUIRE(d.action_of(w) == inverse_unimodular(l.action_of(w)).transpose());
    }
  }
  SECTION("dual of the root lattice is the weight lattice") {
    GLattice d = za(5).dual();
    GLattice lam = lambda(5);
    REQUIRE(d.embedding().has_value());
    // same span inside Q^5 after clearing to a common denominator
    IntMat a = d.embedding()->coords * lam.embedding()->denom;
    IntMat b = lam.embedding()->coords * d.embedding()->denom;
    REQUIRE(solve_integer(a, b).has_value());
    REQUIRE(solve_integer(b, a).has_value());
  }
}

TEST_CASE("sums, tensors, restriction") {
  SECTION("directSum of trivials") {
    GLattice t = direct_sum(GLattice::trivial(GroupHandle::symmetric(3), 1),
                            GLattice::trivial(GroupHandle::symmetric(3), 1));
    REQUIRE(t.rank() == 2);
    REQUIRE(t.action_of(parse_cycles(3, "(1 2)")) == IntMat::identity(2));
  }
  SECTION("tensor with the natural permutation lattice has regular rank") {
    auto s3 = GroupHandle::symmetric(3).fingroup();
    GLattice p = GLattice::permutation(s3, subgroup_of(s3, {parse_cycles(3, "(1 2)")}));
    GLattice t = tensor(restrict_to(za(3), s3), p);
    REQUIRE(t.rank() == 6);
    SignedPerm g = parse_cycles(3, "(1 2 3)");
    REQUIRE(t.action_of(g) == IntMat::kron(za(3).action_of(g), p.action_of(g)));
  }
  SECTION("mismatched groups are refused") {
    REQUIRE_THROWS_AS(direct_sum(za(3), za(4)), Error);
    REQUIRE_THROWS_AS(tensor(za(3), lambda(4)), Error);
  }
  SECTION("restriction keeps matrices and embedding") {
    auto x3 = diag_x_group(6, 3);
    GLattice r = restrict_to(za(6), x3);
    REQUIRE(r.rank() == 5);
    REQUIRE(r.embedding().has_value());
    for (const SignedPerm& g : r.group().gens)
      REQUIRE(r.action_of(g) == za(6).action_of(g));
  }
}

TEST_CASE("diagonal restriction splits in the block basis") {
  // ZA(5) restricted to the diagonal Sym(3) inside Sym(6): in the basis
  // {e1-e2, e2-e3} ∪ {e_i - e_{3+i}}, the action is ZA(3) plus a permuted
  // block of coset type.
  const int n = 6, d = 3;
  GLattice l = za(n);
  IntMat b1(n, n - 1);
  for (int i = 0; i < d - 1; ++i) {
    b1.at(i, i) = 1;
    b1.at(i + 1, i) = -1;
  }
  for (int i = 0; i < (n / d - 1) * d; ++i) {
    b1.at(i, d - 1 + i) = 1;
    b1.at(d + i, d - 1 + i) = -1;
  }
  // change of basis from the alpha basis is unimodular
  auto chg = solve_integer(l.embedding()->coords, b1);
  REQUIRE(chg.has_value());
  REQUIRE(is_unimodular(*chg));

  for (const SignedPerm& g : diag_x_gens(n, d)) {
    IntMat act = *solve_integer(b1, g.matrix() * b1);
    // block diagonal: ZA(d) block then one d x d permutation block
    for (int i = 0; i < n - 1; ++i)
      for (int j = 0; j < n - 1; ++j)
        if ((i < d - 1) != (j < d - 1)) REQUIRE(act.at(i, j) == 0);
    for (int j = d - 1; j < n - 1; ++j) {
      Int colsum = 0;
      for (int i = d - 1; i < n - 1; ++i) {
        colsum += act.at(i, j);
        REQUIRE((act.at(i, j) == 0 || act.at(i, j) == 1));
      }
      REQUIRE(colsum == 1);
    }
  }

  // Y_d variant: basis {e1-e2..e_{2d-1}-e_{2d}} ∪ {e_i-e_{d+i}, i=d+1..(t-1)d}
  IntMat b2(n, n - 1);
  for (int i = 0; i < 2 * d - 1; ++i) {
    b2.at(i, i) = 1;
    b2.at(i + 1, i) = -1;
  }
  // for n = 6, t = 2: the second family is empty
  auto chg2 = solve_integer(l.embedding()->coords, b2);
  REQUIRE(chg2.has_value());
  REQUIRE(is_unimodular(*chg2));
}

TEST_CASE("fixed sublattices") {
  SECTION("trivial subgroup fixes everything") {
    auto triv = std::make_shared<const FinGroup>(group_from_generators("1", 6, {}));
    LatticeHom h = fixed_sublattice(za(6), triv);
    REQUIRE(h.matrix == IntMat::identity(5));
  }
  SECTION("weight lattice fixed under a 3-cycle is a free module") {
    auto c3 = std::make_shared<const FinGroup>(
        group_from_generators("C3", 6, {parse_cycles(6, "(1 2 3)")}));
    GLattice lam = lambda(6);
    LatticeHom h = fixed_sublattice(lam, c3);
    REQUIRE(h.matrix.cols() == 3);
    // the complementary 3-cycle acts on the fixed lattice with a cyclic basis
    IntMat k = h.matrix;
    auto a = solve_integer(k, lam.action_of(parse_cycles(6, "(4 5 6)")) * k);
    REQUIRE(a.has_value());
    bool found = false;
    for (int mask = 0; mask < 27 && !found; ++mask) {
      IntMat v(3, 1);
      for (int i = 0; i < 3; ++i) v.at(i, 0) = mask / (i == 0 ? 1 : i == 1 ? 3 : 9) % 3 - 1;
      IntMat m = IntMat::hstack(IntMat::hstack(v, *a * v), *a * *a * v);
      Int dt = det(m);
      found = dt == 1 || dt == -1;
    }
    REQUIRE(found);
  }
  SECTION("whole Sym(n) fixes nothing in the root lattice") {
    auto s4 = GroupHandle::symmetric(4).fingroup();
    REQUIRE(fixed_sublattice(za(4), s4).matrix.cols() == 0);
  }
}

TEST_CASE("Y6 modulo Q6(3) is the trivial lattice Z") {
  GLattice y = y2m(3), q = q_lattice(6, 3);
  // Q sits inside Y|Sym(6): compare at the common denominator 6
  IntMat ycoords = y.embedding()->coords * 3;  // denом 2 -> 6
  const IntMat& qcoords = q.embedding()->coords;
  REQUIRE(solve_integer(ycoords, qcoords).has_value());
  REQUIRE(quotient_invariants(ycoords, qcoords) == AbelianInvariants{{}, 1});

  // the class of e4 + e5 generates, and every Sym(6) generator fixes it mod Q
  IntMat v(6, 1);
  v.at(3, 0) = 1;
  v.at(4, 0) = 1;
  std::vector<SignedPerm> checks{parse_cycles(6, "(1 2)"), parse_cycles(6, "(1 2 3)")};
  for (const SignedPerm& g : GroupHandle::symmetric(6).gens) checks.push_back(g);
  for (const SignedPerm& g : checks)
    REQUIRE(solve_integer(qcoords, (g.matrix() * v - v) * 6).has_value());
  // and e4+e5 itself is not in Q (it really generates the quotient)
  REQUIRE_FALSE(solve_integer(qcoords, v * 6).has_value());
}

TEST_CASE("G2 lattice") {
  GLattice l = g2();
  SignedPerm minus = SignedPerm::identity(3);
  minus.sgn = {-1, -1, -1};
  REQUIRE(l.action_of(minus) == IntMat::identity(2) * Int(-1));
  REQUIRE(l.action_of(parse_cycles(3, "(1 2 3)")) == za(3).action_of(parse_cycles(3, "(1 2 3)")));
  REQUIRE(l.group().fingroup()->order() == 12);
}
