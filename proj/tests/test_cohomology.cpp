#include <catch2/catch_amalgamated.hpp>
#include <numeric>
#include <random>

#include "wlat/cohomology.hpp"
#include "wlat/subgroups.hpp"

using namespace wlat;

namespace {

std::shared_ptr<const FinGroup> make_group(const std::string& label, int degree,
                                           const std::vector<std::string>& cycles) {
  std::vector<SignedPerm> gens;
  for (const std::string& c : cycles) gens.push_back(parse_cycles(degree, c));
  return std::make_shared<const FinGroup>(group_from_generators(label, degree, gens));
}

AbelianInvariants inv(std::vector<long> torsion, int free_rank = 0) {
  AbelianInvariants a;
  for (long t : torsion) a.torsion.push_back(t);
  a.free_rank = free_rank;
  return a;
}

// order-4 group of double transpositions inside Sym(8): both generators fix
// blocks {12}{34}{56}{78} setwise and every cyclic subgroup has fixed letters
std::shared_ptr<const FinGroup> block_group_8_2() {
  return make_group("T(8,2)", 8, {"(1 2)(3 4)(5 6)", "(1 2)(5 6)(7 8)"});
}

}  // namespace

TEST_CASE("hand-pinned tiny groups x tiny lattices") {
  // C2 acting by the sign on ZA(2) = Z^- : the four Tate groups in order
  // -1, 0, 1, 2 are Z/2, 0, Z/2, 0.
  auto c2 = make_group("C2", 2, {"(1 2)"});
  REQUIRE(tate(za(2), c2, -1).invariants == inv({2}));
  REQUIRE(tate(za(2), c2, 0).invariants == inv({}));
  REQUIRE(tate(za(2), c2, 1).invariants == inv({2}));
  REQUIRE(tate(za(2), c2, 2).invariants == inv({}));

  // trivial action of C2 on Z: 0, Z/2, 0, Z/2
  GLattice triv2 = GLattice::trivial(GroupHandle::symmetric(2), 1);
  REQUIRE(tate(triv2, c2, -1).invariants == inv({}));
  REQUIRE(tate(triv2, c2, 0).invariants == inv({2}));
  REQUIRE(tate(triv2, c2, 1).invariants == inv({}));
  REQUIRE(tate(triv2, c2, 2).invariants == inv({2}));

  // trivial action of C4 on Z: 0, Z/4, 0, Z/4
  auto c4 = make_group("C4", 4, {"(1 2 3 4)"});
  GLattice triv4 = GLattice::trivial(GroupHandle::symmetric(4), 1);
  REQUIRE(tate(triv4, c4, -1).invariants == inv({}));
  REQUIRE(tate(triv4, c4, 0).invariants == inv({4}));
  REQUIRE(tate(triv4, c4, 1).invariants == inv({}));
  REQUIRE(tate(triv4, c4, 2).invariants == inv({4}));

  // regular representation Z[C4]: cohomologically trivial in all degrees
  Subgroup triv_sub = subgroup_of(c4, {});
  GLattice reg = GLattice::permutation(c4, triv_sub);
  for (int d = -1; d <= 2; ++d) REQUIRE(tate(reg, c4, d).invariants == inv({}));
}

TEST_CASE("trivial subgroup kills every degree") {
  auto e = make_group("1", 6, {});
  for (int d = -1; d <= 2; ++d) {
    CohomResult r = tate(lambda(6), e, d);
    REQUIRE(r.invariants == inv({}));
    REQUIRE(r.degree == d);
  }
}

TEST_CASE("weight lattice of A5 over the order-9 group") {
  auto g9 = make_group("Gamma9", 6, {"(1 2 3)", "(4 5 6)"});
  REQUIRE(g9->order() == 9);
  REQUIRE(tate(lambda(6), g9, 1).invariants == inv({}));
  REQUIRE(tate(lambda(6), g9, 2).invariants == inv({3}));
}

TEST_CASE("H^1 of the root lattice is the gcd of the orbit sizes") {
  // oracle: 0 -> ZA -> Z^n -> Z -> 0 with H^1(S, Z^n) = 0 identifies
  // H^1(S, ZA(n)) with Z / gcd of the orbit sizes of S on the letters
  auto check = [](const GLattice& l, const Subgroup& s) {
    long g = 0;
    for (const auto& o : orbits(s)) g = std::gcd(g, long(o.size()));
    AbelianInvariants expect = g > 1 ? inv({g}) : inv({});
    REQUIRE(tate(l, s, 1).invariants == expect);
  };

  SECTION("pinned: full symmetric groups give Z/n") {
    for (int n = 3; n <= 6; ++n) {
      auto sn = GroupHandle::symmetric(n).fingroup();
      REQUIRE(tate(za(n), whole_subgroup(sn), 1).invariants == inv({n}));
    }
  }
  SECTION("pinned: a fixed letter forces triviality") {
    auto s5 = GroupHandle::symmetric(5).fingroup();
    Subgroup s = subgroup_of(s5, {parse_cycles(5, "(1 2)"), parse_cycles(5, "(3 4)")});
    REQUIRE(tate(za(5), s, 1).invariants == inv({}));
  }
  SECTION("20 random subgroups of Sym(3..6)") {
    std::mt19937_64 rng(20260816);
    for (int trial = 0; trial < 20; ++trial) {
      int n = 3 + int(rng() % 4);
      auto sn = GroupHandle::symmetric(n).fingroup();
      std::vector<SignedPerm> seed;
      for (int k = 0; k < 1 + int(rng() % 2); ++k)
        seed.push_back(sn->elems[rng() % sn->elems.size()]);
      check(za(n), subgroup_of(sn, seed));
    }
  }
}

TEST_CASE("permutation lattices are flasque and coflasque") {
  auto s4 = GroupHandle::symmetric(4).fingroup();
  std::vector<GLattice> perms;
  perms.push_back(GLattice::permutation(s4, subgroup_of(s4, {parse_cycles(4, "(1 2)")})));
  perms.push_back(
      GLattice::permutation(s4, subgroup_of(s4, {parse_cycles(4, "(1 2)"), parse_cycles(4, "(1 2 3)")})));
  perms.push_back(GLattice::permutation(s4, subgroup_of(s4, {})));
  for (const GLattice& l : perms)
    for (const Subgroup& s : all_subgroups(s4)) {
      REQUIRE(tate(l, s, -1).invariants == inv({}));
      REQUIRE(tate(l, s, 1).invariants == inv({}));
    }
}

TEST_CASE("degree-1 bar computation matches H^-1 of the dual") {
  auto s4 = GroupHandle::symmetric(4).fingroup();
  for (const GLattice& l : {za(4), lambda(4), q_lattice(4, 2)}) {
    GLattice d = l.dual();
    for (const Subgroup& s : all_subgroups(s4))
      REQUIRE(tate(l, s, 1).invariants == tate(d, s, -1).invariants);
  }
  // and on the D-side over a handful of cyclic subgroups of W(D4)
  auto w4 = GroupHandle::weylD(4).fingroup();
  std::vector<Subgroup> cyc = cyclic_subgroups(w4);
  for (size_t i = 0; i < cyc.size(); i += 7) {
    for (const GLattice& l : {zd(4), y2m(2), lambdad(4)})
      REQUIRE(tate(l, cyc[i], 1).invariants == tate(l.dual(), cyc[i], -1).invariants);
  }
}

TEST_CASE("duality verdicts") {
  auto s3 = GroupHandle::symmetric(3).fingroup();
  SECTION("permutation lattice: both sides trivial") {
    GLattice p = GLattice::permutation(s3, subgroup_of(s3, {parse_cycles(3, "(1 2)")}));
    DualityVerdict v = h1_h_minus1_duality_check(p, s3);
    REQUIRE(v.agree);
    REQUIRE(v.h1 == inv({}));
  }
  SECTION("weight lattice over the order-9 group: both trivial") {
    auto g9 = make_group("Gamma9", 6, {"(1 2 3)", "(4 5 6)"});
    DualityVerdict v = h1_h_minus1_duality_check(lambda(6), g9);
    REQUIRE(v.agree);
    REQUIRE(v.h1 == inv({}));
  }
  SECTION("root lattice of A2 over Sym(3): both Z/3") {
    DualityVerdict v = h1_h_minus1_duality_check(za(3), s3);
    REQUIRE(v.agree);
    REQUIRE(v.h1 == inv({3}));
    REQUIRE(v.hMinus1 == inv({3}));
  }
}

TEST_CASE("tensor with a transitive permutation lattice can be free") {
  // ZA(2) restricted to a point stabilizer of Sym(3) is the regular C2
  // lattice, so ZA(2) (x) Z[Sym(3)/Sym(2)] is the regular Sym(3) lattice:
  // every Tate group vanishes.
  auto s3 = GroupHandle::symmetric(3).fingroup();
  GLattice p = GLattice::permutation(s3, subgroup_of(s3, {parse_cycles(3, "(1 2)")}));
  GLattice t = tensor(za(3), p);
  REQUIRE(t.rank() == 6);
  auto c3 = make_group("C3", 3, {"(1 2 3)"});
  auto c2 = make_group("C2s3", 3, {"(1 2)"});
  for (int d = -1; d <= 2; ++d) {
    REQUIRE(tate(t, s3, d).invariants == inv({}));
    REQUIRE(tate(t, c3, d).invariants == inv({}));
    REQUIRE(tate(t, c2, d).invariants == inv({}));
  }
  // whereas the permutation lattice itself has Tate H^0 = H^2 = Z/2
  REQUIRE(tate(p, s3, 0).invariants == inv({2}));
  REQUIRE(tate(p, s3, 2).invariants == inv({2}));
}

TEST_CASE("invariants survive an equivariant unimodular change of basis") {
  auto c4 = make_group("C4", 4, {"(1 2 3 4)"});
  GroupHandle h = GroupHandle::from_group(c4);
  IntMat a = za(4).action_of(parse_cycles(4, "(1 2 3 4)"));
  std::vector<IntMat> ps = {IntMat{{1, 1, 0}, {0, 1, 1}, {0, 0, 1}},
                            IntMat{{1, 0, 0}, {2, 1, 0}, {0, 3, 1}},
                            IntMat{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}};
  for (const IntMat& p : ps) {
    IntMat conj = inverse_unimodular(p) * a * p;
    GLattice l2 = GLattice::from_generator_actions(h, "conjugated", {conj}, 3);
    for (int d = -1; d <= 2; ++d)
      REQUIRE(tate(za(4), c4, d).invariants == tate(l2, c4, d).invariants);
  }
}

TEST_CASE("complex plumbing: d o d = 0 and index maps") {
  auto s3 = GroupHandle::symmetric(3).fingroup();
  CochainComplex c = build_complex(za(3), s3, 3);
  REQUIRE(c.m == 5);
  REQUIRE(c.level(0) == 2);
  REQUIRE(c.level(2) == 50);
  REQUIRE(c.d1 * c.d0 == IntMat(c.d1.rows(), c.d0.cols()));
  REQUIRE(c.d2 * c.d1 == IntMat(c.d2.rows(), c.d1.cols()));
  REQUIRE(c.index2(1, 1, 0) == 0);
  REQUIRE(c.index2(2, 1, 1) == c.rank * c.m + 1);

  auto g9 = make_group("Gamma9", 6, {"(1 2 3)", "(4 5 6)"});
  CochainComplex c9 = build_complex(lambda(6), g9, 3);
  REQUIRE(c9.d1 * c9.d0 == IntMat(c9.d1.rows(), c9.d0.cols()));
  REQUIRE(c9.d2 * c9.d1 == IntMat(c9.d2.rows(), c9.d1.cols()));

  REQUIRE_THROWS_MATCHES(
      build_complex(lambda(6), g9, 3, 1000), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) { return e.is_guard(); }));
}

TEST_CASE("representative cocycles have the advertised order") {
  auto g9 = make_group("Gamma9", 6, {"(1 2 3)", "(4 5 6)"});
  CohomResult h2 = tate(lambda(6), g9, 2, {.generators = true});
  REQUIRE(h2.invariants == inv({3}));
  REQUIRE(h2.generators.size() == 1);
  const IntMat& gen = h2.generators[0];
  REQUIRE(gen.rows() == 5);
  REQUIRE(gen.cols() == 64);
  CochainComplex c = build_complex(lambda(6), g9, 3);
  // cocycle, not a coboundary, but three times it is one
  REQUIRE(c.d2 * detail::flatten(gen) == IntMat(c.d2.rows(), 1));
  REQUIRE_FALSE(solve_integer(c.d1, detail::flatten(gen)).has_value());
  REQUIRE(solve_integer(c.d1, detail::flatten(gen * Int(3))).has_value());

  // two independent order-3 classes for a doubled lattice
  GLattice dbl = direct_sum(za(3), za(3));
  auto s3 = GroupHandle::symmetric(3).fingroup();
  CohomResult hh = tate(dbl, s3, 1, {.generators = true});
  REQUIRE(hh.invariants == inv({3, 3}));
  REQUIRE(hh.generators.size() == 2);
  CochainComplex cd = build_complex(dbl, s3, 1);
  for (const IntMat& g : hh.generators) {
    REQUIRE_FALSE(solve_integer(cd.d0, detail::flatten(g)).has_value());
    REQUIRE(solve_integer(cd.d0, detail::flatten(g * Int(3))).has_value());
  }
}

TEST_CASE("restriction of cocycles") {
  auto g9 = make_group("Gamma9", 6, {"(1 2 3)", "(4 5 6)"});
  auto c3 = make_group("C3a", 6, {"(1 2 3)"});

  SECTION("the zero class restricts to a coboundary") {
    RestrictionResult r = restriction(lambda(6), g9, c3, 2, IntMat(5, 64));
    REQUIRE(r.coboundary);
    REQUIRE(r.restricted == IntMat(5, 4));
  }
  SECTION("the order-3 degree-2 class is already nontrivial on (1 2 3)") {
    CohomResult h2 = tate(lambda(6), g9, 2, {.generators = true});
    RestrictionResult r = restriction(lambda(6), g9, c3, 2, h2.generators[0]);
    REQUIRE_FALSE(r.coboundary);
  }
  SECTION("degree-1 classes of the blocked subgroup die on every cyclic") {
    auto t = block_group_8_2();
    CohomResult h1 = tate(za(8), t, 1, {.generators = true});
    REQUIRE(h1.invariants == inv({2}));
    for (const Subgroup& c : cyclic_subgroups(t)) {
      auto cg = std::make_shared<const FinGroup>(c.group());
      RestrictionResult r = restriction(za(8), t, cg, 1, h1.generators[0]);
      REQUIRE(r.coboundary);
    }
  }
  SECTION("junk input is rejected as not a cocycle") {
    IntMat junk(5, 64);
    junk.at(0, 0) = 1;
    REQUIRE_THROWS_MATCHES(restriction(lambda(6), g9, c3, 2, junk), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::not_a_cocycle;
                           }));
  }
  SECTION("non-subgroups are refused") {
    auto c2 = make_group("C2x", 6, {"(1 2)"});
    REQUIRE_THROWS_MATCHES(restriction(lambda(6), g9, c2, 2, IntMat(5, 64)), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::group_mismatch;
                           }));
  }
}

TEST_CASE("Sha") {
  auto g9 = make_group("Gamma9", 6, {"(1 2 3)", "(4 5 6)"});

  SECTION("degree 2 of the A5 weight lattice vanishes at order 9") {
    REQUIRE(sha(lambda(6), g9, 2).invariants == inv({}));
  }
  SECTION("degree 1 of ZA(5) at order 9 vanishes: the diagonal cycle sees it") {
    // H^1 = Z/3 by the orbit-gcd rule, and restriction to <(123)(456)> is
    // onto its Z/3, so nothing is everywhere-locally-trivial.
    REQUIRE(tate(za(6), g9, 1).invariants == inv({3}));
    REQUIRE(sha(za(6), g9, 1).invariants == inv({}));
  }
  SECTION("degree 2 of ZA(5) at order 9 vanishes") {
    // dimension shift through 0 -> ZA -> Z^6 -> Z -> 0 sends it into
    // Sha^1(Z) = 0
    REQUIRE(sha(za(6), g9, 2).invariants == inv({}));
  }
  SECTION("the blocked subgroup of Sym(8) has Sha^1 = Z/2 on the root lattice") {
    auto t = block_group_8_2();
    CohomResult s = sha(za(8), t, 1, {.generators = true});
    REQUIRE(s.invariants == inv({2}));
    REQUIRE(s.generators.size() == 1);
    // the witness class is a cocycle and not a coboundary
    CochainComplex c = build_complex(za(8), t, 1);
    REQUIRE_FALSE(solve_integer(c.d0, detail::flatten(s.generators[0])).has_value());
  }
  SECTION("over a cyclic group Sha is trivial by definition of the refinement") {
    auto c6 = make_group("C6", 6, {"(1 2 3 4 5 6)"});
    REQUIRE(sha(za(6), c6, 1).invariants == inv({}));
    REQUIRE(sha(lambda(6), c6, 2).invariants == inv({}));
  }
}

TEST_CASE("size guards refuse outsized requests") {
  auto a5 = make_group("A5", 5, {"(1 2 3)", "(3 4 5)"});
  REQUIRE(a5->order() == 60);
  GLattice big = tensor(za(5), lambda(5));
  REQUIRE(big.rank() == 16);
  // degree 2 wants 16 * 59^3 > 2e6 coordinates: refused
  REQUIRE_THROWS_MATCHES(tate(big, a5, 2), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == errc::size_guard && e.is_guard();
                         }));
  // degree 1 fits comfortably
  CohomResult h1 = tate(big, a5, 1);
  REQUIRE(h1.invariants.free_rank == 0);
  // the order x rank pre-guard
  REQUIRE_THROWS_MATCHES(tate(big, a5, 0, {.size_guard = 100}), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::size_guard; }));
}

TEST_CASE("results are cached") {
  auto g9 = make_group("Gamma9b", 6, {"(1 2 3)", "(4 5 6)"});
  GLattice l = lambda(6);
  CohomResult first = tate(l, g9, 2);
  CohomResult again = tate(l, g9, 2);
  REQUIRE(first.invariants == again.invariants);
  REQUIRE(first.subgroup == "Gamma9b");
}
