#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "wlat/sperm.hpp"

namespace wlat {

inline constexpr int kDefaultClosureBound = 10080;
inline constexpr int kDefaultSubgroupBound = 256;

// Fully enumerated finite group of signed permutations. Element 0 is the
// identity; ordering is breadth-first discovery order from the generators.
struct FinGroup {
  std::string label;
  int degree = 0;
  std::vector<SignedPerm> elems;
  std::vector<int> gens;  // element indices of the generators
  std::vector<uint16_t> mul;
  std::vector<int> inv;
  // Discovery links: elems[k] == compose(elems[link[k].first], generator
  // link[k].second). Identity carries (-1,-1).
  std::vector<std::pair<int, int>> link;
  std::unordered_map<SignedPerm, int, SignedPermHash> index;

  int order() const { return int(elems.size()); }
  int mulIdx(int a, int b) const { return mul[size_t(a) * elems.size() + size_t(b)]; }
  int invIdx(int a) const { return inv[a]; }
  int index_of(const SignedPerm& p) const {
    auto it = index.find(p);
    return it == index.end() ? -1 : it->second;
  }
  bool contains(const SignedPerm& p) const { return index.count(p) != 0; }

  // Generator word (indices into gens) whose left-to-right product is
  // elems[k]; empty for the identity.
  std::vector<int> word(int k) const {
    std::vector<int> w;
    while (k != 0) {
      w.push_back(link[k].second);
      k = link[k].first;
    }
    std::reverse(w.begin(), w.end());
    return w;
  }
};

inline FinGroup group_from_generators(const std::string& label, int degree,
                                      std::vector<SignedPerm> gens,
                                      int bound = kDefaultClosureBound) {
  if (degree < 0) fail(errc::bad_params, "negative degree");
  for (const SignedPerm& g : gens) {
    if (g.degree() != degree) fail(errc::bad_params, "generator degree mismatch");
    std::vector<bool> hit(degree, false);
    for (int i = 0; i < degree; ++i) {
      if (g.img[i] < 0 || g.img[i] >= degree || hit[g.img[i]])
        fail(errc::bad_params, "generator is not a bijection");
      hit[g.img[i]] = true;
      if (g.sgn[i] != 1 && g.sgn[i] != -1) fail(errc::bad_params, "generator sign not ±1");
    }
  }
  // Drop identity generators and duplicates (they only pad words).
  {
    std::vector<SignedPerm> uniq;
    for (SignedPerm& g : gens)
      if (!g.is_identity() && std::find(uniq.begin(), uniq.end(), g) == uniq.end())
        uniq.push_back(std::move(g));
    gens = std::move(uniq);
  }

  FinGroup fg;
  fg.label = label;
  fg.degree = degree;
  fg.elems.push_back(SignedPerm::identity(degree));
  fg.link.emplace_back(-1, -1);
  fg.index.emplace(fg.elems[0], 0);
  for (size_t head = 0; head < fg.elems.size(); ++head) {
    for (size_t gi = 0; gi < gens.size(); ++gi) {
      SignedPerm next = compose(fg.elems[head], gens[gi]);
      if (fg.index.count(next)) continue;
      if (int(fg.elems.size()) >= bound || fg.elems.size() >= 65535)
        fail(errc::closure_bound, "group closure exceeds bound " + std::to_string(bound) +
                                      " (label " + label + ")");
      fg.index.emplace(next, int(fg.elems.size()));
      fg.link.emplace_back(int(head), int(gi));
      fg.elems.push_back(std::move(next));
    }
  }

  const int n = fg.order();
  fg.mul.resize(size_t(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int c = fg.index_of(compose(fg.elems[a], fg.elems[b]));
      if (c < 0) fail(errc::hypothesis_failed, "closure not closed under multiplication");
      fg.mul[size_t(a) * n + b] = uint16_t(c);
    }
  fg.inv.resize(n, -1);
  for (int a = 0; a < n; ++a) {
    if (fg.mulIdx(0, a) != a || fg.mulIdx(a, 0) != a)
      fail(errc::hypothesis_failed, "identity law failed");
    for (int b = 0; b < n; ++b)
      if (fg.mulIdx(a, b) == 0) {
        fg.inv[a] = b;
        break;
      }
    if (fg.inv[a] < 0) fail(errc::hypothesis_failed, "no inverse found");
  }
  for (const SignedPerm& g : gens) fg.gens.push_back(fg.index_of(g));

  // Associativity spot-check on random triples; the table is built from
  // genuine permutation composition so this is a tripwire, not a proof.
  std::mt19937 rng{uint32_t(n)};
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int t = 0; t < 100; ++t) {
    int a = pick(rng), b = pick(rng), c = pick(rng);
    if (fg.mulIdx(fg.mulIdx(a, b), c) != fg.mulIdx(a, fg.mulIdx(b, c)))
      fail(errc::hypothesis_failed, "associativity spot-check failed");
  }
  return fg;
}

// Descriptor for a (possibly large) ambient group: label, degree, generators
// and the order known by formula. Full enumeration is lazy and shared, so
// Sym(8) or W(D_6) can act on lattices without ever being enumerated.
class GroupHandle {
 public:
  std::string label;
  int degree = 0;
  std::vector<SignedPerm> gens;
  Int order;

  GroupHandle() : cell_(std::make_shared<Cell>()) {}

  std::shared_ptr<const FinGroup> fingroup(int bound = kDefaultClosureBound) const {
    std::lock_guard<std::mutex> lk(cell_->m);
    if (!cell_->fg)
      cell_->fg =
          std::make_shared<const FinGroup>(group_from_generators(label, degree, gens, bound));
    return cell_->fg;
  }

  bool enumerated() const {
    std::lock_guard<std::mutex> lk(cell_->m);
    return cell_->fg != nullptr;
  }

  static GroupHandle symmetric(int n) {
    if (n < 1) fail(errc::bad_params, "symmetric group needs n >= 1");
    GroupHandle h;
    h.label = "Sym(" + std::to_string(n) + ")";
    h.degree = n;
    if (n >= 2) {
      std::vector<int> t(n), c(n);
      std::iota(t.begin(), t.end(), 0);
      std::swap(t[0], t[1]);
      for (int i = 0; i < n; ++i) c[i] = (i + 1) % n;
      h.gens = {SignedPerm(t), SignedPerm(c)};
    }
    h.order = 1;
    for (int i = 2; i <= n; ++i) h.order *= i;
    return h;
  }

  // W(D_n): permutations of n letters together with an even number of sign
  // changes; generated by adjacent transpositions plus the double flip on the
  // last two letters. Order 2^{n-1} n!.
  static GroupHandle weylD(int n) {
    if (n < 2) fail(errc::bad_params, "weylD needs n >= 2");
    GroupHandle h;
    h.label = "W(D" + std::to_string(n) + ")";
    h.degree = n;
    for (int i = 0; i + 1 < n; ++i) {
      std::vector<int> t(n);
      std::iota(t.begin(), t.end(), 0);
      std::swap(t[i], t[i + 1]);
      h.gens.emplace_back(t);
    }
    SignedPerm flip = SignedPerm::identity(n);
    flip.sgn[n - 2] = flip.sgn[n - 1] = -1;
    h.gens.push_back(flip);
    h.order = 1;
    for (int i = 2; i <= n; ++i) h.order *= i;
    h.order <<= (n - 1);
    return h;
  }

  // Direct product acting on disjoint letter blocks.
  static GroupHandle product(const GroupHandle& a, const GroupHandle& b) {
    GroupHandle h;
    h.label = a.label + " x " + b.label;
    h.degree = a.degree + b.degree;
    for (const SignedPerm& g : a.gens) {
      SignedPerm e = SignedPerm::identity(h.degree);
      for (int i = 0; i < a.degree; ++i) e.img[i] = g.img[i], e.sgn[i] = g.sgn[i];
      h.gens.push_back(std::move(e));
    }
    for (const SignedPerm& g : b.gens) {
      SignedPerm e = SignedPerm::identity(h.degree);
      for (int i = 0; i < b.degree; ++i) e.img[a.degree + i] = a.degree + g.img[i], e.sgn[a.degree + i] = g.sgn[i];
      h.gens.push_back(std::move(e));
    }
    h.order = a.order * b.order;
    return h;
  }

  static GroupHandle from_generators(const std::string& label, int degree,
                                     std::vector<SignedPerm> gens,
                                     int bound = kDefaultClosureBound) {
    GroupHandle h;
    h.label = label;
    h.degree = degree;
    h.gens = std::move(gens);
    // Close eagerly: the order of an ad-hoc group is not known by formula.
    auto fg = h.fingroup(bound);
    h.order = fg->order();
    return h;
  }

  static GroupHandle from_group(std::shared_ptr<const FinGroup> fg) {
    GroupHandle h;
    h.label = fg->label;
    h.degree = fg->degree;
    for (int gi : fg->gens) h.gens.push_back(fg->elems[gi]);
    h.order = fg->order();
    h.cell_->fg = std::move(fg);
    return h;
  }

 private:
  struct Cell {
    mutable std::mutex m;
    std::shared_ptr<const FinGroup> fg;
  };
  std::shared_ptr<Cell> cell_;
};

struct Subgroup {
  std::shared_ptr<const FinGroup> parent;
  std::vector<int> members;  // sorted element indices, always containing 0
  std::vector<int> gens;     // minimal-found generating set (element indices)

  int order() const { return int(members.size()); }

  std::vector<SignedPerm> gen_perms() const {
    std::vector<SignedPerm> out;
    for (int g : gens) out.push_back(parent->elems[g]);
    return out;
  }
  std::vector<SignedPerm> member_perms() const {
    std::vector<SignedPerm> out;
    for (int m : members) out.push_back(parent->elems[m]);
    return out;
  }
  bool contains_index(int k) const {
    return std::binary_search(members.begin(), members.end(), k);
  }

  std::string describe() const {
    std::string s = "<";
    for (size_t i = 0; i < gens.size(); ++i)
      s += (i ? "," : "") + parent->elems[gens[i]].str();
    return s + "> in " + parent->label;
  }

  // The subgroup as a standalone group on the same letters.
  FinGroup group() const {
    return group_from_generators(describe(), parent->degree, gen_perms(),
                                 parent->order() + 1);
  }
};

namespace detail {

using Bits = std::vector<uint64_t>;

struct BitsHash {
  size_t operator()(const Bits& b) const {
    uint64_t h = 1469598103934665603ull;
    for (uint64_t w : b) {
      h ^= w;
      h *= 1099511628211ull;
    }
    return size_t(h);
  }
};

inline bool bit_subset(const Bits& a, const Bits& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

// Members of <gens> inside an enumerated group: index-word breadth-first
// closure, O(|result| * |gens|) table lookups.
inline std::vector<int> close_gens(const FinGroup& g, const std::vector<int>& gens) {
  std::vector<int> v{0};
  Bits seen((g.order() + 63) / 64, 0);
  seen[0] |= 1;
  for (size_t head = 0; head < v.size(); ++head)
    for (int gi : gens) {
      int t = g.mulIdx(v[head], gi);
      if (!(seen[t / 64] >> (t % 64) & 1)) {
        seen[t / 64] |= uint64_t(1) << (t % 64);
        v.push_back(t);
      }
    }
  std::sort(v.begin(), v.end());
  return v;
}

inline Bits to_bits(const std::vector<int>& members, int order) {
  Bits b((order + 63) / 64, 0);
  for (int m : members) b[m / 64] |= uint64_t(1) << (m % 64);
  return b;
}

}  // namespace detail

inline std::vector<Subgroup> cyclic_subgroups(std::shared_ptr<const FinGroup> g) {
  std::unordered_set<detail::Bits, detail::BitsHash> seen;
  std::vector<Subgroup> out;
  for (int a = 0; a < g->order(); ++a) {
    std::vector<int> mem{0};
    for (int x = a; x != 0; x = g->mulIdx(x, a)) mem.push_back(x);
    std::sort(mem.begin(), mem.end());
    if (!seen.insert(detail::to_bits(mem, g->order())).second) continue;
    Subgroup s;
    s.parent = g;
    s.members = std::move(mem);
    if (a != 0) s.gens = {a};
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const Subgroup& x, const Subgroup& y) {
    if (x.order() != y.order()) return x.order() < y.order();
    return x.members < y.members;
  });
  return out;
}

// Cyclic subgroups not strictly contained in a larger cyclic subgroup.
// Restriction maps factor through these, so kernel intersections over all
// cyclic subgroups can be taken over this subfamily alone.
inline std::vector<Subgroup> maximal_cyclic_subgroups(std::shared_ptr<const FinGroup> g) {
  std::vector<Subgroup> cyc = cyclic_subgroups(g);
  std::vector<detail::Bits> bits;
  for (const Subgroup& s : cyc) bits.push_back(detail::to_bits(s.members, g->order()));
  std::vector<Subgroup> out;
  for (size_t i = 0; i < cyc.size(); ++i) {
    bool maximal = true;
    for (size_t j = 0; j < cyc.size() && maximal; ++j)
      if (i != j && cyc[j].order() > cyc[i].order() && detail::bit_subset(bits[i], bits[j]))
        maximal = false;
    if (maximal) out.push_back(cyc[i]);
  }
  return out;
}

// Every subgroup, by closing the cyclic subgroups under pairwise join.
//
// Pruning: any subgroup is the join of the cyclic subgroups it contains,
// added in increasing index order, so a record only ever needs joins with
// cyclics of larger index than the last one in some generating chain. When a
// subgroup is rediscovered through a smaller last index, its join window
// reopens and it is re-queued; the window [last_cyc, done_from) guarantees no
// join runs twice.
inline std::vector<Subgroup> all_subgroups(std::shared_ptr<const FinGroup> g,
                                           int bound = kDefaultSubgroupBound) {
  if (g->order() > bound)
    fail(errc::subgroup_bound, "subgroup enumeration refused: order " +
                                   std::to_string(g->order()) + " exceeds bound " +
                                   std::to_string(bound));
  struct Rec {
    std::vector<int> members;
    detail::Bits bits;
    std::vector<int> gens;  // generating seed, minimized at the end
    int last_cyc;
    int done_from;  // joins with cyclic index >= done_from already executed
    bool queued;
  };
  std::vector<Rec> recs;
  std::unordered_map<detail::Bits, int, detail::BitsHash> seen;

  std::vector<Subgroup> cyc = cyclic_subgroups(g);
  std::vector<int> cyc_gen(cyc.size(), -1);  // single generator per nontrivial cyclic
  const int ncyc = int(cyc.size());
  for (int ci = 0; ci < ncyc; ++ci) {
    const Subgroup& s = cyc[ci];
    detail::Bits b = detail::to_bits(s.members, g->order());
    seen.emplace(b, int(recs.size()));
    recs.push_back({s.members, std::move(b), s.gens, ci, ncyc, true});
    if (!s.gens.empty()) cyc_gen[ci] = s.gens[0];
  }

  std::queue<int> work;
  for (int i = 0; i < int(recs.size()); ++i) work.push(i);
  const size_t words = (g->order() + 63) / 64;
  auto has = [](const detail::Bits& b, int x) { return (b[x / 64] >> (x % 64)) & 1; };

  while (!work.empty()) {
    const int idx = work.front();
    work.pop();
    recs[idx].queued = false;
    const int lo = recs[idx].last_cyc, hi = recs[idx].done_from;
    recs[idx].done_from = std::min(hi, lo + 1);
    for (int ci = lo + 1; ci < hi; ++ci) {
      const int c = cyc_gen[ci];
      if (c < 0 || has(recs[idx].bits, c)) continue;
      // BFS the join from H's members; products inside H are skipped.
      std::vector<int> v = recs[idx].members;
      detail::Bits b = recs[idx].bits;
      std::vector<int> gens = recs[idx].gens;
      gens.push_back(c);
      const size_t nh = v.size();
      for (size_t head = 0; head < v.size(); ++head) {
        if (head < nh) {
          int t = g->mulIdx(v[head], c);
          if (!has(b, t)) {
            b[t / 64] |= uint64_t(1) << (t % 64);
            v.push_back(t);
          }
        } else {
          for (int gi : gens) {
            int t = g->mulIdx(v[head], gi);
            if (!has(b, t)) {
              b[t / 64] |= uint64_t(1) << (t % 64);
              v.push_back(t);
            }
          }
        }
      }
      auto [it, fresh] = seen.emplace(b, int(recs.size()));
      if (fresh) {
        std::sort(v.begin(), v.end());
        recs.push_back({std::move(v), std::move(b), std::move(gens), ci, ncyc, true});
        work.push(int(recs.size()) - 1);
      } else if (recs[it->second].last_cyc > ci) {
        recs[it->second].last_cyc = ci;
        if (!recs[it->second].queued) {
          recs[it->second].queued = true;
          work.push(it->second);
        }
      }
    }
  }
  (void)words;

  std::vector<Subgroup> out;
  for (Rec& r : recs) {
    // Greedy generator minimization: drop whatever regenerates without.
    for (size_t i = r.gens.size(); i-- > 0;) {
      std::vector<int> rest = r.gens;
      rest.erase(rest.begin() + i);
      if (detail::close_gens(*g, rest) == r.members) r.gens = std::move(rest);
    }
    std::sort(r.gens.begin(), r.gens.end());
    Subgroup s;
    s.parent = g;
    s.members = std::move(r.members);
    s.gens = std::move(r.gens);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const Subgroup& x, const Subgroup& y) {
    if (x.order() != y.order()) return x.order() < y.order();
    return x.members < y.members;
  });
  return out;
}

// Subgroup generated by the given elements (as permutations) of an
// enumerated parent.
inline Subgroup subgroup_of(std::shared_ptr<const FinGroup> g,
                            const std::vector<SignedPerm>& seed) {
  std::vector<int> gens;
  for (const SignedPerm& p : seed) {
    int k = g->index_of(p);
    if (k < 0) fail(errc::group_mismatch, "element " + p.str() + " not in " + g->label);
    if (k != 0) gens.push_back(k);
  }
  Subgroup s;
  s.parent = g;
  s.gens = gens;
  s.members = detail::close_gens(*g, gens);
  return s;
}

inline Subgroup whole_subgroup(std::shared_ptr<const FinGroup> g) {
  Subgroup s;
  s.parent = g;
  s.members.resize(g->order());
  std::iota(s.members.begin(), s.members.end(), 0);
  s.gens = g->gens;
  return s;
}

// Orbit partition of the letters {0..degree-1} under the images of the given
// permutations; signs are ignored. Orbits are sorted, smallest member first.
inline std::vector<std::vector<int>> orbit_partition(int degree,
                                                     const std::vector<SignedPerm>& perms) {
  std::vector<int> root(degree);
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (const SignedPerm& p : perms) {
    if (p.degree() != degree) fail(errc::bad_params, "orbit degree mismatch");
    for (int i = 0; i < degree; ++i) {
      int a = find(i), b = find(p.img[i]);
      if (a != b) root[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::vector<int>> orb(degree);
  for (int i = 0; i < degree; ++i) orb[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& o : orb)
    if (!o.empty()) out.push_back(std::move(o));
  return out;
}

inline std::vector<std::vector<int>> orbits(const FinGroup& g) {
  std::vector<SignedPerm> gens;
  for (int gi : g.gens) gens.push_back(g.elems[gi]);
  return orbit_partition(g.degree, gens);
}

inline std::vector<std::vector<int>> orbits(const Subgroup& s) {
  return orbit_partition(s.parent->degree, s.gen_perms());
}

}  // namespace wlat
