#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "wlat/error.hpp"
#include "wlat/intmat.hpp"

namespace wlat {

// Signed permutation on letters 0..n-1: maps basis vector e_i to
// sgn[i] * e_{img[i]}. Plain permutations have all signs +1.
struct SignedPerm {
  std::vector<int> img;
  std::vector<int8_t> sgn;

  SignedPerm() = default;
  explicit SignedPerm(std::vector<int> images)
      : img(std::move(images)), sgn(img.size(), 1) {}
  SignedPerm(std::vector<int> images, std::vector<int8_t> signs)
      : img(std::move(images)), sgn(std::move(signs)) {}

  int degree() const { return int(img.size()); }

  static SignedPerm identity(int n) {
    SignedPerm p;
    p.img.resize(n);
    p.sgn.assign(n, 1);
    for (int i = 0; i < n; ++i) p.img[i] = i;
    return p;
  }

  bool is_identity() const {
    for (int i = 0; i < degree(); ++i)
      if (img[i] != i || sgn[i] != 1) return false;
    return true;
  }

  SignedPerm inverse() const {
    SignedPerm p;
    p.img.resize(degree());
    p.sgn.resize(degree());
    for (int i = 0; i < degree(); ++i) {
      p.img[img[i]] = i;
      p.sgn[img[i]] = sgn[i];
    }
    return p;
  }

  // n x n matrix with column i equal to sgn[i] * e_{img[i]}.
  IntMat matrix() const {
    IntMat m(degree(), degree());
    for (int i = 0; i < degree(); ++i) m.at(img[i], i) = sgn[i];
    return m;
  }

  bool operator==(const SignedPerm& o) const { return img == o.img && sgn == o.sgn; }
  bool operator<(const SignedPerm& o) const {
    if (img != o.img) return img < o.img;
    return sgn < o.sgn;
  }

  // Cycle notation on 1-based letters; sign-flipped letters appended as
  // neg{..}. Identity prints as "e".
  std::string str() const {
    std::string s;
    std::vector<bool> seen(degree(), false);
    for (int i = 0; i < degree(); ++i) {
      if (seen[i] || img[i] == i) continue;
      s += '(';
      int j = i;
      for (;;) {
        seen[j] = true;
        s += std::to_string(j + 1);
        j = img[j];
        if (j == i) break;
        s += ' ';
      }
      s += ')';
    }
    std::string neg;
    for (int i = 0; i < degree(); ++i)
      if (sgn[i] < 0) neg += (neg.empty() ? "" : ",") + std::to_string(i + 1);
    if (!neg.empty()) s += "neg{" + neg + "}";
    return s.empty() ? "e" : s;
  }
};

// outer∘inner: apply inner first. Matches matrix multiplication:
// compose(v,w).matrix() == v.matrix() * w.matrix().
inline SignedPerm compose(const SignedPerm& outer, const SignedPerm& inner) {
  if (outer.degree() != inner.degree()) fail(errc::bad_params, "degree mismatch");
  SignedPerm p;
  p.img.resize(inner.degree());
  p.sgn.resize(inner.degree());
  for (int i = 0; i < inner.degree(); ++i) {
    p.img[i] = outer.img[inner.img[i]];
    p.sgn[i] = int8_t(inner.sgn[i] * outer.sgn[inner.img[i]]);
  }
  return p;
}

struct SignedPermHash {
  size_t operator()(const SignedPerm& p) const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](uint64_t x) {
      h ^= x;
      h *= 1099511628211ull;
    };
    for (int i = 0; i < p.degree(); ++i) {
      mix(uint64_t(p.img[i]) + 1);
      mix(p.sgn[i] < 0 ? 2 : 1);
    }
    return size_t(h);
  }
};

// Parses plain (unsigned) cycle notation like "(1 2 3)(4 5)" on 1-based
// letters; commas and whitespace both separate entries. "e" and "()" denote
// the identity.
inline SignedPerm parse_cycles(int degree, const std::string& text) {
  SignedPerm p = SignedPerm::identity(degree);
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && (std::isspace((unsigned char)text[pos]) || text[pos] == ','))
      ++pos;
  };
  skip_ws();
  if (text.substr(pos) == "e") return p;
  std::vector<bool> used(degree, false);
  while (pos < text.size()) {
    skip_ws();
    if (pos >= text.size()) break;
    if (text[pos] != '(') fail(errc::bad_params, "expected '(' in cycle notation: " + text);
    ++pos;
    std::vector<int> cyc;
    for (;;) {
      skip_ws();
      if (pos < text.size() && text[pos] == ')') {
        ++pos;
        break;
      }
      size_t start = pos;
      while (pos < text.size() && std::isdigit((unsigned char)text[pos])) ++pos;
      if (pos == start) fail(errc::bad_params, "expected letter in cycle notation: " + text);
      int letter = std::stoi(text.substr(start, pos - start));
      if (letter < 1 || letter > degree)
        fail(errc::bad_params, "letter " + std::to_string(letter) + " out of range 1.." +
                                   std::to_string(degree));
      if (used[letter - 1]) fail(errc::bad_params, "letter repeated in cycle notation: " + text);
      used[letter - 1] = true;
      cyc.push_back(letter - 1);
    }
    for (size_t i = 0; i < cyc.size(); ++i) p.img[cyc[i]] = cyc[(i + 1) % cyc.size()];
    skip_ws();
  }
  return p;
}

}  // namespace wlat
