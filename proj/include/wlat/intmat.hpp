#pragma once

#include <gmpxx.h>

#include <initializer_list>
#include <string>
#include <vector>

#include "wlat/error.hpp"

namespace wlat {

using Int = mpz_class;

// Dense matrix over Z with arbitrary-precision entries. Row-major.
// Operations never mutate their inputs; they return fresh values.
class IntMat {
public:
  IntMat() : r_(0), c_(0) {}
  IntMat(int rows, int cols) : r_(rows), c_(cols), a_(size_t(rows) * cols) {
    if (rows < 0 || cols < 0) fail(errc::bad_params, "negative matrix dimension");
  }
  IntMat(std::initializer_list<std::initializer_list<long>> rows) {
    r_ = int(rows.size());
    c_ = r_ ? int(rows.begin()->size()) : 0;
    a_.reserve(size_t(r_) * c_);
    for (const auto& row : rows) {
      if (int(row.size()) != c_) fail(errc::bad_params, "ragged initializer");
      for (long x : row) a_.emplace_back(x);
    }
  }

  static IntMat identity(int n) {
    IntMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }
  static IntMat zero(int r, int c) { return IntMat(r, c); }
  static IntMat column(const std::vector<Int>& v) {
    IntMat m(int(v.size()), 1);
    for (size_t i = 0; i < v.size(); ++i) m.at(int(i), 0) = v[i];
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  const Int& at(int i, int j) const { return a_[size_t(i) * c_ + j]; }
  Int& at(int i, int j) { return a_[size_t(i) * c_ + j]; }

  bool operator==(const IntMat& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }
  bool operator!=(const IntMat& o) const { return !(*this == o); }

  bool is_zero() const {
    for (const Int& x : a_)
      if (x != 0) return false;
    return true;
  }
  bool is_identity() const {
    if (r_ != c_) return false;
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j)
        if (at(i, j) != (i == j ? 1 : 0)) return false;
    return true;
  }

  IntMat operator*(const IntMat& o) const {
    if (c_ != o.r_) fail(errc::bad_params, "matmul shape mismatch");
    IntMat out(r_, o.c_);
    Int t;
    for (int i = 0; i < r_; ++i)
      for (int k = 0; k < c_; ++k) {
        const Int& x = at(i, k);
        if (x == 0) continue;
        for (int j = 0; j < o.c_; ++j) {
          if (o.at(k, j) == 0) continue;
          t = x * o.at(k, j);
          out.at(i, j) += t;
        }
      }
    return out;
  }
  IntMat operator+(const IntMat& o) const {
    if (r_ != o.r_ || c_ != o.c_) fail(errc::bad_params, "matadd shape mismatch");
    IntMat out(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + o.a_[i];
    return out;
  }
  IntMat operator-(const IntMat& o) const {
    if (r_ != o.r_ || c_ != o.c_) fail(errc::bad_params, "matsub shape mismatch");
    IntMat out(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - o.a_[i];
    return out;
  }
  IntMat operator-() const {
    IntMat out(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = -a_[i];
    return out;
  }
  IntMat operator*(const Int& s) const {
    IntMat out(r_, c_);
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * s;
    return out;
  }

  IntMat transpose() const {
    IntMat out(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) out.at(j, i) = at(i, j);
    return out;
  }

  IntMat col(int j) const {
    IntMat out(r_, 1);
    for (int i = 0; i < r_; ++i) out.at(i, 0) = at(i, j);
    return out;
  }
  std::vector<Int> col_vec(int j) const {
    std::vector<Int> v(r_);
    for (int i = 0; i < r_; ++i) v[i] = at(i, j);
    return v;
  }
  IntMat cols_range(int j0, int n) const {
    IntMat out(r_, n);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < n; ++j) out.at(i, j) = at(i, j0 + j);
    return out;
  }

  static IntMat hstack(const IntMat& a, const IntMat& b) {
    if (a.rows() != b.rows()) fail(errc::bad_params, "hstack shape mismatch");
    IntMat out(a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
      for (int j = 0; j < b.cols(); ++j) out.at(i, a.cols() + j) = b.at(i, j);
    }
    return out;
  }
  static IntMat vstack(const IntMat& a, const IntMat& b) {
    if (a.cols() != b.cols()) fail(errc::bad_params, "vstack shape mismatch");
    IntMat out(a.rows() + b.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) out.at(a.rows() + i, j) = b.at(i, j);
    return out;
  }
  static IntMat block_diag(const IntMat& a, const IntMat& b) {
    IntMat out(a.rows() + b.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) out.at(a.rows() + i, a.cols() + j) = b.at(i, j);
    return out;
  }
  static IntMat kron(const IntMat& a, const IntMat& b) {
    IntMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) {
        if (a.at(i, j) == 0) continue;
        for (int k = 0; k < b.rows(); ++k)
          for (int l = 0; l < b.cols(); ++l)
            out.at(i * b.rows() + k, j * b.cols() + l) = a.at(i, j) * b.at(k, l);
      }
    return out;
  }

  std::vector<Int> apply(const std::vector<Int>& v) const {
    if (int(v.size()) != c_) fail(errc::bad_params, "apply shape mismatch");
    std::vector<Int> out(r_);
    for (int i = 0; i < r_; ++i) {
      Int s = 0;
      for (int j = 0; j < c_; ++j)
        if (at(i, j) != 0 && v[j] != 0) s += at(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

  std::string str() const {
    std::string s = "[";
    for (int i = 0; i < r_; ++i) {
      s += i ? "; " : "";
      for (int j = 0; j < c_; ++j) s += (j ? "," : "") + at(i, j).get_str();
    }
    return s + "]";
  }

  // Canonical byte form, used for digests and cache keys.
  void feed(std::string& sink) const {
    sink += std::to_string(r_) + "x" + std::to_string(c_) + ":";
    for (const Int& x : a_) {
      sink += x.get_str();
      sink += ',';
    }
  }

private:
  int r_, c_;
  std::vector<Int> a_;
};

inline IntMat operator*(const Int& s, const IntMat& m) { return m * s; }

}  // namespace wlat
