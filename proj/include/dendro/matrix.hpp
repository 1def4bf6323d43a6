#pragma once
// Sparse matrices over the rationals, with exact elimination.

#include <gmpxx.h>

#include <map>
#include <utility>
#include <vector>

namespace dendro {

using Rational = mpq_class;

Rational rat(long num, long den = 1);

struct SpMat {
  int n_rows = 0;
  int n_cols = 0;
  std::map<std::pair<int, int>, Rational> entries;  // only nonzero

  SpMat() = default;
  SpMat(int r, int c) : n_rows(r), n_cols(c) {}

  Rational at(int r, int c) const;
  void add(int r, int c, const Rational& v);  // accumulate, drop zeros
  void set(int r, int c, const Rational& v);
  bool is_zero() const { return entries.empty(); }

  static SpMat ident(int n);
  static SpMat zero(int r, int c) { return SpMat(r, c); }

  SpMat operator*(const SpMat& o) const;
  SpMat operator+(const SpMat& o) const;
  SpMat operator-(const SpMat& o) const;
  SpMat operator*(const Rational& s) const;
  bool operator==(const SpMat& o) const;

  SpMat transpose() const;
  std::vector<Rational> apply(const std::vector<Rational>& v) const;

  // block placement: copy o into *this with offsets
  void insert_block(int row0, int col0, const SpMat& o);
};

// column vector helpers
SpMat col_vector(const std::vector<Rational>& v);

int rank(const SpMat& m);
// basis of the right kernel, as columns
SpMat kernel_basis(const SpMat& m);
// basis of the column space, as columns (subset of input columns, echelon-reduced)
SpMat image_basis(const SpMat& m);

// solve m x = b; nullopt-style: returns empty vector and sets ok=false if unsolvable
std::vector<Rational> solve(const SpMat& m, const std::vector<Rational>& b, bool& ok);
// X with m X = b for each column of b; throws if unsolvable
SpMat solve_matrix(const SpMat& m, const SpMat& b);

}  // namespace dendro
