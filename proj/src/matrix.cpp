#include "dendro/matrix.hpp"

#include <stdexcept>

namespace dendro {

Rational rat(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational SpMat::at(int r, int c) const {
  auto it = entries.find({r, c});
  return it == entries.end() ? Rational(0) : it->second;
}

void SpMat::add(int r, int c, const Rational& v) {
  if (v == 0) return;
  auto it = entries.find({r, c});
  if (it == entries.end()) {
    entries.emplace(std::make_pair(r, c), v);
  } else {
    it->second += v;
    if (it->second == 0) entries.erase(it);
  }
}

void SpMat::set(int r, int c, const Rational& v) {
  if (v == 0)
    entries.erase({r, c});
  else
    entries[{r, c}] = v;
}

SpMat SpMat::ident(int n) {
  SpMat m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

SpMat SpMat::operator*(const SpMat& o) const {
  if (n_cols != o.n_rows) throw std::invalid_argument("SpMat: dimension mismatch in *");
  SpMat out(n_rows, o.n_cols);
  // group o's entries by row
  std::map<int, std::vector<std::pair<int, const Rational*>>> orow;
  for (auto& [rc, v] : o.entries) orow[rc.first].emplace_back(rc.second, &v);
  for (auto& [rc, v] : entries) {
    auto it = orow.find(rc.second);
    if (it == orow.end()) continue;
    for (auto& [c2, v2] : it->second) out.add(rc.first, c2, v * *v2);
  }
  return out;
}

SpMat SpMat::operator+(const SpMat& o) const {
  if (n_rows != o.n_rows || n_cols != o.n_cols)
    throw std::invalid_argument("SpMat: dimension mismatch in +");
  SpMat out = *this;
  for (auto& [rc, v] : o.entries) out.add(rc.first, rc.second, v);
  return out;
}

SpMat SpMat::operator-(const SpMat& o) const { return *this + o * Rational(-1); }

SpMat SpMat::operator*(const Rational& s) const {
  SpMat out(n_rows, n_cols);
  if (s == 0) return out;
  for (auto& [rc, v] : entries) out.entries[rc] = v * s;
  return out;
}

bool SpMat::operator==(const SpMat& o) const {
  return n_rows == o.n_rows && n_cols == o.n_cols && entries == o.entries;
}

SpMat SpMat::transpose() const {
  SpMat out(n_cols, n_rows);
  for (auto& [rc, v] : entries) out.entries[{rc.second, rc.first}] = v;
  return out;
}

std::vector<Rational> SpMat::apply(const std::vector<Rational>& v) const {
  if ((int)v.size() != n_cols) throw std::invalid_argument("SpMat: dimension mismatch in apply");
  std::vector<Rational> out(n_rows, Rational(0));
  for (auto& [rc, val] : entries)
    if (v[rc.second] != 0) out[rc.first] += val * v[rc.second];
  return out;
}

void SpMat::insert_block(int row0, int col0, const SpMat& o) {
  for (auto& [rc, v] : o.entries) add(row0 + rc.first, col0 + rc.second, v);
}

SpMat col_vector(const std::vector<Rational>& v) {
  SpMat m((int)v.size(), 1);
  for (size_t i = 0; i < v.size(); ++i) m.set((int)i, 0, v[i]);
  return m;
}

namespace {

using Row = std::map<int, Rational>;

// reduced row echelon form; returns pivot columns, rows modified in place
std::vector<int> rref(std::vector<Row>& rows, int n_cols) {
  std::vector<int> pivots;
  size_t rank = 0;
  for (int c = 0; c < n_cols && rank < rows.size(); ++c) {
    size_t p = rank;
    while (p < rows.size() && (rows[p].empty() || rows[p].begin()->first != c)) ++p;
    if (p == rows.size()) {
      // no row starting at c; but a later row may still have c as leading
      // entry only if its earlier entries were eliminated -- with full
      // elimination below, leading entries are exactly first keys
      continue;
    }
    std::swap(rows[rank], rows[p]);
    Rational inv = 1 / rows[rank].begin()->second;
    for (auto& [cc, v] : rows[rank]) v *= inv;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == rank) continue;
      auto it = rows[i].find(c);
      if (it == rows[i].end()) continue;
      Rational f = it->second;
      for (auto& [cc, v] : rows[rank]) {
        auto jt = rows[i].find(cc);
        if (jt == rows[i].end()) {
          rows[i][cc] = -f * v;
        } else {
          jt->second -= f * v;
          if (jt->second == 0) rows[i].erase(jt);
        }
      }
    }
    pivots.push_back(c);
    ++rank;
  }
  return pivots;
}

std::vector<Row> to_rows(const SpMat& m) {
  std::vector<Row> rows(m.n_rows);
  for (auto& [rc, v] : m.entries) rows[rc.first][rc.second] = v;
  return rows;
}

}  // namespace

int rank(const SpMat& m) {
  auto rows = to_rows(m);
  return (int)rref(rows, m.n_cols).size();
}

SpMat kernel_basis(const SpMat& m) {
  auto rows = to_rows(m);
  auto pivots = rref(rows, m.n_cols);
  std::vector<char> is_pivot(m.n_cols, 0);
  std::vector<int> pivot_row(m.n_cols, -1);
  for (size_t i = 0; i < pivots.size(); ++i) {
    is_pivot[pivots[i]] = 1;
    pivot_row[pivots[i]] = (int)i;
  }
  std::vector<int> free_cols;
  for (int c = 0; c < m.n_cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  SpMat out(m.n_cols, (int)free_cols.size());
  for (size_t j = 0; j < free_cols.size(); ++j) {
    int fc = free_cols[j];
    out.set(fc, (int)j, 1);
    for (int pc : pivots) {
      auto it = rows[pivot_row[pc]].find(fc);
      if (it != rows[pivot_row[pc]].end()) out.set(pc, (int)j, -it->second);
    }
  }
  return out;
}

SpMat image_basis(const SpMat& m) {
  auto rows = to_rows(m);
  auto pivots = rref(rows, m.n_cols);
  SpMat out(m.n_rows, (int)pivots.size());
  for (size_t j = 0; j < pivots.size(); ++j)
    for (int r = 0; r < m.n_rows; ++r) {
      Rational v = m.at(r, pivots[j]);
      if (v != 0) out.set(r, (int)j, v);
    }
  return out;
}

std::vector<Rational> solve(const SpMat& m, const std::vector<Rational>& b, bool& ok) {
  // eliminate on [m | b]
  auto rows = to_rows(m);
  for (int r = 0; r < m.n_rows; ++r)
    if (b[r] != 0) rows[r][m.n_cols] = b[r];
  auto pivots = rref(rows, m.n_cols);
  std::vector<Rational> x(m.n_cols, Rational(0));
  ok = true;
  for (auto& row : rows) {
    if (row.empty()) continue;
    if (row.begin()->first == m.n_cols) {
      ok = false;
      return {};
    }
  }
  for (size_t i = 0; i < pivots.size(); ++i) {
    auto it = rows[i].find(m.n_cols);
    if (it != rows[i].end()) x[pivots[i]] = it->second;
  }
  return x;
}

SpMat solve_matrix(const SpMat& m, const SpMat& b) {
  if (m.n_rows != b.n_rows) throw std::invalid_argument("solve_matrix: dimension mismatch");
  SpMat out(m.n_cols, b.n_cols);
  for (int c = 0; c < b.n_cols; ++c) {
    std::vector<Rational> col(b.n_rows, Rational(0));
    for (int r = 0; r < b.n_rows; ++r) col[r] = b.at(r, c);
    bool ok = false;
    auto x = solve(m, col, ok);
    if (!ok) throw std::invalid_argument("solve_matrix: inconsistent system");
    for (int r = 0; r < m.n_cols; ++r) out.set(r, c, x[r]);
  }
  return out;
}

}  // namespace dendro
