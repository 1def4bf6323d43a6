#include "dendro/complex.hpp"

#include <functional>
#include <limits>
#include <stdexcept>

namespace dendro {

int ChainComplex::dim(int n) const {
  auto it = dims.find(n);
  return it == dims.end() ? 0 : it->second;
}

SpMat ChainComplex::boundary(int n) const {
  auto it = d.find(n);
  if (it != d.end()) return it->second;
  return SpMat(dim(n - 1), dim(n));
}

void ChainComplex::set_dim(int n, int k) {
  if (k == 0)
    dims.erase(n);
  else
    dims[n] = k;
}

int ChainComplex::min_degree() const {
  for (auto& [n, k] : dims)
    if (k) return n;
  return 0;
}

int ChainComplex::max_degree() const {
  int m = 0;
  for (auto& [n, k] : dims)
    if (k) m = n;
  return m;
}

int ChainComplex::total_dim() const {
  int t = 0;
  for (auto& [n, k] : dims) t += k;
  return t;
}

bool ChainComplex::validate_d_squared() const {
  for (auto& [n, k] : dims) {
    SpMat m = boundary(n - 1) * boundary(n);
    if (!m.is_zero()) return false;
  }
  return true;
}

std::map<int, int> ChainComplex::homology_dims() const {
  if (dims.empty()) return {};
  return homology_dims(min_degree(), max_degree());
}

std::map<int, int> ChainComplex::homology_dims(int lo, int hi) const {
  std::map<int, int> h;
  for (int n = lo; n <= hi; ++n) {
    int k = dim(n) - rank(boundary(n)) - rank(boundary(n + 1));
    if (k) h[n] = k;
  }
  return h;
}

SpMat ChainMap::mat(int n) const {
  auto it = mats.find(n);
  if (it != mats.end()) return it->second;
  return SpMat(dst->dim(n), src->dim(n));
}

bool ChainMap::is_chain_map() const {
  int lo = std::min(src->min_degree(), dst->min_degree());
  int hi = std::max(src->max_degree(), dst->max_degree());
  for (int n = lo; n <= hi + 1; ++n)
    if (!(dst->boundary(n) * mat(n) == mat(n - 1) * src->boundary(n))) return false;
  return true;
}

ChainComplex mapping_cone(const ChainMap& f) {
  const ChainComplex &C = *f.src, &D = *f.dst;
  ChainComplex cone;
  int lo = std::min(C.min_degree(), D.min_degree());
  int hi = std::max(C.max_degree(), D.max_degree()) + 1;
  for (int n = lo; n <= hi; ++n) cone.set_dim(n, C.dim(n - 1) + D.dim(n));
  for (int n = lo; n <= hi; ++n) {
    SpMat m(cone.dim(n - 1), cone.dim(n));
    m.insert_block(0, 0, C.boundary(n - 1) * Rational(-1));
    m.insert_block(C.dim(n - 2), 0, f.mat(n - 1));
    m.insert_block(C.dim(n - 2), C.dim(n - 1), D.boundary(n));
    if (m.n_rows && m.n_cols) cone.d[n] = m;
  }
  return cone;
}

bool quasi_iso_in_range(const ChainMap& f, int lo, int hi) {
  ChainComplex cone = mapping_cone(f);
  for (int n = lo; n <= hi + 1; ++n)
    if (cone.dim(n) - rank(cone.boundary(n)) - rank(cone.boundary(n + 1)) != 0) return false;
  return true;
}

TensorLayout::TensorLayout(std::vector<const ChainComplex*> fs, int lo, int hi)
    : factors(std::move(fs)) {
  std::vector<int> degs(factors.size()), inds(factors.size());
  // enumerate with degree tuples outermost so the ordering is lexicographic
  // in (p_1..p_k) then (i_1..i_k)
  std::function<void(size_t)> rec_degs = [&](size_t k) {
    if (k == factors.size()) {
      int total = 0;
      for (int p : degs) total += p;
      if (total < lo || total > hi) return;
      std::function<void(size_t)> rec_inds = [&](size_t j) {
        if (j == factors.size()) {
          auto key = std::make_pair(degs, inds);
          index[total][key] = (int)basis[total].size();
          basis[total].push_back(key);
          return;
        }
        for (int i = 0; i < factors[j]->dim(degs[j]); ++i) {
          inds[j] = i;
          rec_inds(j + 1);
        }
      };
      rec_inds(0);
      return;
    }
    for (auto& [p, dim] : factors[k]->dims) {
      if (!dim) continue;
      degs[k] = p;
      rec_degs(k + 1);
    }
  };
  rec_degs(0);
}

int TensorLayout::dim(int n) const {
  auto it = basis.find(n);
  return it == basis.end() ? 0 : (int)it->second.size();
}

int TensorLayout::idx(int n, const std::vector<int>& degs, const std::vector<int>& inds) const {
  auto it = index.find(n);
  if (it == index.end()) throw std::invalid_argument("TensorLayout::idx: bad degree");
  auto jt = it->second.find({degs, inds});
  if (jt == it->second.end()) throw std::invalid_argument("TensorLayout::idx: bad element");
  return jt->second;
}

ChainComplex TensorLayout::complex() const {
  ChainComplex out;
  for (auto& [n, b] : basis) out.set_dim(n, (int)b.size());
  for (auto& [n, b] : basis) {
    if (!basis.count(n - 1)) continue;  // truncated below: boundary is dropped
    SpMat m(dim(n - 1), dim(n));
    for (size_t col = 0; col < b.size(); ++col) {
      auto [degs, inds] = b[col];
      int sign = 1;
      for (size_t k = 0; k < factors.size(); ++k) {
        SpMat dk = factors[k]->boundary(degs[k]);
        for (auto& [rc, v] : dk.entries) {
          if (rc.second != inds[k]) continue;
          auto ndegs = degs;
          auto ninds = inds;
          ndegs[k] -= 1;
          ninds[k] = rc.first;
          m.add(idx(n - 1, ndegs, ninds), (int)col, Rational(sign) * v);
        }
        if (degs[k] % 2 != 0) sign = -sign;
      }
    }
    if (m.n_rows && m.n_cols) out.d[n] = m;
  }
  return out;
}

}  // namespace dendro
